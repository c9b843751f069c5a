#include "hjb/models.hpp"

#include <cmath>
#include <stdexcept>

namespace hjb {

namespace {

// (exp(x tau) - 1) / x with its tau limit; removable singularity at x = 0.
double expm1_ratio(double x, double tau) {
    if (std::fabs(x) < 1e-14) return tau;
    return std::expm1(x * tau) / x;
}

} // namespace

// ---------------------------------------------------------------------------
// Uncertain volatility
// ---------------------------------------------------------------------------

double UvParams::query_point() const { return std::log(spot); }

double uv_payoff(double S, const UvParams& p) {
    return std::max(S - p.strike_lo, 0.0) - 2.0 * std::max(S - p.strike, 0.0) +
           std::max(S - p.strike_hi, 0.0);
}

OperatorCoefficients uv_coefficients(double sigma, const UvParams& p, int node_count) {
    const double a = 0.5 * sigma * sigma;
    const double b = p.r - 0.5 * sigma * sigma;
    return OperatorCoefficients::constant(node_count, a, b, p.r, 0.0);
}

BoundaryCondition uv_boundaries(const UvParams& p) {
    BoundaryCondition bc;
    bc.left = DiscountOdeBc{p.r};
    bc.right = DirichletBc{[](double) { return 0.0; }};
    return bc;
}

Mesh1D uv_shared_mesh(const UvParams& p, int node_count) {
    const double sigma_bar = 0.5 * (p.sigma_min + p.sigma_max);
    return uv_policy_mesh(sigma_bar, p, node_count);
}

Mesh1D uv_policy_mesh(double sigma, const UvParams& p, int node_count) {
    const double center = std::log(p.strike);
    return Mesh1D::uniform(center - 4.0 * sigma, center + 4.0 * sigma, node_count);
}

SwitchingProblem uv_problem(const UvParams& p, int node_count, MeshStrategy strategy) {
    SwitchingProblem problem;
    problem.terminal = [p](double x) { return uv_payoff(std::exp(x), p); };
    problem.query_point = p.query_point();
    for (double sigma : {p.sigma_min, p.sigma_max}) {
        PolicySpec spec;
        spec.control = sigma;
        spec.mesh = strategy == MeshStrategy::shared ? uv_shared_mesh(p, node_count)
                                                     : uv_policy_mesh(sigma, p, node_count);
        spec.coeffs = uv_coefficients(sigma, p, node_count);
        spec.bc = uv_boundaries(p);
        problem.policies.push_back(std::move(spec));
    }
    return problem;
}

// ---------------------------------------------------------------------------
// Mean-variance
// ---------------------------------------------------------------------------

double mv_terminal(double W, double gamma) {
    const double d = W - 0.5 * gamma;
    return d * d;
}

double mv_control_transform(double p, double W, double omega) {
    if (omega <= 0.0) throw std::invalid_argument("mv_control_transform: omega must be positive");
    return p * W / std::max(1.0, omega * std::fabs(W));
}

OperatorCoefficients mv_coefficients(double q, const MvParams& p, const Mesh1D& mesh) {
    const int n = mesh.size();
    OperatorCoefficients c = OperatorCoefficients::constant(n, 0.0, 0.0, 0.0, 0.0);
    for (int i = 0; i < n; ++i) {
        const double W = mesh[i];
        const double scale = std::max(1.0, p.omega * std::fabs(W));
        const size_t k = static_cast<size_t>(i);
        c.a[k] = 0.5 * p.sigma * p.sigma * q * q * scale * scale;
        c.b[k] = p.pi + W * p.r + q * scale * p.sigma * p.xi;
    }
    return c;
}

OperatorCoefficients mv_bounded_coefficients(double p_hat, const MvParams& p,
                                             const Mesh1D& mesh) {
    const int n = mesh.size();
    OperatorCoefficients c = OperatorCoefficients::constant(n, 0.0, 0.0, 0.0, 0.0);
    for (int i = 0; i < n; ++i) {
        const double W = mesh[i];
        const size_t k = static_cast<size_t>(i);
        c.a[k] = 0.5 * p.sigma * p.sigma * p_hat * p_hat * W * W;
        c.b[k] = p.pi + W * (p.r + p_hat * p.sigma * p.xi);
    }
    return c;
}

double mv_asymptotic_value(double W, double tau, double a, double b, const MvParams& p) {
    const double a2b = a * a + 2.0 * b;
    const double denom = a * a + b;
    if (std::fabs(denom) < 1e-14)
        throw std::domain_error("mv_asymptotic_value: resonant exponents a^2 + b = 0");
    const double c = 2.0 * p.pi / denom;
    const double alpha = std::exp(a2b * tau);
    const double beta = -(p.gamma + c) * std::exp(b * tau) + c * alpha;
    const double delta = -p.pi * (p.gamma + c) * expm1_ratio(b, tau) +
                         p.pi * c * expm1_ratio(a2b, tau) +
                         0.25 * p.gamma * p.gamma;
    return alpha * W * W + beta * W + delta;
}

double mv_asymptotic_mean(double W, double tau, double b, double pi) {
    return std::exp(b * tau) * W + pi * expm1_ratio(b, tau);
}

double mv_lq_value(double W, double tau, const MvParams& p) {
    const double grown = W * std::exp(p.r * tau) + p.pi * expm1_ratio(p.r, tau) -
                         0.5 * p.gamma;
    return std::exp(-p.xi * p.xi * tau) * grown * grown;
}

double mv_lq_mean(double W, double tau, const MvParams& p) {
    const double xi2 = p.xi * p.xi;
    return W * std::exp((p.r - xi2) * tau) +
           p.pi * (1.0 - xi2 / p.r) * expm1_ratio(p.r - xi2, tau) +
           (0.5 * p.gamma + p.pi / p.r) * (1.0 - std::exp(-xi2 * tau));
}

std::pair<double, double> mv_asymptotic_operator(double p_fraction, const MvParams& p) {
    return {p.sigma * std::fabs(p_fraction), p.r + p_fraction * p.sigma * p.xi};
}

double MvExactSolution::policy(double W, double t) const {
    const double decay = std::exp(-r * (horizon - t));
    const double target = 0.5 * gamma * decay - (pi / r) * (1.0 - decay);
    return -(xi / (sigma * W)) * (W - target);
}

double MvExactSolution::transformed_policy(double W, double t, double omega) const {
    const double decay = std::exp(-r * (horizon - t));
    const double target = 0.5 * gamma * decay - (pi / r) * (1.0 - decay);
    const double p_times_w = -(xi / sigma) * (W - target);
    return p_times_w / std::max(1.0, omega * std::fabs(W));
}

MvExactSolution mv_exact_policy_and_moments(const MvParams& p) {
    MvExactSolution sol;
    sol.gamma = p.gamma;
    sol.r = p.r;
    sol.pi = p.pi;
    sol.xi = p.xi;
    sol.sigma = p.sigma;
    sol.horizon = p.horizon;
    const double xi2T = p.xi * p.xi * p.horizon;
    const double growth = std::exp(p.r * p.horizon);
    const double drifted = p.w0 * growth + p.pi * (growth - 1.0) / p.r;
    // Frontier: Var = F (E - drifted)^2.
    const double frontier = std::exp(-xi2T) / (1.0 - std::exp(-xi2T));

    sol.embedded_expectation =
        (p.w0 + p.pi / p.r) * std::exp(-(p.xi * p.xi - p.r) * p.horizon) +
        0.5 * p.gamma * (1.0 - std::exp(-xi2T)) - (p.pi / p.r) * std::exp(-xi2T);
    const double gap = sol.embedded_expectation - drifted;
    sol.embedded_variance = frontier * gap * gap;
    sol.embedded_objective = sol.embedded_variance +
                             sol.embedded_expectation * sol.embedded_expectation -
                             p.gamma * sol.embedded_expectation +
                             0.25 * p.gamma * p.gamma;

    // Point where the frontier slope matches the multiplier: 2 lambda F (E -
    // drifted) = 1.
    sol.expectation = drifted + 1.0 / (2.0 * p.lambda * frontier);
    const double lambda_gap = sol.expectation - drifted;
    sol.variance = frontier * lambda_gap * lambda_gap;
    sol.objective = sol.variance + sol.expectation * sol.expectation -
                    p.gamma * sol.expectation + 0.25 * p.gamma * p.gamma;
    return sol;
}

namespace {

// No-short-selling far field: the asymptotic optimal control is p = 0, where
// the constant-control solution is the exact deterministic-drift value.
BoundaryCondition mv_bounded_far_field_bc(const MvParams& p) {
    const auto [a, b] = mv_asymptotic_operator(0.0, p);
    AsymptoticQuadraticBc quad{
        [a, b](double tau) { return std::exp((a * a + 2.0 * b) * tau); },
        [a, b, p](double tau) {
            const double c = 2.0 * p.pi / (a * a + b);
            return -(p.gamma + c) * std::exp(b * tau) +
                   c * std::exp((a * a + 2.0 * b) * tau);
        },
        [a, b, p](double tau) {
            const double c = 2.0 * p.pi / (a * a + b);
            return -p.pi * (p.gamma + c) * expm1_ratio(b, tau) +
                   p.pi * c * expm1_ratio(a * a + 2.0 * b, tau) +
                   0.25 * p.gamma * p.gamma;
        }};
    BoundaryCondition bc;
    bc.left = UpwindDriftOdeBc{p.pi};
    bc.right = quad;
    return bc;
}

} // namespace

SwitchingProblem mv_unbounded_problem(const MvParams& p, int node_count, int policies,
                                      bool with_companion) {
    const ControlSet controls = discretize_control_set(p.q_lo, p.q_hi, policies);
    const Mesh1D mesh = Mesh1D::uniform(p.w_min, p.w_max, node_count);

    // Far-field Dirichlet data from the exact optimal-policy value and mean.
    // The constant-control solution (a = xi, b = r - xi^2) has the same
    // leading coefficients but a constant term off by the variance of
    // tracking the wrong target, which would leak into the interior.
    const auto value_bc = [&p](double W) {
        return DirichletBc{[W, p](double tau) { return mv_lq_value(W, tau, p); }};
    };
    const auto mean_bc = [&p](double W) {
        return DirichletBc{[W, p](double tau) { return mv_lq_mean(W, tau, p); }};
    };

    SwitchingProblem problem;
    const double gamma = p.gamma;
    problem.terminal = [gamma](double W) { return mv_terminal(W, gamma); };
    problem.query_point = p.w0;
    if (with_companion) problem.companion_terminal = [](double W) { return W; };
    for (double q : controls.values) {
        PolicySpec spec;
        spec.control = q;
        spec.mesh = mesh;
        spec.coeffs = mv_coefficients(q, p, mesh);
        spec.bc = BoundaryCondition{value_bc(p.w_min), value_bc(p.w_max)};
        if (with_companion)
            spec.companion_bc = BoundaryCondition{mean_bc(p.w_min), mean_bc(p.w_max)};
        problem.policies.push_back(std::move(spec));
    }
    return problem;
}

SwitchingProblem mv_bounded_problem(const MvParams& p, int node_count, int policies) {
    const ControlSet controls = discretize_control_set(0.0, p.p_max, policies);
    const Mesh1D mesh = Mesh1D::uniform(0.0, p.w_max, node_count);

    SwitchingProblem problem;
    const double gamma = p.gamma;
    problem.terminal = [gamma](double W) { return mv_terminal(W, gamma); };
    problem.query_point = p.w0;
    for (double p_hat : controls.values) {
        PolicySpec spec;
        spec.control = p_hat;
        spec.mesh = mesh;
        spec.coeffs = mv_bounded_coefficients(p_hat, p, mesh);
        spec.bc = mv_bounded_far_field_bc(p);
        problem.policies.push_back(std::move(spec));
    }
    return problem;
}

SwitchingProblem mv_fixed_control_problem(const MvParams& p, int node_count,
                                          double p_hat) {
    const Mesh1D mesh = Mesh1D::uniform(0.0, p.w_max, node_count);
    SwitchingProblem problem;
    const double gamma = p.gamma;
    problem.terminal = [gamma](double W) { return mv_terminal(W, gamma); };
    problem.query_point = p.w0;
    PolicySpec spec;
    spec.control = p_hat;
    spec.mesh = mesh;
    spec.coeffs = mv_bounded_coefficients(p_hat, p, mesh);
    spec.bc = mv_bounded_far_field_bc(p);
    problem.policies.push_back(std::move(spec));
    return problem;
}

} // namespace hjb
