#include "hjb/howard.hpp"

#include <cmath>
#include <stdexcept>

namespace hjb {

namespace {

// Row-weight tables of L_q per control, kept apart so the implicit assembly
// can reproduce ImplicitStepOperator::build bit for bit.
struct ControlStencils {
    std::vector<std::vector<double>> sub, super, discount, src;
    int nodes = 0;

    static ControlStencils build(const std::vector<OperatorCoefficients>& per_control,
                                 const Mesh1D& mesh) {
        ControlStencils t;
        const size_t controls = per_control.size();
        t.nodes = mesh.size();
        t.sub.resize(controls);
        t.super.resize(controls);
        t.discount.resize(controls);
        t.src.resize(controls);
        for (size_t q = 0; q < controls; ++q) {
            if (per_control[q].size() != mesh.size())
                throw std::invalid_argument("howard: coefficients/mesh size mismatch");
            t.sub[q].assign(static_cast<size_t>(mesh.size()), 0.0);
            t.super[q].assign(static_cast<size_t>(mesh.size()), 0.0);
            t.discount[q].assign(static_cast<size_t>(mesh.size()), 0.0);
            t.src[q].assign(static_cast<size_t>(mesh.size()), 0.0);
            for (int i = 1; i + 1 < mesh.size(); ++i) {
                const RowWeights w = assemble_row_weights(per_control[q], mesh, i);
                const size_t k = static_cast<size_t>(i);
                t.sub[q][k] = w.sub;
                t.super[q][k] = w.super;
                t.discount[q][k] = per_control[q].r[k];
                t.src[q][k] = per_control[q].f[k];
            }
        }
        return t;
    }
};

double applied_operator(const ControlStencils& t, size_t q, size_t i,
                        std::span<const double> u) {
    return t.sub[q][i] * u[i - 1] -
           (t.sub[q][i] + t.super[q][i] + t.discount[q][i]) * u[i] +
           t.super[q][i] * u[i + 1] + t.src[q][i];
}

// Nodewise exhaustive search over the control set; ties keep the lowest index.
void improve_policy(const ControlStencils& t, std::span<const double> u,
                    Direction direction, Exec exec, std::vector<int>& policy) {
    const int controls = static_cast<int>(t.sub.size());
    const bool minimize = direction == Direction::minimize;
    policy.assign(static_cast<size_t>(t.nodes), 0);
    parallel_for(t.nodes - 2, exec, [&](int interior) {
        const size_t i = static_cast<size_t>(interior + 1);
        int best = 0;
        double best_value = applied_operator(t, 0, i, u);
        for (int q = 1; q < controls; ++q) {
            const double v = applied_operator(t, static_cast<size_t>(q), i, u);
            if (minimize ? v < best_value : v > best_value) {
                best_value = v;
                best = q;
            }
        }
        policy[i] = best;
    });
}

double scaled_sup_distance(std::span<const double> a, std::span<const double> b) {
    double diff = 0.0, norm = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        diff = std::max(diff, std::fabs(a[i] - b[i]));
        norm = std::max(norm, std::fabs(a[i]));
    }
    return diff / std::max(1.0, norm);
}

double sup_norm(std::span<const double> a) {
    double norm = 0.0;
    for (double v : a) norm = std::max(norm, std::fabs(v));
    return norm;
}

struct StepWorkspace {
    TridiagonalSystem sys;
    std::vector<double> iterate, solution;
    std::vector<int> policy, previous_policy;
};

HowardStepResult howard_step_with(const ControlStencils& t,
                                  std::span<const double> rhs_values,
                                  const Mesh1D& mesh, const BoundaryCondition& bc,
                                  double dt, double tau_next, Direction direction,
                                  const HowardOptions& opts, StepWorkspace& ws) {
    const int n = mesh.size();
    if (static_cast<int>(rhs_values.size()) != n)
        throw std::invalid_argument("howard_step: rhs/mesh size mismatch");
    if (opts.tolerance <= 0.0)
        throw std::invalid_argument("howard_step: tolerance must be positive");
    if (opts.max_iterations < 1)
        throw std::invalid_argument("howard_step: max_iterations must be positive");

    ws.iterate.assign(rhs_values.begin(), rhs_values.end());
    ws.previous_policy.clear();

    HowardStepResult result;
    result.converged = false;
    int solves = 0;
    while (solves < opts.max_iterations) {
        improve_policy(t, ws.iterate, direction, opts.exec, ws.policy);
        if (!ws.previous_policy.empty() && ws.policy == ws.previous_policy) {
            // Re-solving with an unchanged policy reproduces the iterate.
            result.converged = true;
            break;
        }
        ws.sys.resize(n);
        parallel_for(n - 2, opts.exec, [&](int interior) {
            const size_t i = static_cast<size_t>(interior + 1);
            const size_t q = static_cast<size_t>(ws.policy[i]);
            ws.sys.sub[i] = -dt * t.sub[q][i];
            ws.sys.diag[i] =
                1.0 + dt * (t.sub[q][i] + t.super[q][i]) + dt * t.discount[q][i];
            ws.sys.super[i] = -dt * t.super[q][i];
            ws.sys.rhs[i] = rhs_values[i] + dt * t.src[q][i];
        });
        apply_boundary_rows(bc, mesh, dt, tau_next, rhs_values, ws.sys);
        solve_tridiagonal_into(ws.sys, ws.solution);
        ++solves;

        if (solves >= 2 && opts.check_monotone_iterates) {
            // Policy improvement never worsens the objective direction once
            // the iterate is itself a policy evaluation.
            double worst = 0.0;
            for (size_t i = 0; i < ws.solution.size(); ++i) {
                const double change = ws.solution[i] - ws.iterate[i];
                worst = std::max(worst, direction == Direction::minimize ? change : -change);
            }
            if (worst > 1e-8 * std::max(1.0, sup_norm(ws.solution)))
                throw std::logic_error("howard_step: non-monotone policy iteration");
        }

        const double delta = scaled_sup_distance(ws.solution, ws.iterate);
        ws.iterate.swap(ws.solution);
        ws.previous_policy = ws.policy;
        if (delta <= opts.tolerance) {
            result.converged = true;
            break;
        }
    }
    result.u = ws.iterate;
    result.policy = ws.previous_policy.empty() ? ws.policy : ws.previous_policy;
    result.iterations = solves;
    return result;
}

} // namespace

HowardStepResult howard_step(std::span<const double> rhs_values,
                             const std::vector<OperatorCoefficients>& per_control,
                             const Mesh1D& mesh, const BoundaryCondition& bc,
                             double dt, double tau_next, Direction direction,
                             const HowardOptions& opts) {
    if (per_control.empty())
        throw std::invalid_argument("howard_step: empty control set");
    const ControlStencils t = ControlStencils::build(per_control, mesh);
    StepWorkspace ws;
    return howard_step_with(t, rhs_values, mesh, bc, dt, tau_next, direction, opts, ws);
}

double DirectOutcome::value_at(double x) const { return interp_linear(*mesh, u, x); }

DirectOutcome solve_direct(const SwitchingProblem& problem, const TimeGrid& grid,
                           Direction direction, const HowardOptions& opts) {
    if (problem.policies.empty())
        throw std::invalid_argument("solve_direct: no policies");
    if (!problem.shared_mesh())
        throw std::invalid_argument("solve_direct: direct control needs a shared mesh");
    const Mesh1D& mesh = problem.policies[0].mesh;
    std::vector<OperatorCoefficients> per_control;
    per_control.reserve(problem.policies.size());
    for (const PolicySpec& p : problem.policies) per_control.push_back(p.coeffs);
    const ControlStencils t = ControlStencils::build(per_control, mesh);
    const BoundaryCondition& bc = problem.policies[0].bc;

    DirectOutcome outcome;
    outcome.mesh = &mesh;
    outcome.u.resize(static_cast<size_t>(mesh.size()));
    for (int i = 0; i < mesh.size(); ++i)
        outcome.u[static_cast<size_t>(i)] = problem.terminal(mesh[i]);

    StepWorkspace ws;
    long iteration_sum = 0;
    const double dt = grid.dt();
    for (long n = 0; n < grid.steps; ++n) {
        const double tau_next = dt * static_cast<double>(n + 1);
        HowardStepResult step =
            howard_step_with(t, outcome.u, mesh, bc, dt, tau_next, direction, opts, ws);
        outcome.u.swap(step.u);
        outcome.policy.swap(step.policy);
        outcome.max_iterations = std::max(outcome.max_iterations, step.iterations);
        iteration_sum += step.iterations;
        if (!step.converged) outcome.converged = false;
    }
    outcome.mean_iterations =
        grid.steps > 0 ? static_cast<double>(iteration_sum) / static_cast<double>(grid.steps)
                       : 0.0;
    return outcome;
}

} // namespace hjb
