#include "hjb/fd.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace hjb {

OperatorCoefficients OperatorCoefficients::constant(int count, double a, double b,
                                                    double r, double f) {
    OperatorCoefficients c;
    c.a.assign(static_cast<size_t>(count), a);
    c.b.assign(static_cast<size_t>(count), b);
    c.r.assign(static_cast<size_t>(count), r);
    c.f.assign(static_cast<size_t>(count), f);
    return c;
}

RowWeights assemble_row_weights(const OperatorCoefficients& coeffs,
                                const Mesh1D& mesh, int i) {
    const double a = coeffs.a[static_cast<size_t>(i)];
    const double b = coeffs.b[static_cast<size_t>(i)];
    if (a < 0.0)
        throw std::invalid_argument("assemble_row_weights: negative diffusion");
    const double h = mesh.spacing();
    RowWeights w;
    w.sub = a / (h * h) - b / (2.0 * h);
    w.super = a / (h * h) + b / (2.0 * h);
    if (w.sub < 0.0 || w.super < 0.0) {
        // Upwind the drift only where the central stencil loses positivity.
        if (b > 0.0) {
            w.sub = a / (h * h);
            w.super = a / (h * h) + b / h;
        } else {
            w.sub = a / (h * h) - b / h;
            w.super = a / (h * h);
        }
    }
    w.diag = -(w.sub + w.super);
    return w;
}

void TridiagonalSystem::resize(int n) {
    sub.assign(static_cast<size_t>(n), 0.0);
    diag.assign(static_cast<size_t>(n), 0.0);
    super.assign(static_cast<size_t>(n), 0.0);
    rhs.assign(static_cast<size_t>(n), 0.0);
}

void solve_tridiagonal_into(const TridiagonalSystem& sys, std::vector<double>& out) {
    const size_t n = sys.diag.size();
    if (sys.sub.size() != n || sys.super.size() != n || sys.rhs.size() != n)
        throw std::invalid_argument("solve_tridiagonal: diagonal size mismatch");
    static thread_local std::vector<double> cp, dp;
    cp.resize(n);
    dp.resize(n);
    double pivot = sys.diag[0];
    assert(pivot != 0.0 && "zero pivot in Thomas sweep");
    cp[0] = sys.super[0] / pivot;
    dp[0] = sys.rhs[0] / pivot;
    for (size_t i = 1; i < n; ++i) {
        pivot = sys.diag[i] - sys.sub[i] * cp[i - 1];
        assert(pivot != 0.0 && "zero pivot in Thomas sweep");
        cp[i] = sys.super[i] / pivot;
        dp[i] = (sys.rhs[i] - sys.sub[i] * dp[i - 1]) / pivot;
    }
    out.resize(n);
    out[n - 1] = dp[n - 1];
    for (size_t i = n - 1; i-- > 0;)
        out[i] = dp[i] - cp[i] * out[i + 1];

#ifndef NDEBUG
    // Residual check; assembled systems are M-matrices so this is tight.
    double rhs_norm = 0.0, res_norm = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double r = sys.diag[i] * out[i] - sys.rhs[i];
        if (i > 0) r += sys.sub[i] * out[i - 1];
        if (i + 1 < n) r += sys.super[i] * out[i + 1];
        res_norm = std::max(res_norm, std::fabs(r));
        rhs_norm = std::max(rhs_norm, std::fabs(sys.rhs[i]));
    }
    assert(res_norm <= 1e-10 * (rhs_norm + 1.0));
#endif
}

std::vector<double> solve_tridiagonal(const TridiagonalSystem& sys) {
    std::vector<double> out;
    solve_tridiagonal_into(sys, out);
    return out;
}

namespace {

// Fills the first or last row of the implicit Euler system for one endpoint.
void fill_boundary_row(const EndpointBc& bc, bool left, const Mesh1D& mesh,
                       double dt, TridiagonalSystem& sys) {
    const int n = mesh.size();
    const int row = left ? 0 : n - 1;
    const size_t idx = static_cast<size_t>(row);
    sys.sub[idx] = 0.0;
    sys.super[idx] = 0.0;
    if (std::holds_alternative<DirichletBc>(bc) ||
        std::holds_alternative<AsymptoticQuadraticBc>(bc)) {
        sys.diag[idx] = 1.0;
    } else if (const auto* ode = std::get_if<DiscountOdeBc>(&bc)) {
        sys.diag[idx] = 1.0 + ode->rate * dt;
    } else {
        const auto& upwind = std::get<UpwindDriftOdeBc>(bc);
        const double h = mesh.spacing();
        // One-sided difference from interior mesh points; the characteristic
        // must leave the domain: drift >= 0 on the left, <= 0 on the right.
        if (left) {
            if (upwind.drift < 0.0)
                throw std::invalid_argument("UpwindDriftOde: inflow drift at left endpoint");
            sys.diag[idx] = 1.0 + upwind.drift * dt / h;
            sys.super[idx] = -upwind.drift * dt / h;
        } else {
            if (upwind.drift > 0.0)
                throw std::invalid_argument("UpwindDriftOde: inflow drift at right endpoint");
            sys.diag[idx] = 1.0 - upwind.drift * dt / h;
            sys.sub[idx] = upwind.drift * dt / h;
        }
    }
}

double boundary_rhs(const EndpointBc& bc, double x, double tau_next, double rhs_value) {
    if (const auto* d = std::get_if<DirichletBc>(&bc)) return d->value(tau_next);
    if (const auto* q = std::get_if<AsymptoticQuadraticBc>(&bc))
        return q->alpha(tau_next) * x * x + q->beta(tau_next) * x + q->delta(tau_next);
    return rhs_value;  // ODE rows advance the incoming value
}

} // namespace

void apply_boundary_rows(const BoundaryCondition& bc, const Mesh1D& mesh, double dt,
                         double tau_next, std::span<const double> rhs_values,
                         TridiagonalSystem& sys) {
    const int n = mesh.size();
    fill_boundary_row(bc.left, true, mesh, dt, sys);
    fill_boundary_row(bc.right, false, mesh, dt, sys);
    sys.rhs[0] = boundary_rhs(bc.left, mesh.lo(), tau_next, rhs_values[0]);
    sys.rhs[static_cast<size_t>(n - 1)] =
        boundary_rhs(bc.right, mesh.hi(), tau_next,
                     rhs_values[static_cast<size_t>(n - 1)]);
}

ImplicitStepOperator ImplicitStepOperator::build(const OperatorCoefficients& coeffs,
                                                 const Mesh1D& mesh,
                                                 const BoundaryCondition& bc,
                                                 double dt) {
    const int n = mesh.size();
    if (coeffs.size() != n)
        throw std::invalid_argument("ImplicitStepOperator: coefficients/mesh size mismatch");
    ImplicitStepOperator op;
    op.mesh = &mesh;
    op.bc = &bc;
    op.dt = dt;
    op.sub.assign(static_cast<size_t>(n), 0.0);
    op.diag.assign(static_cast<size_t>(n), 0.0);
    op.super.assign(static_cast<size_t>(n), 0.0);
    op.source.assign(static_cast<size_t>(n), 0.0);
    for (int i = 1; i + 1 < n; ++i) {
        const RowWeights w = assemble_row_weights(coeffs, mesh, i);
        const size_t k = static_cast<size_t>(i);
        op.sub[k] = -dt * w.sub;
        op.super[k] = -dt * w.super;
        op.diag[k] = 1.0 + dt * (w.sub + w.super) + dt * coeffs.r[k];
        op.source[k] = dt * coeffs.f[k];
    }
    return op;
}

void ImplicitStepOperator::apply_with_bc(std::span<const double> rhs_values,
                                         double tau_next,
                                         const BoundaryCondition& bc_override,
                                         std::vector<double>& out,
                                         TridiagonalSystem& work) const {
    const int n = mesh->size();
    if (static_cast<int>(rhs_values.size()) != n)
        throw std::invalid_argument("implicit step: rhs/mesh size mismatch");
    work.resize(n);
    for (int i = 1; i + 1 < n; ++i) {
        const size_t k = static_cast<size_t>(i);
        work.sub[k] = sub[k];
        work.diag[k] = diag[k];
        work.super[k] = super[k];
        work.rhs[k] = rhs_values[k] + source[k];
    }
    apply_boundary_rows(bc_override, *mesh, dt, tau_next, rhs_values, work);
    solve_tridiagonal_into(work, out);
}

void ImplicitStepOperator::apply(std::span<const double> rhs_values, double tau_next,
                                 std::vector<double>& out,
                                 TridiagonalSystem& work) const {
    apply_with_bc(rhs_values, tau_next, *bc, out, work);
}

std::vector<double> implicit_euler_step(const OperatorCoefficients& coeffs,
                                        const Mesh1D& mesh,
                                        const BoundaryCondition& bc, double dt,
                                        double tau_next,
                                        std::span<const double> rhs_values) {
    const ImplicitStepOperator op = ImplicitStepOperator::build(coeffs, mesh, bc, dt);
    std::vector<double> out;
    TridiagonalSystem work;
    op.apply(rhs_values, tau_next, out, work);
    return out;
}

} // namespace hjb
