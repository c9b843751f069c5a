// Positive-coefficient finite differences for L u = a u'' + b u' - r u + f
// and the implicit Euler step, including the tridiagonal solver.
#pragma once

#include "hjb/mesh.hpp"

#include <functional>
#include <span>
#include <variant>
#include <vector>

namespace hjb {

// Per-node operator data for one fixed control.
// a: diffusion (>= 0), b: drift, r: discount (>= 0), f: source.
struct OperatorCoefficients {
    std::vector<double> a, b, r, f;

    static OperatorCoefficients constant(int count, double a, double b,
                                         double r, double f);
    int size() const { return static_cast<int>(a.size()); }
};

struct RowWeights {
    double sub = 0.0, diag = 0.0, super = 0.0;
};

// Stencil weights of the spatial operator at interior node i, excluding the
// discount and source terms: L u ~ sub*u_{i-1} + diag*u_i + super*u_{i+1}.
// Central differences whenever both off-diagonal weights stay nonnegative,
// otherwise the drift is upwinded; ties keep the central stencil.
RowWeights assemble_row_weights(const OperatorCoefficients& coeffs,
                                const Mesh1D& mesh, int i);

// Boundary variants. Dirichlet and the asymptotic quadratic are identity rows
// with a time-dependent value; the ODE variants couple only along the row.
struct DirichletBc {
    std::function<double(double)> value;  // of tau
};
struct DiscountOdeBc {  // V_tau = -r V
    double rate = 0.0;
};
struct UpwindDriftOdeBc {  // V_tau = drift * V_x, one-sided into the interior
    double drift = 0.0;
};
struct AsymptoticQuadraticBc {  // value = alpha(tau) x^2 + beta(tau) x + delta(tau)
    std::function<double(double)> alpha, beta, delta;
};
using EndpointBc =
    std::variant<DirichletBc, DiscountOdeBc, UpwindDriftOdeBc, AsymptoticQuadraticBc>;

struct BoundaryCondition {
    EndpointBc left, right;
};

struct TridiagonalSystem {
    std::vector<double> sub, diag, super, rhs;

    int size() const { return static_cast<int>(diag.size()); }
    void resize(int n);
};

// Thomas sweep; assembled systems are diagonally dominant so no pivoting.
std::vector<double> solve_tridiagonal(const TridiagonalSystem& sys);
void solve_tridiagonal_into(const TridiagonalSystem& sys, std::vector<double>& out);

// Precomputed implicit Euler rows for one control:
// (I - dt L) u = rhs + dt f aside from the boundary rows.
struct ImplicitStepOperator {
    const Mesh1D* mesh = nullptr;
    std::vector<double> sub, diag, super;  // matrix of (I - dt L)
    std::vector<double> source;            // dt * f
    double dt = 0.0;
    const BoundaryCondition* bc = nullptr;

    static ImplicitStepOperator build(const OperatorCoefficients& coeffs,
                                      const Mesh1D& mesh,
                                      const BoundaryCondition& bc, double dt);

    // Solves one step; boundary values are evaluated at tau_next.
    void apply(std::span<const double> rhs_values, double tau_next,
               std::vector<double>& out, TridiagonalSystem& work) const;
    // Same matrix, different boundary data (used by the moment companion).
    void apply_with_bc(std::span<const double> rhs_values, double tau_next,
                       const BoundaryCondition& bc_override,
                       std::vector<double>& out, TridiagonalSystem& work) const;
};

// Writes the two boundary rows (matrix entries and right-hand side) of an
// assembled implicit Euler system; shared by the step operator and the
// policy-iteration assembly.
void apply_boundary_rows(const BoundaryCondition& bc, const Mesh1D& mesh, double dt,
                         double tau_next, std::span<const double> rhs_values,
                         TridiagonalSystem& sys);

// One implicit Euler step (I - dt L) u^{n+1} = rhs + dt f with boundary rows
// taken from bc at time tau_next.
std::vector<double> implicit_euler_step(const OperatorCoefficients& coeffs,
                                        const Mesh1D& mesh,
                                        const BoundaryCondition& bc, double dt,
                                        double tau_next,
                                        std::span<const double> rhs_values);

} // namespace hjb
