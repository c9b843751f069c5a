// Direct-control solver: fully implicit steps with the nodewise optimal
// control found by policy iteration (Howard's algorithm) and exhaustive
// search over the discretized control set.
#pragma once

#include "hjb/fd.hpp"
#include "hjb/mesh.hpp"
#include "hjb/parallel.hpp"
#include "hjb/pcpt.hpp"

#include <span>
#include <vector>

namespace hjb {

struct HowardOptions {
    double tolerance = 1e-10;  // scaled by max(1, ||u||_inf)
    int max_iterations = 50;
    Exec exec = Exec::openmp;
    // Standard policy iteration improves the iterate monotonically from the
    // second solve on; violations beyond round-off signal an assembly bug.
    bool check_monotone_iterates = true;
};

struct HowardStepResult {
    std::vector<double> u;
    std::vector<int> policy;  // control index per node
    int iterations = 0;
    bool converged = true;
};

// One implicit Euler step of u - dt * opt_q L_q u = rhs. The stencils hold
// the discretized L_q for every control on a common mesh; boundary rows come
// from bc and must not depend on the control.
HowardStepResult howard_step(std::span<const double> rhs_values,
                             const std::vector<OperatorCoefficients>& per_control,
                             const Mesh1D& mesh, const BoundaryCondition& bc,
                             double dt, double tau_next, Direction direction,
                             const HowardOptions& opts = {});

struct DirectOutcome {
    std::vector<double> u;
    std::vector<int> policy;       // at the final time level
    int max_iterations = 0;        // worst timestep
    double mean_iterations = 0.0;
    bool converged = true;
    const Mesh1D* mesh = nullptr;

    double value_at(double x) const;
};

// N howard_steps from the sampled terminal data on the (shared) mesh of the
// problem; the reported scalar uses the same linear extraction as solve_pcpt.
DirectOutcome solve_direct(const SwitchingProblem& problem, const TimeGrid& grid,
                           Direction direction, const HowardOptions& opts = {});

} // namespace hjb
