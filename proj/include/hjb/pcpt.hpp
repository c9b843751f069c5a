// Switching-system solver with piecewise constant policy timestepping:
// an explicit max/min coupling with switching cost at the start of every
// step, followed by one independent implicit solve per policy.
#pragma once

#include "hjb/fd.hpp"
#include "hjb/interp.hpp"
#include "hjb/mesh.hpp"
#include "hjb/parallel.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace hjb {

// Finite control set with its density H = max distance from [q_lo, q_hi].
struct ControlSet {
    std::vector<double> values;
    double density = 0.0;

    int size() const { return static_cast<int>(values.size()); }
};

// J equally spaced values including both endpoints; H = (q_hi-q_lo)/(2(J-1)).
ControlSet discretize_control_set(double q_lo, double q_hi, int count);

enum class Direction { maximize, minimize };
enum class MeshStrategy { shared, per_policy };

struct SwitchingConfig {
    double switching_cost = 0.0;  // c >= 0
    Direction direction = Direction::maximize;
    InterpKind interp;
    MeshStrategy mesh_strategy = MeshStrategy::shared;
    Exec exec = Exec::openmp;
};

// Per-policy value vectors at one time level.
struct SwitchingState {
    std::vector<std::vector<double>> components;
    // Companion vectors advanced with the same operators and selected by the
    // value coupling; used for the implied moments of the mean-variance runs.
    std::vector<std::vector<double>> companions;
    int time_index = 0;

    int policy_count() const { return static_cast<int>(components.size()); }
};

// One policy of the switching system. The boundary conditions and stencil
// reference the mesh stored here, so PolicySpec must stay in place once the
// step operator is built (SwitchingProblem handles that).
struct PolicySpec {
    double control = 0.0;
    Mesh1D mesh;
    OperatorCoefficients coeffs;
    BoundaryCondition bc;
    BoundaryCondition companion_bc;
};

struct SwitchingProblem {
    std::vector<PolicySpec> policies;
    std::function<double(double)> terminal;            // initial data in backward time
    std::function<double(double)> companion_terminal;  // enables the companion if set
    double query_point = 0.0;

    bool shared_mesh() const;
    SwitchingState initial_state() const;
};

// Coupled right-hand sides u^{n+1/2} for every policy:
//   maximize:  max[u_j, max_{k != j}(transfer(u_k) - c)]
//   minimize:  min[u_j, min_{k != j}(transfer(u_k) + c)]
// Ties resolve to the lowest policy index. winner, when given, receives the
// selected policy index per node; companion_out the matching companions.
void coupling_stage(const SwitchingState& state, const SwitchingProblem& problem,
                    const SwitchingConfig& cfg,
                    std::vector<std::vector<double>>& out,
                    std::vector<std::vector<int>>* winner = nullptr,
                    std::vector<std::vector<double>>* companion_out = nullptr);

// Prebuilt per-policy step operators; reused across all timesteps.
class PcptStepper {
public:
    PcptStepper(const SwitchingProblem& problem, double dt, const SwitchingConfig& cfg);

    void step(SwitchingState& state, double tau_next);

private:
    const SwitchingProblem& problem_;
    SwitchingConfig cfg_;
    std::vector<ImplicitStepOperator> operators_;
    std::vector<std::vector<double>> coupled_;
    std::vector<std::vector<double>> coupled_companion_;
    std::vector<std::vector<int>> winner_;
    std::vector<TridiagonalSystem> work_;
    std::vector<std::vector<double>> next_, next_companion_;
};

SwitchingState pcpt_step(const SwitchingState& state, const SwitchingProblem& problem,
                         double dt, const SwitchingConfig& cfg);

struct PcptOutcome {
    std::vector<std::vector<double>> raw;      // components after the last solve
    std::vector<std::vector<double>> coupled;  // one more coupling stage applied
    std::vector<std::vector<double>> coupled_companion;
    const SwitchingProblem* problem = nullptr;

    // Reported scalar: a component interpolated linearly at x. The default
    // reads component 0 after the final coupling, which matches the
    // conventional form of the method.
    double value_at(double x, int component = 0, bool after_coupling = true) const;
    double companion_at(double x, int component = 0) const;
};

PcptOutcome solve_pcpt(const SwitchingProblem& problem, const TimeGrid& grid,
                       const SwitchingConfig& cfg);

} // namespace hjb
