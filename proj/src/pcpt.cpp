#include "hjb/pcpt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hjb {

ControlSet discretize_control_set(double q_lo, double q_hi, int count) {
    if (q_hi < q_lo)
        throw std::invalid_argument("discretize_control_set: q_hi < q_lo");
    if (count < 1)
        throw std::invalid_argument("discretize_control_set: need at least one control");
    ControlSet set;
    if (count == 1) {
        if (q_hi > q_lo)
            throw std::invalid_argument(
                "discretize_control_set: one control cannot cover an interval");
        set.values = {q_lo};
        set.density = 0.0;
        return set;
    }
    if (!(q_hi > q_lo))
        throw std::invalid_argument("discretize_control_set: distinct values need q_hi > q_lo");
    const double spacing = (q_hi - q_lo) / static_cast<double>(count - 1);
    set.values.resize(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i)
        set.values[static_cast<size_t>(i)] = q_lo + static_cast<double>(i) * spacing;
    set.values.back() = q_hi;
    set.density = (q_hi - q_lo) / (2.0 * static_cast<double>(count - 1));
    return set;
}

bool SwitchingProblem::shared_mesh() const {
    for (size_t j = 1; j < policies.size(); ++j)
        if (!(policies[j].mesh == policies[0].mesh)) return false;
    return true;
}

SwitchingState SwitchingProblem::initial_state() const {
    SwitchingState state;
    state.components.resize(policies.size());
    const bool with_companion = static_cast<bool>(companion_terminal);
    if (with_companion) state.companions.resize(policies.size());
    for (size_t j = 0; j < policies.size(); ++j) {
        const Mesh1D& mesh = policies[j].mesh;
        state.components[j].resize(static_cast<size_t>(mesh.size()));
        if (with_companion) state.companions[j].resize(static_cast<size_t>(mesh.size()));
        for (int i = 0; i < mesh.size(); ++i) {
            state.components[j][static_cast<size_t>(i)] = terminal(mesh[i]);
            if (with_companion)
                state.companions[j][static_cast<size_t>(i)] = companion_terminal(mesh[i]);
        }
    }
    state.time_index = 0;
    return state;
}

void coupling_stage(const SwitchingState& state, const SwitchingProblem& problem,
                    const SwitchingConfig& cfg,
                    std::vector<std::vector<double>>& out,
                    std::vector<std::vector<int>>* winner,
                    std::vector<std::vector<double>>* companion_out) {
    const int policy_count = state.policy_count();
    if (policy_count != static_cast<int>(problem.policies.size()))
        throw std::invalid_argument("coupling_stage: state/problem policy mismatch");
    const bool minimize = cfg.direction == Direction::minimize;
    const double cost = cfg.switching_cost;
    const bool with_companion = companion_out && !state.companions.empty();

    out.resize(static_cast<size_t>(policy_count));
    if (winner) winner->resize(static_cast<size_t>(policy_count));
    if (with_companion) companion_out->resize(static_cast<size_t>(policy_count));
    for (int j = 0; j < policy_count; ++j) {
        const size_t n = state.components[static_cast<size_t>(j)].size();
        out[static_cast<size_t>(j)].resize(n);
        if (winner) (*winner)[static_cast<size_t>(j)].resize(n);
        if (with_companion) (*companion_out)[static_cast<size_t>(j)].resize(n);
    }

    if (policy_count == 1) {
        out[0] = state.components[0];
        if (winner) std::fill((*winner)[0].begin(), (*winner)[0].end(), 0);
        if (with_companion) (*companion_out)[0] = state.companions[0];
        return;
    }

    const bool shared = problem.shared_mesh();
    if (shared && cost == 0.0) {
        // All candidate lists coincide: the coupled value is the global
        // optimum per node, attained at the lowest policy index.
        const int n = static_cast<int>(state.components[0].size());
        parallel_for(n, cfg.exec, [&](int i) {
            const size_t k = static_cast<size_t>(i);
            int best = 0;
            double best_value = state.components[0][k];
            for (int p = 1; p < policy_count; ++p) {
                const double v = state.components[static_cast<size_t>(p)][k];
                if (minimize ? v < best_value : v > best_value) {
                    best_value = v;
                    best = p;
                }
            }
            for (int j = 0; j < policy_count; ++j) {
                out[static_cast<size_t>(j)][k] = best_value;
                if (winner) (*winner)[static_cast<size_t>(j)][k] = best;
                if (with_companion)
                    (*companion_out)[static_cast<size_t>(j)][k] =
                        state.companions[static_cast<size_t>(best)][k];
            }
        });
        return;
    }

    // General path: candidates for component j are u_j itself and every other
    // component, transferred onto mesh j when the meshes differ, with the
    // switching cost applied.
    std::vector<std::vector<std::vector<double>>> moved;
    std::vector<std::vector<std::vector<double>>> moved_companion;
    if (!shared) {
        moved.resize(static_cast<size_t>(policy_count));
        if (with_companion) moved_companion.resize(static_cast<size_t>(policy_count));
        for (int k = 0; k < policy_count; ++k) {
            moved[static_cast<size_t>(k)].resize(static_cast<size_t>(policy_count));
            if (with_companion)
                moved_companion[static_cast<size_t>(k)].resize(
                    static_cast<size_t>(policy_count));
            for (int j = 0; j < policy_count; ++j) {
                if (j == k) continue;
                transfer_into(problem.policies[static_cast<size_t>(k)].mesh,
                              state.components[static_cast<size_t>(k)],
                              problem.policies[static_cast<size_t>(j)].mesh, cfg.interp,
                              moved[static_cast<size_t>(k)][static_cast<size_t>(j)]);
                if (with_companion)
                    transfer_into(problem.policies[static_cast<size_t>(k)].mesh,
                                  state.companions[static_cast<size_t>(k)],
                                  problem.policies[static_cast<size_t>(j)].mesh, cfg.interp,
                                  moved_companion[static_cast<size_t>(k)][static_cast<size_t>(j)]);
            }
        }
    }

    for (int j = 0; j < policy_count; ++j) {
        const auto& own = state.components[static_cast<size_t>(j)];
        const int n = static_cast<int>(own.size());
        parallel_for(n, cfg.exec, [&](int i) {
            const size_t k = static_cast<size_t>(i);
            int best = j;
            double best_value = own[k];
            for (int p = 0; p < policy_count; ++p) {
                if (p == j) continue;
                const double moved_value =
                    shared ? state.components[static_cast<size_t>(p)][k]
                           : moved[static_cast<size_t>(p)][static_cast<size_t>(j)][k];
                const double v = minimize ? moved_value + cost : moved_value - cost;
                const bool improves = minimize ? v < best_value : v > best_value;
                if (improves || (v == best_value && p < best)) {
                    best_value = v;
                    best = p;
                }
            }
            out[static_cast<size_t>(j)][k] = best_value;
            if (winner) (*winner)[static_cast<size_t>(j)][k] = best;
            if (with_companion) {
                double companion_value;
                if (best == j || shared)
                    companion_value = state.companions[static_cast<size_t>(best)][k];
                else
                    companion_value =
                        moved_companion[static_cast<size_t>(best)][static_cast<size_t>(j)][k];
                (*companion_out)[static_cast<size_t>(j)][k] = companion_value;
            }
        });
    }
}

PcptStepper::PcptStepper(const SwitchingProblem& problem, double dt,
                         const SwitchingConfig& cfg)
    : problem_(problem), cfg_(cfg) {
    const size_t policy_count = problem.policies.size();
    operators_.reserve(policy_count);
    for (const PolicySpec& policy : problem.policies)
        operators_.push_back(
            ImplicitStepOperator::build(policy.coeffs, policy.mesh, policy.bc, dt));
    work_.resize(policy_count);
    next_.resize(policy_count);
    next_companion_.resize(policy_count);
}

void PcptStepper::step(SwitchingState& state, double tau_next) {
    const int policy_count = state.policy_count();
    const bool with_companion = !state.companions.empty();
    coupling_stage(state, problem_, cfg_, coupled_, with_companion ? &winner_ : nullptr,
                   with_companion ? &coupled_companion_ : nullptr);
    parallel_for(policy_count, cfg_.exec, [&](int j) {
        const size_t k = static_cast<size_t>(j);
        operators_[k].apply(coupled_[k], tau_next, next_[k], work_[k]);
        if (with_companion)
            operators_[k].apply_with_bc(coupled_companion_[k], tau_next,
                                        problem_.policies[k].companion_bc,
                                        next_companion_[k], work_[k]);
    });
    state.components.swap(next_);
    if (with_companion) state.companions.swap(next_companion_);
    ++state.time_index;
}

SwitchingState pcpt_step(const SwitchingState& state, const SwitchingProblem& problem,
                         double dt, const SwitchingConfig& cfg) {
    PcptStepper stepper(problem, dt, cfg);
    SwitchingState next = state;
    const double tau_next = dt * static_cast<double>(state.time_index + 1);
    stepper.step(next, tau_next);
    return next;
}

double PcptOutcome::value_at(double x, int component, bool after_coupling) const {
    const auto& vectors = after_coupling ? coupled : raw;
    return interp_linear(problem->policies[static_cast<size_t>(component)].mesh,
                         vectors[static_cast<size_t>(component)], x);
}

double PcptOutcome::companion_at(double x, int component) const {
    return interp_linear(problem->policies[static_cast<size_t>(component)].mesh,
                         coupled_companion[static_cast<size_t>(component)], x);
}

PcptOutcome solve_pcpt(const SwitchingProblem& problem, const TimeGrid& grid,
                       const SwitchingConfig& cfg) {
    if (problem.policies.empty())
        throw std::invalid_argument("solve_pcpt: no policies");
    SwitchingState state = problem.initial_state();
    PcptStepper stepper(problem, grid.dt(), cfg);
    for (long n = 0; n < grid.steps; ++n)
        stepper.step(state, grid.dt() * static_cast<double>(n + 1));

    PcptOutcome outcome;
    outcome.problem = &problem;
    outcome.raw = state.components;
    const bool with_companion = !state.companions.empty();
    coupling_stage(state, problem, cfg, outcome.coupled, nullptr,
                   with_companion ? &outcome.coupled_companion : nullptr);
    return outcome;
}

} // namespace hjb
