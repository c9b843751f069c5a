#include "doctest.h"

#include "hjb/models.hpp"
#include "hjb/pcpt.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

using namespace hjb;

namespace {

// Two shifted meshes carrying a degenerate (u_t = 0) problem; all data are
// dyadic so every coupling average is exact in double precision.
SwitchingProblem shifted_zero_problem(int count) {
    SwitchingProblem problem;
    const double h = 1.0 / static_cast<double>(count - 1);
    problem.terminal = [](double x) { return (x - 0.5) * (x - 0.5); };
    problem.query_point = 0.5;
    for (int theta = 0; theta < 2; ++theta) {
        PolicySpec spec;
        spec.control = static_cast<double>(theta);
        const double shift = theta == 0 ? 0.0 : 0.5 * h;
        spec.mesh = Mesh1D::uniform(shift, 1.0 + shift, count);
        spec.coeffs = OperatorCoefficients::constant(count, 0.0, 0.0, 0.0, 0.0);
        spec.bc = BoundaryCondition{DiscountOdeBc{0.0}, DiscountOdeBc{0.0}};
        problem.policies.push_back(std::move(spec));
    }
    return problem;
}

SwitchingConfig max_config(double cost) {
    SwitchingConfig cfg;
    cfg.switching_cost = cost;
    cfg.direction = Direction::maximize;
    cfg.mesh_strategy = MeshStrategy::per_policy;
    cfg.exec = Exec::serial;
    return cfg;
}

} // namespace

TEST_CASE("discretize_control_set") {
    const ControlSet set = discretize_control_set(0.0, 1.0, 5);
    CHECK(set.values == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
    CHECK(set.density == doctest::Approx(0.125));

    const ControlSet bang = discretize_control_set(0.3, 0.5, 2);
    CHECK(bang.values == std::vector<double>{0.3, 0.5});
    CHECK(bang.density == doctest::Approx(0.1));

    const ControlSet wide = discretize_control_set(-2.5, 3.5, 40);
    CHECK(wide.values.size() == 40);
    CHECK(wide.values[1] - wide.values[0] == doctest::Approx(6.0 / 39.0).epsilon(1e-14));
    CHECK(wide.density == doctest::Approx(3.0 / 39.0).epsilon(1e-14));
    CHECK(wide.values.front() == -2.5);
    CHECK(wide.values.back() == 3.5);

    const ControlSet singleton = discretize_control_set(1.5, 1.5, 1);
    CHECK(singleton.values == std::vector<double>{1.5});
    CHECK(singleton.density == 0.0);

    CHECK_THROWS_AS(discretize_control_set(0.0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(discretize_control_set(1.0, 0.0, 3), std::invalid_argument);
    CHECK_THROWS_AS(discretize_control_set(0.0, 1.0, 0), std::invalid_argument);
}

TEST_CASE("coupling stage on a shared mesh") {
    const int n = 9;
    SwitchingProblem problem;
    problem.terminal = [](double) { return 0.0; };
    for (int j = 0; j < 2; ++j) {
        PolicySpec spec;
        spec.mesh = Mesh1D::uniform(0.0, 1.0, n);
        spec.coeffs = OperatorCoefficients::constant(n, 0.0, 0.0, 0.0, 0.0);
        spec.bc = BoundaryCondition{DiscountOdeBc{0.0}, DiscountOdeBc{0.0}};
        problem.policies.push_back(std::move(spec));
    }
    SwitchingState state;
    state.components = {{1, 5, 2, 8, 0, 3, 7, 4, 6}, {2, 4, 3, 6, 1, 5, 2, 9, 5}};

    std::vector<std::vector<double>> out;
    SUBCASE("zero cost takes the pointwise optimum for every component") {
        SwitchingConfig cfg = max_config(0.0);
        cfg.mesh_strategy = MeshStrategy::shared;
        coupling_stage(state, problem, cfg, out);
        for (int j = 0; j < 2; ++j)
            for (int i = 0; i < n; ++i)
                CHECK(out[static_cast<size_t>(j)][static_cast<size_t>(i)] ==
                      std::max(state.components[0][static_cast<size_t>(i)],
                               state.components[1][static_cast<size_t>(i)]));
    }
    SUBCASE("a cost above the largest gap suppresses every switch") {
        SwitchingConfig cfg = max_config(10.0);
        cfg.mesh_strategy = MeshStrategy::shared;
        coupling_stage(state, problem, cfg, out);
        CHECK(out[0] == state.components[0]);
        CHECK(out[1] == state.components[1]);
    }
    SUBCASE("all components coincide after a zero-cost coupling") {
        SwitchingConfig cfg = max_config(0.0);
        cfg.direction = Direction::minimize;
        cfg.mesh_strategy = MeshStrategy::shared;
        coupling_stage(state, problem, cfg, out);
        CHECK(out[0] == out[1]);
    }
}

TEST_CASE("coupling with shifted meshes and a protective cost") {
    // Convex data gain at most h^2/4 from the half-spacing interpolation, so
    // c = h leaves both components untouched and u_t = 0 is solved exactly.
    const int n = 65;
    const SwitchingProblem problem = shifted_zero_problem(n);
    SwitchingState state = problem.initial_state();
    const double h = problem.policies[0].mesh.spacing();

    SwitchingConfig cfg = max_config(h);
    std::vector<std::vector<double>> out;
    coupling_stage(state, problem, cfg, out);
    CHECK(out[0] == state.components[0]);
    CHECK(out[1] == state.components[1]);
}

TEST_CASE("single-policy step reduces to one implicit solve") {
    const int n = 17;
    SwitchingProblem problem;
    problem.terminal = [](double x) { return std::sin(2.0 * x); };
    PolicySpec spec;
    spec.mesh = Mesh1D::uniform(0.0, 1.0, n);
    spec.coeffs = OperatorCoefficients::constant(n, 0.3, 0.1, 0.02, 0.0);
    spec.bc = BoundaryCondition{DirichletBc{[](double) { return 0.0; }},
                                DirichletBc{[](double) { return 0.0; }}};
    problem.policies.push_back(std::move(spec));

    SwitchingState state = problem.initial_state();
    const double dt = 0.05;
    const SwitchingState next = pcpt_step(state, problem, dt, max_config(0.0));

    const auto direct = implicit_euler_step(problem.policies[0].coeffs,
                                            problem.policies[0].mesh,
                                            problem.policies[0].bc, dt, dt,
                                            state.components[0]);
    CHECK(next.components[0] == direct);
    CHECK(next.time_index == 1);
}

TEST_CASE("two steps of the degenerate problem reproduce the 1/4 1/2 1/4 weights") {
    const int n = 65;
    const SwitchingProblem problem = shifted_zero_problem(n);
    const double h = problem.policies[0].mesh.spacing();
    const double dt = h * h / 8.0;

    SwitchingState state = problem.initial_state();
    const std::vector<std::vector<double>> initial = state.components;
    SwitchingConfig cfg = max_config(0.0);
    state = pcpt_step(state, problem, dt, cfg);
    state = pcpt_step(state, problem, dt, cfg);

    for (int j = 0; j < 2; ++j) {
        for (int i = 2; i + 2 < n; ++i) {
            const size_t k = static_cast<size_t>(i);
            const double expected = 0.25 * initial[static_cast<size_t>(j)][k - 1] +
                                    0.5 * initial[static_cast<size_t>(j)][k] +
                                    0.25 * initial[static_cast<size_t>(j)][k + 1];
            CHECK(state.components[static_cast<size_t>(j)][k] == expected);
        }
    }
}

TEST_CASE("a switching cost of h preserves the degenerate solution for 100 steps") {
    const int n = 65;
    const SwitchingProblem problem = shifted_zero_problem(n);
    const double h = problem.policies[0].mesh.spacing();
    SwitchingConfig cfg = max_config(h);

    SwitchingState state = problem.initial_state();
    const std::vector<std::vector<double>> initial = state.components;
    PcptStepper stepper(problem, h * h / 8.0, cfg);
    for (int step = 0; step < 100; ++step)
        stepper.step(state, static_cast<double>(step + 1));
    CHECK(state.components[0] == initial[0]);
    CHECK(state.components[1] == initial[1]);
    CHECK(state.time_index == 100);
}

TEST_CASE("coupling is monotone in its inputs with linear transfer") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const SwitchingProblem problem = shifted_zero_problem(17);
    for (int rep = 0; rep < 100; ++rep) {
        SwitchingState low, high;
        low.components.resize(2);
        high.components.resize(2);
        for (int j = 0; j < 2; ++j) {
            low.components[static_cast<size_t>(j)].resize(17);
            high.components[static_cast<size_t>(j)].resize(17);
            for (int i = 0; i < 17; ++i) {
                const double base = -1.0 + 2.0 * unit(rng);
                low.components[static_cast<size_t>(j)][static_cast<size_t>(i)] = base;
                high.components[static_cast<size_t>(j)][static_cast<size_t>(i)] =
                    base + unit(rng);
            }
        }
        for (Direction dir : {Direction::maximize, Direction::minimize}) {
            SwitchingConfig cfg = max_config(0.05 * unit(rng));
            cfg.direction = dir;
            std::vector<std::vector<double>> out_low, out_high;
            coupling_stage(low, problem, cfg, out_low);
            coupling_stage(high, problem, cfg, out_high);
            for (int j = 0; j < 2; ++j)
                for (int i = 0; i < 17; ++i)
                    CHECK(out_high[static_cast<size_t>(j)][static_cast<size_t>(i)] >=
                          out_low[static_cast<size_t>(j)][static_cast<size_t>(i)] - 1e-14);
        }
    }
}

TEST_CASE("steps never expand the max norm for source-free problems") {
    const UvParams p;
    const SwitchingProblem problem = uv_problem(p, 129, MeshStrategy::per_policy);
    SwitchingConfig cfg = max_config(0.01);
    cfg.direction = Direction::minimize;
    SwitchingState state = problem.initial_state();
    double bound = 0.0;
    for (const auto& component : state.components)
        for (double v : component) bound = std::max(bound, std::fabs(v));
    PcptStepper stepper(problem, 0.05, cfg);
    for (int step = 0; step < 20; ++step) {
        stepper.step(state, 0.05 * static_cast<double>(step + 1));
        for (const auto& component : state.components)
            for (double v : component) CHECK(std::fabs(v) <= bound * (1.0 + 1e-12));
    }
}

TEST_CASE("reported value responds monotonically to the switching cost") {
    const UvParams p;
    const TimeGrid grid{p.horizon, 16};
    double previous = -1e300;
    for (double cost : {0.0, 0.01, 0.05, 0.1, 0.3}) {
        const SwitchingProblem problem = uv_problem(p, 129, MeshStrategy::per_policy);
        SwitchingConfig cfg = max_config(cost);
        cfg.direction = Direction::minimize;
        const PcptOutcome outcome = solve_pcpt(problem, grid, cfg);
        const double value = outcome.value_at(problem.query_point);
        CHECK(value >= previous - 1e-12);
        previous = value;
    }
}

TEST_CASE("minimize on data mirrors maximize on negated data") {
    const UvParams p;
    const TimeGrid grid{p.horizon, 8};
    const SwitchingProblem problem = uv_problem(p, 65, MeshStrategy::per_policy);

    SwitchingProblem negated = uv_problem(p, 65, MeshStrategy::per_policy);
    negated.terminal = [p](double x) { return -uv_payoff(std::exp(x), p); };

    SwitchingConfig cfg_min = max_config(0.025);
    cfg_min.direction = Direction::minimize;
    SwitchingConfig cfg_max = max_config(0.025);

    const PcptOutcome a = solve_pcpt(problem, grid, cfg_min);
    const PcptOutcome b = solve_pcpt(negated, grid, cfg_max);
    for (int j = 0; j < 2; ++j)
        for (size_t i = 0; i < a.raw[static_cast<size_t>(j)].size(); ++i)
            CHECK(a.raw[static_cast<size_t>(j)][i] ==
                  -b.raw[static_cast<size_t>(j)][i]);
}
