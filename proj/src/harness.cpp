#include "hjb/harness.hpp"

#include "hjb/howard.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <limits>
#include <stdexcept>

namespace hjb {

double compute_error(double value, double reference) {
    if (!std::isfinite(reference))
        throw std::invalid_argument("compute_error: reference must be finite");
    return std::fabs(value - reference);
}

double richardson_extrapolate(double v_last, double v_prev) {
    return 2.0 * v_last - v_prev;
}

std::vector<ConvergenceRow> build_table(std::span<const double> values) {
    if (values.empty())
        throw std::invalid_argument("build_table: need at least one value");
    std::vector<ConvergenceRow> rows(values.size());
    for (size_t k = 0; k < values.size(); ++k) {
        rows[k].level = static_cast<int>(k) + 1;
        rows[k].value = values[k];
        if (k >= 1) rows[k].increment = values[k] - values[k - 1];
        if (k >= 2 && rows[k].increment && *rows[k].increment != 0.0)
            rows[k].ratio = *rows[k - 1].increment / *rows[k].increment;
    }
    return rows;
}

namespace {

SwitchingProblem build_problem(const StudySpec& spec, const LadderLevel& level) {
    const int nodes = static_cast<int>(level.nodes);
    switch (spec.model) {
        case Model::uv: {
            if (spec.solver == SolverKind::fixed_control) {
                SwitchingProblem problem;
                const UvParams p = spec.uv;
                problem.terminal = [p](double x) { return uv_payoff(std::exp(x), p); };
                problem.query_point = p.query_point();
                PolicySpec policy;
                policy.control = spec.fixed_control;
                policy.mesh = uv_shared_mesh(p, nodes);
                policy.coeffs = uv_coefficients(spec.fixed_control, p, nodes);
                policy.bc = uv_boundaries(p);
                problem.policies.push_back(std::move(policy));
                return problem;
            }
            const MeshStrategy strategy = spec.solver == SolverKind::direct
                                              ? MeshStrategy::shared
                                              : spec.mesh_strategy;
            return uv_problem(spec.uv, nodes, strategy);
        }
        case Model::mv_unbounded:
            return mv_unbounded_problem(spec.mv, nodes, level.policies,
                                        spec.companion_moments &&
                                            spec.solver == SolverKind::pcpt);
        case Model::mv_bounded:
            if (spec.solver == SolverKind::fixed_control)
                return mv_fixed_control_problem(spec.mv, nodes, spec.fixed_control);
            return mv_bounded_problem(spec.mv, nodes, level.policies);
    }
    throw std::logic_error("build_problem: unknown model");
}

InterpKind build_interp(const StudySpec& spec, const LadderLevel& level) {
    InterpKind kind;
    kind.variant = spec.interp;
    kind.routing = spec.routing;
    if (spec.routing == InterpRouting::via_reference && spec.model == Model::uv)
        kind.reference = uv_shared_mesh(spec.uv, static_cast<int>(level.nodes));
    return kind;
}

double model_horizon(const StudySpec& spec) {
    return spec.model == Model::uv ? spec.uv.horizon : spec.mv.horizon;
}

} // namespace

StudyResult run_study(const StudySpec& spec) {
    if (spec.ladder.empty())
        throw std::invalid_argument("run_study: empty ladder");
    StudyResult result;
    std::vector<double> values;
    std::vector<std::optional<LevelMoments>> moments;

    for (const LadderLevel& level : spec.ladder) {
        std::optional<double> value;
        std::optional<LevelMoments> level_moments;
        try {
            const SwitchingProblem problem = build_problem(spec, level);
            const TimeGrid grid{model_horizon(spec), level.steps};
            if (spec.solver == SolverKind::direct) {
                HowardOptions opts;
                opts.exec = spec.exec;
                const DirectOutcome outcome =
                    solve_direct(problem, grid, Direction::minimize, opts);
                if (!outcome.converged)
                    throw std::runtime_error("policy iteration did not converge");
                value = outcome.value_at(problem.query_point);
            } else {
                SwitchingConfig cfg;
                cfg.switching_cost = level.cost;
                cfg.direction = Direction::minimize;
                cfg.interp = build_interp(spec, level);
                cfg.mesh_strategy = spec.mesh_strategy;
                cfg.exec = spec.exec;
                const PcptOutcome outcome = solve_pcpt(problem, grid, cfg);
                value = outcome.value_at(problem.query_point);
                if (!outcome.coupled_companion.empty()) {
                    LevelMoments m;
                    m.expectation = outcome.companion_at(problem.query_point);
                    const double var = *value - mv_terminal(m.expectation, spec.mv.gamma);
                    m.sqrt_variance = std::sqrt(std::max(var, 0.0));
                    level_moments = m;
                }
            }
        } catch (const std::exception&) {
            value.reset();
        }
        values.push_back(value.value_or(std::numeric_limits<double>::quiet_NaN()));
        moments.push_back(level_moments);
    }

    // Increments and ratios span consecutive successful levels only.
    result.rows.resize(spec.ladder.size());
    for (size_t k = 0; k < spec.ladder.size(); ++k) {
        ConvergenceRow& row = result.rows[k];
        row.level = static_cast<int>(k) + 1;
        row.steps = spec.ladder[k].steps;
        row.nodes = spec.ladder[k].nodes;
        row.policies = spec.solver == SolverKind::fixed_control ? 1 : spec.ladder[k].policies;
        row.cost = spec.ladder[k].cost;
        if (!std::isnan(values[k])) {
            row.value = values[k];
            if (spec.reference) row.error = compute_error(values[k], *spec.reference);
            if (k >= 1 && !std::isnan(values[k - 1]))
                row.increment = values[k] - values[k - 1];
            if (k >= 2 && row.increment && result.rows[k - 1].increment &&
                *row.increment != 0.0)
                row.ratio = *result.rows[k - 1].increment / *row.increment;
        }
    }
    result.moments = std::move(moments);

    // Own reference from the two finest successful levels.
    for (size_t k = spec.ladder.size(); k-- > 1;) {
        if (!std::isnan(values[k]) && !std::isnan(values[k - 1])) {
            result.richardson = richardson_extrapolate(values[k], values[k - 1]);
            break;
        }
    }
    return result;
}

namespace {

std::string format_cell(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.12g", v);
    return buffer;
}

std::string format_cell(const std::optional<double>& v) {
    return v ? format_cell(*v) : std::string();
}

std::optional<double> parse_cell(const std::string& cell) {
    if (cell.empty()) return std::nullopt;
    size_t consumed = 0;
    const double v = std::stod(cell, &consumed);
    if (consumed == 0) throw std::runtime_error("parse_csv: bad number: " + cell);
    return v;
}

} // namespace

std::string to_csv(const std::vector<ConvergenceRow>& rows) {
    std::ostringstream out;
    out << "level,N,M,J,c,value,error,increment,ratio\n";
    for (const ConvergenceRow& row : rows) {
        out << row.level << ',' << row.steps << ',' << row.nodes << ','
            << row.policies << ',' << format_cell(row.cost) << ','
            << format_cell(row.value) << ',' << format_cell(row.error) << ','
            << format_cell(row.increment) << ',' << format_cell(row.ratio) << '\n';
    }
    return out.str();
}

void write_csv(const std::vector<ConvergenceRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path);
    out << to_csv(rows);
}

std::vector<ConvergenceRow> parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "level,N,M,J,c,value,error,increment,ratio")
        throw std::runtime_error("parse_csv: bad header");
    std::vector<ConvergenceRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream fields(line);
        while (std::getline(fields, cell, ',')) cells.push_back(cell);
        cells.resize(9);
        ConvergenceRow row;
        row.level = static_cast<int>(std::stol(cells[0]));
        row.steps = std::stol(cells[1]);
        row.nodes = std::stol(cells[2]);
        row.policies = static_cast<int>(std::stol(cells[3]));
        row.cost = parse_cell(cells[4]).value_or(0.0);
        row.value = parse_cell(cells[5]);
        row.error = parse_cell(cells[6]);
        row.increment = parse_cell(cells[7]);
        row.ratio = parse_cell(cells[8]);
        rows.push_back(row);
    }
    return rows;
}

std::vector<ConvergenceRow> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_csv: cannot open " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_csv(text.str());
}

std::vector<LadderLevel> uv_table2_ladder(int levels, double cost) {
    std::vector<LadderLevel> ladder;
    for (int k = 0; k < levels; ++k)
        ladder.push_back({32L << k, 512L << k, 2, cost});
    return ladder;
}

int control_refinement_count(int level) {
    const double doubled = std::sqrt(static_cast<double>(1L << (level - 1)));
    return static_cast<int>(std::ceil(5.0 * doubled));
}

std::vector<LadderLevel> mv_table4_ladder(int levels) {
    std::vector<LadderLevel> ladder;
    for (int k = 1; k <= levels; ++k)
        ladder.push_back({480, 120, control_refinement_count(k), 0.0});
    return ladder;
}

std::vector<LadderLevel> mv_table5_ladder(int levels) {
    std::vector<LadderLevel> ladder;
    for (int k = 1; k <= levels; ++k)
        ladder.push_back({50L << (k - 1), 800L << (k - 1), control_refinement_count(k), 0.0});
    return ladder;
}

std::vector<LadderLevel> mv_joint_ladder(int levels, int policies) {
    std::vector<LadderLevel> ladder;
    for (int k = 0; k < levels; ++k)
        ladder.push_back({320L << k, 1280L * (1L << k) + 1, policies, 0.0});
    return ladder;
}

} // namespace hjb
