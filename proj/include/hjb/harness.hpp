// Convergence-study driver: runs refinement ladders over (N, M, J, c),
// builds increment/ratio tables and writes the CSV artifacts.
#pragma once

#include "hjb/models.hpp"
#include "hjb/pcpt.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hjb {

enum class Model { uv, mv_unbounded, mv_bounded };
enum class SolverKind { pcpt, direct, fixed_control };

struct LadderLevel {
    long steps = 0;    // N, timesteps
    long nodes = 0;    // M, spatial nodes
    int policies = 1;  // J
    double cost = 0.0; // c
};

struct ConvergenceRow {
    int level = 0;
    long steps = 0;
    long nodes = 0;
    int policies = 1;
    double cost = 0.0;
    std::optional<double> value;
    std::optional<double> error;
    std::optional<double> increment;  // V_k - V_{k-1}
    // Ratio of successive increments (V_{k-1}-V_{k-2}) / (V_k-V_{k-1});
    // near 2 for a first-order method under grid doubling.
    std::optional<double> ratio;

    bool operator==(const ConvergenceRow&) const = default;
};

struct StudySpec {
    Model model = Model::uv;
    SolverKind solver = SolverKind::pcpt;
    double fixed_control = 0.0;
    InterpVariant interp = InterpVariant::linear;
    InterpRouting routing = InterpRouting::direct;
    MeshStrategy mesh_strategy = MeshStrategy::per_policy;
    std::vector<LadderLevel> ladder;
    std::optional<double> reference;  // error column is |value - reference|
    bool companion_moments = false;   // implied (E, sqrt Var); mv_unbounded + pcpt
    Exec exec = Exec::openmp;
    UvParams uv;
    MvParams mv;
};

struct LevelMoments {
    double expectation = 0.0;
    double sqrt_variance = 0.0;
};

struct StudyResult {
    std::vector<ConvergenceRow> rows;
    std::vector<std::optional<LevelMoments>> moments;  // aligned with rows
    std::optional<double> richardson;                  // from the two finest values
};

double compute_error(double value, double reference);

// First-order Richardson value 2 V_last - V_prev from the two finest levels.
double richardson_extrapolate(double v_last, double v_prev);

// Increments and increment ratios for a ladder of values; ratios appear only
// where both increments exist and the denominator is nonzero.
std::vector<ConvergenceRow> build_table(std::span<const double> values);

StudyResult run_study(const StudySpec& spec);

// CSV artifacts: header level,N,M,J,c,value,error,increment,ratio with
// absent cells empty and 12 significant digits.
std::string to_csv(const std::vector<ConvergenceRow>& rows);
void write_csv(const std::vector<ConvergenceRow>& rows, const std::string& path);
std::vector<ConvergenceRow> parse_csv(const std::string& text);
std::vector<ConvergenceRow> read_csv(const std::string& path);

// Ladder builders for the published studies.
std::vector<LadderLevel> uv_table2_ladder(int levels, double cost);
std::vector<LadderLevel> mv_table4_ladder(int levels);          // fixed N=480, M=120
std::vector<LadderLevel> mv_table5_ladder(int levels);          // M=800*2^k, N=50*2^k
std::vector<LadderLevel> mv_joint_ladder(int levels, int policies);
int control_refinement_count(int level);  // J_k = ceil(5 sqrt(2)^{k-1})

} // namespace hjb
