#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "rof/estimator.hpp"

namespace rof {

enum class RefinementKind { Uniform, Graded, Adaptive, Graded1D };

std::string to_string(RefinementKind k);
RefinementKind refinement_from_string(std::string_view name);

/// Complete description of one convergence experiment. The presets for the
/// examples 6.1 to 6.4 are returned by `default_spec`.
struct ExperimentSpec {
    std::string example = "6.3";
    Space space = Space::CR;
    RefinementKind refinement = RefinementKind::Graded;
    SquareLayout layout = SquareLayout::TwoCells;
    int levels = 13;
    int first_level = 2;
    double beta = 1.0;
    double alpha = 10.0;
    /// two_balls, char_ball or sign_1d.
    std::string data = "char_ball";
    double radius = 0.5;
    double angle_deg = 0.0;
    Vec2 shift = Vec2::Zero();
    /// fixed | h^1 | h^2 | h^beta
    std::string epsilon_rule = "h^2";
    double epsilon = 0.0;
    /// h/20 | h^2/20 | h^(beta+1)/20 | graded (h/20 for beta = 1, else h^(beta+1)/20)
    std::string eps_stop_rule = "h^2/20";
    /// zero | exact-trace
    std::string dirichlet = "zero";
    double fraction = 0.5;
    Scaling driver = Scaling::Unscaled;
    Space indicator_space = Space::P1;
    bool projected_fidelity = true;
    int max_iterations = 100000;
    double min_eps_stop = 1e-10;
    std::string out;

    void validate() const;
    bool operator==(const ExperimentSpec&) const = default;
};

/// Preset for example id 6.1, 6.2, 6.3 or 6.4.
ExperimentSpec default_spec(const std::string& example, Space space = Space::CR);

struct RunRecord {
    int level = 0;
    Index N_vertices = 0;
    Index N_cells = 0;
    Index N_sides = 0;
    double h_min = 0.0;
    double h_max = 0.0;
    double h_avg = 0.0;
    double epsilon = 0.0;
    double eps_stop = 0.0;
    int iterations = 0;
    bool converged = false;
    double error_L2 = 0.0;
    double error_PiL2 = 0.0;
    /// Errors of both spaces when the run computes both (adaptive), else NaN.
    double error_L2_cr = 0.0;
    double error_L2_p1 = 0.0;
    double eta_total = 0.0;
    double osc_total = 0.0;
    double E_est = 0.0;
    double E_est_global = 0.0;
    double E_est_local = 0.0;
    double beta_emergent = 0.0;
    double beta_slope = 0.0;
    double eoc = 0.0;
    double max_center_modulus = 0.0;
    double max_divergence_defect = 0.0;
    double marked_near_jump = 0.0;
    double wall_time = 0.0;
};

using ProgressCallback = std::function<void(const RunRecord&)>;

/// Runs all levels of the spec; records are passed to `progress` as soon as
/// they are available.
std::vector<RunRecord> run_experiment(const ExperimentSpec& spec, const ProgressCallback& progress = {});

/// rate_i = log(e_{i-1}/e_i) / log(h_{i-1}/h_i); the first entry is NaN.
std::vector<double> eoc(std::span<const double> errors, std::span<const double> h);
/// Least-squares slope of log e against log h over the last `last` entries.
double eoc_fit(std::span<const double> errors, std::span<const double> h, int last);

/// Per-level table with the columns of `write_level_csv_header`.
void emit_csv(const std::vector<RunRecord>& records, std::ostream& os);
void emit_csv(const std::vector<RunRecord>& records, const std::string& path);
/// All RunRecord fields except the wall time.
void emit_details_csv(const std::vector<RunRecord>& records, std::ostream& os);

/// Flat `key = value` text; `#` starts a comment. Unknown keys are rejected.
ExperimentSpec parse_config(std::istream& is);
ExperimentSpec parse_config(const std::string& path);
void write_config(std::ostream& os, const ExperimentSpec& spec);

/// Rate band of an example as used by `--check`.
struct CheckResult {
    bool pass = true;
    std::string message;
};
CheckResult check_records(const ExperimentSpec& spec, const std::vector<RunRecord>& records);

struct SummaryRow {
    std::string name;
    std::string space;
    int levels = 0;
    double final_eoc = 0.0;
    double fitted_eoc = 0.0;
    double beta_emergent = 0.0;
    double wall_time = 0.0;
    bool ok = false;
    bool check = true;
    std::string message;
};

/// Runs 6.1 (r = 0.4, 5), 6.2 (beta = 1..4), 6.3 (P1, CR) and 6.4 (P1, CR)
/// with one adaptive run feeding both 6.4 rows. Failures are isolated per row.
/// Outputs go to `out_dir` when it is not empty.
std::vector<SummaryRow> run_all_defaults(const std::string& out_dir = {}, std::ostream* log = nullptr);
void print_summary(std::ostream& os, const std::vector<SummaryRow>& rows);

}  // namespace rof
