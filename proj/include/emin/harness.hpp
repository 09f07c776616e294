#ifndef EMIN_HARNESS_HPP
#define EMIN_HARNESS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "emin/grid.hpp"

namespace emin::harness {

struct SGridSpec {
    int count = 6;
    double min_frac = 0.125;  // of ||f||_p
    double max_frac = 1.0;
};

struct OperatorSpec {
    std::string kind = "wavelet_projection";  // or "hilbert"
    double keep_prob = 0.5;
};

struct WeightRangeSpec {
    double w_beta_lo = -0.5, w_beta_hi = 0.0;   // A1 range for power weights
    double v_beta_lo = 0.0, v_beta_hi = 0.25;   // inside the A_p range
};

struct ExperimentConfig {
    std::uint64_t seed = 1;
    std::vector<int> J_values = {10};
    std::vector<double> p_values = {1.5, 2.0, 3.0};
    SGridSpec s_grid;
    std::string family = "both";  // haar | db4 | both
    OperatorSpec op;
    WeightRangeSpec weights;
    double dilation = 30.0;
    int corpus_size = 200;
    std::vector<std::string> experiments = {"theorem2"};
    std::string out_prefix = "out/run";
    int workers = 0;  // 0: EMIN_WORKERS env or hardware default
    std::string baselines_path;

    void validate() const;
    std::string canonical_json() const;
    std::string hash() const;  // FNV-1a of canonical_json

    static ExperimentConfig from_json_text(const std::string& text);
    static ExperimentConfig from_json_file(const std::string& path);
};

/// The fixed corpus recipe: sparse spikes at random cells + smooth
/// low-frequency part + uniform noise at amplitude 0.25, each component
/// optionally dropped per case (at least one survives). Reproducible from
/// (seed, index) alone.
Signal make_corpus_signal(const Grid& grid, std::uint64_t seed, std::uint64_t case_index);

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// Experiment names understood by run_sweep / run_case.
const std::vector<std::string>& known_experiments();

/// Number of cases an experiment runs at one J under a config.
int experiment_case_count(const ExperimentConfig& cfg, const std::string& experiment, int J);

std::vector<std::string> experiment_columns(const std::string& experiment);

/// One row, recomputed from scratch; rows are pure functions of
/// (config, experiment, J, case index), which is what `replay` leans on.
std::vector<double> run_case(const ExperimentConfig& cfg, const std::string& experiment, int J,
                             int case_index);

Table run_experiment(const ExperimentConfig& cfg, const std::string& experiment, int J);

std::string table_to_csv(const Table& t);
void write_file(const std::string& path, const std::string& text);

/// Summary constants of one experiment table, keyed like "max_r1".
std::map<std::string, double> summarize(const std::string& experiment, const Table& t);

struct RunOutput {
    std::map<std::string, double> constants;  // "<exp>.J<j>.<name>" and "<exp>.<name>"
    std::vector<std::string> csv_files;
    bool baselines_ok = true;
    std::vector<std::string> baseline_failures;
};

RunOutput run_sweep(const ExperimentConfig& cfg);

struct BaselineStore {
    std::string config_hash;
    std::map<std::string, double> constants;

    static BaselineStore load(const std::string& path);
    void save(const std::string& path) const;
};

/// Measured constants * 1.1 become the stored baselines. Refuses to overwrite
/// an existing store unless force is set, in which case the old file is
/// archived with a timestamp suffix.
BaselineStore record_baselines(const ExperimentConfig& cfg, const std::string& out_path,
                               bool force);

/// Recompute CSV row `row_index` (0-based, excluding the header) and compare
/// every column within rel_tol. Returns the failure messages (empty = match).
std::vector<std::string> replay_row(const ExperimentConfig& cfg, const std::string& experiment,
                                    int J, const std::string& csv_path, int row_index,
                                    double rel_tol = 1e-12);

}  // namespace emin::harness

#endif  // EMIN_HARNESS_HPP
