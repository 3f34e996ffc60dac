#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sparsenorm/highdim.hpp"
#include "sparsenorm/lowdim.hpp"
#include "sparsenorm/model.hpp"
#include "sparsenorm/parallel.hpp"

namespace sparsenorm {

enum class Task { estimate_norm, estimate_q, detect };
enum class RegimeChoice { low, high, automatic };

Task parse_task(const std::string& tag);
std::string to_string(Task t);
RegimeChoice parse_regime_choice(const std::string& tag);

/// Grid over the per-split size n. p, s and kappa are rules evaluated per
/// grid point: p sees {n}, s sees {n, p}, kappa sees {n, N, p, s, sigma}.
struct GridSpec {
    std::vector<int> n;
    std::string p_rule = "n/2";
    std::string s_rule = "1";
    std::vector<double> sigma{1.0};
    std::vector<std::string> kappa_rules{"0"};
};

struct ExperimentConfig {
    std::string name = "experiment";
    GridSpec grid;
    RegimeChoice regime = RegimeChoice::automatic;
    Task task = Task::estimate_norm;
    int replications = 100;
    double alpha_low = 1.5;
    double alpha_high = 1.0;
    double c1 = 1.5;
    SlopeOptions slope;
    Prelim prelim = Prelim::slope;
    std::optional<double> beta;  // detect: calibrated from delta when absent
    double delta = 0.1;
    int calibration_trials = 2000;
    std::uint64_t seed = 1;
    EntryLaw design = EntryLaw::standard_normal;
    EntryLaw noise = EntryLaw::standard_normal;
    SignPattern pattern = SignPattern::equal;
    int threads = 0;  // 0: hardware concurrency

    void validate() const;
};

/// Parses the JSON config documented in docs/config.md. Throws ConfigError.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string config_fingerprint(const ExperimentConfig& cfg);

struct GridPoint {
    int index = 0;
    std::string config_id;
    int n = 0;
    int N = 0;
    int p = 0;
    int s = 0;
    double sigma = 1.0;
    double kappa = 0.0;
    int kappa_index = 0;
    Regime regime = Regime::low;
    Branch branch = Branch::dense;
    int parts = 2;
};

/// Auto regime: low-dimensional when p <= n/2 (per-split n).
std::vector<GridPoint> expand_grid(const ExperimentConfig& cfg);

struct TrialRecord {
    std::string config_id;
    std::uint64_t seed = 0;
    int grid_index = 0;
    int replication = 0;
    int n = 0;
    int p = 0;
    int s = 0;
    double sigma = 1.0;
    double true_q = 0.0;
    double true_lambda = 0.0;
    double q_hat = 0.0;
    double lambda_hat = 0.0;
    std::optional<int> decision;
    double err_q = 0.0;
    double err_lambda = 0.0;
    std::optional<std::string> error;

    bool ok() const { return !error.has_value(); }
};

std::uint64_t trial_seed(const ExperimentConfig& cfg, int grid_index, int replication);

/// One replication; never throws for estimator failures, which are
/// captured in `error`.
TrialRecord run_trial(const ExperimentConfig& cfg, const GridPoint& point, int replication,
                      std::optional<double> beta = std::nullopt);

/// beta used at a grid point for the detect task.
double resolve_beta(const ExperimentConfig& cfg, const GridPoint& point);

/// All replications of all grid points, ordered by (grid index, replication)
/// regardless of the thread count.
std::vector<TrialRecord> run_trials(const ExperimentConfig& cfg);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::vector<std::pair<double, double>> points;  // (log x, log y)
};

/// Ordinary least squares on (log x, log y). Throws InvalidArgument on
/// fewer than two points or nonpositive values.
RateFit fit_rate(const std::vector<std::pair<double, double>>& xy);

enum class RateKind { phi, q, rho };
RateKind parse_rate_kind(const std::string& tag);

/// Rate displays with all constants set to 1.
double theoretical_rate(int p, int N, int s, double sigma, double kappa, RateKind which);

struct GridSummary {
    std::string config_id;
    int n = 0;
    int p = 0;
    int s = 0;
    double sigma = 1.0;
    int trials = 0;
    int failed = 0;
    double mean_q_hat = 0.0;
    double mean_lambda_hat = 0.0;
    double mse_q = 0.0;
    double mse_lambda = 0.0;
    double median_abs_err_q = 0.0;
    double median_abs_err_lambda = 0.0;
    double quantile_abs_err_q = 0.0;  // (1 - delta) quantile
    double quantile_abs_err_lambda = 0.0;
    std::optional<double> rejection_rate;
};

/// Aggregates records sharing a config_id, in first-appearance order.
/// Failed trials are counted and excluded.
std::vector<GridSummary> summarize(const std::vector<TrialRecord>& records, double delta);

void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records);
std::vector<TrialRecord> read_records_csv(std::istream& in);

/// Writes records.csv and summary.json under `dir`.
void report(const ExperimentConfig& cfg, const std::vector<GridPoint>& grid,
            const std::vector<TrialRecord>& records, const std::string& dir);

/// JSON summary text: per grid point statistics, theoretical rates,
/// empirical/theoretical ratios and log-log rate fits across n.
std::string summary_json(const ExperimentConfig& cfg, const std::vector<GridPoint>& grid,
                         const std::vector<TrialRecord>& records);

/// Recomputes per config_id aggregates from a records CSV and fits the
/// chosen metric against n within each sigma group.
std::string rates_json(const std::vector<TrialRecord>& records, const std::string& metric, double delta);

}  // namespace sparsenorm
