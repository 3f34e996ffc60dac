#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "sparsenorm/calibration.hpp"
#include "sparsenorm/errors.hpp"
#include "sparsenorm/harness.hpp"
#include "sparsenorm/highdim.hpp"
#include "sparsenorm/lower_bounds.hpp"
#include "sparsenorm/lowdim.hpp"
#include "sparsenorm/sample_io.hpp"
#include "sparsenorm/slope.hpp"

using namespace sparsenorm;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct EstimateArgs {
    std::string regime = "low";
    std::string input;
    int s = 1;
    std::optional<double> alpha;
    double c1 = 1.5;
    std::string prelim = "slope";
    SlopeOptions slope;
};

void add_estimate_options(CLI::App* cmd, EstimateArgs& a) {
    cmd->add_option("--regime", a.regime, "low or high")->check(CLI::IsMember({"low", "high"}));
    cmd->add_option("--s", a.s, "sparsity budget")->required();
    cmd->add_option("--alpha", a.alpha, "indicator threshold constant (default 1.5 low, 1.0 high)");
    cmd->add_option("--c1", a.c1, "SLOPE weight constant");
    cmd->add_option("--prelim", a.prelim, "high regime preliminary: slope or zero")
        ->check(CLI::IsMember({"slope", "zero"}));
    cmd->add_option("--max-iter", a.slope.max_iter, "SLOPE iteration cap");
    cmd->add_option("--tol", a.slope.tol, "SLOPE relative stopping tolerance");
    cmd->add_option("--input", a.input, "sample CSV")->required();
}

double alpha_for(const EstimateArgs& a) {
    if (a.alpha) return *a.alpha;
    return a.regime == "low" ? TuningParams{}.alpha : HighDimParams{}.alpha;
}

FunctionalEstimate run_estimate(const EstimateArgs& a, const RegressionSample& sample) {
    if (a.regime == "low") {
        if (a.prelim != "slope") throw ConfigError("--prelim applies to the high regime only");
        return estimate_lowdim(sample, a.s, TuningParams{alpha_for(a), 1.0});
    }
    if (a.prelim == "zero") return estimate_zero_prelim(sample);
    return estimate_highdim(sample, a.s, HighDimParams{alpha_for(a), a.c1, a.slope});
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Norm estimation and signal detection for sparse linear regression"};
    app.require_subcommand(1);

    // gen
    int gen_N = 100, gen_p = 10, gen_s = 1;
    double gen_kappa = 1.0, gen_sigma = 1.0;
    std::uint64_t gen_seed = 1;
    std::string gen_design = "standard-normal", gen_noise = "standard-normal", gen_pattern = "equal", gen_out;
    auto* gen = app.add_subcommand("gen", "draw a synthetic sample with an s-sparse parameter");
    gen->add_option("--N", gen_N, "rows")->required();
    gen->add_option("--p", gen_p, "columns")->required();
    gen->add_option("--s", gen_s, "nonzero coordinates");
    gen->add_option("--kappa", gen_kappa, "norm of the parameter");
    gen->add_option("--sigma", gen_sigma, "noise level");
    gen->add_option("--seed", gen_seed, "random seed");
    gen->add_option("--design", gen_design, "design law");
    gen->add_option("--noise", gen_noise, "noise law");
    gen->add_option("--pattern", gen_pattern, "equal or random-signs");
    gen->add_option("--out", gen_out, "output CSV; truth goes to <stem>.truth.json")->required();

    EstimateArgs est_args;
    auto* estimate = app.add_subcommand("estimate", "estimate the squared norm and the norm");
    add_estimate_options(estimate, est_args);

    EstimateArgs det_args;
    std::optional<double> det_beta, det_delta;
    int det_trials = 2000;
    std::uint64_t det_seed = 1;
    auto* detect = app.add_subcommand("detect", "test theta = 0 against a separated alternative");
    add_estimate_options(detect, det_args);
    auto* beta_opt = detect->add_option("--beta", det_beta, "test constant");
    auto* delta_opt = detect->add_option("--delta", det_delta, "target level; beta calibrated by null simulation");
    beta_opt->excludes(delta_opt);
    detect->add_option("--calibration-trials", det_trials, "null simulations for calibration");
    detect->add_option("--seed", det_seed, "calibration seed");

    double sf_c1 = 1.5;
    SlopeOptions sf_opts;
    std::string sf_input;
    auto* slope_fit = app.add_subcommand("slope-fit", "square-root SLOPE on a whole sample");
    slope_fit->add_option("--c1", sf_c1, "SLOPE weight constant");
    slope_fit->add_option("--max-iter", sf_opts.max_iter, "iteration cap");
    slope_fit->add_option("--tol", sf_opts.tol, "relative stopping tolerance");
    slope_fit->add_option("--input", sf_input, "sample CSV")->required();

    std::string sim_config, sim_out = "results";
    std::optional<int> sim_threads;
    auto* simulate = app.add_subcommand("simulate", "run a Monte Carlo experiment");
    simulate->add_option("--config", sim_config, "experiment JSON")->required();
    simulate->add_option("--out", sim_out, "output directory");
    simulate->add_option("--threads", sim_threads, "worker threads (0: all cores)");

    std::string rates_from, rates_metric = "mse_lambda";
    double rates_delta = 0.1;
    auto* rates = app.add_subcommand("rates", "log-log rate fits from a records CSV");
    rates->add_option("--from", rates_from, "records.csv")->required();
    rates->add_option("--metric", rates_metric, "mse_q, mse_lambda, median_abs_err_*, quantile_abs_err_*, rejection_rate");
    rates->add_option("--delta", rates_delta, "quantile level is 1 - delta");

    int lb_p = 0, lb_N = 0, lb_s = 1;
    double lb_delta = 0.1, lb_kappa = 0.0, lb_sigma = 1.0;
    auto* lower = app.add_subcommand("lower-bound", "lower-bound radii and Bayes risk bound");
    lower->add_option("--p", lb_p, "dimension")->required();
    lower->add_option("--N", lb_N, "sample size")->required();
    lower->add_option("--s", lb_s, "sparsity")->required();
    lower->add_option("--delta", lb_delta, "risk level in (0, 1)")->required();
    lower->add_option("--kappa", lb_kappa, "norm bound for the squared-norm rate");
    lower->add_option("--sigma", lb_sigma, "noise level");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*gen) {
            Rng rng = make_rng(gen_seed);
            ModelSpec spec;
            spec.theta = sample_sparse_theta(gen_p, gen_s, gen_kappa, parse_sign_pattern(gen_pattern), rng);
            spec.sigma = gen_sigma;
            spec.design = parse_design_law(gen_design);
            spec.noise = parse_noise_law(gen_noise);
            RegressionSample sample = synthesize(spec, gen_N, rng);
            if (sample.truth) sample.truth->seed = gen_seed;
            save_sample(gen_out, sample);
            std::cout << nlohmann::json{{"csv", gen_out}, {"truth", truth_sidecar_path(gen_out)}}.dump() << '\n';
        } else if (*estimate) {
            const RegressionSample sample = load_sample(est_args.input);
            std::cout << to_json(run_estimate(est_args, sample)) << '\n';
        } else if (*detect) {
            if (!det_beta && !det_delta) throw ConfigError("detect needs --beta or --delta");
            if (det_args.prelim == "zero") throw ConfigError("detect needs a noise-level estimate; use --prelim slope");
            const RegressionSample sample = load_sample(det_args.input);
            double beta = 0.0;
            if (det_beta) {
                beta = *det_beta;
            } else {
                CalibrationQuery q;
                q.regime = parse_regime(det_args.regime);
                q.p = sample.cols();
                q.N = sample.rows();
                q.s = det_args.s;
                q.delta = *det_delta;
                q.alpha = alpha_for(det_args);
                q.high = HighDimParams{alpha_for(det_args), det_args.c1, det_args.slope};
                q.trials = det_trials;
                q.seed = det_seed;
                beta = calibrate_beta(q);
            }
            const FunctionalEstimate est = run_estimate(det_args, sample);
            std::cout << to_json(decide(est, beta, det_args.s, sample.cols(), sample.rows())) << '\n';
        } else if (*slope_fit) {
            const RegressionSample sample = load_sample(sf_input);
            std::cout << to_json(sqrt_slope_fit(sample.X, sample.Y, sf_c1, sf_opts)) << '\n';
        } else if (*simulate) {
            ExperimentConfig cfg = load_config(sim_config);
            if (sim_threads) cfg.threads = *sim_threads;
            const auto grid = expand_grid(cfg);
            const auto records = run_trials(cfg);
            report(cfg, grid, records, sim_out);
            int failed = 0;
            for (const auto& r : records) failed += r.ok() ? 0 : 1;
            std::cout << nlohmann::json{{"records", records.size()}, {"failed", failed}, {"out", sim_out}}.dump() << '\n';
        } else if (*rates) {
            std::ifstream in(rates_from);
            if (!in) throw ConfigError("cannot read " + rates_from);
            std::cout << rates_json(read_records_csv(in), rates_metric, rates_delta) << '\n';
        } else if (*lower) {
            const LowerRadius lr = minimax_testing_lower_radius(lb_p, lb_N, lb_s, lb_delta);
            const double tau = tau_from_rho(lr.r);
            nlohmann::json j;
            j["A"] = lr.A;
            j["r"] = lr.r;
            j["rho"] = lr.rho;
            j["s_truncated"] = lr.s_truncated;
            j["tau"] = tau;
            j["q_bar"] = q_lower_bound(lb_p, lb_N, lb_s, lb_sigma, lb_kappa);
            j["mgf"] = hypergeometric_mgf_bound(lb_p, lr.s_truncated, lb_N, tau);
            j["bayes_risk_bound"] = bayes_testing_risk_bound(lb_p, lr.s_truncated, lb_N, tau);
            std::cout << j.dump(2) << '\n';
        }
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return 0;
}
