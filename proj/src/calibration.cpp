#include "sparsenorm/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <vector>

#include "sparsenorm/errors.hpp"
#include "sparsenorm/parallel.hpp"

namespace sparsenorm {

double null_statistic(const FunctionalEstimate& est, int s, int p, int N) {
    if (!est.sigma_hat || !(*est.sigma_hat > 0.0)) throw NumericError("null_statistic: sigma_hat must be positive");
    return est.lambda_hat / (*est.sigma_hat * detection_scale(s, p, N));
}

double upper_quantile_beta(std::span<const double> stats, double delta) {
    require(!stats.empty(), "upper_quantile_beta: no statistics");
    require(delta > 0.0 && delta < 1.0, "upper_quantile_beta: delta must be in (0, 1)");
    std::vector<double> sorted(stats.begin(), stats.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    // at most floor(delta * K) statistics may reach beta
    const auto k = static_cast<std::size_t>(std::floor(delta * static_cast<double>(sorted.size())));
    if (k >= sorted.size()) return std::nextafter(0.0, 1.0);
    const double beta = std::nextafter(sorted[k], std::numeric_limits<double>::infinity());
    return std::max(beta, std::nextafter(0.0, 1.0));
}

namespace {

std::string cache_key(const CalibrationQuery& q) {
    std::ostringstream key;
    key.precision(17);
    key << to_string(q.regime) << '|' << q.p << '|' << q.N << '|' << q.s << '|' << q.delta << '|' << q.trials
        << '|' << q.seed << '|';
    if (q.regime == Regime::low)
        key << q.alpha;
    else
        key << q.high.alpha << '|' << q.high.c1 << '|' << q.high.slope.max_iter << '|' << q.high.slope.tol;
    return key.str();
}

std::mutex cache_mutex;
std::map<std::string, double>& cache() {
    static std::map<std::string, double> entries;
    return entries;
}

}  // namespace

double calibrate_beta(const CalibrationQuery& q) {
    require(q.trials >= 1, "calibrate_beta: trials must be positive");
    require(q.delta > 0.0 && q.delta < 1.0, "calibrate_beta: delta must be in (0, 1)");
    require(q.s >= 1 && q.s <= q.p, "calibrate_beta: need 1 <= s <= p");
    const std::string key = cache_key(q);
    {
        std::lock_guard lock(cache_mutex);
        if (auto it = cache().find(key); it != cache().end()) return it->second;
    }

    std::vector<double> stats(static_cast<std::size_t>(q.trials), std::numeric_limits<double>::quiet_NaN());
    ModelSpec null_model;
    null_model.theta = Vector::Zero(q.p);
    null_model.sigma = 1.0;
    parallel_for(q.trials, q.threads, [&](int i) {
        Rng rng = make_rng(derive_seed(q.seed, static_cast<std::uint64_t>(i)));
        const RegressionSample sample = synthesize(null_model, q.N, rng);
        try {
            const FunctionalEstimate est = q.regime == Regime::low
                                               ? estimate_lowdim(sample, q.s, TuningParams{q.alpha, 1.0})
                                               : estimate_highdim(sample, q.s, q.high);
            stats[static_cast<std::size_t>(i)] = null_statistic(est, q.s, q.p, q.N);
        } catch (const NumericError&) {
            // left as NaN and dropped below
        }
    });
    std::erase_if(stats, [](double v) { return std::isnan(v); });
    if (stats.size() * 2 < static_cast<std::size_t>(q.trials))
        throw NumericError("calibrate_beta: more than half of the null simulations failed");

    const double beta = upper_quantile_beta(stats, q.delta);
    std::lock_guard lock(cache_mutex);
    cache()[key] = beta;
    return beta;
}

}  // namespace sparsenorm
