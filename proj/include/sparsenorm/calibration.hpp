#pragma once

#include <cstdint>
#include <span>

#include "sparsenorm/highdim.hpp"
#include "sparsenorm/lowdim.hpp"

namespace sparsenorm {

struct CalibrationQuery {
    Regime regime = Regime::low;
    int p = 2;
    int N = 4;
    int s = 1;
    double delta = 0.1;
    double alpha = 1.5;  // low regime
    HighDimParams high;  // high regime
    int trials = 2000;
    std::uint64_t seed = 0;
    int threads = 0;  // not part of the cache key
};

/// Null statistic lambda_hat / (sigma_hat * detection_scale); the test
/// rejects iff this is >= beta.
double null_statistic(const FunctionalEstimate& est, int s, int p, int N);

/// Smallest beta whose empirical rejection rate on `stats` is <= delta.
double upper_quantile_beta(std::span<const double> stats, double delta);

/// Simulates theta = 0, sigma = 1 Gaussian samples and returns the beta
/// whose empirical null rejection rate is at most delta. Results are
/// memoized per query inside the process.
double calibrate_beta(const CalibrationQuery& q);

}  // namespace sparsenorm
