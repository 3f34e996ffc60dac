#pragma once

#include <optional>

#include "sparsenorm/detection.hpp"
#include "sparsenorm/quadratic.hpp"
#include "sparsenorm/slope.hpp"

namespace sparsenorm {

struct HighDimParams {
    double alpha = 1.0;
    double c1 = 1.5;
    SlopeOptions slope;
};

enum class Prelim { slope, zero };
Prelim parse_prelim(const std::string& tag);

/// Which split (1-based) fed each stage of the pipeline.
struct SplitProvenance {
    int prelim = 1;
    int quadratic = 2;
    std::optional<int> debias;  // sparse branch only
};

struct HighDimFitBundle {
    std::optional<SlopeFit> slope_fit;
    std::optional<DebiasedVector> theta_tilde;
    std::optional<double> sigma_used;  // sqrt(2) * sigma_srs, sparse branch
    SplitProvenance provenance;
};

struct HighDimResult {
    FunctionalEstimate estimate;
    HighDimFitBundle bundle;
};

/// sqrt(2) * sigma_srs * alpha * sqrt(log(1 + p/s^2) / n)
double highdim_indicator_threshold(double alpha, double sigma_srs, int p, int s, int n);

/// Dense zone: two-way split, SLOPE on part 1, dense quadratic on part 2.
/// Sparse zone: three-way split, SLOPE on part 1, debiasing on part 3,
/// thresholded quadratic on part 2.
HighDimResult estimate_highdim_full(const RegressionSample& sample, int s, const HighDimParams& params);

FunctionalEstimate estimate_highdim(const RegressionSample& sample, int s, const HighDimParams& params);

/// Dense quadratic with a zero preliminary vector on the whole sample.
FunctionalEstimate estimate_zero_prelim(const RegressionSample& sample);

Decision detect_highdim(const RegressionSample& sample, int s, double beta, const HighDimParams& params);

}  // namespace sparsenorm
