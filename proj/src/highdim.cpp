#include "sparsenorm/highdim.hpp"

#include <cmath>

#include "sparsenorm/errors.hpp"

namespace sparsenorm {

Prelim parse_prelim(const std::string& tag) {
    if (tag == "slope") return Prelim::slope;
    if (tag == "zero") return Prelim::zero;
    throw InvalidArgument("unknown preliminary estimator: " + tag);
}

double highdim_indicator_threshold(double alpha, double sigma_srs, int p, int s, int n) {
    // M = I/n with sigma_hat = sqrt(2) * sigma_srs in the generic threshold
    return sparse_threshold(alpha, std::sqrt(2.0) * sigma_srs, 1.0 / static_cast<double>(n), p, s);
}

HighDimResult estimate_highdim_full(const RegressionSample& sample, int s, const HighDimParams& params) {
    const int p = sample.cols();
    require(s >= 1 && s <= p, "estimate_highdim: need 1 <= s <= p");
    require(params.alpha > 0.0, "estimate_highdim: alpha must be positive");

    HighDimResult out;
    auto& est = out.estimate;
    est.regime = Regime::high;
    est.branch = branch_for(s, p);
    est.parts = est.branch == Branch::dense ? 2 : 3;

    const SampleSplit split = split_sample(sample, est.parts);
    est.n_per_split = split.n;
    est.dropped_rows = split.dropped_rows;
    const auto& part1 = split.subsamples[0];
    const auto& part2 = split.subsamples[1];

    const SlopeFit fit = sqrt_slope_fit(part1.X, part1.Y, params.c1, params.slope);
    est.sigma_hat = fit.sigma_hat;
    out.bundle.provenance.prelim = 1;
    out.bundle.provenance.quadratic = 2;

    if (est.branch == Branch::dense) {
        est.q_hat = q_dense(fit.theta_hat, part2.X, part2.Y);
    } else {
        const auto& part3 = split.subsamples[2];
        DebiasedVector tilde = debias(fit.theta_hat, part3.X, part3.Y);
        const double sigma_used = std::sqrt(2.0) * fit.sigma_hat;
        if (!(sigma_used > 0.0)) throw NumericError("estimate_highdim: SLOPE fit interpolates part 1, sigma_srs = 0");
        const auto M = ThresholdMatrix::scaled_identity(1.0 / static_cast<double>(split.n));
        est.q_hat = q_sparse(fit.theta_hat, tilde.theta_tilde, sigma_used, M, params.alpha, s, part2.X, part2.Y);
        est.indicator_threshold = highdim_indicator_threshold(params.alpha, fit.sigma_hat, p, s, split.n);
        out.bundle.theta_tilde = std::move(tilde);
        out.bundle.sigma_used = sigma_used;
        out.bundle.provenance.debias = 3;
    }
    est.lambda_hat = norm_from_q(est.q_hat);
    out.bundle.slope_fit = fit;
    return out;
}

FunctionalEstimate estimate_highdim(const RegressionSample& sample, int s, const HighDimParams& params) {
    return estimate_highdim_full(sample, s, params).estimate;
}

FunctionalEstimate estimate_zero_prelim(const RegressionSample& sample) {
    FunctionalEstimate est;
    est.regime = Regime::high;
    est.branch = Branch::dense;
    est.parts = 1;
    est.n_per_split = sample.rows();
    est.q_hat = q_dense(Vector::Zero(sample.cols()), sample.X, sample.Y);
    est.lambda_hat = norm_from_q(est.q_hat);
    return est;
}

Decision detect_highdim(const RegressionSample& sample, int s, double beta, const HighDimParams& params) {
    const auto est = estimate_highdim(sample, s, params);
    return decide(est, beta, s, sample.cols(), sample.rows());
}

}  // namespace sparsenorm
