#include "sparsenorm/lowdim.hpp"

#include <cmath>

#include "sparsenorm/errors.hpp"

namespace sparsenorm {

OlsFit ols_fit(const Matrix& X1, const Vector& Y1) {
    const Eigen::Index n = X1.rows();
    const Eigen::Index p = X1.cols();
    require(Y1.size() == n, "ols_fit: X1 and Y1 row counts differ");
    require(p >= 1, "ols_fit: empty design");
    if (n <= p) throw InvalidArgument("ols_fit: need n > p (n=" + std::to_string(n) + ", p=" + std::to_string(p) + ")");

    const Eigen::BDCSVD<Matrix> svd(X1);
    const auto& sv = svd.singularValues();
    if (!(sv(p - 1) >= kSingularTolerance * sv(0)))
        throw NumericError("ols_fit: singular design (condition number above 1e10)");

    const Eigen::ColPivHouseholderQR<Matrix> qr(X1);
    OlsFit fit;
    fit.n = static_cast<int>(n);
    fit.p = static_cast<int>(p);
    fit.theta_hat = qr.solve(Y1);

    // (X^T X)^{-1} = P R^{-1} R^{-T} P^T
    const Matrix R = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
    const Matrix R_inv = R.triangularView<Eigen::Upper>().solve(Matrix::Identity(p, p));
    const Matrix inner = R_inv * R_inv.transpose();
    const auto& P = qr.colsPermutation();
    fit.gram_inverse = P * inner * P.transpose();

    fit.sigma_hat = (Y1 - X1 * fit.theta_hat).norm() / std::sqrt(static_cast<double>(n - p));
    if (!fit.theta_hat.allFinite() || !std::isfinite(fit.sigma_hat))
        throw NumericError("ols_fit: non-finite solution");
    return fit;
}

FunctionalEstimate estimate_lowdim(const RegressionSample& sample, int s, const TuningParams& params) {
    const int p = sample.cols();
    require(s >= 1 && s <= p, "estimate_lowdim: need 1 <= s <= p");
    require(params.alpha > 0.0, "estimate_lowdim: alpha must be positive");
    const SampleSplit split = split_sample(sample, 2);
    const auto& part1 = split.subsamples[0];
    const auto& part2 = split.subsamples[1];

    const OlsFit ols = ols_fit(part1.X, part1.Y);
    FunctionalEstimate est;
    est.regime = Regime::low;
    est.branch = branch_for(s, p);
    est.sigma_hat = ols.sigma_hat;
    est.parts = 2;
    est.n_per_split = split.n;
    est.dropped_rows = split.dropped_rows;

    if (est.branch == Branch::dense) {
        est.q_hat = q_dense(ols.theta_hat, part2.X, part2.Y);
    } else {
        est.q_hat = q_sparse(ols.theta_hat, ols.theta_hat, ols.sigma_hat, ThresholdMatrix::full(ols.gram_inverse),
                             params.alpha, s, part2.X, part2.Y);
    }
    est.lambda_hat = norm_from_q(est.q_hat);
    return est;
}

Decision detect_lowdim(const RegressionSample& sample, int s, const TuningParams& params) {
    const auto est = estimate_lowdim(sample, s, params);
    return decide(est, params.beta, s, sample.cols(), sample.rows());
}

}  // namespace sparsenorm
