#include "sparsenorm/quadratic.hpp"

#include <json.hpp>

#include "sparsenorm/errors.hpp"

namespace sparsenorm {

std::string to_string(Branch b) { return b == Branch::dense ? "dense" : "sparse"; }
std::string to_string(Regime r) { return r == Regime::low ? "low" : "high"; }

Regime parse_regime(const std::string& tag) {
    if (tag == "low") return Regime::low;
    if (tag == "high") return Regime::high;
    throw InvalidArgument("unknown regime: " + tag);
}

ThresholdMatrix ThresholdMatrix::full(Matrix m) {
    require(m.rows() == m.cols(), "ThresholdMatrix: matrix must be square");
    for (Eigen::Index j = 0; j < m.rows(); ++j)
        require(m(j, j) >= 0.0, "ThresholdMatrix: negative diagonal entry");
    return ThresholdMatrix(std::move(m));
}

ThresholdMatrix ThresholdMatrix::scaled_identity(double c) {
    require(c >= 0.0, "ThresholdMatrix: negative diagonal entry");
    return ThresholdMatrix(c);
}

double ThresholdMatrix::diag(int j) const {
    if (const auto* m = std::get_if<Matrix>(&m_)) return (*m)(j, j);
    return std::get<double>(m_);
}

std::string to_json(const FunctionalEstimate& est) {
    nlohmann::json j;
    j["q_hat"] = est.q_hat;
    j["lambda_hat"] = est.lambda_hat;
    if (est.sigma_hat)
        j["sigma_hat"] = *est.sigma_hat;
    else
        j["sigma_hat"] = nullptr;
    j["branch"] = to_string(est.branch);
    j["regime"] = to_string(est.regime);
    j["parts"] = est.parts;
    j["n_per_split"] = est.n_per_split;
    j["dropped_rows"] = est.dropped_rows;
    if (est.indicator_threshold) j["threshold"] = *est.indicator_threshold;
    return j.dump(2);
}

ComponentEstimates component_estimates(const Vector& prelim, const Matrix& X2, const Vector& Y2,
                                       int split_tag) {
    const Eigen::Index n = X2.rows();
    require(n >= 2, "component_estimates: need at least two rows");
    require(Y2.size() == n, "component_estimates: X2 and Y2 row counts differ");
    require(prelim.size() == X2.cols(), "component_estimates: prelim length differs from p");

    const Vector r = Y2 - X2 * prelim;
    const Matrix Z = X2.array().colwise() * r.array();
    const Vector sum = Z.colwise().sum().transpose();
    const Vector sum_sq = Z.array().square().colwise().sum().transpose();

    const double nd = static_cast<double>(n);
    ComponentEstimates out;
    out.prelim = prelim;
    out.split_tag = split_tag;
    out.a = prelim.array().square() + (2.0 / nd) * prelim.array() * sum.array() +
            (sum.array().square() - sum_sq.array()) / (nd * (nd - 1.0));
    if (!out.a.allFinite()) throw NumericError("component_estimates: non-finite a_j");
    return out;
}

DebiasedVector debias(const Vector& prelim, const Matrix& X, const Vector& Y) {
    require(X.rows() >= 1, "debias: need at least one row");
    require(Y.size() == X.rows(), "debias: X and Y row counts differ");
    require(prelim.size() == X.cols(), "debias: prelim length differs from p");
    const double n = static_cast<double>(X.rows());
    return DebiasedVector{prelim + X.transpose() * (Y - X * prelim) / n};
}

double q_dense(const Vector& prelim, const Matrix& X2, const Vector& Y2) {
    return component_estimates(prelim, X2, Y2).a.sum();
}

double sparse_threshold(double alpha, double sigma_hat, double m_jj, int p, int s) {
    const double ratio = static_cast<double>(p) / (static_cast<double>(s) * static_cast<double>(s));
    return alpha * sigma_hat * std::sqrt(m_jj * std::log1p(ratio));
}

double q_sparse(const Vector& prelim, const Vector& bar_theta, double sigma_hat,
                const ThresholdMatrix& M, double alpha, int s, const Matrix& X2, const Vector& Y2) {
    require(alpha >= 0.0, "q_sparse: alpha must be nonnegative");
    require(sigma_hat > 0.0 && std::isfinite(sigma_hat), "q_sparse: sigma_hat must be positive");
    require(s >= 1, "q_sparse: s must be at least 1");
    require(bar_theta.size() == prelim.size(), "q_sparse: bar_theta length differs from p");
    const int p = static_cast<int>(prelim.size());
    const Vector a = component_estimates(prelim, X2, Y2).a;
    double q = 0.0;
    for (int j = 0; j < p; ++j) {
        const double m = M.diag(j);
        require(m >= 0.0, "q_sparse: negative M_jj");
        if (std::abs(bar_theta(j)) > sparse_threshold(alpha, sigma_hat, m, p, s)) q += a(j);
    }
    return q;
}

}  // namespace sparsenorm
