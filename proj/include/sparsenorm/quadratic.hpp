#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <variant>

#include "sparsenorm/model.hpp"

namespace sparsenorm {

enum class Branch { dense, sparse };
enum class Regime { low, high };

std::string to_string(Branch b);
std::string to_string(Regime r);
Regime parse_regime(const std::string& tag);

/// Sparse-zone rule shared by every pipeline: sparse iff s <= sqrt(p),
/// evaluated in integers (s*s <= p) so the boundary is exact.
inline Branch branch_for(int s, int p) {
    return static_cast<long long>(s) * s <= p ? Branch::sparse : Branch::dense;
}

struct ComponentEstimates {
    Vector a;        // a_j for j = 1..p
    Vector prelim;
    int split_tag = 2;
};

struct DebiasedVector {
    Vector theta_tilde;
};

/// Either a full p x p matrix or c * I. Only the diagonal is ever read.
class ThresholdMatrix {
public:
    static ThresholdMatrix full(Matrix m);
    static ThresholdMatrix scaled_identity(double c);

    double diag(int j) const;
    bool is_full() const { return std::holds_alternative<Matrix>(m_); }

private:
    explicit ThresholdMatrix(std::variant<Matrix, double> m) : m_(std::move(m)) {}
    std::variant<Matrix, double> m_;
};

struct FunctionalEstimate {
    double q_hat = 0.0;
    double lambda_hat = 0.0;
    std::optional<double> sigma_hat;
    Branch branch = Branch::dense;
    Regime regime = Regime::low;

    // provenance of the split actually used
    int parts = 1;
    int n_per_split = 0;
    int dropped_rows = 0;
    std::optional<double> indicator_threshold;  // common threshold, when one exists
};

std::string to_json(const FunctionalEstimate& est);

/// Centered per-coordinate squares. The k != l double sum is evaluated as
/// (sum_k z_kj)^2 - sum_k z_kj^2 with z_kj = X_kj r_k, r the residual.
ComponentEstimates component_estimates(const Vector& prelim, const Matrix& X2, const Vector& Y2,
                                       int split_tag = 2);

/// theta_hat + X^T (Y - X theta_hat) / n
DebiasedVector debias(const Vector& prelim, const Matrix& X, const Vector& Y);

double q_dense(const Vector& prelim, const Matrix& X2, const Vector& Y2);

/// Threshold of coordinate j: alpha * sigma_hat * sqrt(M_jj * log(1 + p/s^2)).
double sparse_threshold(double alpha, double sigma_hat, double m_jj, int p, int s);

/// Sum of a_j over coordinates whose |bar_theta_j| strictly exceeds the
/// threshold.
double q_sparse(const Vector& prelim, const Vector& bar_theta, double sigma_hat,
                const ThresholdMatrix& M, double alpha, int s, const Matrix& X2, const Vector& Y2);

inline double norm_from_q(double q_hat) { return std::sqrt(std::abs(q_hat)); }

}  // namespace sparsenorm
