#pragma once

#include "sparsenorm/detection.hpp"
#include "sparsenorm/model.hpp"
#include "sparsenorm/quadratic.hpp"

namespace sparsenorm {

struct OlsFit {
    Vector theta_hat;
    Matrix gram_inverse;  // (X1^T X1)^{-1}
    double sigma_hat = 0.0;
    int n = 0;
    int p = 0;
};

struct TuningParams {
    double alpha = 1.5;
    double beta = 1.0;
};

/// Relative singular-value floor below which a design is rejected.
inline constexpr double kSingularTolerance = 1e-10;

/// Least squares through a column-pivoted QR; the inverse Gram matrix is
/// rebuilt from the triangular factor. Requires n > p and a well
/// conditioned design.
OlsFit ols_fit(const Matrix& X1, const Vector& Y1);

/// Two-way split, OLS on the first half, dense or sparse quadratic
/// estimate on the second half depending on branch_for(s, p).
FunctionalEstimate estimate_lowdim(const RegressionSample& sample, int s, const TuningParams& params);

/// Threshold uses sigma_hat_OLS; N is the full row count of the sample.
Decision detect_lowdim(const RegressionSample& sample, int s, const TuningParams& params);

}  // namespace sparsenorm
