#pragma once

#include <string>
#include <vector>

#include "sparsenorm/model.hpp"

namespace sparsenorm {

struct SlopeWeights {
    Vector lambda;  // nonincreasing
    double c1 = 1.0;
    int n = 1;
};

/// lambda_j = c1 * sqrt(log(2p/j) / n), j = 1..p
SlopeWeights slope_weights(int p, int n, double c1);

/// sum_i lambda_i |t|_(i), largest magnitude paired with largest weight.
double sorted_l1_norm(const Vector& t, const Vector& lambda);
inline double sorted_l1_norm(const Vector& t, const SlopeWeights& w) { return sorted_l1_norm(t, w.lambda); }

/// argmin_x 0.5 ||x - v||^2 + sum_i w_i |x|_(i). Stack-based pool adjacent
/// violators on the sorted magnitudes; ties keep their original order.
Vector prox_sorted_l1(const Vector& v, const Vector& w);

struct SlopeOptions {
    int max_iter = 10000;
    double tol = 1e-8;
};

struct SlopeFit {
    Vector theta_hat;
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
    double sigma_hat = 0.0;
    std::vector<double> objective_trace;  // one entry per accepted iterate, starting at t = 0
};

/// ||Y - X t||_2 / sqrt(n) + ||t||_*
double sqrt_slope_objective(const Matrix& X, const Vector& Y, const Vector& t, const SlopeWeights& w);

/// Proximal gradient with backtracking on the square-root SLOPE objective.
SlopeFit sqrt_slope_fit(const Matrix& X1, const Vector& Y1, double c1, const SlopeOptions& opts = {});

/// ||Y1 - X1 theta_hat||_2 / sqrt(n)
double sigma_srs(const Matrix& X1, const Vector& Y1, const Vector& theta_hat);

std::string to_json(const SlopeFit& fit);

}  // namespace sparsenorm
