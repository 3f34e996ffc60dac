#pragma once

#include "sparsenorm/quadratic.hpp"

namespace sparsenorm {

/// sqrt(s * log(1 + sqrt(p)/s) / N), the separation scale of both tests.
double detection_scale(int s, int p, int N);

/// beta * sigma_hat * detection_scale(s, p, N)
double detection_threshold(double beta, double sigma_hat, int s, int p, int N);

struct Decision {
    int decision = 0;
    double lambda_hat = 0.0;
    double threshold = 0.0;
    double beta = 0.0;
    FunctionalEstimate estimate;
};

/// Rejects iff lambda_hat >= threshold.
Decision decide(const FunctionalEstimate& est, double beta, int s, int p, int N);

std::string to_json(const Decision& d);

}  // namespace sparsenorm
