#include "sparsenorm/detection.hpp"

#include <cmath>

#include <json.hpp>

#include "sparsenorm/errors.hpp"

namespace sparsenorm {

double detection_scale(int s, int p, int N) {
    require(s >= 1 && p >= 1 && N >= 1, "detection_scale: s, p, N must be positive");
    const double sd = static_cast<double>(s);
    return std::sqrt(sd * std::log1p(std::sqrt(static_cast<double>(p)) / sd) / static_cast<double>(N));
}

double detection_threshold(double beta, double sigma_hat, int s, int p, int N) {
    return beta * sigma_hat * detection_scale(s, p, N);
}

Decision decide(const FunctionalEstimate& est, double beta, int s, int p, int N) {
    require(beta > 0.0, "decide: beta must be positive");
    require(est.sigma_hat.has_value(), "decide: estimate carries no sigma_hat");
    Decision d;
    d.estimate = est;
    d.beta = beta;
    d.lambda_hat = est.lambda_hat;
    d.threshold = detection_threshold(beta, *est.sigma_hat, s, p, N);
    d.decision = d.lambda_hat >= d.threshold ? 1 : 0;
    return d;
}

std::string to_json(const Decision& d) {
    nlohmann::json j;
    j["decision"] = d.decision;
    j["lambda_hat"] = d.lambda_hat;
    j["threshold"] = d.threshold;
    j["beta"] = d.beta;
    j["sigma_hat"] = d.estimate.sigma_hat ? nlohmann::json(*d.estimate.sigma_hat) : nlohmann::json(nullptr);
    j["branch"] = to_string(d.estimate.branch);
    j["regime"] = to_string(d.estimate.regime);
    j["parts"] = d.estimate.parts;
    j["n_per_split"] = d.estimate.n_per_split;
    return j.dump(2);
}

}  // namespace sparsenorm
