#pragma once

#include "sparsenorm/model.hpp"

namespace sparsenorm {

struct PriorSpec {
    int p = 2;
    int s = 1;
    double tau = 0.0;
};

/// tau = rho / sqrt(1 + rho^2)
double tau_from_rho(double rho);
/// sqrt(1 - tau^2), the noise level paired with the prior
double prior_sigma(double tau);

/// Uniform support of size s, every nonzero entry equal to tau/sqrt(s).
Vector sample_prior_theta(const PriorSpec& spec, Rng& rng);

/// (1 - <theta, theta'>)^{-N} for matched norms.
double chi2_cross(const Vector& theta, const Vector& theta_prime, int N);

/// log C(n, k) through lgamma
double log_binomial(int n, int k);

/// E exp(2 N tau^2 H / s) for H ~ Hypergeometric(p, s, s), exact sum.
double hypergeometric_mgf_bound(int p, int s, int N, double tau);

/// max(0, 1 - sqrt(mgf - 1))
double bayes_testing_risk_bound(int p, int s, int N, double tau);

struct LowerRadius {
    double A = 0.0;
    double r = 0.0;    // uses log(1 + p/s'^2), s' = min(s, floor(sqrt p))
    double rho = 0.0;  // uses log(1 + sqrt(p)/s)
    int s_truncated = 1;
};

/// sqrt(0.5 * log((1 - delta)^2 + 1))
double lower_bound_A(double delta);

LowerRadius minimax_testing_lower_radius(int p, int N, int s, double delta);

/// min(sigma^2 min(s log(1 + sqrt(p)/s)/N, 1) + sigma kappa/sqrt(N), kappa^2)
double q_lower_bound(int p, int N, int s, double sigma, double kappa);

}  // namespace sparsenorm
