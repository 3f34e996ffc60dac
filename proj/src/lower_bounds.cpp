#include "sparsenorm/lower_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "sparsenorm/errors.hpp"

namespace sparsenorm {

double tau_from_rho(double rho) {
    require(rho >= 0.0, "tau_from_rho: rho must be nonnegative");
    return rho / std::sqrt(1.0 + rho * rho);
}

double prior_sigma(double tau) {
    require(tau >= 0.0 && tau < 1.0, "prior_sigma: tau must lie in [0, 1)");
    return std::sqrt(1.0 - tau * tau);
}

Vector sample_prior_theta(const PriorSpec& spec, Rng& rng) {
    require(spec.s >= 1 && spec.s <= spec.p, "sample_prior_theta: need 1 <= s <= p");
    require(spec.tau >= 0.0, "sample_prior_theta: tau must be nonnegative");
    Vector theta = Vector::Zero(spec.p);
    const double value = spec.tau / std::sqrt(static_cast<double>(spec.s));
    for (int j : sample_support(spec.p, spec.s, rng)) theta(j) = value;
    return theta;
}

double chi2_cross(const Vector& theta, const Vector& theta_prime, int N) {
    require(theta.size() == theta_prime.size(), "chi2_cross: length mismatch");
    require(N >= 1, "chi2_cross: N must be positive");
    const double a = theta.norm();
    const double b = theta_prime.norm();
    require(std::abs(a - b) <= 1e-8 * std::max(1.0, a), "chi2_cross: norms must match");
    const double inner = theta.dot(theta_prime);
    require(inner < 1.0, "chi2_cross: inner product must be below 1");
    return std::pow(1.0 - inner, -static_cast<double>(N));
}

double log_binomial(int n, int k) {
    require(n >= 0 && k >= 0 && k <= n, "log_binomial: need 0 <= k <= n");
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double hypergeometric_mgf_bound(int p, int s, int N, double tau) {
    require(s >= 1 && s <= p, "hypergeometric_mgf_bound: need 1 <= s <= p");
    require(N >= 1, "hypergeometric_mgf_bound: N must be positive");
    require(tau >= 0.0, "hypergeometric_mgf_bound: tau must be nonnegative");
    const double rate = 2.0 * N * tau * tau / s;
    const double log_total = log_binomial(p, s);
    const int lo = std::max(0, 2 * s - p);

    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(s - lo + 1));
    for (int h = lo; h <= s; ++h)
        terms.push_back(rate * h + log_binomial(s, h) + log_binomial(p - s, s - h) - log_total);
    const double peak = *std::max_element(terms.begin(), terms.end());
    double acc = 0.0;
    for (double t : terms) acc += std::exp(t - peak);
    return std::exp(peak + std::log(acc));
}

double bayes_testing_risk_bound(int p, int s, int N, double tau) {
    const double mgf = hypergeometric_mgf_bound(p, s, N, tau);
    // the exact sum is >= 1; guard against the last ulp
    return std::max(0.0, 1.0 - std::sqrt(std::max(0.0, mgf - 1.0)));
}

double lower_bound_A(double delta) {
    require(delta > 0.0 && delta < 1.0, "lower_bound_A: delta must be in (0, 1)");
    return std::sqrt(0.5 * std::log((1.0 - delta) * (1.0 - delta) + 1.0));
}

namespace {

int isqrt(int p) {
    int r = static_cast<int>(std::sqrt(static_cast<double>(p)));
    while (static_cast<long long>(r) * r > p) --r;
    while (static_cast<long long>(r + 1) * (r + 1) <= p) ++r;
    return r;
}

}  // namespace

LowerRadius minimax_testing_lower_radius(int p, int N, int s, double delta) {
    require(p >= 1 && N >= 1, "minimax_testing_lower_radius: p and N must be positive");
    require(s >= 1 && s <= p, "minimax_testing_lower_radius: need 1 <= s <= p");
    LowerRadius out;
    out.A = lower_bound_A(delta);
    out.s_truncated = std::min(s, isqrt(p));
    const double st = out.s_truncated;
    const double sd = s;
    const double pd = p;
    out.r = out.A * std::min(std::sqrt(st * std::log1p(pd / (st * st)) / N), 1.0);
    out.rho = out.A * std::min(std::sqrt(sd * std::log1p(std::sqrt(pd) / sd) / N), 1.0);
    return out;
}

double q_lower_bound(int p, int N, int s, double sigma, double kappa) {
    require(sigma > 0.0, "q_lower_bound: sigma must be positive");
    require(kappa >= 0.0, "q_lower_bound: kappa must be nonnegative");
    require(p >= 1 && N >= 1 && s >= 1, "q_lower_bound: p, N, s must be positive");
    const double sd = s;
    const double inner = std::min(sd * std::log1p(std::sqrt(static_cast<double>(p)) / sd) / N, 1.0);
    return std::min(sigma * sigma * inner + sigma * kappa / std::sqrt(static_cast<double>(N)), kappa * kappa);
}

}  // namespace sparsenorm
