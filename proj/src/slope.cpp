#include "sparsenorm/slope.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "sparsenorm/errors.hpp"

namespace sparsenorm {

SlopeWeights slope_weights(int p, int n, double c1) {
    require(p >= 1, "slope_weights: p must be positive");
    require(n >= 1, "slope_weights: n must be positive");
    require(c1 > 0.0 && std::isfinite(c1), "slope_weights: c1 must be positive");
    SlopeWeights w;
    w.c1 = c1;
    w.n = n;
    w.lambda.resize(p);
    for (int j = 1; j <= p; ++j)
        w.lambda(j - 1) = c1 * std::sqrt(std::log(2.0 * p / j) / static_cast<double>(n));
    return w;
}

namespace {

std::vector<int> order_by_magnitude(const Vector& t) {
    std::vector<int> order(static_cast<std::size_t>(t.size()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return std::abs(t(a)) > std::abs(t(b)); });
    return order;
}

void check_weights(const Vector& w) {
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        require(w(i) >= 0.0, "sorted-l1 weights must be nonnegative");
        if (i > 0) require(w(i) <= w(i - 1), "sorted-l1 weights must be nonincreasing");
    }
}

}  // namespace

double sorted_l1_norm(const Vector& t, const Vector& lambda) {
    require(t.size() == lambda.size(), "sorted_l1_norm: length mismatch");
    Vector mag = t.cwiseAbs();
    std::sort(mag.data(), mag.data() + mag.size(), std::greater<>());
    return lambda.dot(mag);
}

Vector prox_sorted_l1(const Vector& v, const Vector& w) {
    require(v.size() == w.size(), "prox_sorted_l1: length mismatch");
    check_weights(w);
    const auto p = static_cast<std::size_t>(v.size());
    const auto order = order_by_magnitude(v);

    struct Block {
        std::size_t begin, end;  // [begin, end)
        double sum;
        double mean() const { return sum / static_cast<double>(end - begin); }
    };
    std::vector<Block> stack;
    stack.reserve(p);
    for (std::size_t i = 0; i < p; ++i) {
        stack.push_back({i, i + 1, std::abs(v(order[i])) - w(static_cast<Eigen::Index>(i))});
        // merge until block means are strictly decreasing
        while (stack.size() > 1 && stack[stack.size() - 2].mean() <= stack.back().mean()) {
            Block top = stack.back();
            stack.pop_back();
            stack.back().end = top.end;
            stack.back().sum += top.sum;
        }
    }

    Vector x = Vector::Zero(v.size());
    for (const Block& b : stack) {
        const double value = std::max(b.mean(), 0.0);
        if (value == 0.0) continue;
        for (std::size_t i = b.begin; i < b.end; ++i) {
            const int j = order[i];
            x(j) = v(j) < 0.0 ? -value : value;
        }
    }
    return x;
}

double sqrt_slope_objective(const Matrix& X, const Vector& Y, const Vector& t, const SlopeWeights& w) {
    const double n = static_cast<double>(X.rows());
    return (Y - X * t).norm() / std::sqrt(n) + sorted_l1_norm(t, w.lambda);
}

SlopeFit sqrt_slope_fit(const Matrix& X1, const Vector& Y1, double c1, const SlopeOptions& opts) {
    const Eigen::Index n = X1.rows();
    const Eigen::Index p = X1.cols();
    require(n >= 1, "sqrt_slope_fit: need at least one row");
    require(Y1.size() == n, "sqrt_slope_fit: X1 and Y1 row counts differ");
    require(opts.max_iter >= 1, "sqrt_slope_fit: max_iter must be positive");
    const SlopeWeights w = slope_weights(static_cast<int>(p), static_cast<int>(n), c1);
    const double root_n = std::sqrt(static_cast<double>(n));

    SlopeFit fit;
    fit.theta_hat = Vector::Zero(p);
    const double y_norm = Y1.norm();
    fit.objective = y_norm / root_n;
    fit.objective_trace.push_back(fit.objective);
    if (y_norm == 0.0) {
        fit.converged = true;
        return fit;
    }

    const double frob2 = X1.squaredNorm();
    if (frob2 == 0.0) {
        // loss is constant; the penalty alone is minimized at zero
        fit.converged = true;
        fit.sigma_hat = y_norm / root_n;
        return fit;
    }
    // n / ||X||_F^2 rescaled to the sqrt(n)-normalized loss, whose curvature
    // scales like 1 / ||r||
    double step = static_cast<double>(n) / frob2 * (y_norm / root_n);

    Vector& t = fit.theta_hat;
    auto smooth = [&](const Vector& x) { return (Y1 - X1 * x).norm() / root_n; };

    for (int it = 0; it < opts.max_iter; ++it) {
        const Vector r = Y1 - X1 * t;
        const double r_norm = r.norm();
        if (r_norm < 1e-10 * y_norm) {
            fit.converged = true;
            break;
        }
        const Vector grad = -(X1.transpose() * r) / (root_n * r_norm);
        const double f0 = r_norm / root_n;

        Vector candidate;
        bool accepted = false;
        while (step > 1e-300) {
            candidate = prox_sorted_l1(t - step * grad, step * w.lambda);
            const Vector d = candidate - t;
            const double model = f0 + grad.dot(d) + d.squaredNorm() / (2.0 * step);
            if (smooth(candidate) <= model + 1e-15 * std::max(1.0, f0)) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;

        const double next = smooth(candidate) + sorted_l1_norm(candidate, w.lambda);
        if (next > fit.objective) {
            // no representable progress left
            fit.converged = true;
            break;
        }
        const double decrease = (fit.objective - next) / std::max(fit.objective, 1e-300);
        t = candidate;
        fit.objective = next;
        fit.objective_trace.push_back(next);
        fit.iterations = it + 1;
        if (decrease < opts.tol) {
            fit.converged = true;
            break;
        }
        step *= 1.25;
    }

    fit.objective = sqrt_slope_objective(X1, Y1, t, w);
    fit.sigma_hat = sigma_srs(X1, Y1, t);
    if (!t.allFinite()) throw NumericError("sqrt_slope_fit: non-finite iterate");
    return fit;
}

double sigma_srs(const Matrix& X1, const Vector& Y1, const Vector& theta_hat) {
    require(X1.rows() >= 1, "sigma_srs: need at least one row");
    require(Y1.size() == X1.rows() && theta_hat.size() == X1.cols(), "sigma_srs: dimension mismatch");
    return (Y1 - X1 * theta_hat).norm() / std::sqrt(static_cast<double>(X1.rows()));
}

std::string to_json(const SlopeFit& fit) {
    nlohmann::json j;
    j["theta_hat"] = std::vector<double>(fit.theta_hat.data(), fit.theta_hat.data() + fit.theta_hat.size());
    j["sigma_hat"] = fit.sigma_hat;
    j["objective"] = fit.objective;
    j["iterations"] = fit.iterations;
    j["converged"] = fit.converged;
    return j.dump(2);
}

}  // namespace sparsenorm
