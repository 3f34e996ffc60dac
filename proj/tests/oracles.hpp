#pragma once

// Independent reference computations shared by the unit and acceptance
// tests. Each one follows the defining formula directly, with no reuse of
// the library's fast paths.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "sparsenorm/model.hpp"

namespace oracle {

using sparsenorm::Matrix;
using sparsenorm::Vector;

// a_j by the literal k != l double sum.
inline Vector naive_components(const Vector& prelim, const Matrix& X, const Vector& Y) {
    const long n = X.rows(), p = X.cols();
    Vector r(n);
    for (long k = 0; k < n; ++k) {
        double fit = 0.0;
        for (long j = 0; j < p; ++j) fit += X(k, j) * prelim(j);
        r(k) = Y(k) - fit;
    }
    Vector a(p);
    for (long j = 0; j < p; ++j) {
        double cross = 0.0;
        for (long k = 0; k < n; ++k) cross += X(k, j) * r(k);
        double pairs = 0.0;
        for (long k = 0; k < n; ++k)
            for (long l = 0; l < n; ++l)
                if (k != l) pairs += X(k, j) * X(l, j) * r(k) * r(l);
        a(j) = prelim(j) * prelim(j) + 2.0 * prelim(j) * cross / n + pairs / (double(n) * double(n - 1));
    }
    return a;
}

// sum_i w_i |t|_(i) with magnitudes sorted by a plain copy and sort.
inline double sorted_norm(const Vector& t, const Vector& w) {
    std::vector<double> m(t.size());
    for (long i = 0; i < t.size(); ++i) m[i] = std::abs(t(i));
    std::sort(m.begin(), m.end(), std::greater<>());
    double acc = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) acc += w(long(i)) * m[i];
    return acc;
}

inline double prox_objective(const Vector& x, const Vector& v, const Vector& w) {
    return 0.5 * (x - v).squaredNorm() + sorted_norm(x, w);
}

// Coarse-to-fine grid search for the 2-d prox problem.
inline Vector grid_prox_2d(const Vector& v, const Vector& w) {
    double cx = v(0), cy = v(1);
    double half = std::max({std::abs(v(0)), std::abs(v(1)), 1.0}) + 1.0;
    const int steps = 200;
    for (int round = 0; round < 6; ++round) {
        double bx = cx, by = cy, best = 1e300;
        for (int i = -steps; i <= steps; ++i)
            for (int k = -steps; k <= steps; ++k) {
                Vector x(2);
                x << cx + half * i / steps, cy + half * k / steps;
                const double f = prox_objective(x, v, w);
                if (f < best) best = f, bx = x(0), by = x(1);
            }
        cx = bx;
        cy = by;
        half *= 4.0 / steps;
    }
    Vector out(2);
    out << cx, cy;
    return out;
}

inline double log_choose(int n, int k) {
    if (k < 0 || k > n) return -INFINITY;
    double acc = 0.0;
    for (int i = 1; i <= k; ++i) acc += std::log(double(n - k + i)) - std::log(double(i));
    return acc;
}

// Average of exp(2 N tau^2 |S cap S'| / s) over every ordered pair of
// size-s supports of {0..p-1}.
inline double enumerate_overlap_mgf(int p, int s, int N, double tau) {
    std::vector<unsigned> subsets;
    for (unsigned m = 0; m < (1u << p); ++m)
        if (__builtin_popcount(m) == s) subsets.push_back(m);
    double acc = 0.0;
    for (unsigned a : subsets)
        for (unsigned b : subsets) acc += std::exp(2.0 * N * tau * tau * __builtin_popcount(a & b) / s);
    return acc / (double(subsets.size()) * double(subsets.size()));
}

inline double mean(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / double(v.size());
}

inline double std_error(const std::vector<double>& v) {
    const double m = mean(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / double(v.size() - 1) / double(v.size()));
}

// Least squares slope of log y on log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) mx += std::log(x[i]), my += std::log(y[i]);
    mx /= double(x.size());
    my /= double(x.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
        sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    }
    return sxy / sxx;
}

}  // namespace oracle
