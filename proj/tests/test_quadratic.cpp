#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "oracles.hpp"
#include "sparsenorm/errors.hpp"
#include "sparsenorm/quadratic.hpp"
#include "sparsenorm/rng.hpp"

using namespace sparsenorm;

namespace {

Matrix gaussian(int rows, int cols, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    return sample_design(rows, cols, EntryLaw::standard_normal, rng);
}

Vector gaussian_vec(int n, std::uint64_t seed) { return gaussian(n, 1, seed).col(0); }

}  // namespace

TEST_CASE("a_j on the two-row toy sample") {
    Matrix X(2, 1);
    X << 1, 1;
    Vector Y(2);
    Y << 2, 3;
    const auto ce = component_estimates(Vector::Zero(1), X, Y);
    CHECK(ce.a(0) == doctest::Approx(6.0).epsilon(1e-14));
    CHECK(q_dense(Vector::Zero(1), X, Y) == doctest::Approx(6.0).epsilon(1e-14));
}

TEST_CASE("zero residual gives a_j = prelim_j^2") {
    const Matrix X = gaussian(7, 4, 1);
    Vector theta(4);
    theta << 0.5, -1.0, 2.0, 0.0;
    const Vector Y = X * theta;
    const auto ce = component_estimates(theta, X, Y);
    for (int j = 0; j < 4; ++j) CHECK(ce.a(j) == doctest::Approx(theta(j) * theta(j)).epsilon(1e-12));
    CHECK(q_dense(theta, X, Y) == doctest::Approx(theta.squaredNorm()).epsilon(1e-12));
}

TEST_CASE("O(n) components agree with the literal double sum") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const Matrix X = gaussian(5, 4, 100 + seed);
        const Vector Y = gaussian_vec(5, 200 + seed);
        const Vector prelim = gaussian_vec(4, 300 + seed);
        const Vector fast = component_estimates(prelim, X, Y).a;
        const Vector slow = oracle::naive_components(prelim, X, Y);
        for (int j = 0; j < 4; ++j)
            CHECK(std::abs(fast(j) - slow(j)) <= 1e-10 * std::max(1.0, std::abs(slow(j))));
    }
}

TEST_CASE("component_estimates preconditions") {
    CHECK_THROWS_AS(component_estimates(Vector::Zero(2), Matrix::Ones(1, 2), Vector::Ones(1)), InvalidArgument);
    CHECK_THROWS_AS(component_estimates(Vector::Zero(3), Matrix::Ones(4, 2), Vector::Ones(4)), InvalidArgument);
    CHECK_THROWS_AS(component_estimates(Vector::Zero(2), Matrix::Ones(4, 2), Vector::Ones(3)), InvalidArgument);
}

TEST_CASE("debias") {
    SUBCASE("hand example") {
        Matrix X(1, 1);
        X << 2;
        Vector Y(1);
        Y << 4;
        Vector prelim(1);
        prelim << 1;
        CHECK(debias(prelim, X, Y).theta_tilde(0) == doctest::Approx(5.0));
    }
    SUBCASE("zero residual returns prelim") {
        const Matrix X = gaussian(6, 3, 8);
        const Vector t = gaussian_vec(3, 9);
        CHECK((debias(t, X, X * t).theta_tilde - t).cwiseAbs().maxCoeff() <= 1e-14);
    }
    SUBCASE("zero prelim collapses to X^T Y / n") {
        const Matrix X = gaussian(6, 3, 10);
        const Vector Y = gaussian_vec(6, 11);
        CHECK((debias(Vector::Zero(3), X, Y).theta_tilde - X.transpose() * Y / 6.0).norm() <= 1e-14);
    }
}

TEST_CASE("q_dense is jointly quadratic in (prelim, Y)") {
    const Matrix X = gaussian(12, 5, 20);
    const Vector Y = gaussian_vec(12, 21);
    const Vector prelim = gaussian_vec(5, 22);
    const double base = q_dense(prelim, X, Y);
    for (double c : {-2.0, 0.5, 3.0})
        CHECK(q_dense(c * prelim, X, c * Y) == doctest::Approx(c * c * base).epsilon(1e-12));
}

TEST_CASE("q_sparse indicator behaviour") {
    const Matrix X = gaussian(10, 6, 30);
    const Vector Y = gaussian_vec(10, 31);
    const Vector prelim = gaussian_vec(6, 32);
    const Vector bar = gaussian_vec(6, 33);
    const auto I = ThresholdMatrix::scaled_identity(1.0);
    CHECK(q_sparse(prelim, bar, 1.0, I, 1e6, 2, X, Y) == 0.0);
    CHECK(q_sparse(prelim, bar, 1.0, I, 0.0, 2, X, Y) == doctest::Approx(q_dense(prelim, X, Y)).epsilon(1e-14));
    CHECK_THROWS_AS(q_sparse(prelim, bar, 0.0, I, 1.0, 2, X, Y), InvalidArgument);
}

TEST_CASE("q_sparse two-coordinate example keeps only the large coordinate") {
    Matrix X(2, 2);
    X << 1, 2, 3, 4;
    Vector Y(2);
    Y << 1, 2;
    Vector bar(2);
    bar << 5, 0.001;
    CHECK(sparse_threshold(1.0, 1.0, 1.0, 2, 1) == doctest::Approx(std::sqrt(std::log(3.0))));
    CHECK(sparse_threshold(1.0, 1.0, 1.0, 2, 1) == doctest::Approx(1.0481).epsilon(1e-4));
    // z = (1*1, 3*2): a_1 = ((1+6)^2 - (1+36)) / 2
    const double q = q_sparse(Vector::Zero(2), bar, 1.0, ThresholdMatrix::scaled_identity(1.0), 1.0, 1, X, Y);
    CHECK(q == doctest::Approx(6.0).epsilon(1e-14));
}

TEST_CASE("threshold ties exclude the coordinate") {
    Matrix X(3, 1);
    X << 1, 2, 3;
    Vector Y(3);
    Y << 1, 1, 2;
    const double thr = sparse_threshold(1.0, 1.0, 0.25, 1, 1);
    Vector bar(1);
    bar << thr;
    const auto M = ThresholdMatrix::scaled_identity(0.25);
    CHECK(q_sparse(Vector::Zero(1), bar, 1.0, M, 1.0, 1, X, Y) == 0.0);
    bar << std::nextafter(thr, 10.0);
    CHECK(q_sparse(Vector::Zero(1), bar, 1.0, M, 1.0, 1, X, Y) != 0.0);
}

TEST_CASE("threshold matrix") {
    Matrix m(2, 2);
    m << 2, 1, 1, 3;
    const auto full = ThresholdMatrix::full(m);
    CHECK(full.is_full());
    CHECK(full.diag(1) == 3.0);
    CHECK(ThresholdMatrix::scaled_identity(0.5).diag(7) == 0.5);
    Matrix bad = m;
    bad(0, 0) = -1.0;
    CHECK_THROWS_AS(ThresholdMatrix::full(bad), InvalidArgument);
    CHECK_THROWS_AS(ThresholdMatrix::scaled_identity(-0.1), InvalidArgument);
}

TEST_CASE("norm_from_q") {
    CHECK(norm_from_q(4.0) == 2.0);
    CHECK(norm_from_q(-9.0) == 3.0);
    CHECK(norm_from_q(0.0) == 0.0);
}

TEST_CASE("conditional unbiasedness of q_dense, small Monte Carlo") {
    const int p = 6, n = 30, reps = 4000;
    Vector theta = Vector::Zero(p);
    theta(1) = 1.0;
    theta(4) = -0.5;
    Vector prelim(p);
    prelim << 0.3, 0.8, 0.0, -0.2, 0.0, 0.1;
    std::vector<double> q(reps), a1(reps);
    for (int r = 0; r < reps; ++r) {
        Rng rng = make_rng(derive_seed(77, r));
        const Matrix X = sample_design(n, p, EntryLaw::standard_normal, rng);
        const Vector Y = X * theta + sample_noise(n, EntryLaw::standard_normal, rng);
        const auto ce = component_estimates(prelim, X, Y);
        q[r] = ce.a.sum();
        a1[r] = ce.a(1);
    }
    CHECK(std::abs(oracle::mean(q) - theta.squaredNorm()) <= 4.0 * oracle::std_error(q));
    CHECK(std::abs(oracle::mean(a1) - 1.0) <= 4.0 * oracle::std_error(a1));
}

TEST_CASE("FunctionalEstimate JSON") {
    FunctionalEstimate est;
    est.q_hat = -4.0;
    est.lambda_hat = 2.0;
    est.branch = Branch::sparse;
    est.regime = Regime::high;
    const auto j = nlohmann::json::parse(to_json(est));
    CHECK(j["q_hat"] == -4.0);
    CHECK(j["lambda_hat"] == 2.0);
    CHECK(j["sigma_hat"].is_null());
    CHECK(j["branch"] == "sparse");
    CHECK(j["regime"] == "high");
}

TEST_CASE("branch rule is exact at the boundary") {
    CHECK(branch_for(3, 9) == Branch::sparse);
    CHECK(branch_for(4, 9) == Branch::dense);
    CHECK(branch_for(3, 4) == Branch::dense);
    CHECK(branch_for(2, 9) == Branch::sparse);
    CHECK(branch_for(10, 64) == Branch::dense);
    CHECK(branch_for(8, 64) == Branch::sparse);
}
