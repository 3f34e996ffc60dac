#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sparsenorm/detection.hpp"
#include "sparsenorm/errors.hpp"
#include "sparsenorm/lowdim.hpp"
#include "sparsenorm/rng.hpp"

using namespace sparsenorm;

namespace {

RegressionSample draw(int N, const Vector& theta, double sigma, std::uint64_t seed) {
    ModelSpec spec;
    spec.theta = theta;
    spec.sigma = sigma;
    return synthesize(spec, N, seed);
}

}  // namespace

TEST_CASE("ols on a column of ones is the mean") {
    Matrix X = Matrix::Ones(2, 1);
    Vector Y(2);
    Y << 1, 3;
    CHECK(ols_fit(X, Y).theta_hat(0) == doctest::Approx(2.0));
}

TEST_CASE("ols three-point example") {
    Matrix X = Matrix::Ones(3, 1);
    Vector Y(3);
    Y << 1, 2, 3;
    const OlsFit fit = ols_fit(X, Y);
    CHECK(fit.theta_hat(0) == doctest::Approx(2.0));
    CHECK(fit.sigma_hat == doctest::Approx(1.0));
    CHECK(fit.gram_inverse(0, 0) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("ols recovers theta from noiseless data and inverts the Gram matrix") {
    Rng rng = make_rng(4);
    const Matrix X = sample_design(40, 6, EntryLaw::standard_normal, rng);
    Vector theta(6);
    theta << 1, -2, 0, 0.5, 3, -0.25;
    const OlsFit fit = ols_fit(X, X * theta);
    CHECK((fit.theta_hat - theta).cwiseAbs().maxCoeff() <= 1e-8);
    const Matrix id = X.transpose() * X * fit.gram_inverse;
    CHECK((id - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("ols rejects n <= p and singular designs") {
    CHECK_THROWS_AS(ols_fit(Matrix::Ones(3, 3), Vector::Ones(3)), InvalidArgument);
    Rng rng = make_rng(5);
    Matrix X = sample_design(10, 3, EntryLaw::standard_normal, rng);
    X.col(2) = X.col(0);
    CHECK_THROWS_AS(ols_fit(X, Vector::Ones(10)), NumericError);
}

TEST_CASE("low-dimensional branch selection") {
    SUBCASE("s=3, p=4 is dense") {
        const auto est = estimate_lowdim(draw(40, Vector::Zero(4), 1.0, 1), 3, {});
        CHECK(est.branch == Branch::dense);
    }
    SUBCASE("s=2, p=9 is sparse") {
        const auto est = estimate_lowdim(draw(60, Vector::Zero(9), 1.0, 1), 2, {});
        CHECK(est.branch == Branch::sparse);
    }
    SUBCASE("s=3, p=9 sits on the boundary and is sparse") {
        const auto est = estimate_lowdim(draw(60, Vector::Zero(9), 1.0, 1), 3, {});
        CHECK(est.branch == Branch::sparse);
    }
}

TEST_CASE("eight-row pipeline replay") {
    // One column: OLS on rows 0-3, centered square on rows 4-7.
    const RegressionSample s = draw(8, Vector::Constant(1, 0.7), 1.0, 2024);
    double sxx = 0.0, sxy = 0.0;
    for (int k = 0; k < 4; ++k) sxx += s.X(k, 0) * s.X(k, 0), sxy += s.X(k, 0) * s.Y(k);
    const double theta_hat = sxy / sxx;
    double rss = 0.0;
    for (int k = 0; k < 4; ++k) rss += std::pow(s.Y(k) - s.X(k, 0) * theta_hat, 2);
    const double sigma_hat = std::sqrt(rss / 3.0);
    const Matrix X2 = s.X.bottomRows(4);
    const Vector Y2 = s.Y.tail(4);
    const double a1 = oracle::naive_components(Vector::Constant(1, theta_hat), X2, Y2)(0);

    for (double alpha : {1e-9, 1.5, 50.0}) {
        CAPTURE(alpha);
        const double threshold = alpha * sigma_hat * std::sqrt(std::log(2.0) / sxx);
        const double expected = std::abs(theta_hat) > threshold ? a1 : 0.0;
        const auto est = estimate_lowdim(s, 1, TuningParams{alpha, 1.0});
        CHECK(est.branch == Branch::sparse);
        CHECK(est.n_per_split == 4);
        CHECK(*est.sigma_hat == doctest::Approx(sigma_hat).epsilon(1e-12));
        CHECK(est.q_hat == doctest::Approx(expected).epsilon(1e-10));
        CHECK(est.lambda_hat == doctest::Approx(std::sqrt(std::abs(expected))).epsilon(1e-10));
    }
}

TEST_CASE("noiseless dense branch recovers the norm") {
    Vector theta = Vector::Zero(4);
    theta << 1.0, -0.5, 0.25, 2.0;
    RegressionSample s = draw(60, theta, 1.0, 8);
    s.Y = s.X * theta;
    const auto est = estimate_lowdim(s, 3, {});
    CHECK(est.branch == Branch::dense);
    CHECK(est.lambda_hat == doctest::Approx(theta.norm()).epsilon(1e-6));
}

TEST_CASE("dense branch is scale equivariant") {
    const RegressionSample s = draw(80, Vector::Constant(5, 0.3), 1.0, 9);
    RegressionSample scaled = s;
    scaled.Y *= 10.0;
    const auto a = estimate_lowdim(s, 4, {});
    const auto b = estimate_lowdim(scaled, 4, {});
    CHECK(b.lambda_hat == doctest::Approx(10.0 * a.lambda_hat).epsilon(1e-9));
    CHECK(*b.sigma_hat == doctest::Approx(10.0 * *a.sigma_hat).epsilon(1e-9));
}

TEST_CASE("odd sample size drops the last row") {
    const auto est = estimate_lowdim(draw(41, Vector::Zero(4), 1.0, 10), 3, {});
    CHECK(est.n_per_split == 20);
    CHECK(est.dropped_rows == 1);
}

TEST_CASE("estimate_lowdim needs n > p") {
    CHECK_THROWS_AS(estimate_lowdim(draw(10, Vector::Zero(5), 1.0, 1), 2, {}), InvalidArgument);
}

TEST_CASE("detection threshold arithmetic") {
    CHECK(detection_threshold(2.0, 1.0, 1, 4, 4) == doctest::Approx(2.0 * std::sqrt(std::log(3.0) / 4.0)));
    CHECK(detection_threshold(2.0, 1.0, 1, 4, 4) == doctest::Approx(1.0481).epsilon(1e-4));
    FunctionalEstimate est;
    est.sigma_hat = 1.0;
    est.lambda_hat = 2.0;
    CHECK(decide(est, 2.0, 1, 4, 4).decision == 1);
    est.lambda_hat = 0.0;
    CHECK(decide(est, 2.0, 1, 4, 4).decision == 0);
    CHECK_THROWS_AS(decide(est, 0.0, 1, 4, 4), InvalidArgument);
}

TEST_CASE("detection is monotone in the norm estimate") {
    FunctionalEstimate est;
    est.sigma_hat = 0.8;
    int previous = 0;
    for (double lam = 0.0; lam < 2.0; lam += 0.01) {
        est.lambda_hat = lam;
        const Decision d = decide(est, 1.3, 3, 100, 400);
        CHECK(d.decision >= previous);
        CHECK(d.decision == (lam >= d.threshold ? 1 : 0));
        previous = d.decision;
    }
}

TEST_CASE("detect_lowdim uses the OLS noise estimate") {
    const RegressionSample s = draw(200, Vector::Zero(10), 1.0, 12);
    const Decision d = detect_lowdim(s, 2, TuningParams{1.5, 1.0});
    const auto est = estimate_lowdim(s, 2, TuningParams{1.5, 1.0});
    CHECK(d.threshold == doctest::Approx(detection_threshold(1.0, *est.sigma_hat, 2, 10, 200)));
    CHECK(d.lambda_hat == est.lambda_hat);
}
