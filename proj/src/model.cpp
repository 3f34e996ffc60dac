#include "sparsenorm/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sparsenorm/errors.hpp"

namespace sparsenorm {

void Dimensions::validate() const {
    require(N >= 1, "N must be at least 1");
    require(p >= 2, "p must be at least 2");
    require(s >= 1 && s <= p, "s must satisfy 1 <= s <= p");
}

EntryLaw parse_design_law(const std::string& tag) {
    if (tag == "standard-normal") return EntryLaw::standard_normal;
    if (tag == "uniform-scaled") return EntryLaw::uniform_scaled;
    if (tag == "rademacher-smoothed") return EntryLaw::rademacher_smoothed;
    throw InvalidArgument("unknown design distribution: " + tag);
}

EntryLaw parse_noise_law(const std::string& tag) {
    if (tag == "standard-normal") return EntryLaw::standard_normal;
    if (tag == "scaled-rademacher-mixture") return EntryLaw::rademacher_smoothed;
    throw InvalidArgument("unknown noise distribution: " + tag);
}

std::string design_tag(EntryLaw law) {
    switch (law) {
        case EntryLaw::standard_normal: return "standard-normal";
        case EntryLaw::uniform_scaled: return "uniform-scaled";
        case EntryLaw::rademacher_smoothed: return "rademacher-smoothed";
    }
    return "?";
}

std::string noise_tag(EntryLaw law) {
    switch (law) {
        case EntryLaw::standard_normal: return "standard-normal";
        case EntryLaw::rademacher_smoothed: return "scaled-rademacher-mixture";
        case EntryLaw::uniform_scaled: break;
    }
    throw InvalidArgument("law has no noise tag: " + design_tag(law));
}

double draw_entry(EntryLaw law, Rng& rng) {
    switch (law) {
        case EntryLaw::standard_normal: {
            std::normal_distribution<double> z;
            return z(rng);
        }
        case EntryLaw::uniform_scaled: {
            const double a = std::sqrt(3.0);
            std::uniform_real_distribution<double> u(-a, a);
            return u(rng);
        }
        case EntryLaw::rademacher_smoothed: {
            // 3/4 of the variance from the sign, 1/4 from the Gaussian part
            std::bernoulli_distribution coin(0.5);
            std::normal_distribution<double> z;
            const double sign = coin(rng) ? 1.0 : -1.0;
            return 0.5 * std::sqrt(3.0) * sign + 0.5 * z(rng);
        }
    }
    throw InvalidArgument("unknown entry law");
}

Matrix sample_design(int N, int p, EntryLaw law, Rng& rng) {
    require(N >= 1 && p >= 1, "sample_design: N and p must be positive");
    Matrix X(N, p);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < p; ++j) X(i, j) = draw_entry(law, rng);
    return X;
}

Vector sample_noise(int N, EntryLaw law, Rng& rng) {
    require(N >= 1, "sample_noise: N must be positive");
    Vector xi(N);
    for (int i = 0; i < N; ++i) xi(i) = draw_entry(law, rng);
    return xi;
}

RegressionSample synthesize(const ModelSpec& spec, int N, Rng& rng) {
    require(spec.theta.size() >= 1, "synthesize: theta must be nonempty");
    require(spec.sigma > 0.0 && std::isfinite(spec.sigma), "synthesize: sigma must be positive");
    require(N >= 1, "synthesize: N must be positive");
    const int p = static_cast<int>(spec.theta.size());
    RegressionSample out;
    out.X = sample_design(N, p, spec.design, rng);
    const Vector xi = sample_noise(N, spec.noise, rng);
    out.Y = out.X * spec.theta + spec.sigma * xi;
    out.truth = Truth{spec.theta, spec.sigma, std::nullopt};
    return out;
}

RegressionSample synthesize(const ModelSpec& spec, int N, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    RegressionSample out = synthesize(spec, N, rng);
    out.truth->seed = seed;
    return out;
}

SignPattern parse_sign_pattern(const std::string& tag) {
    if (tag == "equal") return SignPattern::equal;
    if (tag == "random-signs") return SignPattern::random_signs;
    throw InvalidArgument("unknown sign pattern: " + tag);
}

std::vector<int> sample_support(int p, int s, Rng& rng) {
    require(p >= 1, "sample_support: p must be positive");
    require(s >= 0 && s <= p, "sample_support: need 0 <= s <= p");
    // partial Fisher-Yates
    std::vector<int> idx(p);
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < s; ++i) {
        std::uniform_int_distribution<int> pick(i, p - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(s);
    std::sort(idx.begin(), idx.end());
    return idx;
}

Vector sample_sparse_theta(int p, int s, double magnitude, SignPattern pattern, Rng& rng) {
    require(s >= 1 && s <= p, "sample_sparse_theta: need 1 <= s <= p");
    require(magnitude >= 0.0 && std::isfinite(magnitude), "sample_sparse_theta: magnitude must be >= 0");
    Vector theta = Vector::Zero(p);
    const double value = magnitude / std::sqrt(static_cast<double>(s));
    std::bernoulli_distribution coin(0.5);
    for (int j : sample_support(p, s, rng)) {
        double v = value;
        if (pattern == SignPattern::random_signs && coin(rng)) v = -v;
        theta(j) = v;
    }
    return theta;
}

SampleSplit split_sample(const RegressionSample& sample, int parts) {
    require(parts == 2 || parts == 3, "split_sample: parts must be 2 or 3");
    const int N = sample.rows();
    require(sample.X.rows() == N, "split_sample: X and Y row counts differ");
    require(N >= parts, "split_sample: need at least one row per part");
    SampleSplit split;
    split.parts = parts;
    split.n = N / parts;
    split.dropped_rows = N - parts * split.n;
    for (int k = 0; k < parts; ++k) {
        const int first = k * split.n;
        split.subsamples.push_back(SubSample{sample.X.middleRows(first, split.n),
                                             sample.Y.segment(first, split.n), first});
    }
    return split;
}

}  // namespace sparsenorm
