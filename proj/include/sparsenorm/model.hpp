#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sparsenorm/rng.hpp"

namespace sparsenorm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct Dimensions {
    int N = 1;  // total rows
    int p = 2;
    int s = 1;

    void validate() const;
};

/// Entry laws for X and xi. All are standardized: mean 0, variance 1.
enum class EntryLaw {
    standard_normal,
    uniform_scaled,       // U[-sqrt 3, sqrt 3]
    rademacher_smoothed,  // (sqrt 3 / 2) eps + (1/2) Z
};

/// Accepts `standard-normal`, `uniform-scaled`, `rademacher-smoothed`.
EntryLaw parse_design_law(const std::string& tag);
/// Accepts `standard-normal`, `scaled-rademacher-mixture`.
EntryLaw parse_noise_law(const std::string& tag);
std::string design_tag(EntryLaw law);
std::string noise_tag(EntryLaw law);

double draw_entry(EntryLaw law, Rng& rng);

struct ModelSpec {
    Vector theta;
    double sigma = 1.0;
    EntryLaw design = EntryLaw::standard_normal;
    EntryLaw noise = EntryLaw::standard_normal;
};

struct Truth {
    Vector theta;
    double sigma = 1.0;
    std::optional<std::uint64_t> seed;
};

struct RegressionSample {
    Matrix X;
    Vector Y;
    std::optional<Truth> truth;

    int rows() const { return static_cast<int>(Y.size()); }
    int cols() const { return static_cast<int>(X.cols()); }
};

struct SubSample {
    Matrix X;
    Vector Y;
    int first_row = 0;  // provenance in the parent sample
};

struct SampleSplit {
    int parts = 2;
    int n = 0;
    int dropped_rows = 0;
    std::vector<SubSample> subsamples;
};

/// N x p matrix of i.i.d. entries, filled row by row.
Matrix sample_design(int N, int p, EntryLaw law, Rng& rng);
Vector sample_noise(int N, EntryLaw law, Rng& rng);

/// Y = X theta + sigma xi. Draws X first, then xi, from the same stream.
RegressionSample synthesize(const ModelSpec& spec, int N, Rng& rng);
/// Same as above with a fresh generator; records the seed in the truth.
RegressionSample synthesize(const ModelSpec& spec, int N, std::uint64_t seed);

enum class SignPattern { equal, random_signs };
SignPattern parse_sign_pattern(const std::string& tag);

/// Exactly s nonzero entries of magnitude/sqrt(s) on a uniform support.
Vector sample_sparse_theta(int p, int s, double magnitude, SignPattern pattern, Rng& rng);

/// Uniformly random size-s subset of {0..p-1}, sorted.
std::vector<int> sample_support(int p, int s, Rng& rng);

/// Contiguous blocks of floor(N/parts) rows; trailing remainder dropped.
SampleSplit split_sample(const RegressionSample& sample, int parts);

}  // namespace sparsenorm
