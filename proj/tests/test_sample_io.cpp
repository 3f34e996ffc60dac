#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sparsenorm/errors.hpp"
#include "sparsenorm/sample_io.hpp"

using namespace sparsenorm;

TEST_CASE("sample CSV round trip is exact") {
    ModelSpec spec;
    spec.theta = Vector::LinSpaced(3, -1.0, 1.0);
    spec.sigma = 0.37;
    const RegressionSample s = synthesize(spec, 5, std::uint64_t{8});
    std::stringstream ss;
    write_sample_csv(ss, s);
    CHECK(ss.str().rfind("y,x1,x2,x3\n", 0) == 0);
    const RegressionSample back = read_sample_csv(ss);
    CHECK(back.X == s.X);
    CHECK(back.Y == s.Y);
    CHECK_FALSE(back.truth);
}

TEST_CASE("malformed sample CSV") {
    std::stringstream no_header("1,2\n");
    CHECK_THROWS_AS(read_sample_csv(no_header), ConfigError);
    std::stringstream ragged("y,x1,x2\n1,2\n");
    CHECK_THROWS_AS(read_sample_csv(ragged), ConfigError);
    std::stringstream junk("y,x1\n1,abc\n");
    CHECK_THROWS_AS(read_sample_csv(junk), ConfigError);
    std::stringstream empty("y,x1\n");
    CHECK_THROWS_AS(read_sample_csv(empty), ConfigError);
}

TEST_CASE("truth sidecar") {
    CHECK(truth_sidecar_path("dir/sample.csv") == "dir/sample.truth.json");
    Truth t{Vector::LinSpaced(4, 0.0, 3.0), 1.5, 12345};
    const Truth back = truth_from_json(truth_to_json(t));
    CHECK(back.theta == t.theta);
    CHECK(back.sigma == 1.5);
    CHECK(back.seed == std::optional<std::uint64_t>(12345));
    Truth no_seed{Vector::Ones(2), 2.0, std::nullopt};
    CHECK_FALSE(truth_from_json(truth_to_json(no_seed)).seed);

    ModelSpec spec;
    spec.theta = Vector::Ones(2);
    const RegressionSample s = synthesize(spec, 4, std::uint64_t{77});
    const auto path = std::filesystem::temp_directory_path() / "sparsenorm_io_test.csv";
    save_sample(path.string(), s);
    const RegressionSample loaded = load_sample(path.string());
    REQUIRE(loaded.truth);
    CHECK(loaded.truth->seed == std::optional<std::uint64_t>(77));
    CHECK(loaded.truth->theta == spec.theta);
    std::filesystem::remove(path);
    std::filesystem::remove(truth_sidecar_path(path.string()));
    CHECK_THROWS_AS(load_sample(path.string()), ConfigError);
}
