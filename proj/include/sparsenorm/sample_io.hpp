#pragma once

#include <iosfwd>
#include <string>

#include "sparsenorm/model.hpp"

namespace sparsenorm {

/// CSV with header `y,x1,...,xp`, one row per observation, values printed
/// with 17 significant digits so a write/read cycle is exact.
void write_sample_csv(std::ostream& out, const RegressionSample& sample);
RegressionSample read_sample_csv(std::istream& in);

void save_sample(const std::string& csv_path, const RegressionSample& sample);
/// Loads the CSV and, if `<stem>.truth.json` exists next to it, the truth.
RegressionSample load_sample(const std::string& csv_path);

/// `sample.csv` -> `sample.truth.json`
std::string truth_sidecar_path(const std::string& csv_path);

std::string truth_to_json(const Truth& truth);
Truth truth_from_json(const std::string& text);

}  // namespace sparsenorm
