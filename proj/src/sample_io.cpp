#include "sparsenorm/sample_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sparsenorm/errors.hpp"

namespace sparsenorm {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& s) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw ConfigError("trailing characters in number: " + s);
        return v;
    } catch (const std::logic_error&) {
        throw ConfigError("not a number: '" + s + "'");
    }
}

}  // namespace

void write_sample_csv(std::ostream& out, const RegressionSample& sample) {
    const int p = sample.cols();
    out << "y";
    for (int j = 1; j <= p; ++j) out << ",x" << j;
    out << '\n';
    for (int i = 0; i < sample.rows(); ++i) {
        out << fmt17(sample.Y(i));
        for (int j = 0; j < p; ++j) out << ',' << fmt17(sample.X(i, j));
        out << '\n';
    }
}

RegressionSample read_sample_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("sample CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_csv_line(line);
    if (header.empty() || header[0] != "y") throw ConfigError("sample CSV header must start with 'y'");
    const int p = static_cast<int>(header.size()) - 1;
    for (int j = 1; j <= p; ++j)
        if (header[j] != "x" + std::to_string(j)) throw ConfigError("unexpected CSV column: " + header[j]);

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (static_cast<int>(fields.size()) != p + 1)
            throw ConfigError("row " + std::to_string(rows.size() + 1) + " has the wrong number of fields");
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) row.push_back(parse_double(f));
        rows.push_back(std::move(row));
    }
    RegressionSample out;
    if (rows.empty()) throw ConfigError("sample CSV has no data rows");
    const int N = static_cast<int>(rows.size());
    out.X.resize(N, p);
    out.Y.resize(N);
    for (int i = 0; i < N; ++i) {
        out.Y(i) = rows[i][0];
        for (int j = 0; j < p; ++j) out.X(i, j) = rows[i][j + 1];
    }
    return out;
}

std::string truth_sidecar_path(const std::string& csv_path) {
    std::filesystem::path path(csv_path);
    path.replace_extension(".truth.json");
    return path.string();
}

std::string truth_to_json(const Truth& truth) {
    nlohmann::json j;
    j["theta"] = std::vector<double>(truth.theta.data(), truth.theta.data() + truth.theta.size());
    j["sigma"] = truth.sigma;
    if (truth.seed)
        j["seed"] = *truth.seed;
    else
        j["seed"] = nullptr;
    return j.dump(2);
}

Truth truth_from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        Truth t;
        const auto theta = j.at("theta").get<std::vector<double>>();
        t.theta = Eigen::Map<const Vector>(theta.data(), static_cast<Eigen::Index>(theta.size()));
        t.sigma = j.at("sigma").get<double>();
        if (j.contains("seed") && !j["seed"].is_null()) t.seed = j["seed"].get<std::uint64_t>();
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad truth sidecar: ") + e.what());
    }
}

void save_sample(const std::string& csv_path, const RegressionSample& sample) {
    std::ofstream out(csv_path);
    if (!out) throw ConfigError("cannot write " + csv_path);
    write_sample_csv(out, sample);
    if (sample.truth) {
        const auto side = truth_sidecar_path(csv_path);
        std::ofstream t(side);
        if (!t) throw ConfigError("cannot write " + side);
        t << truth_to_json(*sample.truth) << '\n';
    }
}

RegressionSample load_sample(const std::string& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw ConfigError("cannot read " + csv_path);
    RegressionSample sample = read_sample_csv(in);
    const auto side = truth_sidecar_path(csv_path);
    if (std::filesystem::exists(side)) {
        std::ifstream t(side);
        std::stringstream buf;
        buf << t.rdbuf();
        sample.truth = truth_from_json(buf.str());
    }
    return sample;
}

}  // namespace sparsenorm
