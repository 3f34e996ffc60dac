#include "sparsenorm/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "sparsenorm/calibration.hpp"
#include "sparsenorm/detection.hpp"
#include "sparsenorm/errors.hpp"
#include "sparsenorm/expr.hpp"

namespace sparsenorm {

using nlohmann::json;

Task parse_task(const std::string& tag) {
    if (tag == "estimate-norm") return Task::estimate_norm;
    if (tag == "estimate-q") return Task::estimate_q;
    if (tag == "detect") return Task::detect;
    throw ConfigError("unknown task: " + tag);
}

std::string to_string(Task t) {
    switch (t) {
        case Task::estimate_norm: return "estimate-norm";
        case Task::estimate_q: return "estimate-q";
        case Task::detect: return "detect";
    }
    return "?";
}

RegimeChoice parse_regime_choice(const std::string& tag) {
    if (tag == "low") return RegimeChoice::low;
    if (tag == "high") return RegimeChoice::high;
    if (tag == "auto") return RegimeChoice::automatic;
    throw ConfigError("unknown regime: " + tag);
}

namespace {

std::string regime_choice_tag(RegimeChoice r) {
    switch (r) {
        case RegimeChoice::low: return "low";
        case RegimeChoice::high: return "high";
        case RegimeChoice::automatic: return "auto";
    }
    return "?";
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class T>
std::vector<T> scalar_or_list(const json& j) {
    if (j.is_array()) return j.get<std::vector<T>>();
    return {j.get<T>()};
}

std::string rule_text(const json& j) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number()) return fmt17(j.get<double>());
    throw ConfigError("rule must be a number or an expression string");
}

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> known, const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; }))
            throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

json config_to_json(const ExperimentConfig& c) {
    json j;
    j["name"] = c.name;
    j["grid"] = {{"n", c.grid.n},         {"p", c.grid.p_rule},          {"s", c.grid.s_rule},
                 {"sigma", c.grid.sigma}, {"kappa", c.grid.kappa_rules}};
    j["regime"] = regime_choice_tag(c.regime);
    j["task"] = to_string(c.task);
    j["replications"] = c.replications;
    j["tuning"] = {{"alpha_low", c.alpha_low},
                   {"alpha_high", c.alpha_high},
                   {"c1", c.c1},
                   {"delta", c.delta},
                   {"calibration_trials", c.calibration_trials},
                   {"max_iter", c.slope.max_iter},
                   {"tol", c.slope.tol}};
    if (c.beta) j["tuning"]["beta"] = *c.beta;
    j["prelim"] = c.prelim == Prelim::zero ? "zero" : "slope";
    j["seed"] = c.seed;
    j["design"] = design_tag(c.design);
    j["noise"] = noise_tag(c.noise);
    j["pattern"] = c.pattern == SignPattern::equal ? "equal" : "random-signs";
    return j;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

int integer_rule(const std::string& rule, const std::map<std::string, double>& vars, const std::string& what) {
    const double v = evaluate_expression(rule, vars);
    const double r = std::round(v);
    if (std::abs(v - r) > 1e-9 * std::max(1.0, std::abs(v)))
        throw ConfigError(what + " rule \"" + rule + "\" gives non-integer " + fmt17(v));
    return static_cast<int>(r);
}

}  // namespace

void ExperimentConfig::validate() const {
    if (grid.n.empty()) throw ConfigError("grid.n must list at least one size");
    for (int n : grid.n)
        if (n < 2) throw ConfigError("grid.n entries must be at least 2");
    if (grid.sigma.empty()) throw ConfigError("grid.sigma must be nonempty");
    for (double s : grid.sigma)
        if (!(s > 0.0)) throw ConfigError("grid.sigma entries must be positive");
    if (grid.kappa_rules.empty()) throw ConfigError("grid.kappa must be nonempty");
    if (replications < 1) throw ConfigError("replications must be at least 1");
    if (!(alpha_low > 0.0) || !(alpha_high > 0.0)) throw ConfigError("alpha must be positive");
    if (!(c1 > 0.0)) throw ConfigError("c1 must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must be in (0, 1)");
    if (beta && !(*beta > 0.0)) throw ConfigError("beta must be positive");
    if (calibration_trials < 1) throw ConfigError("calibration_trials must be positive");
    if (slope.max_iter < 1 || !(slope.tol > 0.0)) throw ConfigError("bad SLOPE solver options");
    if (task == Task::detect && prelim == Prelim::zero)
        throw ConfigError("detect needs a noise-level estimate; prelim \"zero\" has none");
    if (prelim == Prelim::zero && regime != RegimeChoice::high)
        throw ConfigError("prelim \"zero\" is only available with regime \"high\"");
}

ExperimentConfig parse_config(const std::string& json_text) {
    ExperimentConfig c;
    try {
        const json j = json::parse(json_text);
        if (!j.is_object()) throw ConfigError("config must be a JSON object");
        reject_unknown_keys(j,
                            {"name", "grid", "regime", "task", "replications", "tuning", "prelim", "seed", "design",
                             "noise", "pattern", "threads"},
                            "config");
        if (j.contains("name")) c.name = j["name"].get<std::string>();
        const json& g = j.at("grid");
        reject_unknown_keys(g, {"n", "p", "s", "sigma", "kappa"}, "grid");
        c.grid.n = scalar_or_list<int>(g.at("n"));
        if (g.contains("p")) c.grid.p_rule = rule_text(g["p"]);
        if (g.contains("s")) c.grid.s_rule = rule_text(g["s"]);
        if (g.contains("sigma")) c.grid.sigma = scalar_or_list<double>(g["sigma"]);
        if (g.contains("kappa")) {
            c.grid.kappa_rules.clear();
            if (g["kappa"].is_array())
                for (const auto& k : g["kappa"]) c.grid.kappa_rules.push_back(rule_text(k));
            else
                c.grid.kappa_rules.push_back(rule_text(g["kappa"]));
        }
        if (j.contains("regime")) c.regime = parse_regime_choice(j["regime"].get<std::string>());
        if (j.contains("task")) c.task = parse_task(j["task"].get<std::string>());
        if (j.contains("replications")) c.replications = j["replications"].get<int>();
        if (j.contains("tuning")) {
            const json& t = j["tuning"];
            reject_unknown_keys(t,
                                {"alpha", "alpha_low", "alpha_high", "c1", "beta", "delta", "calibration_trials",
                                 "max_iter", "tol"},
                                "tuning");
            if (t.contains("alpha")) c.alpha_low = c.alpha_high = t["alpha"].get<double>();
            if (t.contains("alpha_low")) c.alpha_low = t["alpha_low"].get<double>();
            if (t.contains("alpha_high")) c.alpha_high = t["alpha_high"].get<double>();
            if (t.contains("c1")) c.c1 = t["c1"].get<double>();
            if (t.contains("beta")) c.beta = t["beta"].get<double>();
            if (t.contains("delta")) c.delta = t["delta"].get<double>();
            if (t.contains("calibration_trials")) c.calibration_trials = t["calibration_trials"].get<int>();
            if (t.contains("max_iter")) c.slope.max_iter = t["max_iter"].get<int>();
            if (t.contains("tol")) c.slope.tol = t["tol"].get<double>();
        }
        if (j.contains("prelim")) c.prelim = parse_prelim(j["prelim"].get<std::string>());
        if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("design")) c.design = parse_design_law(j["design"].get<std::string>());
        if (j.contains("noise")) c.noise = parse_noise_law(j["noise"].get<std::string>());
        if (j.contains("pattern")) c.pattern = parse_sign_pattern(j["pattern"].get<std::string>());
        if (j.contains("threads")) c.threads = j["threads"].get<int>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string config_fingerprint(const ExperimentConfig& cfg) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(mix64(fnv1a(config_to_json(cfg).dump()))));
    return buf;
}

std::vector<GridPoint> expand_grid(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::string fp = config_fingerprint(cfg).substr(0, 8);
    std::vector<GridPoint> grid;
    for (int n : cfg.grid.n) {
        for (double sigma : cfg.grid.sigma) {
            for (std::size_t k = 0; k < cfg.grid.kappa_rules.size(); ++k) {
                GridPoint g;
                g.index = static_cast<int>(grid.size());
                g.config_id = fp + "-" + std::to_string(g.index);
                g.n = n;
                g.sigma = sigma;
                g.kappa_index = static_cast<int>(k);
                g.p = integer_rule(cfg.grid.p_rule, {{"n", n}}, "p");
                g.s = integer_rule(cfg.grid.s_rule, {{"n", n}, {"p", g.p}}, "s");
                if (g.p < 2) throw ConfigError("p must be at least 2 (n=" + std::to_string(n) + ")");
                if (g.s < 1 || g.s > g.p) throw ConfigError("s must satisfy 1 <= s <= p");
                switch (cfg.regime) {
                    case RegimeChoice::low: g.regime = Regime::low; break;
                    case RegimeChoice::high: g.regime = Regime::high; break;
                    case RegimeChoice::automatic: g.regime = 2 * g.p <= n ? Regime::low : Regime::high; break;
                }
                if (g.regime == Regime::low && n <= g.p)
                    throw ConfigError("low regime needs n > p (n=" + std::to_string(n) + ", p=" + std::to_string(g.p) + ")");
                g.branch = branch_for(g.s, g.p);
                if (g.regime == Regime::low)
                    g.parts = 2;
                else if (cfg.prelim == Prelim::zero) {
                    g.parts = 1;
                    g.branch = Branch::dense;
                } else {
                    g.parts = g.branch == Branch::dense ? 2 : 3;
                }
                g.N = g.parts * n;
                g.kappa = evaluate_expression(
                    cfg.grid.kappa_rules[k], {{"n", n}, {"N", g.N}, {"p", g.p}, {"s", g.s}, {"sigma", sigma}});
                if (!(g.kappa >= 0.0)) throw ConfigError("kappa must be nonnegative");
                grid.push_back(g);
            }
        }
    }
    return grid;
}

std::uint64_t trial_seed(const ExperimentConfig& cfg, int grid_index, int replication) {
    return derive_seed(derive_seed(cfg.seed, static_cast<std::uint64_t>(grid_index)),
                       static_cast<std::uint64_t>(replication));
}

namespace {

FunctionalEstimate estimate_for(const ExperimentConfig& cfg, const GridPoint& point, const RegressionSample& sample) {
    if (point.regime == Regime::low) return estimate_lowdim(sample, point.s, TuningParams{cfg.alpha_low, 1.0});
    if (cfg.prelim == Prelim::zero) return estimate_zero_prelim(sample);
    return estimate_highdim(sample, point.s, HighDimParams{cfg.alpha_high, cfg.c1, cfg.slope});
}

}  // namespace

TrialRecord run_trial(const ExperimentConfig& cfg, const GridPoint& point, int replication,
                      std::optional<double> beta) {
    TrialRecord rec;
    rec.config_id = point.config_id;
    rec.seed = trial_seed(cfg, point.index, replication);
    rec.grid_index = point.index;
    rec.replication = replication;
    rec.n = point.n;
    rec.p = point.p;
    rec.s = point.s;
    rec.sigma = point.sigma;
    try {
        Rng rng = make_rng(rec.seed);
        ModelSpec spec;
        spec.theta = sample_sparse_theta(point.p, point.s, point.kappa, cfg.pattern, rng);
        spec.sigma = point.sigma;
        spec.design = cfg.design;
        spec.noise = cfg.noise;
        rec.true_q = spec.theta.squaredNorm();
        rec.true_lambda = std::sqrt(rec.true_q);
        const RegressionSample sample = synthesize(spec, point.N, rng);
        const FunctionalEstimate est = estimate_for(cfg, point, sample);
        rec.q_hat = est.q_hat;
        rec.lambda_hat = est.lambda_hat;
        rec.err_q = rec.q_hat - rec.true_q;
        rec.err_lambda = rec.lambda_hat - rec.true_lambda;
        if (cfg.task == Task::detect) {
            if (!beta) throw InvalidArgument("detect trial without beta");
            rec.decision = decide(est, *beta, point.s, point.p, point.N).decision ? 1 : 0;
        }
    } catch (const std::exception& e) {
        rec.error = e.what();
    }
    return rec;
}

double resolve_beta(const ExperimentConfig& cfg, const GridPoint& point) {
    if (cfg.beta) return *cfg.beta;
    CalibrationQuery q;
    q.regime = point.regime;
    q.p = point.p;
    q.N = point.N;
    q.s = point.s;
    q.delta = cfg.delta;
    q.alpha = cfg.alpha_low;
    q.high = HighDimParams{cfg.alpha_high, cfg.c1, cfg.slope};
    q.trials = cfg.calibration_trials;
    const std::uint64_t shape = (static_cast<std::uint64_t>(point.p) << 42) ^
                                (static_cast<std::uint64_t>(point.N) << 21) ^ static_cast<std::uint64_t>(point.s);
    q.seed = derive_seed(cfg.seed ^ 0x9e3779b97f4a7c15ULL, shape);
    q.threads = cfg.threads;
    return calibrate_beta(q);
}

std::vector<TrialRecord> run_trials(const ExperimentConfig& cfg) {
    const auto grid = expand_grid(cfg);
    std::vector<std::optional<double>> betas(grid.size());
    if (cfg.task == Task::detect)
        for (std::size_t g = 0; g < grid.size(); ++g) betas[g] = resolve_beta(cfg, grid[g]);
    const int reps = cfg.replications;
    std::vector<TrialRecord> records(grid.size() * static_cast<std::size_t>(reps));
    parallel_for(static_cast<int>(records.size()), cfg.threads, [&](int i) {
        const int g = i / reps;
        records[static_cast<std::size_t>(i)] = run_trial(cfg, grid[static_cast<std::size_t>(g)], i % reps, betas[static_cast<std::size_t>(g)]);
    });
    return records;
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& xy) {
    require(xy.size() >= 2, "rate fit needs at least two points");
    RateFit fit;
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : xy) {
        require(x > 0.0 && y > 0.0 && std::isfinite(x) && std::isfinite(y), "rate fit needs positive finite values");
        fit.points.emplace_back(std::log(x), std::log(y));
        mx += std::log(x);
        my += std::log(y);
    }
    const double k = static_cast<double>(xy.size());
    mx /= k;
    my /= k;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [lx, ly] : fit.points) {
        sxx += (lx - mx) * (lx - mx);
        sxy += (lx - mx) * (ly - my);
        syy += (ly - my) * (ly - my);
    }
    require(sxx > 0.0, "rate fit needs at least two distinct x values");
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (const auto& [lx, ly] : fit.points) {
        const double e = ly - fit.intercept - fit.slope * lx;
        ss_res += e * e;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

RateKind parse_rate_kind(const std::string& tag) {
    if (tag == "phi") return RateKind::phi;
    if (tag == "q") return RateKind::q;
    if (tag == "rho") return RateKind::rho;
    throw ConfigError("unknown rate kind: " + tag);
}

double theoretical_rate(int p, int N, int s, double sigma, double kappa, RateKind which) {
    require(p >= 1 && N >= 1 && s >= 1, "rate needs positive p, N, s");
    const double base = s * std::log1p(std::sqrt(static_cast<double>(p)) / s) / N;
    switch (which) {
        case RateKind::phi: return sigma * std::sqrt(base);
        case RateKind::rho: return std::sqrt(base);
        case RateKind::q: return std::min(sigma * sigma * base + sigma * kappa / std::sqrt(static_cast<double>(N)), kappa * kappa);
    }
    return 0.0;
}

namespace {

double median_of(std::vector<double> v) {
    if (v.empty()) return std::nan("");
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Nearest-rank quantile.
double quantile_of(std::vector<double> v, double level) {
    if (v.empty()) return std::nan("");
    std::sort(v.begin(), v.end());
    auto rank = static_cast<std::size_t>(std::ceil(level * static_cast<double>(v.size()) - 1e-12));
    rank = std::clamp<std::size_t>(rank, 1, v.size());
    return v[rank - 1];
}

std::string sanitize(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ';';
    return s;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double summary_metric(const GridSummary& g, const std::string& metric) {
    if (metric == "mse_q") return g.mse_q;
    if (metric == "mse_lambda") return g.mse_lambda;
    if (metric == "median_abs_err_q") return g.median_abs_err_q;
    if (metric == "median_abs_err_lambda") return g.median_abs_err_lambda;
    if (metric == "quantile_abs_err_q") return g.quantile_abs_err_q;
    if (metric == "quantile_abs_err_lambda") return g.quantile_abs_err_lambda;
    if (metric == "rejection_rate" && g.rejection_rate) return *g.rejection_rate;
    throw ConfigError("unknown or unavailable metric: " + metric);
}

json summary_to_json(const GridSummary& g) {
    json j = {{"config_id", g.config_id},
              {"n", g.n},
              {"p", g.p},
              {"s", g.s},
              {"sigma", g.sigma},
              {"trials", g.trials},
              {"failed", g.failed},
              {"mean_q_hat", number_or_null(g.mean_q_hat)},
              {"mean_lambda_hat", number_or_null(g.mean_lambda_hat)},
              {"mse_q", number_or_null(g.mse_q)},
              {"mse_lambda", number_or_null(g.mse_lambda)},
              {"median_abs_err_q", number_or_null(g.median_abs_err_q)},
              {"median_abs_err_lambda", number_or_null(g.median_abs_err_lambda)},
              {"quantile_abs_err_q", number_or_null(g.quantile_abs_err_q)},
              {"quantile_abs_err_lambda", number_or_null(g.quantile_abs_err_lambda)}};
    j["rejection_rate"] = g.rejection_rate ? json(*g.rejection_rate) : json(nullptr);
    return j;
}

json fit_to_json(const RateFit& f) {
    json pts = json::array();
    for (const auto& [x, y] : f.points) pts.push_back({x, y});
    return {{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}, {"points", pts}};
}

json try_fit(const std::vector<std::pair<double, double>>& xy) {
    try {
        return fit_to_json(fit_rate(xy));
    } catch (const InvalidArgument& e) {
        return {{"skipped", e.what()}};
    }
}

}  // namespace

std::vector<GridSummary> summarize(const std::vector<TrialRecord>& records, double delta) {
    std::vector<GridSummary> out;
    std::map<std::string, std::size_t> slot;
    std::vector<std::vector<const TrialRecord*>> groups;
    for (const auto& r : records) {
        auto [it, fresh] = slot.emplace(r.config_id, out.size());
        if (fresh) {
            GridSummary g;
            g.config_id = r.config_id;
            g.n = r.n;
            g.p = r.p;
            g.s = r.s;
            g.sigma = r.sigma;
            out.push_back(g);
            groups.emplace_back();
        }
        groups[it->second].push_back(&r);
    }
    for (std::size_t k = 0; k < out.size(); ++k) {
        GridSummary& g = out[k];
        std::vector<double> abs_q, abs_l;
        double sum_q = 0.0, sum_l = 0.0, sq_q = 0.0, sq_l = 0.0;
        int rejections = 0, decided = 0;
        for (const TrialRecord* r : groups[k]) {
            if (!r->ok()) {
                ++g.failed;
                continue;
            }
            ++g.trials;
            sum_q += r->q_hat;
            sum_l += r->lambda_hat;
            sq_q += r->err_q * r->err_q;
            sq_l += r->err_lambda * r->err_lambda;
            abs_q.push_back(std::abs(r->err_q));
            abs_l.push_back(std::abs(r->err_lambda));
            if (r->decision) {
                ++decided;
                rejections += *r->decision;
            }
        }
        const double t = g.trials > 0 ? static_cast<double>(g.trials) : std::nan("");
        g.mean_q_hat = sum_q / t;
        g.mean_lambda_hat = sum_l / t;
        g.mse_q = sq_q / t;
        g.mse_lambda = sq_l / t;
        g.median_abs_err_q = median_of(abs_q);
        g.median_abs_err_lambda = median_of(abs_l);
        g.quantile_abs_err_q = quantile_of(abs_q, 1.0 - delta);
        g.quantile_abs_err_lambda = quantile_of(abs_l, 1.0 - delta);
        if (decided > 0) g.rejection_rate = static_cast<double>(rejections) / decided;
    }
    return out;
}

static const char* const kCsvHeader = "config_id,seed,n,p,s,sigma,true_q,q_hat,lambda_hat,decision,err_q,err_lambda,error";

void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
    out << kCsvHeader << '\n';
    for (const auto& r : records) {
        out << r.config_id << ',' << r.seed << ',' << r.n << ',' << r.p << ',' << r.s << ',' << fmt17(r.sigma) << ','
            << fmt17(r.true_q) << ',';
        if (r.ok())
            out << fmt17(r.q_hat) << ',' << fmt17(r.lambda_hat) << ',';
        else
            out << ",,";
        if (r.decision) out << *r.decision;
        out << ',';
        if (r.ok())
            out << fmt17(r.err_q) << ',' << fmt17(r.err_lambda) << ',';
        else
            out << ",,";
        if (r.error) out << sanitize(*r.error);
        out << '\n';
    }
}

std::vector<TrialRecord> read_records_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("records CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader) throw ConfigError("unexpected records CSV header: " + line);
    std::vector<TrialRecord> out;
    std::map<std::string, int> reps;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (!line.empty() && line.back() == ',') f.emplace_back();
        if (f.size() != 13) throw ConfigError("records CSV line " + std::to_string(lineno) + ": expected 13 fields");
        try {
            TrialRecord r;
            r.config_id = f[0];
            r.seed = std::stoull(f[1]);
            r.n = std::stoi(f[2]);
            r.p = std::stoi(f[3]);
            r.s = std::stoi(f[4]);
            r.sigma = std::stod(f[5]);
            r.true_q = std::stod(f[6]);
            r.true_lambda = std::sqrt(r.true_q);
            if (!f[12].empty()) {
                r.error = f[12];
            } else {
                r.q_hat = std::stod(f[7]);
                r.lambda_hat = std::stod(f[8]);
                r.err_q = std::stod(f[10]);
                r.err_lambda = std::stod(f[11]);
            }
            if (!f[9].empty()) r.decision = std::stoi(f[9]);
            r.replication = reps[r.config_id]++;
            out.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw ConfigError("records CSV line " + std::to_string(lineno) + ": malformed number");
        }
    }
    return out;
}

std::string summary_json(const ExperimentConfig& cfg, const std::vector<GridPoint>& grid,
                         const std::vector<TrialRecord>& records) {
    const auto sums = summarize(records, cfg.delta);
    std::map<std::string, const GridSummary*> by_id;
    for (const auto& g : sums) by_id[g.config_id] = &g;

    json j;
    j["name"] = cfg.name;
    j["config_fingerprint"] = config_fingerprint(cfg);
    j["config"] = config_to_json(cfg);
    j["task"] = to_string(cfg.task);
    j["delta"] = cfg.delta;
    j["points"] = json::array();
    int failed_total = 0;
    const bool q_task = cfg.task == Task::estimate_q;
    std::map<std::pair<double, int>, std::vector<std::pair<double, double>>> series;
    for (const auto& pt : grid) {
        auto it = by_id.find(pt.config_id);
        if (it == by_id.end()) continue;
        const GridSummary& g = *it->second;
        failed_total += g.failed;
        json e = summary_to_json(g);
        e["N"] = pt.N;
        e["kappa"] = pt.kappa;
        e["kappa_index"] = pt.kappa_index;
        e["regime"] = to_string(pt.regime);
        e["branch"] = to_string(pt.branch);
        e["parts"] = pt.parts;
        const double phi = theoretical_rate(pt.p, pt.N, pt.s, pt.sigma, pt.kappa, RateKind::phi);
        const double qr = theoretical_rate(pt.p, pt.N, pt.s, pt.sigma, pt.kappa, RateKind::q);
        const double rho = theoretical_rate(pt.p, pt.N, pt.s, pt.sigma, pt.kappa, RateKind::rho);
        e["theoretical"] = {{"phi", phi}, {"q", qr}, {"rho", rho}};
        const double rate = q_task ? qr : phi;
        const double mse = q_task ? g.mse_q : g.mse_lambda;
        e["ratio"] = cfg.task != Task::detect && rate > 0.0 ? number_or_null(mse / (rate * rate)) : json(nullptr);
        j["points"].push_back(e);
        if (std::isfinite(mse)) series[{pt.sigma, pt.kappa_index}].emplace_back(pt.n, mse);
    }
    j["failed_total"] = failed_total;
    j["rate_fits"] = json::array();
    for (const auto& [key, xy] : series) {
        json f = try_fit(xy);
        f["sigma"] = key.first;
        f["kappa_index"] = key.second;
        f["metric"] = q_task ? "mse_q" : "mse_lambda";
        j["rate_fits"].push_back(f);
    }
    return j.dump(2);
}

std::string rates_json(const std::vector<TrialRecord>& records, const std::string& metric, double delta) {
    const auto sums = summarize(records, delta);
    // Grid indices run with n outermost, so index % (points per n) names the
    // (sigma, kappa) slot a point belongs to.
    std::map<int, int> n_count;
    for (const auto& g : sums) ++n_count[g.n];
    const std::size_t per_n = n_count.empty() ? 1 : sums.size() / n_count.size();
    const bool slotted = per_n > 0 && per_n * n_count.size() == sums.size();
    auto slot_of = [&](const GridSummary& g) -> int {
        const auto dash = g.config_id.rfind('-');
        if (!slotted || dash == std::string::npos) return 0;
        try {
            return std::stoi(g.config_id.substr(dash + 1)) % static_cast<int>(per_n);
        } catch (const std::logic_error&) {
            return 0;
        }
    };

    json j;
    j["metric"] = metric;
    j["delta"] = delta;
    j["summary"] = json::array();
    std::map<std::pair<double, int>, std::vector<std::pair<double, double>>> series;
    for (const auto& g : sums) {
        j["summary"].push_back(summary_to_json(g));
        const double v = summary_metric(g, metric);
        if (std::isfinite(v)) series[{g.sigma, slot_of(g)}].emplace_back(g.n, v);
    }
    j["groups"] = json::array();
    for (const auto& [key, xy] : series) {
        json f = try_fit(xy);
        f["sigma"] = key.first;
        f["slot"] = key.second;
        j["groups"].push_back(f);
    }
    return j.dump(2);
}

void report(const ExperimentConfig& cfg, const std::vector<GridPoint>& grid, const std::vector<TrialRecord>& records,
            const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir + ": " + ec.message());
    {
        std::ofstream out(fs::path(dir) / "records.csv");
        if (!out) throw ConfigError("cannot write records.csv in " + dir);
        write_records_csv(out, records);
    }
    std::ofstream out(fs::path(dir) / "summary.json");
    if (!out) throw ConfigError("cannot write summary.json in " + dir);
    out << summary_json(cfg, grid, records) << '\n';
}

}  // namespace sparsenorm
