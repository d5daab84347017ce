// banditboost: run, sweep, curve and verify over the online boosting library.
//
// Exit codes: 0 success, 1 failed checks or internal error, 2 configuration
// or parameter error, 3 data error.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "banditboost/config.hpp"
#include "banditboost/errors.hpp"
#include "banditboost/harness.hpp"
#include "banditboost/verify.hpp"

namespace bb = banditboost;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::string seeds;
    std::optional<double> rho;
    std::optional<std::size_t> n_learners;
    std::optional<double> gamma;
    std::optional<std::string> algorithm;
    std::optional<std::string> mode;
    std::optional<std::size_t> duplication;
};

std::uint64_t parse_u64(const std::string& s) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw bb::ConfigError("bad seed '" + s + "'");
    }
    return v;
}

// "3,5,9" or a half-open range "0:20".
std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    if (const auto colon = text.find(':'); colon != std::string::npos) {
        const auto lo = parse_u64(text.substr(0, colon));
        const auto hi = parse_u64(text.substr(colon + 1));
        if (hi <= lo) throw bb::ConfigError("empty seed range '" + text + "'");
        std::vector<std::uint64_t> out;
        for (auto s = lo; s < hi; ++s) out.push_back(s);
        return out;
    }
    std::vector<std::uint64_t> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(parse_u64(item));
    if (out.empty()) throw bb::ConfigError("empty seed list");
    return out;
}

void add_overrides(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--seed", o.seed, "Run a single seed");
    cmd->add_option("--seeds", o.seeds, "Seed list 1,2,3 or range 0:20");
    cmd->add_option("--rho", o.rho, "Exploration rate");
    cmd->add_option("--n-learners", o.n_learners, "Number of weak learners");
    cmd->add_option("--gamma", o.gamma, "Assumed edge for BanditBBM potentials");
    cmd->add_option("--algorithm", o.algorithm, "bbm or ada");
    cmd->add_option("--mode", o.mode, "bandit or full");
    cmd->add_option("--duplication", o.duplication, "Shuffled copies of the dataset");
    cmd->get_option("--seed")->excludes("--seeds");
}

void apply(const Overrides& o, bb::ExperimentConfig& c) {
    if (o.seed) c.seeds = {*o.seed};
    if (!o.seeds.empty()) c.seeds = parse_seed_list(o.seeds);
    if (o.rho) {
        c.booster.rho = *o.rho;
        c.rho_schedule = bb::RhoSchedule::constant;
    }
    if (o.n_learners) c.booster.n_learners = *o.n_learners;
    if (o.gamma) c.booster.gamma = *o.gamma;
    if (o.algorithm) c.booster.algorithm = bb::parse_algorithm(*o.algorithm);
    if (o.mode) c.booster.mode = bb::parse_mode(*o.mode);
    if (o.duplication) c.duplication = *o.duplication;
}

std::string fixed(double v, int digits = 4) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

int cmd_run(const std::string& config_path, const Overrides& o, const std::filesystem::path& out_dir) {
    auto loaded = bb::load_config(config_path);
    apply(o, loaded.experiment);
    const auto report = bb::run_experiment(loaded.experiment);

    const auto json = bb::report_to_json(report);
    bb::write_file_atomic(out_dir / "report.json", json.dump(2) + "\n");
    bb::write_file_atomic(out_dir / "curve.csv", bb::curves_to_csv(bb::curves_from_json(json)));
    nlohmann::json timing = nlohmann::json::array();
    for (const auto& run : report.runs) timing.push_back({{"seed", run.seed}, {"wall_time_seconds", run.wall_time_seconds}});
    bb::write_file_atomic(out_dir / "timing.json", timing.dump(2) + "\n");

    const auto& b = report.config.booster;
    std::cout << "dataset " << report.dataset_name << ": " << report.dataset_rows << " rows, k=" << report.k
              << ", stream " << report.stream_count << "\n"
              << bb::to_string(b.algorithm) << " " << bb::to_string(b.mode) << " N=" << b.n_learners
              << " rho=" << report.runs.front().rho_used << " seeds=" << report.runs.size() << "\n"
              << "total accuracy      " << fixed(report.total.mean) << " +- " << fixed(report.total.std) << "\n"
              << "asymptotic accuracy " << fixed(report.asymptotic.mean) << " +- " << fixed(report.asymptotic.std)
              << "\n"
              << "wrote " << (out_dir / "report.json").string() << ", " << (out_dir / "curve.csv").string() << "\n";
    return kExitOk;
}

int cmd_sweep(const std::string& config_path, const Overrides& o, const std::filesystem::path& out_dir) {
    auto loaded = bb::load_config(config_path);
    apply(o, loaded.experiment);
    const auto rows = bb::run_sweep(loaded.experiment, loaded.sweep);

    std::printf("%-10s %-4s %-6s %-18s %-18s\n", "rho", "N", "seeds", "total", "asymptotic");
    for (const auto& r : rows) {
        std::printf("%-10g %-4zu %-6zu %.4f +- %.4f    %.4f +- %.4f %s\n", r.rho, r.n_learners, r.seeds, r.total.mean,
                    r.total.std, r.asymptotic.mean, r.asymptotic.std, r.best ? "*" : "");
    }
    bb::write_file_atomic(out_dir / "sweep.csv", bb::sweep_to_csv(rows));
    std::cout << "wrote " << (out_dir / "sweep.csv").string() << "\n";
    return kExitOk;
}

int cmd_curve(const std::string& report_path, const std::filesystem::path& out_dir) {
    std::ifstream in(report_path);
    if (!in) throw bb::DataError(bb::DataError::Kind::missing_file, "cannot open report '" + report_path + "'");
    nlohmann::json report;
    try {
        in >> report;
    } catch (const nlohmann::json::exception& e) {
        throw bb::DataError(bb::DataError::Kind::malformed, std::string("report is not valid JSON: ") + e.what());
    }
    const auto curves = bb::curves_from_json(report);
    bb::write_file_atomic(out_dir / "curve.csv", bb::curves_to_csv(curves));
    std::cout << "wrote " << curves.size() << " curve(s) to " << (out_dir / "curve.csv").string() << "\n";
    return kExitOk;
}

int cmd_verify(const std::string& checks, std::optional<std::uint64_t> seed) {
    bb::VerifyOptions opt;
    if (seed) opt.seed = *seed;
    std::stringstream in(checks);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) opt.suites.push_back(item);
    }
    const auto results = bb::run_verify(opt);
    bool ok = true;
    for (const auto& r : results) {
        std::printf("%s  %-10s %-55s worst=%.3e tol=%.1e margin=%.3e (%zu cases)\n", r.passed() ? "PASS" : "FAIL",
                    r.suite.c_str(), r.name.c_str(), r.observed, r.tolerance, r.margin(), r.cases);
        ok = ok && r.passed();
    }
    return ok ? kExitOk : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online multiclass boosting with bandit feedback"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    Overrides overrides;

    auto* run = app.add_subcommand("run", "Run one experiment and write report.json and curve.csv");
    run->add_option("--config", config_path, "Experiment config file")->required();
    run->add_option("--out", out_dir, "Output directory");
    add_overrides(run, overrides);

    auto* sweep = app.add_subcommand("sweep", "Grid search over rho and/or N");
    sweep->add_option("--config", config_path, "Experiment config file with a [sweep] section")->required();
    sweep->add_option("--out", out_dir, "Output directory");
    add_overrides(sweep, overrides);

    std::string report_path;
    auto* curve = app.add_subcommand("curve", "Re-emit learning curves from a saved report");
    curve->add_option("report", report_path, "report.json")->required();
    curve->add_option("--out", out_dir, "Output directory");

    std::string checks;
    std::optional<std::uint64_t> verify_seed;
    auto* verify = app.add_subcommand("verify", "Run the property checks");
    verify->add_option("--checks", checks, "Comma-separated suites: estimator,cost,potentials,gradient,matrices");
    verify->add_option("--seed", verify_seed, "Seed for the randomized checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*run) return cmd_run(config_path, overrides, out_dir);
        if (*sweep) return cmd_sweep(config_path, overrides, out_dir);
        if (*curve) return cmd_curve(report_path, out_dir);
        if (*verify) return cmd_verify(checks, verify_seed);
    } catch (const bb::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const bb::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const bb::InvalidParameter& e) {
        std::cerr << "invalid parameter: " << e.what() << "\n";
        return kExitConfig;
    } catch (const bb::InvalidArgument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return kExitConfig;
    } catch (const bb::InvalidSpace& e) {
        std::cerr << "invalid label space: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailed;
    }
    return kExitFailed;
}
