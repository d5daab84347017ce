#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "banditboost/harness.hpp"

namespace banditboost {

// A small TOML subset: [section] headers, key = value lines, '#' comments.
// Values are quoted strings, numbers, true/false, or flat [a, b, c] arrays.
struct ConfigValue {
    enum class Type { boolean, number, string, array } type = Type::number;
    bool boolean = false;
    double number = 0.0;
    std::string text;  // string payload, or the raw token for numbers
    std::vector<ConfigValue> items;
    int line = 0;
};

/// Keys are "section.key"; keys before any header live in section "".
using ConfigDocument = std::map<std::string, ConfigValue>;

ConfigDocument parse_config_text(const std::string& text);

struct SweepGrid {
    std::vector<double> rho;
    std::vector<std::size_t> n_learners;

    [[nodiscard]] bool empty() const noexcept { return rho.empty() && n_learners.empty(); }
    [[nodiscard]] std::size_t size() const noexcept {
        return std::max<std::size_t>(rho.size(), 1) * std::max<std::size_t>(n_learners.size(), 1);
    }
};

struct LoadedConfig {
    ExperimentConfig experiment;
    SweepGrid sweep;
};

/// Relative dataset paths resolve against `base_dir`. Unknown sections or
/// keys and type mismatches throw ConfigError; range checks are left to
/// BoosterConfig::validate.
LoadedConfig config_from_document(const ConfigDocument& doc, const std::filesystem::path& base_dir);

LoadedConfig load_config(const std::filesystem::path& path);

struct SweepRow {
    double rho = 0.0;
    std::size_t n_learners = 0;
    std::size_t seeds = 0;
    Summary total;
    Summary asymptotic;
    bool best = false;  // highest mean asymptotic accuracy, first on ties
};

/// One experiment per grid point (rho x n_learners). Axes left empty keep
/// the base value. Throws ConfigError on an empty grid.
std::vector<SweepRow> run_sweep(const ExperimentConfig& base, const SweepGrid& grid);

std::string sweep_to_csv(const std::vector<SweepRow>& rows);

/// Seeds 0..count-1.
std::vector<std::uint64_t> seed_range(std::size_t count);

}  // namespace banditboost
