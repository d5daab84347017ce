#include "banditboost/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace banditboost {

namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ConfigError(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg);
}

std::string_view strip(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

// Drops a trailing comment, respecting quotes.
std::string_view drop_comment(std::string_view s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) quoted = !quoted;
        if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
}

class ValueParser {
public:
    ValueParser(std::string_view src, int line) : src_(src), line_(line) {}

    ConfigValue parse() {
        ConfigValue v = value();
        skip_ws();
        if (pos_ != src_.size()) fail(line_, "unexpected trailing text '" + std::string(src_.substr(pos_)) + "'");
        return v;
    }

private:
    void skip_ws() {
        while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t')) ++pos_;
    }

    ConfigValue value() {
        skip_ws();
        if (pos_ >= src_.size()) fail(line_, "missing value");
        ConfigValue v;
        v.line = line_;
        const char c = src_[pos_];
        if (c == '"') {
            v.type = ConfigValue::Type::string;
            ++pos_;
            while (pos_ < src_.size() && src_[pos_] != '"') {
                if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) {
                    const char e = src_[++pos_];
                    v.text.push_back(e == 'n' ? '\n' : e == 't' ? '\t' : e);
                } else {
                    v.text.push_back(src_[pos_]);
                }
                ++pos_;
            }
            if (pos_ >= src_.size()) fail(line_, "unterminated string");
            ++pos_;
            return v;
        }
        if (c == '[') {
            v.type = ConfigValue::Type::array;
            ++pos_;
            skip_ws();
            if (pos_ < src_.size() && src_[pos_] == ']') {
                ++pos_;
                return v;
            }
            for (;;) {
                v.items.push_back(value());
                if (v.items.back().type == ConfigValue::Type::array) fail(line_, "nested arrays are not supported");
                skip_ws();
                if (pos_ < src_.size() && src_[pos_] == ',') {
                    ++pos_;
                    skip_ws();
                    if (pos_ < src_.size() && src_[pos_] == ']') {
                        ++pos_;
                        return v;
                    }
                    continue;
                }
                if (pos_ < src_.size() && src_[pos_] == ']') {
                    ++pos_;
                    return v;
                }
                fail(line_, "expected ',' or ']' in array");
            }
        }
        std::size_t end = pos_;
        while (end < src_.size() && src_[end] != ',' && src_[end] != ']' && src_[end] != ' ' && src_[end] != '\t') ++end;
        const std::string token(src_.substr(pos_, end - pos_));
        pos_ = end;
        if (token == "true" || token == "false") {
            v.type = ConfigValue::Type::boolean;
            v.boolean = token == "true";
            return v;
        }
        std::string digits;
        for (char ch : token) {
            if (ch != '_') digits.push_back(ch);
        }
        const char* first = digits.data();
        if (!digits.empty() && *first == '+') ++first;
        double number = 0.0;
        const auto [ptr, ec] = std::from_chars(first, digits.data() + digits.size(), number);
        if (digits.empty() || ec != std::errc() || ptr != digits.data() + digits.size()) {
            fail(line_, "cannot parse value '" + token + "'");
        }
        v.type = ConfigValue::Type::number;
        v.number = number;
        v.text = token;
        return v;
    }

    std::string_view src_;
    int line_;
    std::size_t pos_ = 0;
};

const char* type_name(ConfigValue::Type t) {
    switch (t) {
        case ConfigValue::Type::boolean: return "boolean";
        case ConfigValue::Type::number: return "number";
        case ConfigValue::Type::string: return "string";
        case ConfigValue::Type::array: return "array";
    }
    return "?";
}

void expect(const std::string& key, const ConfigValue& v, ConfigValue::Type t) {
    if (v.type != t) {
        fail(v.line, "'" + key + "' must be a " + type_name(t) + ", got " + type_name(v.type));
    }
}

double as_number(const std::string& key, const ConfigValue& v) {
    expect(key, v, ConfigValue::Type::number);
    return v.number;
}

std::uint64_t as_count(const std::string& key, const ConfigValue& v) {
    const double x = as_number(key, v);
    if (!(x >= 0.0) || x != std::floor(x) || x > 9.0e18) {
        fail(v.line, "'" + key + "' must be a non-negative integer");
    }
    return static_cast<std::uint64_t>(x);
}

bool as_bool(const std::string& key, const ConfigValue& v) {
    expect(key, v, ConfigValue::Type::boolean);
    return v.boolean;
}

std::string as_string(const std::string& key, const ConfigValue& v) {
    expect(key, v, ConfigValue::Type::string);
    return v.text;
}

// Converts the library's InvalidParameter from enum parsers into config errors.
template <typename F>
auto enum_value(const std::string& key, const ConfigValue& v, F parse) {
    const std::string s = as_string(key, v);
    try {
        return parse(s);
    } catch (const InvalidParameter& e) {
        fail(v.line, "'" + key + "': " + e.what());
    }
}

template <typename T, typename F>
std::vector<T> as_list(const std::string& key, const ConfigValue& v, F item) {
    std::vector<T> out;
    if (v.type != ConfigValue::Type::array) {
        out.push_back(item(key, v));
        return out;
    }
    for (const auto& x : v.items) out.push_back(item(key, x));
    return out;
}

}  // namespace

ConfigDocument parse_config_text(const std::string& text) {
    ConfigDocument doc;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = strip(drop_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(line_no, "malformed section header");
            section = std::string(strip(line.substr(1, line.size() - 2)));
            if (section.empty()) fail(line_no, "empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) fail(line_no, "expected key = value");
        const std::string key(strip(line.substr(0, eq)));
        if (key.empty()) fail(line_no, "missing key");
        ConfigValue value = ValueParser(strip(line.substr(eq + 1)), line_no).parse();
        const std::string full = section.empty() ? key : section + "." + key;
        if (!doc.emplace(full, std::move(value)).second) fail(line_no, "duplicate key '" + full + "'");
    }
    return doc;
}

std::vector<std::uint64_t> seed_range(std::size_t count) {
    std::vector<std::uint64_t> seeds(count);
    for (std::size_t i = 0; i < count; ++i) seeds[i] = i;
    return seeds;
}

LoadedConfig config_from_document(const ConfigDocument& doc, const std::filesystem::path& base_dir) {
    LoadedConfig out;
    ExperimentConfig& c = out.experiment;
    std::optional<std::string> source;
    std::optional<std::size_t> seed_count;
    bool have_seeds = false;

    using Handler = std::function<void(const std::string&, const ConfigValue&)>;
    const std::map<std::string, Handler> handlers = {
        {"data.source", [&](auto& k, auto& v) { source = as_string(k, v); }},
        {"data.path",
         [&](auto& k, auto& v) {
             std::filesystem::path p = as_string(k, v);
             c.data.csv.path = p.is_relative() ? base_dir / p : p;
         }},
        {"data.label_column", [&](auto& k, auto& v) { c.data.csv.label_column = as_string(k, v); }},
        {"data.normalize", [&](auto& k, auto& v) { c.data.csv.normalize = as_bool(k, v); }},
        {"data.missing",
         [&](auto& k, auto& v) {
             const auto s = as_string(k, v);
             if (s == "error") {
                 c.data.csv.missing = MissingPolicy::error;
             } else if (s == "zero") {
                 c.data.csv.missing = MissingPolicy::zero;
             } else {
                 fail(v.line, "'" + k + "' must be \"error\" or \"zero\"");
             }
         }},
        {"data.k",
         [&](auto& k, auto& v) {
             c.data.csv.k = as_count(k, v);
             c.data.synthetic.k = as_count(k, v);
         }},
        {"data.generator",
         [&](auto& k, auto& v) { c.data.synthetic.generator = enum_value(k, v, parse_synthetic_kind); }},
        {"data.rows", [&](auto& k, auto& v) { c.data.synthetic.rows = as_count(k, v); }},
        {"data.dims", [&](auto& k, auto& v) { c.data.synthetic.dims = as_count(k, v); }},
        {"data.channels", [&](auto& k, auto& v) { c.data.synthetic.n_channels = as_count(k, v); }},
        {"data.gamma", [&](auto& k, auto& v) { c.data.synthetic.gamma = as_number(k, v); }},
        {"data.noise", [&](auto& k, auto& v) { c.data.synthetic.noise = as_number(k, v); }},
        {"data.separation", [&](auto& k, auto& v) { c.data.synthetic.separation = as_number(k, v); }},
        {"data.seed", [&](auto& k, auto& v) { c.data.synthetic.seed = as_count(k, v); }},
        {"data.resample_per_seed", [&](auto& k, auto& v) { c.data.resample_per_seed = as_bool(k, v); }},

        {"booster.algorithm", [&](auto& k, auto& v) { c.booster.algorithm = enum_value(k, v, parse_algorithm); }},
        {"booster.mode", [&](auto& k, auto& v) { c.booster.mode = enum_value(k, v, parse_mode); }},
        {"booster.n_learners", [&](auto& k, auto& v) { c.booster.n_learners = as_count(k, v); }},
        {"booster.rho", [&](auto& k, auto& v) { c.booster.rho = as_number(k, v); }},
        {"booster.rho_schedule", [&](auto& k, auto& v) { c.rho_schedule = enum_value(k, v, parse_rho_schedule); }},
        {"booster.sum_sq_edges", [&](auto& k, auto& v) { c.sum_sq_edges = as_number(k, v); }},
        {"booster.gamma", [&](auto& k, auto& v) { c.booster.gamma = as_number(k, v); }},
        {"booster.mc_samples", [&](auto& k, auto& v) { c.booster.mc_samples = as_count(k, v); }},
        {"booster.enumeration_budget", [&](auto& k, auto& v) { c.booster.enumeration_budget = as_count(k, v); }},
        {"booster.clip",
         [&](auto& k, auto& v) {
             if (v.type == ConfigValue::Type::boolean) {
                 if (v.boolean) fail(v.line, "'" + k + "' takes a bound or false");
                 c.booster.clip_bound.reset();
             } else {
                 c.booster.clip_bound = as_number(k, v);
             }
         }},
        {"booster.weight_scale", [&](auto& k, auto& v) { c.booster.weight_scale = as_number(k, v); }},
        {"booster.estimator", [&](auto& k, auto& v) { c.booster.estimator = enum_value(k, v, parse_estimator); }},

        {"learner.kind", [&](auto& k, auto& v) { c.learner.kind = enum_value(k, v, parse_learner_kind); }},
        {"learner.grace_period", [&](auto& k, auto& v) { c.learner.hoeffding.grace_period = as_number(k, v); }},
        {"learner.split_confidence",
         [&](auto& k, auto& v) { c.learner.hoeffding.split_confidence = as_number(k, v); }},
        {"learner.tie_threshold", [&](auto& k, auto& v) { c.learner.hoeffding.tie_threshold = as_number(k, v); }},
        {"learner.split_candidates",
         [&](auto& k, auto& v) { c.learner.hoeffding.split_candidates = as_count(k, v); }},
        {"learner.max_depth", [&](auto& k, auto& v) { c.learner.hoeffding.max_depth = as_count(k, v); }},
        {"learner.min_branch_fraction",
         [&](auto& k, auto& v) { c.learner.hoeffding.min_branch_fraction = as_number(k, v); }},
        {"learner.leaf_prediction",
         [&](auto& k, auto& v) { c.learner.hoeffding.leaf_prediction = enum_value(k, v, parse_leaf_prediction); }},
        {"learner.min_variance",
         [&](auto& k, auto& v) {
             c.learner.nb_min_variance = as_number(k, v);
             c.learner.hoeffding.min_variance = as_number(k, v);
         }},
        {"learner.gamma", [&](auto& k, auto& v) { c.learner.oracle.gamma = as_number(k, v); }},

        {"experiment.seeds",
         [&](auto& k, auto& v) {
             c.seeds = as_list<std::uint64_t>(k, v, as_count);
             have_seeds = true;
         }},
        {"experiment.seed_count", [&](auto& k, auto& v) { seed_count = as_count(k, v); }},
        {"experiment.duplication", [&](auto& k, auto& v) { c.duplication = as_count(k, v); }},
        {"experiment.shuffle", [&](auto& k, auto& v) { c.shuffle = as_bool(k, v); }},
        {"experiment.threads", [&](auto& k, auto& v) { c.threads = as_count(k, v); }},
        {"experiment.keep_records", [&](auto& k, auto& v) { c.keep_records = as_bool(k, v); }},

        {"sweep.rho", [&](auto& k, auto& v) { out.sweep.rho = as_list<double>(k, v, as_number); }},
        {"sweep.n_learners",
         [&](auto& k, auto& v) {
             for (auto n : as_list<std::uint64_t>(k, v, as_count)) out.sweep.n_learners.push_back(n);
         }},
    };

    for (const auto& [key, value] : doc) {
        const auto it = handlers.find(key);
        if (it == handlers.end()) fail(value.line, "unknown key '" + key + "'");
        it->second(key, value);
    }

    if (source) {
        if (*source == "csv") {
            c.data.kind = DataSourceConfig::Kind::csv;
        } else if (*source == "synthetic") {
            c.data.kind = DataSourceConfig::Kind::synthetic;
        } else {
            fail(doc.at("data.source").line, "data.source must be \"csv\" or \"synthetic\"");
        }
    } else {
        c.data.kind = doc.count("data.generator") ? DataSourceConfig::Kind::synthetic : DataSourceConfig::Kind::csv;
    }
    if (c.data.kind == DataSourceConfig::Kind::csv && c.data.csv.path.empty()) fail(0, "data.path is required");
    if (seed_count) {
        if (have_seeds) fail(doc.at("experiment.seed_count").line, "give either seeds or seed_count, not both");
        c.seeds = seed_range(*seed_count);
    }
    return out;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& base, const SweepGrid& grid) {
    if (grid.empty()) throw ConfigError("sweep grid is empty: set sweep.rho and/or sweep.n_learners");
    const std::vector<double> rhos = grid.rho.empty() ? std::vector<double>{base.booster.rho} : grid.rho;
    const std::vector<std::size_t> ns =
        grid.n_learners.empty() ? std::vector<std::size_t>{base.booster.n_learners} : grid.n_learners;
    std::vector<SweepRow> rows;
    for (double rho : rhos) {
        for (std::size_t n : ns) {
            ExperimentConfig c = base;
            c.booster.rho = rho;
            c.booster.n_learners = n;
            c.keep_records = false;
            const auto report = run_experiment(c);
            rows.push_back({rho, n, report.runs.size(), report.total, report.asymptotic, false});
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].asymptotic.mean > rows[best].asymptotic.mean) best = i;
    }
    rows[best].best = true;
    return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out.precision(17);
    out << "rho,n_learners,seeds,total_mean,total_std,asymptotic_mean,asymptotic_std,best\n";
    for (const auto& r : rows) {
        out << r.rho << ',' << r.n_learners << ',' << r.seeds << ',' << r.total.mean << ',' << r.total.std << ','
            << r.asymptotic.mean << ',' << r.asymptotic.std << ',' << (r.best ? 1 : 0) << '\n';
    }
    return out.str();
}

LoadedConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return config_from_document(parse_config_text(buf.str()), path.parent_path());
}

}  // namespace banditboost
