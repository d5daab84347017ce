#include "banditboost/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

namespace banditboost {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

// RFC-4180 records; quoted fields may hold commas, CR/LF and doubled quotes.
std::vector<std::vector<std::string>> parse_records(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t i = 0;
    const std::size_t n = text.size();
    if (n >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) i = 3;  // UTF-8 BOM

    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        const bool blank = row.size() == 1 && trim(row[0]).empty();
        if (!blank) rows.push_back(std::move(row));
        row.clear();
    };

    for (; i < n; ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < n && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        if (c == '"' && !field_started) {
            in_quotes = true;
            field_started = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\r') {
            if (i + 1 < n && text[i + 1] == '\n') ++i;
            end_row();
        } else if (c == '\n') {
            end_row();
        } else {
            field.push_back(c);
            field_started = true;
        }
    }
    if (in_quotes) throw DataError(DataError::Kind::malformed, "unterminated quoted field");
    if (!field.empty() || !row.empty()) end_row();
    return rows;
}

std::optional<double> parse_number(const std::string& raw) {
    const std::string s = trim(raw);
    if (s.empty()) return std::nullopt;
    double value = 0.0;
    const char* begin = s.data();
    if (*begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw DataError(DataError::Kind::non_numeric, "non-numeric feature value '" + s + "'");
    }
    return value;
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::size_t ceil_fifth(std::size_t t) { return (t + 4) / 5; }

}  // namespace

Dataset parse_csv(const std::string& text, const DatasetSpec& spec) {
    const auto rows = parse_records(text);
    if (rows.empty()) throw DataError(DataError::Kind::empty_dataset, "dataset is empty");
    const auto& header = rows.front();

    std::optional<std::size_t> label_col;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (trim(header[c]) == spec.label_column) label_col = c;
    }
    if (!label_col) {
        throw DataError(DataError::Kind::missing_column, "label column '" + spec.label_column + "' not in header");
    }
    if (rows.size() < 2) throw DataError(DataError::Kind::empty_dataset, "dataset has a header but no rows");

    Dataset ds;
    ds.name = spec.path.empty() ? std::string("inline") : spec.path.stem().string();
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c != *label_col) ds.feature_names.push_back(trim(header[c]));
    }

    std::unordered_map<std::string, std::size_t> label_ids;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != header.size()) {
            throw DataError(DataError::Kind::malformed, "row " + std::to_string(r) + " has " +
                                                            std::to_string(row.size()) + " fields, header has " +
                                                            std::to_string(header.size()));
        }
        Example ex;
        ex.features.reserve(header.size() - 1);
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c == *label_col) continue;
            auto value = parse_number(row[c]);
            if (!value) {
                if (spec.missing == MissingPolicy::error) {
                    throw DataError(DataError::Kind::missing_value, "missing value in row " + std::to_string(r) +
                                                                        ", column '" + trim(header[c]) + "'");
                }
                value = 0.0;
            }
            ex.features.push_back(*value);
        }
        const std::string name = trim(row[*label_col]);
        if (name.empty()) throw DataError(DataError::Kind::missing_value, "missing label in row " + std::to_string(r));
        auto [it, inserted] = label_ids.try_emplace(name, ds.label_names.size());
        if (inserted) ds.label_names.push_back(name);
        ex.true_label = Label::from_index(it->second);
        ds.examples.push_back(std::move(ex));
    }

    ds.k = ds.label_names.size();
    if (spec.k) {
        if (*spec.k < ds.k) {
            throw DataError(DataError::Kind::malformed, "data has " + std::to_string(ds.k) +
                                                            " labels but k = " + std::to_string(*spec.k));
        }
        ds.k = *spec.k;
    }
    if (ds.k < 2) throw DataError(DataError::Kind::malformed, "need at least two labels");

    if (spec.normalize) {
        const std::size_t d = ds.feature_names.size();
        for (std::size_t f = 0; f < d; ++f) {
            double lo = ds.examples.front().features[f];
            double hi = lo;
            for (const auto& ex : ds.examples) {
                lo = std::min(lo, ex.features[f]);
                hi = std::max(hi, ex.features[f]);
            }
            const double span = hi - lo;
            for (auto& ex : ds.examples) ex.features[f] = span > 0.0 ? (ex.features[f] - lo) / span : 0.0;
        }
    }
    return ds;
}

Dataset load_csv(const DatasetSpec& spec) {
    std::ifstream in(spec.path, std::ios::binary);
    if (!in) throw DataError(DataError::Kind::missing_file, "cannot open dataset '" + spec.path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), spec);
}

std::vector<std::size_t> build_stream(const Dataset& dataset, std::size_t duplication, std::uint64_t seed, bool shuffle) {
    if (duplication < 1) throw InvalidParameter("duplication must be at least 1");
    const std::size_t n = dataset.size();
    std::vector<std::size_t> stream;
    stream.reserve(n * duplication);
    const Rng base(seed);
    std::vector<std::size_t> copy(n);
    for (std::size_t d = 0; d < duplication; ++d) {
        for (std::size_t i = 0; i < n; ++i) copy[i] = i;
        if (shuffle) {
            Rng rng = base.split(d);
            for (std::size_t i = n; i > 1; --i) std::swap(copy[i - 1], copy[rng.below(i)]);
        }
        stream.insert(stream.end(), copy.begin(), copy.end());
    }
    return stream;
}

// --- synthetic data -------------------------------------------------------

SyntheticKind parse_synthetic_kind(const std::string& name) {
    if (name == "oracle-edge" || name == "oracle_edge") return SyntheticKind::oracle_edge;
    if (name == "threshold-concept" || name == "threshold_concept" || name == "threshold") {
        return SyntheticKind::threshold_concept;
    }
    if (name == "gaussian-mixture" || name == "gaussian_mixture" || name == "mixture") {
        return SyntheticKind::gaussian_mixture;
    }
    throw InvalidParameter("unknown synthetic generator '" + name + "'");
}

std::string to_string(SyntheticKind kind) {
    switch (kind) {
        case SyntheticKind::oracle_edge: return "oracle-edge";
        case SyntheticKind::threshold_concept: return "threshold-concept";
        case SyntheticKind::gaussian_mixture: return "gaussian-mixture";
    }
    return "?";
}

Dataset synth_generate(const SyntheticSpec& spec) {
    LabelSpace space(spec.k);
    Dataset ds;
    ds.name = to_string(spec.generator);
    ds.k = spec.k;
    for (std::size_t c = 1; c <= spec.k; ++c) ds.label_names.push_back(std::to_string(c));
    ds.examples.reserve(spec.rows);
    Rng rng(spec.seed);

    switch (spec.generator) {
        case SyntheticKind::oracle_edge: {
            if (spec.n_channels == 0) throw InvalidParameter("oracle-edge needs at least one channel");
            for (std::size_t j = 0; j < spec.n_channels; ++j) ds.feature_names.push_back("wl" + std::to_string(j + 1));
            const OracleLearnerConfig oracle{spec.gamma};
            for (std::size_t t = 0; t < spec.rows; ++t) {
                const Label y = Label::from_index(rng.below(spec.k));
                Example ex{std::vector<double>(spec.n_channels), y};
                for (auto& f : ex.features) f = static_cast<double>(oracle_wl(oracle, y, spec.k, rng).value());
                ds.examples.push_back(std::move(ex));
            }
            break;
        }
        case SyntheticKind::threshold_concept: {
            if (spec.dims == 0) throw InvalidParameter("threshold concept needs dims >= 1");
            if (!(spec.noise >= 0.0 && spec.noise <= 1.0)) throw InvalidParameter("noise must lie in [0, 1]");
            for (std::size_t j = 0; j < spec.dims; ++j) ds.feature_names.push_back("x" + std::to_string(j + 1));
            for (std::size_t t = 0; t < spec.rows; ++t) {
                Example ex{std::vector<double>(spec.dims), std::nullopt};
                for (auto& f : ex.features) f = rng.uniform();
                auto y = std::min(spec.k - 1, static_cast<std::size_t>(ex.features[0] * static_cast<double>(spec.k)));
                if (spec.noise > 0.0 && rng.uniform() < spec.noise) y = (y + 1 + rng.below(spec.k - 1)) % spec.k;
                ex.true_label = Label::from_index(y);
                ds.examples.push_back(std::move(ex));
            }
            break;
        }
        case SyntheticKind::gaussian_mixture: {
            if (spec.dims == 0) throw InvalidParameter("gaussian mixture needs dims >= 1");
            for (std::size_t j = 0; j < spec.dims; ++j) ds.feature_names.push_back("x" + std::to_string(j + 1));
            for (std::size_t t = 0; t < spec.rows; ++t) {
                const std::size_t y = rng.below(spec.k);
                Example ex{std::vector<double>(spec.dims), Label::from_index(y)};
                for (auto& f : ex.features) f = rng.normal();
                ex.features[0] += (2.0 * static_cast<double>(y + 1) - static_cast<double>(spec.k) - 1.0) * spec.separation;
                ds.examples.push_back(std::move(ex));
            }
            break;
        }
    }
    return ds;
}

// --- metrics --------------------------------------------------------------

void EdgeAccumulator::add(std::size_t learner, const CostMatrix& cost, Label h, Label y_true) {
    numer_.at(learner) += cost(h.index(), y_true.index());
    denom_.at(learner) += cost(y_true.index(), y_true.index());
}

void EdgeAccumulator::add(const RoundOutcome& outcome, Label y_true) {
    for (std::size_t i = 0; i < outcome.cost_matrices.size(); ++i) {
        add(i, outcome.cost_matrices[i], outcome.weak_predictions[i], y_true);
    }
}

std::vector<std::optional<double>> EdgeAccumulator::edges() const {
    std::vector<std::optional<double>> out(numer_.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (denom_[i] != 0.0) out[i] = numer_[i] / denom_[i];
    }
    return out;
}

std::size_t window_length(std::size_t total_rounds) { return ceil_fifth(total_rounds); }

std::vector<CurvePoint> learning_curve(const std::vector<bool>& correct) {
    const std::size_t total = correct.size();
    if (total < 5) throw InvalidArgument("learning curve needs at least 5 rounds");
    const std::size_t w = window_length(total);
    std::vector<CurvePoint> curve;
    curve.reserve(total - w + 1);
    std::size_t hits = 0;
    for (std::size_t r = 0; r < total; ++r) {
        if (correct[r]) ++hits;
        if (r >= w && correct[r - w]) --hits;
        if (r + 1 >= w) curve.push_back({r + 1, static_cast<double>(hits) / static_cast<double>(w)});
    }
    return curve;
}

double total_accuracy(const std::vector<bool>& correct) {
    if (correct.empty()) return 0.0;
    return static_cast<double>(std::count(correct.begin(), correct.end(), true)) / static_cast<double>(correct.size());
}

double asymptotic_accuracy(const std::vector<bool>& correct) {
    if (correct.empty()) return 0.0;
    const std::size_t tail = ceil_fifth(correct.size());
    const auto first = correct.end() - static_cast<std::ptrdiff_t>(tail);
    return static_cast<double>(std::count(first, correct.end(), true)) / static_cast<double>(tail);
}

std::vector<bool> StreamReport::correctness() const {
    std::vector<bool> out(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) out[i] = records[i].correct;
    return out;
}

Summary summarize(const std::vector<double>& values) {
    Summary s;
    if (values.empty()) return s;
    for (double v : values) s.mean += v;
    s.mean /= static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return s;
}

// --- experiments ----------------------------------------------------------

RhoSchedule parse_rho_schedule(const std::string& name) {
    if (name == "constant") return RhoSchedule::constant;
    if (name == "bbm_theory") return RhoSchedule::bbm_theory;
    if (name == "ada_theory") return RhoSchedule::ada_theory;
    throw InvalidParameter("unknown rho schedule '" + name + "'");
}

std::string to_string(RhoSchedule s) {
    switch (s) {
        case RhoSchedule::constant: return "constant";
        case RhoSchedule::bbm_theory: return "bbm_theory";
        case RhoSchedule::ada_theory: return "ada_theory";
    }
    return "?";
}

std::uint64_t stream_seed(std::uint64_t seed) { return Rng(seed).split(1).next_u64(); }
std::uint64_t booster_seed(std::uint64_t seed) { return Rng(seed).split(2).next_u64(); }
std::uint64_t learner_seed(std::uint64_t seed) { return Rng(seed).split(3).next_u64(); }

Dataset materialize(const DataSourceConfig& source, std::uint64_t run_seed) {
    if (source.kind == DataSourceConfig::Kind::csv) return load_csv(source.csv);
    SyntheticSpec spec = source.synthetic;
    if (source.resample_per_seed) spec.seed = Rng(spec.seed).split(run_seed).next_u64();
    return synth_generate(spec);
}

double resolve_rho(const ExperimentConfig& config, std::size_t k, std::size_t horizon) {
    if (config.booster.mode == FeedbackMode::full_information) return config.booster.rho;
    double rho = config.booster.rho;
    switch (config.rho_schedule) {
        case RhoSchedule::constant: break;
        case RhoSchedule::bbm_theory: rho = theory_rho_bbm(k, config.booster.n_learners, horizon); break;
        case RhoSchedule::ada_theory:
            rho = theory_rho_ada(k, config.booster.n_learners, horizon, config.sum_sq_edges);
            break;
    }
    if (!(rho > 0.0 && rho < 1.0)) {
        throw InvalidParameter("schedule " + to_string(config.rho_schedule) + " gives rho = " + std::to_string(rho) +
                               ", outside (0, 1)");
    }
    return rho;
}

StreamReport run_stream(const Dataset& dataset, const ExperimentConfig& config, std::uint64_t seed) {
    const auto started = std::chrono::steady_clock::now();
    const std::size_t k = dataset.k;
    const LabelSpace space(k);
    const auto stream = build_stream(dataset, config.duplication, stream_seed(seed), config.shuffle);

    BoosterConfig bc = config.booster;
    bc.rho = resolve_rho(config, k, stream.size());
    bc.seed = booster_seed(seed);
    std::vector<std::unique_ptr<WeakLearner>> learners;
    learners.reserve(bc.n_learners);
    for (std::size_t i = 1; i <= bc.n_learners; ++i) {
        learners.push_back(make_weak_learner(config.learner, k, i, learner_seed(seed)));
    }
    Booster booster(bc, space, std::move(learners));

    StreamReport report;
    report.seed = seed;
    report.rho_used = bc.mode == FeedbackMode::full_information ? 0.0 : bc.rho;
    report.records.reserve(stream.size());
    EdgeAccumulator edges(bc.n_learners);
    std::vector<bool> correct;
    correct.reserve(stream.size());

    for (std::size_t index : stream) {
        const Example& ex = dataset.examples[index];
        if (!ex.true_label) throw DataError(DataError::Kind::missing_value, "stream example without a label");
        const Label y = *ex.true_label;
        if (config.learner.kind == LearnerKind::oracle) {
            for (std::size_t i = 0; i < booster.n_learners(); ++i) {
                if (auto* oracle = dynamic_cast<OracleLearner*>(&booster.learner(i))) oracle->reveal(y);
            }
        }
        RoundOutcome outcome;
        if (bc.mode == FeedbackMode::bandit) {
            HiddenLabelAdversary adversary(y);
            outcome = booster.round(ex.features, adversary);
        } else {
            RevealingAdversary adversary(y);
            outcome = booster.round(ex.features, adversary);
        }
        edges.add(outcome, y);
        if (outcome.loss_estimate.is_zero()) ++report.zero_estimate_rounds;
        correct.push_back(outcome.correct);
        if (config.keep_records) {
            report.records.push_back({y, outcome.intermediate, outcome.final_prediction, outcome.correct});
        }
    }

    report.total_accuracy = total_accuracy(correct);
    report.asymptotic_accuracy = asymptotic_accuracy(correct);
    report.window = window_length(correct.size());
    if (correct.size() >= 5) report.curve = learning_curve(correct);
    report.empirical_edges = edges.edges();
    report.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

std::size_t worker_count(std::size_t requested, std::size_t jobs) {
    std::size_t workers = requested > 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("BANDITBOOST_THREADS")) {
        std::size_t cap = 0;
        const std::string_view sv(env);
        const auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), cap);
        if (ec == std::errc() && cap > 0) workers = std::min(workers, cap);
    }
    return std::max<std::size_t>(1, std::min(workers, jobs));
}

namespace {

ExperimentReport run_experiment_impl(const std::optional<Dataset>& fixed, const ExperimentConfig& config) {
    config.booster.validate();
    if (config.seeds.empty()) throw InvalidParameter("at least one seed is required");

    ExperimentReport report;
    report.config = config;
    report.runs.resize(config.seeds.size());

    // a CSV source is read once and shared read-only across workers
    std::optional<Dataset> shared = fixed;
    if (!shared && (config.data.kind == DataSourceConfig::Kind::csv || !config.data.resample_per_seed)) {
        shared = materialize(config.data, config.seeds.front());
    }

    std::vector<std::exception_ptr> errors(config.seeds.size());
    std::vector<std::size_t> rows(config.seeds.size()), ks(config.seeds.size());
    std::vector<std::string> names(config.seeds.size());
    auto job = [&](std::size_t j) {
        try {
            const std::uint64_t seed = config.seeds[j];
            std::optional<Dataset> own;
            if (!shared) own = materialize(config.data, seed);
            const Dataset& ds = shared ? *shared : *own;
            rows[j] = ds.size();
            ks[j] = ds.k;
            names[j] = ds.name;
            report.runs[j] = run_stream(ds, config, seed);
        } catch (...) {
            errors[j] = std::current_exception();
        }
    };

    const std::size_t workers = worker_count(config.threads, config.seeds.size());
    if (workers == 1) {
        for (std::size_t j = 0; j < config.seeds.size(); ++j) job(j);
    } else {
        std::mutex mutex;
        std::size_t next = 0;
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    std::size_t j = 0;
                    {
                        std::lock_guard lock(mutex);
                        if (next >= config.seeds.size()) return;
                        j = next++;
                    }
                    job(j);
                }
            });
        }
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    report.dataset_name = names.front();
    report.dataset_rows = rows.front();
    report.k = ks.front();
    report.stream_count = rows.front() * config.duplication;
    std::vector<double> totals, asymptotics;
    for (const auto& run : report.runs) {
        totals.push_back(run.total_accuracy);
        asymptotics.push_back(run.asymptotic_accuracy);
    }
    report.total = summarize(totals);
    report.asymptotic = summarize(asymptotics);
    return report;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) { return run_experiment_impl(std::nullopt, config); }

ExperimentReport run_experiment(const Dataset& dataset, const ExperimentConfig& config) {
    return run_experiment_impl(dataset, config);
}

// --- serialization --------------------------------------------------------

nlohmann::json config_to_json(const ExperimentConfig& c) {
    using nlohmann::json;
    json data;
    if (c.data.kind == DataSourceConfig::Kind::csv) {
        data = {{"source", "csv"},
                {"path", c.data.csv.path.string()},
                {"label_column", c.data.csv.label_column},
                {"normalize", c.data.csv.normalize},
                {"missing", c.data.csv.missing == MissingPolicy::zero ? "zero" : "error"}};
        if (c.data.csv.k) data["k"] = *c.data.csv.k;
    } else {
        const auto& s = c.data.synthetic;
        data = {{"source", "synthetic"},   {"generator", to_string(s.generator)},
                {"k", s.k},                {"rows", s.rows},
                {"dims", s.dims},          {"n_channels", s.n_channels},
                {"gamma", s.gamma},        {"noise", s.noise},
                {"separation", s.separation}, {"seed", s.seed},
                {"resample_per_seed", c.data.resample_per_seed}};
    }
    const auto& b = c.booster;
    json booster = {{"algorithm", to_string(b.algorithm)},
                    {"mode", to_string(b.mode)},
                    {"n_learners", b.n_learners},
                    {"rho", b.rho},
                    {"rho_schedule", to_string(c.rho_schedule)},
                    {"gamma", b.gamma},
                    {"mc_samples", b.mc_samples},
                    {"enumeration_budget", b.enumeration_budget},
                    {"clip_bound", b.clip_bound ? json(*b.clip_bound) : json(nullptr)},
                    {"weight_scale", b.weight_scale},
                    {"estimator", to_string(b.estimator)}};
    if (c.rho_schedule == RhoSchedule::ada_theory) booster["sum_sq_edges"] = c.sum_sq_edges;
    const auto& h = c.learner.hoeffding;
    json learner = {{"kind", to_string(c.learner.kind)}};
    if (c.learner.kind == LearnerKind::hoeffding) {
        learner["grace_period"] = h.grace_period;
        learner["split_confidence"] = h.split_confidence;
        learner["tie_threshold"] = h.tie_threshold;
        learner["split_candidates"] = h.split_candidates;
        learner["max_depth"] = h.max_depth;
        learner["leaf_prediction"] = to_string(h.leaf_prediction);
    } else if (c.learner.kind == LearnerKind::naive_bayes) {
        learner["min_variance"] = c.learner.nb_min_variance;
    } else if (c.learner.kind == LearnerKind::oracle) {
        learner["gamma"] = c.learner.oracle.gamma;
    }
    return {{"data", data},
            {"booster", booster},
            {"learner", learner},
            {"duplication", c.duplication},
            {"shuffle", c.shuffle},
            {"seeds", c.seeds}};
}

nlohmann::json report_to_json(const ExperimentReport& r) {
    using nlohmann::json;
    json runs = json::array();
    for (const auto& run : r.runs) {
        json edges = json::array();
        for (const auto& e : run.empirical_edges) edges.push_back(e ? json(*e) : json(nullptr));
        json y_true = json::array(), y_hat = json::array(), y_tilde = json::array(), correct = json::array();
        for (const auto& rec : run.records) {
            y_true.push_back(rec.y_true.value());
            y_hat.push_back(rec.y_hat.value());
            y_tilde.push_back(rec.y_tilde.value());
            correct.push_back(rec.correct ? 1 : 0);
        }
        runs.push_back({{"seed", run.seed},
                        {"rounds", run.records.size()},
                        {"rho", run.rho_used},
                        {"total_accuracy", run.total_accuracy},
                        {"asymptotic_accuracy", run.asymptotic_accuracy},
                        {"window", run.window},
                        {"zero_estimate_rounds", run.zero_estimate_rounds},
                        {"empirical_edges", edges},
                        {"records", {{"y_true", y_true}, {"y_hat", y_hat}, {"y_tilde", y_tilde}, {"correct", correct}}}});
    }
    return {{"schema", "banditboost.report"},
            {"schema_version", kReportSchemaVersion},
            {"config", config_to_json(r.config)},
            {"dataset", {{"name", r.dataset_name}, {"rows", r.dataset_rows}, {"k", r.k}, {"stream_count", r.stream_count}}},
            {"aggregate",
             {{"seeds", r.runs.size()},
              {"total_accuracy", {{"mean", r.total.mean}, {"std", r.total.std}}},
              {"asymptotic_accuracy", {{"mean", r.asymptotic.mean}, {"std", r.asymptotic.std}}}}},
            {"runs", runs}};
}

std::vector<std::pair<std::uint64_t, std::vector<CurvePoint>>> curves_from_json(const nlohmann::json& report) {
    if (report.value("schema", "") != "banditboost.report") {
        throw DataError(DataError::Kind::malformed, "not a banditboost report");
    }
    const int version = report.value("schema_version", 0);
    if (version != kReportSchemaVersion) {
        throw DataError(DataError::Kind::malformed, "unsupported report schema version " + std::to_string(version));
    }
    std::vector<std::pair<std::uint64_t, std::vector<CurvePoint>>> out;
    for (const auto& run : report.at("runs")) {
        const auto& flags = run.at("records").at("correct");
        std::vector<bool> correct;
        correct.reserve(flags.size());
        for (const auto& f : flags) correct.push_back(f.get<int>() != 0);
        if (correct.size() < 5) {
            throw DataError(DataError::Kind::malformed, "run without per-round records cannot produce a curve");
        }
        out.emplace_back(run.at("seed").get<std::uint64_t>(), learning_curve(correct));
    }
    return out;
}

std::string curves_to_csv(const std::vector<std::pair<std::uint64_t, std::vector<CurvePoint>>>& curves) {
    std::string out = "round,window_accuracy,seed\n";
    for (const auto& [seed, points] : curves) {
        for (const auto& p : points) {
            out += std::to_string(p.round);
            out += ',';
            out += format_double(p.window_accuracy);
            out += ',';
            out += std::to_string(seed);
            out += '\n';
        }
    }
    return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write '" + tmp.string() + "'");
        out << contents;
        out.flush();
        if (!out) throw Error("failed writing '" + tmp.string() + "'");
    }
    fs::rename(tmp, path);
}

}  // namespace banditboost
