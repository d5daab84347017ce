#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "banditboost/boosters.hpp"
#include "banditboost/core_estimation.hpp"
#include "banditboost/weak_learners.hpp"

namespace banditboost {

inline constexpr int kReportSchemaVersion = 1;

struct Dataset {
    std::string name;
    std::vector<Example> examples;
    std::size_t k = 0;
    std::vector<std::string> label_names;  // label_names[i] is label i + 1
    std::vector<std::string> feature_names;

    [[nodiscard]] std::size_t size() const noexcept { return examples.size(); }
};

enum class MissingPolicy { error, zero };

struct DatasetSpec {
    std::filesystem::path path;
    std::string label_column = "label";
    std::optional<std::size_t> k;
    bool normalize = true;
    MissingPolicy missing = MissingPolicy::error;
};

/// RFC-4180 CSV with a header row. Labels are mapped to 1..k in order of
/// first appearance; features are min-max scaled per column when
/// `normalize` is set.
Dataset load_csv(const DatasetSpec& spec);

/// Parses CSV text; exposed for tests and the python bindings.
Dataset parse_csv(const std::string& text, const DatasetSpec& spec);

/// `duplication` independently shuffled full copies of the dataset, as
/// indices into dataset.examples. With shuffle off the copies keep file
/// order.
std::vector<std::size_t> build_stream(const Dataset& dataset,
                                      std::size_t duplication,
                                      std::uint64_t seed,
                                      bool shuffle = true);

enum class SyntheticKind { oracle_edge, threshold_concept, gaussian_mixture };

SyntheticKind parse_synthetic_kind(const std::string& name);
std::string to_string(SyntheticKind kind);

struct SyntheticSpec {
    SyntheticKind generator = SyntheticKind::oracle_edge;
    std::size_t k = 3;
    std::size_t rows = 1000;
    std::size_t dims = 1;        // threshold and mixture generators
    std::size_t n_channels = 10; // oracle-edge: one column per simulated learner
    double gamma = 0.3;          // oracle-edge edge
    double noise = 0.0;          // threshold: label flip probability
    double separation = 1.0;     // mixture: spacing of class means
    std::uint64_t seed = 0;
};

/// Oracle-edge rows hold one simulated edge-gamma prediction per column.
/// Threshold rows are uniform on [0,1]^dims labeled by which of k equal
/// intervals feature 0 falls in. Mixture class c has mean
/// (2c - k - 1) * separation on feature 0 and unit variance everywhere.
Dataset synth_generate(const SyntheticSpec& spec);

/// Adversary that keeps the label and answers only correctness.
class HiddenLabelAdversary final : public BanditChannel {
public:
    explicit HiddenLabelAdversary(Label y) : y_(y) {}
    bool is_correct(Label y_tilde) override { return y_tilde == y_; }

private:
    Label y_;
};

class RevealingAdversary final : public FullInformationChannel {
public:
    explicit RevealingAdversary(Label y) : y_(y) {}
    Label true_label() override { return y_; }

private:
    Label y_;
};

struct RoundRecord {
    Label y_true;
    Label y_hat;
    Label y_tilde;
    bool correct = false;
};

/// Ratio of accumulated true costs at the learner's prediction and at the
/// true label. Undefined (nullopt) when the denominator is zero.
class EdgeAccumulator {
public:
    explicit EdgeAccumulator(std::size_t n_learners) : numer_(n_learners, 0.0), denom_(n_learners, 0.0) {}

    void add(const RoundOutcome& outcome, Label y_true);
    void add(std::size_t learner, const CostMatrix& cost, Label h, Label y_true);
    [[nodiscard]] std::vector<std::optional<double>> edges() const;

private:
    std::vector<double> numer_;
    std::vector<double> denom_;
};

struct CurvePoint {
    std::size_t round = 0;
    double window_accuracy = 0.0;
};

/// Window length used by learning curves: ceil(0.2 T).
std::size_t window_length(std::size_t total_rounds);

/// Moving-window accuracy over the latest ceil(0.2 T) rounds, defined from
/// round ceil(0.2 T) onward. Needs T >= 5.
std::vector<CurvePoint> learning_curve(const std::vector<bool>& correct);

/// Accuracy over the final ceil(0.2 T) rounds.
double asymptotic_accuracy(const std::vector<bool>& correct);
double total_accuracy(const std::vector<bool>& correct);

struct StreamReport {
    std::uint64_t seed = 0;
    std::vector<RoundRecord> records;
    double total_accuracy = 0.0;
    double asymptotic_accuracy = 0.0;
    std::size_t window = 0;
    std::vector<CurvePoint> curve;
    std::vector<std::optional<double>> empirical_edges;
    std::size_t zero_estimate_rounds = 0;
    double rho_used = 0.0;
    double wall_time_seconds = 0.0;  // excluded from the JSON report

    [[nodiscard]] std::vector<bool> correctness() const;
};

struct Summary {
    double mean = 0.0;
    double std = 0.0;
};

Summary summarize(const std::vector<double>& values);

enum class RhoSchedule { constant, bbm_theory, ada_theory };

RhoSchedule parse_rho_schedule(const std::string& name);
std::string to_string(RhoSchedule s);

struct DataSourceConfig {
    enum class Kind { csv, synthetic } kind = Kind::csv;
    DatasetSpec csv;
    SyntheticSpec synthetic;
    bool resample_per_seed = true;  // synthetic only
};

struct ExperimentConfig {
    DataSourceConfig data;
    BoosterConfig booster;
    LearnerConfig learner;
    std::vector<std::uint64_t> seeds{0};
    std::size_t duplication = 1;
    bool shuffle = true;
    RhoSchedule rho_schedule = RhoSchedule::constant;
    double sum_sq_edges = 0.0;
    std::size_t threads = 0;  // 0: hardware concurrency, capped by BANDITBOOST_THREADS
    bool keep_records = true;
};

/// Dataset for one seed: the loaded CSV, or a synthetic draw (fresh per
/// seed when resample_per_seed is set).
Dataset materialize(const DataSourceConfig& source, std::uint64_t run_seed);

/// Seed-derived sub-seeds shared by every algorithm run on the same seed.
std::uint64_t stream_seed(std::uint64_t seed);
std::uint64_t booster_seed(std::uint64_t seed);
std::uint64_t learner_seed(std::uint64_t seed);

/// Exploration rate after applying the schedule for a stream of T rounds.
double resolve_rho(const ExperimentConfig& config, std::size_t k, std::size_t horizon);

/// One online pass over the seed's stream.
StreamReport run_stream(const Dataset& dataset, const ExperimentConfig& config, std::uint64_t seed);

struct ExperimentReport {
    ExperimentConfig config;
    std::string dataset_name;
    std::size_t dataset_rows = 0;
    std::size_t k = 0;
    std::size_t stream_count = 0;
    std::vector<StreamReport> runs;
    Summary total;
    Summary asymptotic;
};

/// One stream per seed, fanned out over worker threads.
ExperimentReport run_experiment(const ExperimentConfig& config);
ExperimentReport run_experiment(const Dataset& dataset, const ExperimentConfig& config);

/// Worker count after applying BANDITBOOST_THREADS.
std::size_t worker_count(std::size_t requested, std::size_t jobs);

nlohmann::json config_to_json(const ExperimentConfig& config);
nlohmann::json report_to_json(const ExperimentReport& report);

/// Curves from a saved JSON report: (seed, points) per run.
std::vector<std::pair<std::uint64_t, std::vector<CurvePoint>>> curves_from_json(const nlohmann::json& report);

/// CSV with header round,window_accuracy,seed.
std::string curves_to_csv(const std::vector<std::pair<std::uint64_t, std::vector<CurvePoint>>>& curves);

/// Write to a sibling temp file, then rename over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace banditboost
