#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "banditboost/core_estimation.hpp"
#include "banditboost/rng.hpp"

namespace banditboost {

struct WeakLearnerUpdate {
    std::span<const double> features;
    Label target_label;
    double importance_weight = 0.0;
};

/// Turns a cost vector into (argmin label, sum of gaps above the minimum).
/// Tied minima go to `known_true_label` when it is one of them (correct
/// rounds), otherwise to a uniformly drawn minimizer.
WeakLearnerUpdate reduce_cost_vector(std::span<const double> features,
                                     const EstimatedCostVector& chat,
                                     std::optional<Label> known_true_label,
                                     Rng& rng);

/// Online multiclass learner trained from importance-weighted labels.
/// predict() never mutates state; update() with zero weight is a no-op.
class WeakLearner {
public:
    virtual ~WeakLearner() = default;

    [[nodiscard]] virtual Label predict(std::span<const double> features) const = 0;
    virtual void update(const WeakLearnerUpdate& update) = 0;
    [[nodiscard]] virtual std::unique_ptr<WeakLearner> clone() const = 0;
    [[nodiscard]] virtual std::string name() const = 0;
};

/// Weighted incremental mean/variance (West 1979).
class GaussianEstimator {
public:
    void add(double x, double w) noexcept;

    [[nodiscard]] double weight() const noexcept { return weight_; }
    [[nodiscard]] double mean() const noexcept { return mean_; }
    [[nodiscard]] double variance() const noexcept { return weight_ > 0.0 ? m2_ / weight_ : 0.0; }
    [[nodiscard]] double min() const noexcept { return min_; }
    [[nodiscard]] double max() const noexcept { return max_; }

    [[nodiscard]] double log_density(double x, double min_variance) const noexcept;
    /// Estimated weight of observations <= x.
    [[nodiscard]] double weight_below(double x) const noexcept;

private:
    double weight_ = 0.0;
    double mean_ = 0.0;
    double m2_ = 0.0;
    double min_ = 0.0;
    double max_ = 0.0;
};

/// Per-class Gaussian summaries of every feature.
class ClassConditionalStats {
public:
    explicit ClassConditionalStats(std::size_t k) : k_(k) {}

    void add(std::span<const double> features, std::size_t label_index, double w);
    [[nodiscard]] bool has_features() const noexcept { return !per_feature_.empty(); }
    [[nodiscard]] std::size_t n_features() const noexcept { return per_feature_.size(); }
    [[nodiscard]] const GaussianEstimator& at(std::size_t feature, std::size_t label_index) const {
        return per_feature_[feature][label_index];
    }

    /// log P(x | class) summed over features with observations for that class.
    [[nodiscard]] double log_likelihood(std::span<const double> features,
                                        std::size_t label_index,
                                        double min_variance) const;

private:
    std::size_t k_;
    std::vector<std::vector<GaussianEstimator>> per_feature_;
};

/// Naive-Bayes argmax over class weights and Gaussian likelihoods; classes
/// with no weight are never chosen unless every class is empty.
std::size_t naive_bayes_argmax(std::span<const double> class_weights,
                               const ClassConditionalStats& stats,
                               std::span<const double> features,
                               double min_variance);

class NaiveBayesLearner final : public WeakLearner {
public:
    explicit NaiveBayesLearner(std::size_t k, double min_variance = 1e-6);

    [[nodiscard]] Label predict(std::span<const double> features) const override;
    void update(const WeakLearnerUpdate& update) override;
    [[nodiscard]] std::unique_ptr<WeakLearner> clone() const override;
    [[nodiscard]] std::string name() const override { return "naive_bayes"; }

    [[nodiscard]] double total_weight() const noexcept;

private:
    std::size_t k_;
    double min_variance_;
    std::vector<double> class_weights_;
    ClassConditionalStats stats_;
};

enum class LeafPrediction { majority, naive_bayes, nb_adaptive };

struct HoeffdingConfig {
    double grace_period = 200.0;
    double split_confidence = 1e-7;
    double tie_threshold = 0.05;
    std::size_t split_candidates = 10;
    std::size_t max_depth = 20;
    double min_branch_fraction = 0.01;
    double min_variance = 1e-6;
    LeafPrediction leaf_prediction = LeafPrediction::nb_adaptive;
};

/// VFDT over numeric features. Leaves keep per-class Gaussian summaries;
/// candidate thresholds are scored by information gain and a leaf splits
/// when the Hoeffding bound separates the best two candidates (or falls
/// under the tie threshold).
class HoeffdingTreeLearner final : public WeakLearner {
public:
    HoeffdingTreeLearner(std::size_t k, HoeffdingConfig config = {});

    [[nodiscard]] Label predict(std::span<const double> features) const override;
    void update(const WeakLearnerUpdate& update) override;
    [[nodiscard]] std::unique_ptr<WeakLearner> clone() const override;
    [[nodiscard]] std::string name() const override { return "hoeffding_tree"; }

    [[nodiscard]] std::size_t n_nodes() const noexcept { return nodes_.size(); }
    [[nodiscard]] std::size_t n_leaves() const noexcept;
    [[nodiscard]] std::size_t depth() const noexcept;

    /// Hoeffding bound for range R, confidence delta and weight n.
    static double hoeffding_bound(double range, double delta, double n);

private:
    struct Node {
        bool leaf = true;
        std::size_t depth = 0;
        std::size_t feature = 0;
        double threshold = 0.0;
        std::size_t left = 0;
        std::size_t right = 0;
        std::vector<double> class_weights;
        ClassConditionalStats stats;
        double weight_at_last_eval = 0.0;
        double majority_correct = 0.0;
        double nb_correct = 0.0;
    };

    [[nodiscard]] std::size_t find_leaf(std::span<const double> features) const;
    [[nodiscard]] std::size_t leaf_predict(const Node& node, std::span<const double> features) const;
    void attempt_split(std::size_t node_index);

    std::size_t k_;
    HoeffdingConfig config_;
    std::vector<Node> nodes_;
};

struct OracleLearnerConfig {
    double gamma = 0.0;
};

/// Draw from the gamma-smoothed distribution around the true label.
Label oracle_wl(const OracleLearnerConfig& config, Label true_label, std::size_t k, Rng& rng);

/// Test learner with a known edge. The harness reveals the true label before
/// each prediction; the draw is made at reveal time so predict() stays const.
class OracleLearner final : public WeakLearner {
public:
    OracleLearner(std::size_t k, OracleLearnerConfig config, std::uint64_t seed);

    void reveal(Label true_label);

    [[nodiscard]] Label predict(std::span<const double> features) const override;
    void update(const WeakLearnerUpdate&) override {}
    [[nodiscard]] std::unique_ptr<WeakLearner> clone() const override;
    [[nodiscard]] std::string name() const override { return "oracle"; }

private:
    std::size_t k_;
    OracleLearnerConfig config_;
    Rng rng_;
    Label current_;
};

/// Predicts the label stored in one feature column. Used with oracle-edge
/// synthetic streams, whose columns are precomputed edge-gamma predictions.
class ChannelLearner final : public WeakLearner {
public:
    ChannelLearner(std::size_t k, std::size_t column) : k_(k), column_(column) {}

    [[nodiscard]] Label predict(std::span<const double> features) const override;
    void update(const WeakLearnerUpdate&) override {}
    [[nodiscard]] std::unique_ptr<WeakLearner> clone() const override;
    [[nodiscard]] std::string name() const override { return "channel"; }

private:
    std::size_t k_;
    std::size_t column_;
};

enum class LearnerKind { hoeffding, naive_bayes, channel, oracle };

struct LearnerConfig {
    LearnerKind kind = LearnerKind::hoeffding;
    HoeffdingConfig hoeffding{};
    double nb_min_variance = 1e-6;
    OracleLearnerConfig oracle{};
};

LearnerKind parse_learner_kind(const std::string& name);
std::string to_string(LearnerKind kind);
LeafPrediction parse_leaf_prediction(const std::string& name);
std::string to_string(LeafPrediction mode);

/// Learner `index` (1-based) of an ensemble. Channel learners read column
/// index - 1.
std::unique_ptr<WeakLearner> make_weak_learner(const LearnerConfig& config,
                                               std::size_t k,
                                               std::size_t index,
                                               std::uint64_t seed);

}  // namespace banditboost
