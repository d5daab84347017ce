#include "banditboost/weak_learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "banditboost/potentials.hpp"

namespace banditboost {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double entropy(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (total <= 0.0) return 0.0;
    double h = 0.0;
    for (double w : weights) {
        if (w > 0.0) {
            const double p = w / total;
            h -= p * std::log2(p);
        }
    }
    return h;
}

double sum(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

}  // namespace

WeakLearnerUpdate reduce_cost_vector(std::span<const double> features,
                                     const EstimatedCostVector& chat,
                                     std::optional<Label> known_true_label,
                                     Rng& rng) {
    const auto& c = chat.values;
    if (c.empty()) throw InvalidArgument("empty cost vector");
    const double lowest = *std::min_element(c.begin(), c.end());
    const double tol = 1e-12 * std::max(1.0, std::abs(lowest));

    std::vector<std::size_t> minimizers;
    for (std::size_t j = 0; j < c.size(); ++j) {
        if (c[j] - lowest <= tol) minimizers.push_back(j);
    }

    std::size_t target = minimizers.front();
    if (minimizers.size() > 1) {
        const bool true_minimizes =
            known_true_label &&
            std::find(minimizers.begin(), minimizers.end(), known_true_label->index()) != minimizers.end();
        target = true_minimizes ? known_true_label->index() : minimizers[rng.below(minimizers.size())];
    }

    double weight = 0.0;
    for (double v : c) weight += v - c[target];
    return {features, Label::from_index(target), std::max(weight, 0.0)};
}

// --- Gaussian summaries ---------------------------------------------------

void GaussianEstimator::add(double x, double w) noexcept {
    if (!(w > 0.0)) return;
    if (weight_ == 0.0) {
        min_ = max_ = x;
    } else {
        min_ = std::min(min_, x);
        max_ = std::max(max_, x);
    }
    const double total = weight_ + w;
    const double delta = x - mean_;
    mean_ += delta * w / total;
    m2_ += w * delta * (x - mean_);
    weight_ = total;
}

double GaussianEstimator::log_density(double x, double min_variance) const noexcept {
    const double var = std::max(variance(), min_variance);
    const double d = x - mean_;
    return -0.5 * std::log(2.0 * M_PI * var) - d * d / (2.0 * var);
}

double GaussianEstimator::weight_below(double x) const noexcept {
    if (weight_ <= 0.0 || x < min_) return 0.0;
    if (x >= max_) return weight_;
    const double var = variance();
    if (var <= 0.0) return x >= mean_ ? weight_ : 0.0;
    return weight_ * 0.5 * std::erfc(-(x - mean_) / std::sqrt(2.0 * var));
}

void ClassConditionalStats::add(std::span<const double> features, std::size_t label_index, double w) {
    if (per_feature_.empty()) per_feature_.assign(features.size(), std::vector<GaussianEstimator>(k_));
    if (features.size() != per_feature_.size()) throw InvalidArgument("feature dimension changed between updates");
    for (std::size_t f = 0; f < features.size(); ++f) per_feature_[f][label_index].add(features[f], w);
}

double ClassConditionalStats::log_likelihood(std::span<const double> features,
                                             std::size_t label_index,
                                             double min_variance) const {
    double acc = 0.0;
    const std::size_t n = std::min(features.size(), per_feature_.size());
    for (std::size_t f = 0; f < n; ++f) {
        const auto& g = per_feature_[f][label_index];
        if (g.weight() > 0.0) acc += g.log_density(features[f], min_variance);
    }
    return acc;
}

std::size_t naive_bayes_argmax(std::span<const double> class_weights,
                               const ClassConditionalStats& stats,
                               std::span<const double> features,
                               double min_variance) {
    const double total = sum(class_weights);
    if (total <= 0.0) return 0;
    std::size_t best = 0;
    double best_score = kNegInf;
    for (std::size_t c = 0; c < class_weights.size(); ++c) {
        if (class_weights[c] <= 0.0) continue;
        const double score = std::log(class_weights[c] / total) + stats.log_likelihood(features, c, min_variance);
        if (score > best_score) {
            best_score = score;
            best = c;
        }
    }
    return best;
}

// --- Naive Bayes ----------------------------------------------------------

NaiveBayesLearner::NaiveBayesLearner(std::size_t k, double min_variance)
    : k_(k), min_variance_(min_variance), class_weights_(k, 0.0), stats_(k) {
    LabelSpace space(k);
    if (!(min_variance > 0.0)) throw InvalidParameter("min_variance must be positive");
}

Label NaiveBayesLearner::predict(std::span<const double> features) const {
    return Label::from_index(naive_bayes_argmax(class_weights_, stats_, features, min_variance_));
}

void NaiveBayesLearner::update(const WeakLearnerUpdate& update) {
    if (update.importance_weight < 0.0) throw InvalidArgument("importance weight must be nonnegative");
    if (update.importance_weight == 0.0) return;
    LabelSpace(k_).require(update.target_label, "target");
    class_weights_[update.target_label.index()] += update.importance_weight;
    stats_.add(update.features, update.target_label.index(), update.importance_weight);
}

std::unique_ptr<WeakLearner> NaiveBayesLearner::clone() const {
    return std::make_unique<NaiveBayesLearner>(*this);
}

double NaiveBayesLearner::total_weight() const noexcept { return sum(class_weights_); }

// --- Hoeffding tree -------------------------------------------------------

HoeffdingTreeLearner::HoeffdingTreeLearner(std::size_t k, HoeffdingConfig config) : k_(k), config_(config) {
    LabelSpace space(k);
    if (!(config_.split_confidence > 0.0 && config_.split_confidence < 1.0)) {
        throw InvalidParameter("split_confidence must lie in (0, 1)");
    }
    if (!(config_.grace_period > 0.0)) throw InvalidParameter("grace_period must be positive");
    if (config_.split_candidates == 0) throw InvalidParameter("split_candidates must be positive");
    nodes_.push_back(Node{.class_weights = std::vector<double>(k, 0.0), .stats = ClassConditionalStats(k)});
}

double HoeffdingTreeLearner::hoeffding_bound(double range, double delta, double n) {
    return std::sqrt(range * range * std::log(1.0 / delta) / (2.0 * n));
}

std::size_t HoeffdingTreeLearner::find_leaf(std::span<const double> features) const {
    std::size_t i = 0;
    while (!nodes_[i].leaf) {
        const Node& n = nodes_[i];
        i = features[n.feature] <= n.threshold ? n.left : n.right;
    }
    return i;
}

std::size_t HoeffdingTreeLearner::leaf_predict(const Node& node, std::span<const double> features) const {
    const std::size_t majority = argmax_lowest(node.class_weights);
    switch (config_.leaf_prediction) {
        case LeafPrediction::majority:
            return majority;
        case LeafPrediction::naive_bayes:
            return naive_bayes_argmax(node.class_weights, node.stats, features, config_.min_variance);
        case LeafPrediction::nb_adaptive:
            if (node.nb_correct > node.majority_correct) {
                return naive_bayes_argmax(node.class_weights, node.stats, features, config_.min_variance);
            }
            return majority;
    }
    return majority;
}

Label HoeffdingTreeLearner::predict(std::span<const double> features) const {
    return Label::from_index(leaf_predict(nodes_[find_leaf(features)], features));
}

void HoeffdingTreeLearner::update(const WeakLearnerUpdate& update) {
    if (update.importance_weight < 0.0) throw InvalidArgument("importance weight must be nonnegative");
    if (update.importance_weight == 0.0) return;
    LabelSpace(k_).require(update.target_label, "target");
    const std::size_t y = update.target_label.index();
    const double w = update.importance_weight;

    const std::size_t leaf = find_leaf(update.features);
    Node& node = nodes_[leaf];
    if (config_.leaf_prediction == LeafPrediction::nb_adaptive) {
        if (argmax_lowest(node.class_weights) == y) node.majority_correct += w;
        if (naive_bayes_argmax(node.class_weights, node.stats, update.features, config_.min_variance) == y) {
            node.nb_correct += w;
        }
    }
    node.class_weights[y] += w;
    node.stats.add(update.features, y, w);

    const double seen = sum(node.class_weights);
    if (node.depth < config_.max_depth && seen - node.weight_at_last_eval >= config_.grace_period) {
        node.weight_at_last_eval = seen;
        attempt_split(leaf);
    }
}

void HoeffdingTreeLearner::attempt_split(std::size_t node_index) {
    const Node& node = nodes_[node_index];
    const auto nonempty = std::count_if(node.class_weights.begin(), node.class_weights.end(),
                                        [](double w) { return w > 0.0; });
    if (nonempty < 2 || !node.stats.has_features()) return;

    const double total = sum(node.class_weights);
    const double parent_entropy = entropy(node.class_weights);

    struct Candidate {
        double merit = kNegInf;
        std::size_t feature = 0;
        double threshold = 0.0;
        std::vector<double> left;
        std::vector<double> right;
    };
    std::vector<Candidate> per_feature;

    std::vector<double> left(k_), right(k_);
    for (std::size_t f = 0; f < node.stats.n_features(); ++f) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t c = 0; c < k_; ++c) {
            const auto& g = node.stats.at(f, c);
            if (g.weight() <= 0.0) continue;
            lo = std::min(lo, g.min());
            hi = std::max(hi, g.max());
        }
        if (!(hi > lo)) continue;

        Candidate best;
        for (std::size_t i = 1; i <= config_.split_candidates; ++i) {
            const double t = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(config_.split_candidates + 1);
            for (std::size_t c = 0; c < k_; ++c) {
                const auto& g = node.stats.at(f, c);
                const double below = std::min(g.weight_below(t), node.class_weights[c]);
                left[c] = below;
                right[c] = node.class_weights[c] - below;
            }
            const double wl = sum(left);
            const double wr = sum(right);
            if (wl < config_.min_branch_fraction * total || wr < config_.min_branch_fraction * total) continue;
            const double merit = parent_entropy - (wl / total) * entropy(left) - (wr / total) * entropy(right);
            if (merit > best.merit) {
                best = Candidate{merit, f, t, left, right};
            }
        }
        if (best.merit > kNegInf) per_feature.push_back(std::move(best));
    }
    if (per_feature.empty()) return;

    std::sort(per_feature.begin(), per_feature.end(),
              [](const Candidate& a, const Candidate& b) { return a.merit > b.merit; });
    const Candidate& best = per_feature[0];
    // the no-split option has merit 0
    const double second = per_feature.size() > 1 ? std::max(per_feature[1].merit, 0.0) : 0.0;
    if (best.merit <= 0.0) return;

    const double range = std::log2(static_cast<double>(k_));
    const double eps = hoeffding_bound(range, config_.split_confidence, total);
    if (!(best.merit - second > eps || eps < config_.tie_threshold)) return;

    const std::size_t depth = node.depth;
    Node left_child{.depth = depth + 1, .class_weights = best.left, .stats = ClassConditionalStats(k_)};
    Node right_child{.depth = depth + 1, .class_weights = best.right, .stats = ClassConditionalStats(k_)};
    left_child.weight_at_last_eval = sum(left_child.class_weights);
    right_child.weight_at_last_eval = sum(right_child.class_weights);

    const std::size_t feature = best.feature;
    const double threshold = best.threshold;
    nodes_.push_back(std::move(left_child));
    nodes_.push_back(std::move(right_child));

    Node& parent = nodes_[node_index];
    parent.leaf = false;
    parent.feature = feature;
    parent.threshold = threshold;
    parent.left = nodes_.size() - 2;
    parent.right = nodes_.size() - 1;
    parent.stats = ClassConditionalStats(k_);
}

std::size_t HoeffdingTreeLearner::n_leaves() const noexcept {
    return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.leaf; }));
}

std::size_t HoeffdingTreeLearner::depth() const noexcept {
    std::size_t d = 0;
    for (const auto& n : nodes_) d = std::max(d, n.depth);
    return d;
}

std::unique_ptr<WeakLearner> HoeffdingTreeLearner::clone() const {
    return std::make_unique<HoeffdingTreeLearner>(*this);
}

// --- Oracle and channel learners -------------------------------------------

Label oracle_wl(const OracleLearnerConfig& config, Label true_label, std::size_t k, Rng& rng) {
    const auto u = smoothed_distribution(true_label, config.gamma, k);
    return Label::from_index(draw_categorical(u.probs, rng));
}

OracleLearner::OracleLearner(std::size_t k, OracleLearnerConfig config, std::uint64_t seed)
    : k_(k), config_(config), rng_(seed) {
    LabelSpace space(k);
    if (!(config.gamma >= 0.0 && config.gamma <= 1.0)) throw InvalidParameter("oracle gamma must lie in [0, 1]");
}

void OracleLearner::reveal(Label true_label) { current_ = oracle_wl(config_, true_label, k_, rng_); }

Label OracleLearner::predict(std::span<const double>) const { return current_; }

std::unique_ptr<WeakLearner> OracleLearner::clone() const { return std::make_unique<OracleLearner>(*this); }

Label ChannelLearner::predict(std::span<const double> features) const {
    if (column_ >= features.size()) throw InvalidArgument("channel column outside feature vector");
    const double v = std::round(features[column_]);
    const auto label = static_cast<std::size_t>(std::clamp(v, 1.0, static_cast<double>(k_)));
    return Label(label);
}

std::unique_ptr<WeakLearner> ChannelLearner::clone() const { return std::make_unique<ChannelLearner>(*this); }

// --- factory --------------------------------------------------------------

LearnerKind parse_learner_kind(const std::string& name) {
    if (name == "hoeffding" || name == "hoeffding_tree") return LearnerKind::hoeffding;
    if (name == "naive_bayes" || name == "nb") return LearnerKind::naive_bayes;
    if (name == "channel") return LearnerKind::channel;
    if (name == "oracle") return LearnerKind::oracle;
    throw InvalidParameter("unknown weak learner '" + name + "'");
}

std::string to_string(LearnerKind kind) {
    switch (kind) {
        case LearnerKind::hoeffding: return "hoeffding";
        case LearnerKind::naive_bayes: return "naive_bayes";
        case LearnerKind::channel: return "channel";
        case LearnerKind::oracle: return "oracle";
    }
    return "?";
}

LeafPrediction parse_leaf_prediction(const std::string& name) {
    if (name == "majority") return LeafPrediction::majority;
    if (name == "naive_bayes" || name == "nb") return LeafPrediction::naive_bayes;
    if (name == "nb_adaptive") return LeafPrediction::nb_adaptive;
    throw InvalidParameter("unknown leaf prediction '" + name + "'");
}

std::string to_string(LeafPrediction mode) {
    switch (mode) {
        case LeafPrediction::majority: return "majority";
        case LeafPrediction::naive_bayes: return "naive_bayes";
        case LeafPrediction::nb_adaptive: return "nb_adaptive";
    }
    return "?";
}

std::unique_ptr<WeakLearner> make_weak_learner(const LearnerConfig& config,
                                               std::size_t k,
                                               std::size_t index,
                                               std::uint64_t seed) {
    switch (config.kind) {
        case LearnerKind::hoeffding:
            return std::make_unique<HoeffdingTreeLearner>(k, config.hoeffding);
        case LearnerKind::naive_bayes:
            return std::make_unique<NaiveBayesLearner>(k, config.nb_min_variance);
        case LearnerKind::channel:
            return std::make_unique<ChannelLearner>(k, index - 1);
        case LearnerKind::oracle:
            return std::make_unique<OracleLearner>(k, config.oracle, Rng(seed).split(index).key());
    }
    throw InvalidParameter("unknown weak learner kind");
}

}  // namespace banditboost
