#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "banditboost/core_estimation.hpp"
#include "banditboost/potentials.hpp"
#include "banditboost/rng.hpp"
#include "banditboost/weak_learners.hpp"

namespace banditboost {

enum class Algorithm { bbm, ada };
enum class FeedbackMode { bandit, full_information };
enum class EstimatorKind { unbiased, simple };

Algorithm parse_algorithm(const std::string& name);
FeedbackMode parse_mode(const std::string& name);
EstimatorKind parse_estimator(const std::string& name);
std::string to_string(Algorithm a);
std::string to_string(FeedbackMode m);
std::string to_string(EstimatorKind e);

struct BoosterConfig {
    Algorithm algorithm = Algorithm::ada;
    FeedbackMode mode = FeedbackMode::bandit;
    std::size_t n_learners = 10;
    double rho = 0.1;
    double gamma = 0.1;  // BBM only
    std::size_t mc_samples = kDefaultMcSamples;
    std::uint64_t enumeration_budget = kDefaultEnumerationBudget;
    std::optional<double> clip_bound = 100.0;
    double weight_scale = 1.0;
    EstimatorKind estimator = EstimatorKind::unbiased;
    std::uint64_t seed = 0;

    /// Throws InvalidParameter on out-of-range values.
    void validate() const;
};

/// Exploration rate k^{7/4} N^{1/4} / sqrt(T).
double theory_rho_bbm(std::size_t k, std::size_t n_learners, std::size_t horizon);
/// Exploration rate k N^{2/3} / (T * sum of squared edges)^{1/3}.
double theory_rho_ada(std::size_t k, std::size_t n_learners, std::size_t horizon, double sum_sq_edges);

struct BoosterState {
    std::vector<double> alphas;
    std::vector<double> hedge_weights;
    std::size_t round = 0;
    double rho = 0.0;
    std::size_t n_learners = 0;
    std::size_t k = 0;
    FeedbackMode mode = FeedbackMode::bandit;
    Algorithm algorithm = Algorithm::ada;
};

struct RoundOutcome {
    std::vector<Label> weak_predictions;
    std::vector<std::vector<double>> expert_votes;
    std::vector<Label> expert_predictions;
    std::size_t chosen_expert = 0;  // 1-based
    Label intermediate;
    Label final_prediction;
    bool correct = false;
    LossEstimate loss_estimate;
    std::vector<CostMatrix> cost_matrices;
    std::vector<Label> update_targets;
    std::vector<double> update_weights;
};

/// s^j = sum_{i <= j} alpha_i e_{h_i}; returns the N prefix vote vectors.
std::vector<std::vector<double>> expert_votes(std::span<const double> alphas,
                                              std::span<const Label> predictions,
                                              std::size_t k);

std::vector<Label> expert_predictions(const std::vector<std::vector<double>>& votes);

inline std::size_t choose_expert_bbm(const BoosterState& state) { return state.n_learners; }

/// 1-based expert drawn with probability proportional to the Hedge weights.
std::size_t choose_expert_hedge(std::span<const double> hedge_weights, Rng& rng);

/// v_i <- v_i exp(-lhat[prediction of expert i]), rescaled so max v = 1.
std::vector<double> hedge_update(std::span<const double> hedge_weights,
                                 const LossEstimate& lhat,
                                 std::span<const Label> expert_predictions);

/// Gradient of the logistic loss as a cost matrix: off-diagonal
/// 1 / (1 + exp(s_r - s_l)), diagonal minus its column's off-diagonal sum.
CostMatrix logistic_cost_matrix(std::span<const double> s_prev, std::size_t k);

/// Logistic loss summed over l != y of log(1 + exp(s_l - s_y)).
double logistic_loss(std::span<const double> s, Label y);

struct ObjectiveValue {
    double value = 0.0;
    double derivative = 0.0;
};

/// f(alpha) = sum_j L_j(s_prev + alpha e_h) (1 - lhat_j) with its exact
/// derivative in alpha.
ObjectiveValue ada_objective_estimate(double alpha,
                                      std::span<const double> s_prev,
                                      Label h,
                                      std::span<const double> lhat);

inline constexpr double kAlphaBound = 2.0;

/// Projected step clamp(alpha - eta * grad, -2, 2).
double ogd_alpha_update(double alpha, double grad, double eta);

/// eta_t = rho / (k^2 sqrt(t)) for bandit feedback.
double bandit_learning_rate(std::size_t t, double rho, std::size_t k);
/// eta_t = 2 sqrt(2) / ((k - 1) sqrt(t)) for full information.
double full_information_learning_rate(std::size_t t, std::size_t k);

inline double ogd_alpha_update(double alpha, double grad, std::size_t t, double rho, std::size_t k) {
    return ogd_alpha_update(alpha, grad, bandit_learning_rate(t, rho, k));
}

/// Bandit adversary side: reports only whether the final guess was right.
class BanditChannel {
public:
    virtual ~BanditChannel() = default;
    virtual bool is_correct(Label y_tilde) = 0;
};

class FullInformationChannel {
public:
    virtual ~FullInformationChannel() = default;
    virtual Label true_label() = 0;
};

/// Stream tags for per-round generator splits.
enum class RoundStream : std::uint64_t { hedge = 1, sample = 2, reduce = 3, potential = 4 };

Rng round_stream(const Rng& base, std::size_t round, RoundStream stream);

/// Online booster over N weak learners. Single-threaded; owns its learners.
class Booster {
public:
    Booster(BoosterConfig config, LabelSpace space, std::vector<std::unique_ptr<WeakLearner>> learners);

    /// One round with bandit feedback. Requires mode == bandit.
    RoundOutcome round(std::span<const double> features, BanditChannel& channel);
    /// One round with the true label revealed. Requires mode == full_information.
    RoundOutcome round(std::span<const double> features, FullInformationChannel& channel);

    [[nodiscard]] const BoosterState& state() const noexcept { return state_; }
    [[nodiscard]] const BoosterConfig& config() const noexcept { return config_; }
    [[nodiscard]] const LabelSpace& space() const noexcept { return space_; }
    [[nodiscard]] std::size_t n_learners() const noexcept { return learners_.size(); }
    [[nodiscard]] WeakLearner& learner(std::size_t index) { return *learners_.at(index); }

private:
    struct Prepared {
        RoundOutcome outcome;
        std::size_t t = 0;
    };

    Prepared predict(std::span<const double> features);
    void learn(std::span<const double> features, Prepared& prepared, std::optional<Label> known_label);

    BoosterConfig config_;
    LabelSpace space_;
    std::vector<std::unique_ptr<WeakLearner>> learners_;
    BoosterState state_;
    Rng rng_;
    std::optional<PotentialEvaluator> potentials_;
};

}  // namespace banditboost
