#include "banditboost/boosters.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace banditboost {

namespace {

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

Algorithm parse_algorithm(const std::string& name) {
    if (name == "bbm" || name == "opt") return Algorithm::bbm;
    if (name == "ada") return Algorithm::ada;
    throw InvalidParameter("unknown algorithm '" + name + "' (expected bbm or ada)");
}

FeedbackMode parse_mode(const std::string& name) {
    if (name == "bandit") return FeedbackMode::bandit;
    if (name == "full" || name == "full_information") return FeedbackMode::full_information;
    throw InvalidParameter("unknown feedback mode '" + name + "' (expected bandit or full)");
}

EstimatorKind parse_estimator(const std::string& name) {
    if (name == "unbiased") return EstimatorKind::unbiased;
    if (name == "simple") return EstimatorKind::simple;
    throw InvalidParameter("unknown estimator '" + name + "' (expected unbiased or simple)");
}

std::string to_string(Algorithm a) { return a == Algorithm::bbm ? "bbm" : "ada"; }
std::string to_string(FeedbackMode m) { return m == FeedbackMode::bandit ? "bandit" : "full"; }
std::string to_string(EstimatorKind e) { return e == EstimatorKind::unbiased ? "unbiased" : "simple"; }

void BoosterConfig::validate() const {
    if (n_learners == 0) throw InvalidParameter("n_learners must be positive");
    if (!(rho >= 0.0 && rho < 1.0)) throw InvalidParameter("rho must lie in [0, 1), got " + std::to_string(rho));
    if (mode == FeedbackMode::bandit && rho == 0.0) {
        throw InvalidParameter("bandit feedback needs rho > 0 for the loss estimate to exist");
    }
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidParameter("gamma must lie in [0, 1]");
    if (mc_samples == 0) throw InvalidParameter("mc_samples must be positive");
    if (clip_bound && !(*clip_bound > 0.0)) throw InvalidParameter("clip_bound must be positive");
    if (!(weight_scale > 0.0)) throw InvalidParameter("weight_scale must be positive");
}

double theory_rho_bbm(std::size_t k, std::size_t n_learners, std::size_t horizon) {
    if (horizon == 0) throw InvalidParameter("theory schedule needs a positive horizon");
    return std::pow(static_cast<double>(k), 1.75) * std::pow(static_cast<double>(n_learners), 0.25) /
           std::sqrt(static_cast<double>(horizon));
}

double theory_rho_ada(std::size_t k, std::size_t n_learners, std::size_t horizon, double sum_sq_edges) {
    if (horizon == 0) throw InvalidParameter("theory schedule needs a positive horizon");
    if (!(sum_sq_edges > 0.0)) throw InvalidParameter("sum of squared edges must be positive");
    return static_cast<double>(k) * std::pow(static_cast<double>(n_learners), 2.0 / 3.0) /
           std::cbrt(static_cast<double>(horizon) * sum_sq_edges);
}

std::vector<std::vector<double>> expert_votes(std::span<const double> alphas,
                                              std::span<const Label> predictions,
                                              std::size_t k) {
    if (alphas.size() != predictions.size()) {
        throw InvalidArgument("got " + std::to_string(alphas.size()) + " weights for " +
                              std::to_string(predictions.size()) + " predictions");
    }
    std::vector<std::vector<double>> votes;
    votes.reserve(alphas.size());
    std::vector<double> running(k, 0.0);
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        running.at(predictions[i].index()) += alphas[i];
        votes.push_back(running);
    }
    return votes;
}

std::vector<Label> expert_predictions(const std::vector<std::vector<double>>& votes) {
    std::vector<Label> out;
    out.reserve(votes.size());
    for (const auto& s : votes) out.push_back(Label::from_index(argmax_lowest(s)));
    return out;
}

std::size_t choose_expert_hedge(std::span<const double> hedge_weights, Rng& rng) {
    const bool any_positive = std::any_of(hedge_weights.begin(), hedge_weights.end(), [](double v) { return v > 0.0; });
    if (!any_positive) throw InvalidState("all Hedge weights are zero");
    return draw_categorical(hedge_weights, rng) + 1;
}

std::vector<double> hedge_update(std::span<const double> hedge_weights,
                                 const LossEstimate& lhat,
                                 std::span<const Label> expert_predictions) {
    if (hedge_weights.size() != expert_predictions.size()) throw InvalidArgument("one prediction per expert");
    // Rescale in the log domain: one huge estimate must not zero every weight.
    std::vector<double> v(hedge_weights.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = std::log(hedge_weights[i]) - lhat.values.at(expert_predictions[i].index());
    }
    const double top = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(top)) throw InvalidState("all Hedge weights are zero");
    for (double& x : v) x = std::exp(x - top);
    return v;
}

CostMatrix logistic_cost_matrix(std::span<const double> s_prev, std::size_t k) {
    if (s_prev.size() != k) throw InvalidArgument("vote vector length does not match k");
    CostMatrix c(k);
    for (std::size_t r = 0; r < k; ++r) {
        double off = 0.0;
        for (std::size_t l = 0; l < k; ++l) {
            if (l == r) continue;
            c(l, r) = sigmoid(s_prev[l] - s_prev[r]);
            off += c(l, r);
        }
        c(r, r) = -off;
    }
    return c;
}

double logistic_loss(std::span<const double> s, Label y) {
    double acc = 0.0;
    const double sy = s[y.index()];
    for (std::size_t l = 0; l < s.size(); ++l) {
        if (l != y.index()) acc += softplus(s[l] - sy);
    }
    return acc;
}

ObjectiveValue ada_objective_estimate(double alpha,
                                      std::span<const double> s_prev,
                                      Label h,
                                      std::span<const double> lhat) {
    const std::size_t k = s_prev.size();
    if (lhat.size() != k) throw InvalidArgument("loss estimate length does not match votes");
    const std::size_t hi = h.index();
    if (hi >= k) throw InvalidArgument("prediction outside label space");

    std::vector<double> s(s_prev.begin(), s_prev.end());
    s[hi] += alpha;

    ObjectiveValue out;
    for (std::size_t j = 0; j < k; ++j) {
        const double weight = 1.0 - lhat[j];
        if (weight == 0.0) continue;
        double value = 0.0;
        double deriv = 0.0;
        for (std::size_t l = 0; l < k; ++l) {
            if (l == j) continue;
            const double z = s[l] - s[j];
            value += softplus(z);
            // dz/dalpha is +1 when l is the boosted label, -1 when j is
            if (l == hi) deriv += sigmoid(z);
            if (j == hi) deriv -= sigmoid(z);
        }
        out.value += weight * value;
        out.derivative += weight * deriv;
    }
    return out;
}

double ogd_alpha_update(double alpha, double grad, double eta) {
    return std::clamp(alpha - eta * grad, -kAlphaBound, kAlphaBound);
}

double bandit_learning_rate(std::size_t t, double rho, std::size_t k) {
    if (t == 0) throw InvalidArgument("round index starts at 1");
    const auto kk = static_cast<double>(k);
    return rho / (kk * kk * std::sqrt(static_cast<double>(t)));
}

double full_information_learning_rate(std::size_t t, std::size_t k) {
    if (t == 0) throw InvalidArgument("round index starts at 1");
    return 2.0 * std::sqrt(2.0) / (static_cast<double>(k - 1) * std::sqrt(static_cast<double>(t)));
}

Rng round_stream(const Rng& base, std::size_t round, RoundStream stream) {
    return base.split(round).split(static_cast<std::uint64_t>(stream));
}

// --- Booster --------------------------------------------------------------

Booster::Booster(BoosterConfig config, LabelSpace space, std::vector<std::unique_ptr<WeakLearner>> learners)
    : config_(config), space_(space), learners_(std::move(learners)), rng_(config.seed) {
    config_.validate();
    if (learners_.size() != config_.n_learners) {
        throw InvalidArgument("booster configured for " + std::to_string(config_.n_learners) + " learners, got " +
                              std::to_string(learners_.size()));
    }
    for (const auto& l : learners_) {
        if (!l) throw InvalidArgument("null weak learner");
    }
    const std::size_t n = config_.n_learners;
    state_.alphas.assign(n, config_.algorithm == Algorithm::bbm ? 1.0 : 0.0);
    state_.hedge_weights.assign(n, 1.0);
    state_.rho = config_.mode == FeedbackMode::full_information ? 0.0 : config_.rho;
    state_.n_learners = n;
    state_.k = space_.k();
    state_.mode = config_.mode;
    state_.algorithm = config_.algorithm;
    if (config_.algorithm == Algorithm::bbm) {
        potentials_.emplace(PotentialConfig{space_.k(), config_.gamma, config_.enumeration_budget,
                                            config_.mc_samples, true});
    }
}

Booster::Prepared Booster::predict(std::span<const double> features) {
    Prepared p;
    p.t = state_.round + 1;
    RoundOutcome& out = p.outcome;
    const std::size_t n = learners_.size();

    out.weak_predictions.reserve(n);
    for (const auto& learner : learners_) {
        const Label h = learner->predict(features);
        space_.require(h, "weak learner");
        out.weak_predictions.push_back(h);
    }
    out.expert_votes = expert_votes(state_.alphas, out.weak_predictions, space_.k());
    out.expert_predictions = banditboost::expert_predictions(out.expert_votes);

    if (config_.algorithm == Algorithm::bbm) {
        out.chosen_expert = choose_expert_bbm(state_);
    } else {
        Rng hedge_rng = round_stream(rng_, p.t, RoundStream::hedge);
        out.chosen_expert = choose_expert_hedge(state_.hedge_weights, hedge_rng);
    }
    out.intermediate = out.expert_predictions[out.chosen_expert - 1];

    const auto dist = sampling_distribution(out.intermediate, space_, state_.rho);
    Rng sample_rng = round_stream(rng_, p.t, RoundStream::sample);
    out.final_prediction = sample_final_prediction(dist, sample_rng);
    return p;
}

RoundOutcome Booster::round(std::span<const double> features, BanditChannel& channel) {
    if (config_.mode != FeedbackMode::bandit) throw InvalidState("booster is configured for full information");
    Prepared p = predict(features);
    RoundOutcome& out = p.outcome;

    out.correct = channel.is_correct(out.final_prediction);

    const auto dist = sampling_distribution(out.intermediate, space_, state_.rho);
    out.loss_estimate = config_.estimator == EstimatorKind::unbiased
                            ? estimate_loss(out.final_prediction, out.intermediate, out.correct, dist)
                            : estimate_loss_simple(out.final_prediction, out.correct, dist);
    std::optional<Label> known;
    if (out.correct) known = out.final_prediction;
    learn(features, p, known);
    return std::move(p.outcome);
}

RoundOutcome Booster::round(std::span<const double> features, FullInformationChannel& channel) {
    if (config_.mode != FeedbackMode::full_information) throw InvalidState("booster is configured for bandit feedback");
    Prepared p = predict(features);
    RoundOutcome& out = p.outcome;

    const Label y = channel.true_label();
    space_.require(y, "revealed");
    out.correct = out.final_prediction == y;
    out.loss_estimate = zero_one_loss(y, out.intermediate, space_);
    out.loss_estimate.sampled_label = out.final_prediction;
    learn(features, p, y);
    return std::move(p.outcome);
}

void Booster::learn(std::span<const double> features, Prepared& p, std::optional<Label> known_label) {
    RoundOutcome& out = p.outcome;
    const std::size_t n = learners_.size();
    const std::size_t k = space_.k();
    const auto& lhat = out.loss_estimate.values;
    const std::vector<double> zero(k, 0.0);
    auto previous_votes = [&](std::size_t i) -> const std::vector<double>& {
        return i == 0 ? zero : out.expert_votes[i - 1];
    };

    std::vector<double> next_alphas = state_.alphas;
    if (config_.algorithm == Algorithm::ada) {
        const double eta = config_.mode == FeedbackMode::bandit ? bandit_learning_rate(p.t, state_.rho, k)
                                                                : full_information_learning_rate(p.t, k);
        for (std::size_t i = 0; i < n; ++i) {
            const auto f = ada_objective_estimate(state_.alphas[i], previous_votes(i), out.weak_predictions[i], lhat);
            next_alphas[i] = ogd_alpha_update(state_.alphas[i], f.derivative, eta);
        }
    }

    out.cost_matrices.reserve(n);
    out.update_targets.reserve(n);
    out.update_weights.reserve(n);
    const Rng potential_base = round_stream(rng_, p.t, RoundStream::potential);
    const Rng reduce_base = round_stream(rng_, p.t, RoundStream::reduce);
    for (std::size_t i = 0; i < n; ++i) {
        CostMatrix cost;
        if (config_.algorithm == Algorithm::bbm) {
            Rng entry_rng = potential_base.split(i + 1);
            cost = bbm_cost_matrix(previous_votes(i), i + 1, n, *potentials_, entry_rng);
        } else {
            cost = logistic_cost_matrix(previous_votes(i), k);
        }
        const auto chat = estimate_cost_vector(cost, lhat, config_.clip_bound);
        Rng tie_rng = reduce_base.split(i + 1);
        WeakLearnerUpdate update = reduce_cost_vector(features, chat, known_label, tie_rng);
        update.importance_weight *= config_.weight_scale;
        learners_[i]->update(update);
        out.update_targets.push_back(update.target_label);
        out.update_weights.push_back(update.importance_weight);
        out.cost_matrices.push_back(std::move(cost));
    }

    if (config_.algorithm == Algorithm::ada) {
        state_.hedge_weights = hedge_update(state_.hedge_weights, out.loss_estimate, out.expert_predictions);
    }
    state_.alphas = std::move(next_alphas);
    state_.round = p.t;
}

}  // namespace banditboost
