#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "banditboost/errors.hpp"
#include "banditboost/rng.hpp"

namespace banditboost {

/// 1-based class label. `index()` gives the 0-based position used for
/// vector storage.
class Label {
public:
    constexpr Label() = default;
    constexpr explicit Label(std::size_t one_based) : value_(one_based) {}

    static constexpr Label from_index(std::size_t zero_based) { return Label(zero_based + 1); }

    [[nodiscard]] constexpr std::size_t value() const noexcept { return value_; }
    [[nodiscard]] constexpr std::size_t index() const noexcept { return value_ - 1; }

    friend constexpr bool operator==(Label, Label) = default;
    friend constexpr auto operator<=>(Label, Label) = default;

private:
    std::size_t value_ = 1;
};

class LabelSpace {
public:
    explicit LabelSpace(std::size_t k);

    [[nodiscard]] std::size_t k() const noexcept { return k_; }
    [[nodiscard]] bool contains(Label l) const noexcept { return l.value() >= 1 && l.value() <= k_; }
    void require(Label l, const char* what) const;

private:
    std::size_t k_;
};

struct Example {
    std::vector<double> features;
    std::optional<Label> true_label;

    bool operator==(const Example&) const = default;
};

/// Exploration distribution around the intermediate prediction.
struct SamplingDistribution {
    std::vector<double> probs;
    Label mode_label;
    double rho = 0.0;

    [[nodiscard]] std::size_t k() const noexcept { return probs.size(); }
    [[nodiscard]] double prob(Label l) const { return probs.at(l.index()); }
};

/// Estimated zero-one loss vector built from bandit feedback.
struct LossEstimate {
    std::vector<double> values;
    Label sampled_label;
    Label intermediate_label;
    bool was_correct = false;

    [[nodiscard]] bool is_zero() const noexcept;
};

/// k x k matrix; entry (l, r) is the cost of predicting l when r is true.
/// Accessors take 0-based row/column indices.
class CostMatrix {
public:
    CostMatrix() = default;
    explicit CostMatrix(std::size_t k, double fill = 0.0) : k_(k), entries_(k * k, fill) {}

    [[nodiscard]] std::size_t k() const noexcept { return k_; }

    double& operator()(std::size_t row, std::size_t col) noexcept { return entries_[row * k_ + col]; }
    double operator()(std::size_t row, std::size_t col) const noexcept { return entries_[row * k_ + col]; }

    [[nodiscard]] std::vector<double> column(std::size_t col) const;
    [[nodiscard]] std::span<const double> data() const noexcept { return entries_; }

    static CostMatrix identity(std::size_t k);

private:
    std::size_t k_ = 0;
    std::vector<double> entries_;
};

struct EstimatedCostVector {
    std::vector<double> values;
    bool clipped = false;
};

SamplingDistribution sampling_distribution(Label y_hat, const LabelSpace& space, double rho);

Label sample_final_prediction(const SamplingDistribution& dist, Rng& rng);

/// Unbiased estimator that stays informative on mistake rounds: when the
/// sampled label equals the intermediate one and is wrong, the mass goes on
/// that label.
LossEstimate estimate_loss(Label y_tilde, Label y_hat, bool correct, const SamplingDistribution& dist);

/// Importance-weighted estimator that is zero on every mistake round.
/// Kept for ablations.
LossEstimate estimate_loss_simple(Label y_tilde, bool correct, const SamplingDistribution& dist);

/// Exact zero-one loss 1 - e_y, used when the true label is revealed.
LossEstimate zero_one_loss(Label y, Label y_hat, const LabelSpace& space);

/// chat = C * (1 - lhat), then entrywise clipping to [-clip, clip] when set.
EstimatedCostVector estimate_cost_vector(const CostMatrix& cost,
                                         std::span<const double> lhat,
                                         std::optional<double> clip_bound);

inline EstimatedCostVector estimate_cost_vector(const CostMatrix& cost,
                                                const LossEstimate& lhat,
                                                std::optional<double> clip_bound) {
    return estimate_cost_vector(cost, lhat.values, clip_bound);
}

/// Lowest index attaining the maximum.
std::size_t argmax_lowest(std::span<const double> values);

}  // namespace banditboost
