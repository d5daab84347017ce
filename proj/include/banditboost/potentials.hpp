#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "banditboost/core_estimation.hpp"
#include "banditboost/rng.hpp"

namespace banditboost {

inline constexpr std::uint64_t kDefaultEnumerationBudget = 1'000'000;
inline constexpr std::size_t kDefaultMcSamples = 10'000;

/// Near-uniform distribution with gamma extra mass on the favored label.
struct SmoothedDistribution {
    std::vector<double> probs;
    Label favored_label;
    double gamma = 0.0;
};

SmoothedDistribution smoothed_distribution(Label favored, double gamma, std::size_t k);

struct PotentialQuery {
    Label y;
    std::size_t remaining = 0;
    std::vector<double> s;
    double gamma = 0.0;
    std::size_t k = 2;
};

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

/// Expected final zero-one loss when `remaining` votes drawn from the
/// gamma-smoothed distribution around y are still to be added to s. The base
/// case breaks argmax ties toward the lowest index. Full expansion without
/// caching; throws BudgetExceeded when k^remaining > budget.
double potential_exact(const PotentialQuery& q, std::uint64_t budget = kDefaultEnumerationBudget);

McEstimate potential_mc(const PotentialQuery& q, std::size_t samples, Rng& rng);

/// Number of leaves in the full expansion, saturating at UINT64_MAX.
std::uint64_t expansion_leaves(std::size_t k, std::size_t remaining);

struct PotentialConfig {
    std::size_t k = 2;
    double gamma = 0.1;
    std::uint64_t enumeration_budget = kDefaultEnumerationBudget;
    std::size_t mc_samples = kDefaultMcSamples;
    bool memoize = true;
};

/// Potential evaluator owned by one booster. On integer vote vectors the
/// recursion is cached by (label, remaining, votes minus their minimum), and
/// the budget is charged per distinct lattice state instead of per leaf.
class PotentialEvaluator {
public:
    explicit PotentialEvaluator(PotentialConfig config);

    [[nodiscard]] const PotentialConfig& config() const noexcept { return config_; }

    /// True when `exact` may be used for this query.
    [[nodiscard]] bool exact_feasible(std::size_t remaining, std::span<const double> s) const;

    double exact(Label y, std::size_t remaining, std::span<const double> s);

    /// Exact when feasible, otherwise Monte Carlo with the configured samples.
    double evaluate(Label y, std::size_t remaining, std::span<const double> s, Rng& rng);

    [[nodiscard]] std::size_t cache_size() const noexcept { return cache_.size(); }

private:
    struct KeyHash {
        std::size_t operator()(const std::vector<std::int64_t>& key) const noexcept;
    };

    double exact_cached(std::size_t y, std::size_t remaining, std::vector<std::int64_t>& votes);

    PotentialConfig config_;
    std::vector<std::vector<double>> smoothed_;  // per favored label
    std::unordered_map<std::vector<std::int64_t>, double, KeyHash> cache_;
};

/// C[l, r] = potential for true label r with N - i votes left after adding
/// e_l to the votes of the first i - 1 learners. learner_index is 1-based.
CostMatrix bbm_cost_matrix(std::span<const double> s_prev,
                           std::size_t learner_index,
                           std::size_t n_learners,
                           PotentialEvaluator& evaluator,
                           Rng& rng);

}  // namespace banditboost
