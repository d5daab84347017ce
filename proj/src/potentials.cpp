#include "banditboost/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace banditboost {

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

void check_query(const PotentialQuery& q) {
    LabelSpace space(q.k);
    space.require(q.y, "potential");
    if (q.s.size() != q.k) {
        throw InvalidArgument("vote vector has length " + std::to_string(q.s.size()) + ", expected " +
                              std::to_string(q.k));
    }
    if (!(q.gamma >= 0.0 && q.gamma <= 1.0)) throw InvalidParameter("edge gamma must lie in [0, 1]");
}

double base_case(std::size_t y, std::span<const double> s) {
    return argmax_lowest(s) != y ? 1.0 : 0.0;
}

double expand(std::size_t y, std::size_t remaining, std::vector<double>& s, const std::vector<double>& u) {
    if (remaining == 0) return base_case(y, s);
    double acc = 0.0;
    for (std::size_t l = 0; l < s.size(); ++l) {
        s[l] += 1.0;
        acc += u[l] * expand(y, remaining - 1, s, u);
        s[l] -= 1.0;
    }
    return acc;
}

bool is_lattice(std::span<const double> s) {
    return std::all_of(s.begin(), s.end(), [](double v) {
        return std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e15;
    });
}

// C(n, r) with saturation
std::uint64_t binomial(std::uint64_t n, std::uint64_t r) {
    r = std::min(r, n - r);
    __uint128_t acc = 1;
    for (std::uint64_t i = 1; i <= r; ++i) {
        acc = acc * (n - r + i) / i;
        if (acc > kSaturated) return kSaturated;
    }
    return static_cast<std::uint64_t>(acc);
}

}  // namespace

SmoothedDistribution smoothed_distribution(Label favored, double gamma, std::size_t k) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidParameter("edge gamma must lie in [0, 1]");
    LabelSpace(k).require(favored, "favored");
    SmoothedDistribution d{std::vector<double>(k, (1.0 - gamma) / static_cast<double>(k)), favored, gamma};
    d.probs[favored.index()] += gamma;
    return d;
}

std::uint64_t expansion_leaves(std::size_t k, std::size_t remaining) {
    std::uint64_t leaves = 1;
    for (std::size_t i = 0; i < remaining; ++i) {
        if (leaves > kSaturated / k) return kSaturated;
        leaves *= k;
    }
    return leaves;
}

double potential_exact(const PotentialQuery& q, std::uint64_t budget) {
    check_query(q);
    const std::uint64_t leaves = expansion_leaves(q.k, q.remaining);
    if (leaves > budget) {
        throw BudgetExceeded("exact potential needs " + std::to_string(leaves) + " leaves, budget is " +
                             std::to_string(budget));
    }
    const auto u = smoothed_distribution(q.y, q.gamma, q.k).probs;
    std::vector<double> s = q.s;
    return expand(q.y.index(), q.remaining, s, u);
}

McEstimate potential_mc(const PotentialQuery& q, std::size_t samples, Rng& rng) {
    check_query(q);
    if (samples == 0) throw InvalidParameter("Monte Carlo needs at least one sample");
    const std::size_t y = q.y.index();
    if (q.remaining == 0) return {base_case(y, q.s), 0.0};

    const auto u = smoothed_distribution(q.y, q.gamma, q.k).probs;
    std::vector<double> s(q.k);
    std::size_t mistakes = 0;
    for (std::size_t n = 0; n < samples; ++n) {
        std::copy(q.s.begin(), q.s.end(), s.begin());
        for (std::size_t i = 0; i < q.remaining; ++i) s[draw_categorical(u, rng)] += 1.0;
        if (argmax_lowest(s) != y) ++mistakes;
    }
    const auto n = static_cast<double>(samples);
    const double mean = static_cast<double>(mistakes) / n;
    // Bernoulli outcomes: unbiased sample variance has a closed form
    const double var = samples > 1 ? mean * (1.0 - mean) * n / (n - 1.0) : 0.0;
    return {mean, std::sqrt(var / n)};
}

std::size_t PotentialEvaluator::KeyHash::operator()(const std::vector<std::int64_t>& key) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::int64_t v : key) {
        h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
}

PotentialEvaluator::PotentialEvaluator(PotentialConfig config) : config_(config) {
    LabelSpace space(config_.k);
    if (config_.mc_samples == 0) throw InvalidParameter("mc_samples must be positive");
    smoothed_.reserve(config_.k);
    for (std::size_t y = 0; y < config_.k; ++y) {
        smoothed_.push_back(smoothed_distribution(Label::from_index(y), config_.gamma, config_.k).probs);
    }
}

bool PotentialEvaluator::exact_feasible(std::size_t remaining, std::span<const double> s) const {
    if (config_.memoize && is_lattice(s)) {
        // distinct vote increments of total size <= remaining
        return binomial(remaining + config_.k, config_.k) <= config_.enumeration_budget;
    }
    return expansion_leaves(config_.k, remaining) <= config_.enumeration_budget;
}

double PotentialEvaluator::exact_cached(std::size_t y, std::size_t remaining, std::vector<std::int64_t>& votes) {
    const std::int64_t lowest = *std::min_element(votes.begin(), votes.end());
    std::vector<std::int64_t> key;
    key.reserve(votes.size() + 2);
    key.push_back(static_cast<std::int64_t>(y));
    key.push_back(static_cast<std::int64_t>(remaining));
    for (std::int64_t v : votes) key.push_back(v - lowest);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;

    double value = 0.0;
    if (remaining == 0) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < votes.size(); ++i) {
            if (votes[i] > votes[best]) best = i;
        }
        value = best != y ? 1.0 : 0.0;
    } else {
        const auto& u = smoothed_[y];
        for (std::size_t l = 0; l < votes.size(); ++l) {
            ++votes[l];
            value += u[l] * exact_cached(y, remaining - 1, votes);
            --votes[l];
        }
    }
    cache_.emplace(std::move(key), value);
    return value;
}

double PotentialEvaluator::exact(Label y, std::size_t remaining, std::span<const double> s) {
    LabelSpace(config_.k).require(y, "potential");
    if (s.size() != config_.k) throw InvalidArgument("vote vector length does not match k");
    if (!exact_feasible(remaining, s)) {
        throw BudgetExceeded("exact potential with " + std::to_string(remaining) +
                             " remaining votes exceeds the enumeration budget");
    }
    if (config_.memoize && is_lattice(s)) {
        std::vector<std::int64_t> votes(s.size());
        std::transform(s.begin(), s.end(), votes.begin(), [](double v) { return static_cast<std::int64_t>(v); });
        return exact_cached(y.index(), remaining, votes);
    }
    std::vector<double> work(s.begin(), s.end());
    return expand(y.index(), remaining, work, smoothed_[y.index()]);
}

double PotentialEvaluator::evaluate(Label y, std::size_t remaining, std::span<const double> s, Rng& rng) {
    if (exact_feasible(remaining, s)) return exact(y, remaining, s);
    PotentialQuery q{y, remaining, std::vector<double>(s.begin(), s.end()), config_.gamma, config_.k};
    return potential_mc(q, config_.mc_samples, rng).estimate;
}

CostMatrix bbm_cost_matrix(std::span<const double> s_prev,
                           std::size_t learner_index,
                           std::size_t n_learners,
                           PotentialEvaluator& evaluator,
                           Rng& rng) {
    if (learner_index < 1 || learner_index > n_learners) {
        throw InvalidArgument("learner index " + std::to_string(learner_index) + " outside 1.." +
                              std::to_string(n_learners));
    }
    const std::size_t k = evaluator.config().k;
    if (s_prev.size() != k) throw InvalidArgument("vote vector length does not match k");
    const std::size_t remaining = n_learners - learner_index;

    CostMatrix cost(k);
    std::vector<double> s(s_prev.begin(), s_prev.end());
    for (std::size_t l = 0; l < k; ++l) {
        s[l] += 1.0;
        for (std::size_t r = 0; r < k; ++r) {
            Rng entry_rng = rng.split(l * k + r);
            cost(l, r) = evaluator.evaluate(Label::from_index(r), remaining, s, entry_rng);
        }
        s[l] -= 1.0;
    }
    return cost;
}

}  // namespace banditboost
