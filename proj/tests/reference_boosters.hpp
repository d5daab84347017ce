#pragma once

// Straight-line full-information boosters used to cross-check the library
// booster when rho = 0.

#include <memory>
#include <vector>

#include "banditboost/rng.hpp"
#include "banditboost/weak_learners.hpp"

namespace reference {

struct Step {
    std::size_t prediction = 0;  // 0-based
    std::size_t expert = 0;      // 1-based
    std::vector<double> alphas;
    std::vector<double> hedge;
    std::vector<std::size_t> targets;
    std::vector<double> weights;
};

// Online boost-by-majority with exact potentials, alpha fixed at 1.
class OnlineMBBM {
public:
    OnlineMBBM(std::size_t k, double gamma, std::uint64_t seed,
               std::vector<std::unique_ptr<banditboost::WeakLearner>> learners);
    Step round(const std::vector<double>& x, std::size_t y);

private:
    double potential(std::size_t y, std::size_t remaining, std::vector<double>& s) const;

    std::size_t k_;
    double gamma_;
    banditboost::Rng rng_;
    std::vector<std::unique_ptr<banditboost::WeakLearner>> learners_;
    std::size_t t_ = 0;
};

// Adaboost.OLM: Hedge over prefix experts, OGD on the logistic loss.
class AdaboostOLM {
public:
    AdaboostOLM(std::size_t k, std::uint64_t seed, std::vector<std::unique_ptr<banditboost::WeakLearner>> learners);
    Step round(const std::vector<double>& x, std::size_t y);

private:
    std::size_t k_;
    banditboost::Rng rng_;
    std::vector<std::unique_ptr<banditboost::WeakLearner>> learners_;
    std::vector<double> alpha_;
    std::vector<double> v_;
    std::size_t t_ = 0;
};

}  // namespace reference
