#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "banditboost/core_estimation.hpp"

namespace banditboost {

using LossEstimatorFn =
    std::function<LossEstimate(Label y_tilde, Label y_hat, bool correct, const SamplingDistribution& dist)>;

struct CheckResult {
    std::string suite;
    std::string name;
    double observed = 0.0;   // worst error seen
    double tolerance = 0.0;  // pass iff observed <= tolerance
    std::size_t cases = 0;

    [[nodiscard]] bool passed() const noexcept { return observed <= tolerance; }
    [[nodiscard]] double margin() const noexcept { return tolerance - observed; }
};

struct VerifyOptions {
    std::vector<std::string> suites;  // empty: all
    LossEstimatorFn estimator = estimate_loss;
    std::uint64_t seed = 20240601;
    std::size_t mc_samples = 200000;
    std::size_t mc_queries = 20;
};

/// estimator, cost, potentials, gradient, matrices
const std::vector<std::string>& verify_suite_names();

/// Throws InvalidArgument for an unknown suite name.
std::vector<CheckResult> run_verify(const VerifyOptions& options);

}  // namespace banditboost
