#include "banditboost/core_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace banditboost {

LabelSpace::LabelSpace(std::size_t k) : k_(k) {
    if (k < 2) throw InvalidSpace("label space needs k >= 2, got " + std::to_string(k));
}

void LabelSpace::require(Label l, const char* what) const {
    if (!contains(l)) {
        throw InvalidArgument(std::string(what) + " label " + std::to_string(l.value()) +
                              " outside 1.." + std::to_string(k_));
    }
}

bool LossEstimate::is_zero() const noexcept {
    return std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; });
}

std::vector<double> CostMatrix::column(std::size_t col) const {
    std::vector<double> out(k_);
    for (std::size_t row = 0; row < k_; ++row) out[row] = (*this)(row, col);
    return out;
}

CostMatrix CostMatrix::identity(std::size_t k) {
    CostMatrix m(k);
    for (std::size_t i = 0; i < k; ++i) m(i, i) = 1.0;
    return m;
}

std::size_t argmax_lowest(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) best = i;
    }
    return best;
}

SamplingDistribution sampling_distribution(Label y_hat, const LabelSpace& space, double rho) {
    if (!(rho >= 0.0 && rho < 1.0)) {
        throw InvalidParameter("exploration rate must lie in [0, 1), got " + std::to_string(rho));
    }
    space.require(y_hat, "intermediate");
    const std::size_t k = space.k();
    SamplingDistribution dist;
    dist.probs.assign(k, rho / static_cast<double>(k - 1));
    dist.probs[y_hat.index()] = 1.0 - rho;
    dist.mode_label = y_hat;
    dist.rho = rho;
    return dist;
}

Label sample_final_prediction(const SamplingDistribution& dist, Rng& rng) {
    return Label::from_index(draw_categorical(dist.probs, rng));
}

namespace {

double inverse_propensity(Label y_tilde, const SamplingDistribution& dist) {
    const double p = dist.prob(y_tilde);
    if (p <= 0.0) {
        throw DivisionByZero("sampled label " + std::to_string(y_tilde.value()) + " has zero probability");
    }
    return 1.0 / p;
}

}  // namespace

LossEstimate estimate_loss(Label y_tilde, Label y_hat, bool correct, const SamplingDistribution& dist) {
    const std::size_t k = dist.k();
    LossEstimate est{std::vector<double>(k, 0.0), y_tilde, y_hat, correct};
    const double w = inverse_propensity(y_tilde, dist);
    if (correct) {
        // y = y_tilde is known; the second term needs y_hat != y, which fails
        // when y_tilde == y_hat and is switched off by I(y_tilde = y_hat) otherwise.
        for (std::size_t i = 0; i < k; ++i) {
            if (i != y_tilde.index() && i != y_hat.index()) est.values[i] = w;
        }
    } else if (y_tilde == y_hat) {
        est.values[y_hat.index()] = w;
    }
    return est;
}

LossEstimate estimate_loss_simple(Label y_tilde, bool correct, const SamplingDistribution& dist) {
    const std::size_t k = dist.k();
    LossEstimate est{std::vector<double>(k, 0.0), y_tilde, dist.mode_label, correct};
    const double w = inverse_propensity(y_tilde, dist);
    if (correct) {
        for (std::size_t i = 0; i < k; ++i) {
            if (i != y_tilde.index()) est.values[i] = w;
        }
    }
    return est;
}

LossEstimate zero_one_loss(Label y, Label y_hat, const LabelSpace& space) {
    space.require(y, "true");
    LossEstimate est;
    est.values.assign(space.k(), 1.0);
    est.values[y.index()] = 0.0;
    est.sampled_label = y_hat;
    est.intermediate_label = y_hat;
    est.was_correct = (y == y_hat);
    return est;
}

EstimatedCostVector estimate_cost_vector(const CostMatrix& cost,
                                         std::span<const double> lhat,
                                         std::optional<double> clip_bound) {
    const std::size_t k = cost.k();
    if (lhat.size() != k) {
        throw InvalidArgument("cost matrix is " + std::to_string(k) + "x" + std::to_string(k) +
                              " but loss estimate has length " + std::to_string(lhat.size()));
    }
    if (clip_bound && !(*clip_bound > 0.0)) throw InvalidParameter("clip bound must be positive");

    EstimatedCostVector out{std::vector<double>(k, 0.0), false};
    for (std::size_t row = 0; row < k; ++row) {
        double acc = 0.0;
        for (std::size_t col = 0; col < k; ++col) acc += cost(row, col) * (1.0 - lhat[col]);
        out.values[row] = acc;
    }
    if (clip_bound) {
        const double b = *clip_bound;
        for (double& v : out.values) {
            if (v > b) {
                v = b;
                out.clipped = true;
            } else if (v < -b) {
                v = -b;
                out.clipped = true;
            }
        }
    }
    return out;
}

}  // namespace banditboost
