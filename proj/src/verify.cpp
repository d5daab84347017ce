#include "banditboost/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "banditboost/boosters.hpp"
#include "banditboost/errors.hpp"
#include "banditboost/potentials.hpp"

namespace banditboost {

namespace {

double expected_norm_error(const LossEstimatorFn& est, Label y, Label y_hat, const SamplingDistribution& dist) {
    const std::size_t k = dist.probs.size();
    std::vector<double> mean(k, 0.0);
    for (std::size_t t = 0; t < k; ++t) {
        const Label y_tilde = Label::from_index(t);
        const auto lhat = est(y_tilde, y_hat, y_tilde == y, dist);
        for (std::size_t i = 0; i < k; ++i) mean[i] += dist.probs[t] * lhat.values[i];
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double target = i == y.index() ? 0.0 : 1.0;
        worst = std::max(worst, std::abs(mean[i] - target));
    }
    return worst;
}

void suite_estimator(const VerifyOptions& opt, std::vector<CheckResult>& out) {
    auto run = [&](const std::string& name, const LossEstimatorFn& est) {
        CheckResult r{"estimator", name, 0.0, 1e-12, 0};
        for (std::size_t k : {2, 3, 5, 10}) {
            const LabelSpace space(k);
            for (double rho : {0.01, 0.1, 0.5}) {
                for (std::size_t a = 0; a < k; ++a) {
                    const auto dist = sampling_distribution(Label::from_index(a), space, rho);
                    for (std::size_t y = 0; y < k; ++y) {
                        r.observed = std::max(r.observed,
                                              expected_norm_error(est, Label::from_index(y), Label::from_index(a), dist));
                        ++r.cases;
                    }
                }
            }
        }
        out.push_back(r);
    };
    run("unbiased loss estimate", opt.estimator);
    run("simple loss estimate", [](Label yt, Label, bool correct, const SamplingDistribution& d) {
        return estimate_loss_simple(yt, correct, d);
    });
}

void suite_cost(const VerifyOptions& opt, std::vector<CheckResult>& out) {
    CheckResult r{"cost", "estimated cost vector mean", 0.0, 1e-12, 0};
    Rng rng = Rng(opt.seed).split(2);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t k = 2 + rng.below(4);
        const LabelSpace space(k);
        CostMatrix c(k);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) c(i, j) = 2.0 * rng.uniform() - 1.0;
        }
        const double rho = 0.05 + 0.85 * rng.uniform();
        const Label y = Label::from_index(rng.below(k));
        const Label y_hat = Label::from_index(rng.below(k));
        const auto dist = sampling_distribution(y_hat, space, rho);
        std::vector<double> mean(k, 0.0);
        for (std::size_t t = 0; t < k; ++t) {
            const Label yt = Label::from_index(t);
            const auto chat = estimate_cost_vector(c, opt.estimator(yt, y_hat, yt == y, dist), std::nullopt);
            for (std::size_t i = 0; i < k; ++i) mean[i] += dist.probs[t] * chat.values[i];
        }
        for (std::size_t i = 0; i < k; ++i) r.observed = std::max(r.observed, std::abs(mean[i] - c(i, y.index())));
        ++r.cases;
    }
    out.push_back(r);
}

void suite_potentials(const VerifyOptions& opt, std::vector<CheckResult>& out) {
    Rng rng = Rng(opt.seed).split(3);
    CheckResult mc{"potentials", "monte carlo vs exact (standard errors)", 0.0, 4.0, 0};
    for (std::size_t q = 0; q < opt.mc_queries; ++q) {
        PotentialQuery query;
        query.k = 2 + rng.below(2);
        query.remaining = 1 + rng.below(6);
        query.gamma = 0.5 * rng.uniform();
        query.y = Label::from_index(rng.below(query.k));
        query.s.resize(query.k);
        for (auto& v : query.s) v = static_cast<double>(rng.below(3));
        const double exact = potential_exact(query);
        Rng mc_rng = rng.split(q);
        const auto est = potential_mc(query, opt.mc_samples, mc_rng);
        const double diff = std::abs(est.estimate - exact);
        const double z = est.std_error > 0.0 ? diff / est.std_error
                         : diff > 1e-12      ? std::numeric_limits<double>::infinity()
                                             : 0.0;
        mc.observed = std::max(mc.observed, z);
        ++mc.cases;
    }
    out.push_back(mc);

    CheckResult ref{"potentials", "two votes at the origin, k=2, gamma=0.2", 0.0, 1e-12, 1};
    ref.observed = std::abs(potential_exact({Label(1), 2, {0.0, 0.0}, 0.2, 2}) - 0.16);
    out.push_back(ref);

    CheckResult bound{"potentials", "origin potential below (k-1) exp(-gamma^2 N / 2)", 0.0, 0.0, 0};
    for (std::size_t k = 2; k <= 4; ++k) {
        for (double gamma : {0.1, 0.3, 0.5}) {
            PotentialEvaluator eval({k, gamma, kDefaultEnumerationBudget, kDefaultMcSamples, true});
            const std::vector<double> origin(k, 0.0);
            for (std::size_t n = 1; n <= 12; ++n) {
                const double phi = eval.exact(Label(1), n, origin);
                const double b = static_cast<double>(k - 1) * std::exp(-gamma * gamma * static_cast<double>(n) / 2.0);
                bound.observed = std::max(bound.observed, phi - b);
                ++bound.cases;
            }
        }
    }
    out.push_back(bound);
}

void suite_gradient(const VerifyOptions& opt, std::vector<CheckResult>& out) {
    CheckResult r{"gradient", "objective derivative vs central difference (relative)", 0.0, 1e-6, 0};
    Rng rng = Rng(opt.seed).split(4);
    constexpr double step = 1e-5;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t k = 2 + rng.below(4);
        std::vector<double> s(k), lhat(k);
        for (auto& v : s) v = 2.0 * rng.normal();
        for (auto& v : lhat) v = rng.uniform() < 0.5 ? 0.0 : 10.0 * rng.uniform();
        const double alpha = 4.0 * rng.uniform() - 2.0;
        const Label h = Label::from_index(rng.below(k));
        const double analytic = ada_objective_estimate(alpha, s, h, lhat).derivative;
        const double fd = (ada_objective_estimate(alpha + step, s, h, lhat).value -
                           ada_objective_estimate(alpha - step, s, h, lhat).value) /
                          (2.0 * step);
        r.observed = std::max(r.observed, std::abs(analytic - fd) / std::max(std::abs(analytic), 1.0));
        ++r.cases;
    }
    out.push_back(r);
}

double column_min_gap(const CostMatrix& c) {
    double worst = 0.0;
    for (std::size_t r = 0; r < c.k(); ++r) {
        double lowest = c(0, r);
        for (std::size_t l = 1; l < c.k(); ++l) lowest = std::min(lowest, c(l, r));
        worst = std::max(worst, c(r, r) - lowest);
    }
    return worst;
}

void suite_matrices(const VerifyOptions& opt, std::vector<CheckResult>& out) {
    Rng rng = Rng(opt.seed).split(5);
    CheckResult sums{"matrices", "logistic cost column sums", 0.0, 1e-9, 0};
    CheckResult diag{"matrices", "logistic cost diagonal is the column minimum", 0.0, 0.0, 0};
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t k = 2 + rng.below(9);
        std::vector<double> s(k);
        for (auto& v : s) v = 5.0 * rng.normal();
        const auto c = logistic_cost_matrix(s, k);
        for (std::size_t r = 0; r < k; ++r) {
            double total = 0.0;
            for (std::size_t l = 0; l < k; ++l) total += c(l, r);
            sums.observed = std::max(sums.observed, std::abs(total));
        }
        diag.observed = std::max(diag.observed, column_min_gap(c));
        ++sums.cases;
        ++diag.cases;
    }
    out.push_back(sums);
    out.push_back(diag);

    CheckResult bbm{"matrices", "potential cost minimum on the true-label row", 0.0, 1e-12, 0};
    for (std::size_t k = 2; k <= 3; ++k) {
        for (double gamma : {0.1, 0.3}) {
            PotentialEvaluator eval({k, gamma, kDefaultEnumerationBudget, kDefaultMcSamples, true});
            std::vector<double> s(k, 0.0);
            const std::size_t lattice = static_cast<std::size_t>(std::pow(4.0, static_cast<double>(k)));
            for (std::size_t code = 0; code < lattice; ++code) {
                std::size_t rest = code;
                for (auto& v : s) {
                    v = static_cast<double>(rest % 4);
                    rest /= 4;
                }
                for (std::size_t remaining = 0; remaining <= 4; ++remaining) {
                    Rng unused(0);
                    const auto c = bbm_cost_matrix(s, 1, 1 + remaining, eval, unused);
                    bbm.observed = std::max(bbm.observed, column_min_gap(c));
                    ++bbm.cases;
                }
            }
        }
    }
    out.push_back(bbm);
}

}  // namespace

const std::vector<std::string>& verify_suite_names() {
    static const std::vector<std::string> names{"estimator", "cost", "potentials", "gradient", "matrices"};
    return names;
}

std::vector<CheckResult> run_verify(const VerifyOptions& options) {
    const auto& all = verify_suite_names();
    for (const auto& s : options.suites) {
        if (std::find(all.begin(), all.end(), s) == all.end()) throw InvalidArgument("unknown check suite '" + s + "'");
    }
    auto wanted = [&](const std::string& s) {
        return options.suites.empty() || std::find(options.suites.begin(), options.suites.end(), s) != options.suites.end();
    };
    std::vector<CheckResult> out;
    if (wanted("estimator")) suite_estimator(options, out);
    if (wanted("cost")) suite_cost(options, out);
    if (wanted("potentials")) suite_potentials(options, out);
    if (wanted("gradient")) suite_gradient(options, out);
    if (wanted("matrices")) suite_matrices(options, out);
    return out;
}

}  // namespace banditboost
