#include "doctest.h"

#include <algorithm>

#include "banditboost/errors.hpp"
#include "banditboost/verify.hpp"

using namespace banditboost;

TEST_CASE("default verification passes") {
    VerifyOptions opt;
    opt.mc_samples = 50000;
    opt.mc_queries = 8;
    const auto rows = run_verify(opt);
    std::vector<std::string> suites;
    for (const auto& r : rows) {
        CHECK_MESSAGE(r.passed(), r.suite << "/" << r.name << " observed " << r.observed);
        if (std::find(suites.begin(), suites.end(), r.suite) == suites.end()) suites.push_back(r.suite);
    }
    CHECK(suites == verify_suite_names());
}

TEST_CASE("suite selection") {
    VerifyOptions opt;
    opt.suites = {"potentials"};
    opt.mc_samples = 20000;
    opt.mc_queries = 4;
    for (const auto& r : run_verify(opt)) CHECK(r.suite == "potentials");
    opt.suites = {"bogus"};
    CHECK_THROWS_AS(run_verify(opt), InvalidArgument);
}

TEST_CASE("sign flip in the mistake term is caught") {
    VerifyOptions opt;
    opt.suites = {"estimator", "cost"};
    opt.estimator = [](Label y_tilde, Label y_hat, bool correct, const SamplingDistribution& dist) {
        auto est = estimate_loss(y_tilde, y_hat, correct, dist);
        if (!correct && y_tilde == y_hat) {
            for (double& v : est.values) v = -v;
        }
        return est;
    };
    const auto rows = run_verify(opt);
    bool estimator_failed = false;
    for (const auto& r : rows) {
        if (r.suite == "estimator" && !r.passed()) estimator_failed = true;
    }
    CHECK(estimator_failed);
}
