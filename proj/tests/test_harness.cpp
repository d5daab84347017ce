#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#include "banditboost/errors.hpp"
#include "banditboost/harness.hpp"

using namespace banditboost;

namespace {

DataError::Kind data_error_kind(const std::string& text, DatasetSpec spec = {}) {
    try {
        parse_csv(text, spec);
    } catch (const DataError& e) {
        return e.kind();
    }
    FAIL("expected a DataError");
    return DataError::Kind::malformed;
}

std::vector<bool> pattern(std::size_t wrong, std::size_t right) {
    std::vector<bool> out(wrong, false);
    out.insert(out.end(), right, true);
    return out;
}

ExperimentConfig oracle_experiment(double gamma, FeedbackMode mode) {
    ExperimentConfig c;
    c.data.kind = DataSourceConfig::Kind::synthetic;
    c.data.synthetic.generator = SyntheticKind::oracle_edge;
    c.data.synthetic.k = 3;
    c.data.synthetic.rows = 400;
    c.data.synthetic.n_channels = 3;
    c.data.synthetic.gamma = gamma;
    c.booster.algorithm = Algorithm::bbm;
    c.booster.mode = mode;
    c.booster.n_learners = 3;
    c.booster.gamma = 0.3;
    c.booster.rho = mode == FeedbackMode::bandit ? 0.1 : 0.0;
    c.learner.kind = LearnerKind::channel;
    c.seeds = {0, 1, 2};
    return c;
}

}  // namespace

TEST_CASE("csv parsing") {
    DatasetSpec spec;
    spec.label_column = "y";

    SUBCASE("labels by first appearance") {
        const auto d = parse_csv("y,x\na,1\nb,2\na,3\n", spec);
        CHECK(d.k == 2);
        CHECK(d.size() == 3);
        CHECK(d.label_names == std::vector<std::string>{"a", "b"});
        CHECK(*d.examples[0].true_label == Label(1));
        CHECK(*d.examples[1].true_label == Label(2));
        CHECK(*d.examples[2].true_label == Label(1));
        CHECK(d.examples[0].features[0] == 0.0);
        CHECK(d.examples[1].features[0] == 0.5);
        CHECK(d.examples[2].features[0] == 1.0);
    }
    SUBCASE("no normalization and constant columns") {
        spec.normalize = false;
        const auto raw = parse_csv("x,y,z\n-4,a,7\n6,b,7\n", spec);
        CHECK(raw.feature_names == std::vector<std::string>{"x", "z"});
        CHECK(raw.examples[0].features == std::vector<double>{-4.0, 7.0});
        spec.normalize = true;
        const auto scaled = parse_csv("x,y,z\n-4,a,7\n6,b,7\n", spec);
        CHECK(scaled.examples[1].features == std::vector<double>{1.0, 0.0});
    }
    SUBCASE("quoting, crlf and bom") {
        const auto d = parse_csv("\xEF\xBB\xBFy,\"x\"\r\n\"a,b\",1\r\n\"say \"\"hi\"\"\",2\r\n\r\n", spec);
        CHECK(d.size() == 2);
        CHECK(d.label_names == std::vector<std::string>{"a,b", "say \"hi\""});
    }
    SUBCASE("missing values") {
        CHECK(data_error_kind("y,x\na,1\nb,\n", spec) == DataError::Kind::missing_value);
        spec.missing = MissingPolicy::zero;
        spec.normalize = false;
        const auto d = parse_csv("y,x\na,1\nb,\n", spec);
        CHECK(d.examples[1].features[0] == 0.0);
    }
    SUBCASE("typed failures") {
        CHECK(data_error_kind("", spec) == DataError::Kind::empty_dataset);
        CHECK(data_error_kind("y,x\n", spec) == DataError::Kind::empty_dataset);
        CHECK(data_error_kind("label,x\na,1\nb,2\n", spec) == DataError::Kind::missing_column);
        CHECK(data_error_kind("y,x\na,1\nb,abc\n", spec) == DataError::Kind::non_numeric);
        CHECK(data_error_kind("y,x\na,1\nb,2,3\n", spec) == DataError::Kind::malformed);
        CHECK(data_error_kind("y,x\na,1\na,2\n", spec) == DataError::Kind::malformed);
    }
    SUBCASE("missing file names the path") {
        DatasetSpec f;
        f.path = "/nonexistent/balance.csv";
        try {
            load_csv(f);
            FAIL("expected a DataError");
        } catch (const DataError& e) {
            CHECK(e.kind() == DataError::Kind::missing_file);
            CHECK(std::string(e.what()).find("/nonexistent/balance.csv") != std::string::npos);
        }
    }
}

TEST_CASE("stream construction") {
    Dataset d;
    d.k = 2;
    for (int i = 0; i < 625; ++i) d.examples.push_back({{static_cast<double>(i)}, Label(1 + i % 2)});
    const auto s = build_stream(d, 10, 3);
    CHECK(s.size() == 6250);
    for (std::size_t c = 0; c < 10; ++c) {
        std::vector<std::size_t> copy(s.begin() + c * 625, s.begin() + (c + 1) * 625);
        std::sort(copy.begin(), copy.end());
        for (std::size_t i = 0; i < 625; ++i) CHECK(copy[i] == i);
    }
    CHECK(s == build_stream(d, 10, 3));
    CHECK(s != build_stream(d, 10, 4));
    CHECK(std::vector<std::size_t>(s.begin(), s.begin() + 625) !=
          std::vector<std::size_t>(s.begin() + 625, s.begin() + 1250));

    const auto plain = build_stream(d, 2, 3, false);
    for (std::size_t i = 0; i < plain.size(); ++i) CHECK(plain[i] == i % 625);
}

TEST_CASE("learning curve") {
    SUBCASE("perfect stream") {
        const auto c = learning_curve(std::vector<bool>(100, true));
        CHECK(window_length(100) == 20);
        CHECK(c.front().round == 20);
        CHECK(c.back().round == 100);
        CHECK(c.size() == 81);
        for (const auto& p : c) CHECK(p.window_accuracy == 1.0);
    }
    SUBCASE("alternating") {
        std::vector<bool> v(100);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = i % 2 == 1;
        for (const auto& p : learning_curve(v)) CHECK(p.window_accuracy == 0.5);
        CHECK(asymptotic_accuracy(v) == 0.5);
        CHECK(total_accuracy(v) == 0.5);
    }
    SUBCASE("recovery after a bad start") {
        const auto v = pattern(25, 25);
        const auto c = learning_curve(v);
        CHECK(window_length(50) == 10);
        auto at = [&](std::size_t r) {
            for (const auto& p : c) {
                if (p.round == r) return p.window_accuracy;
            }
            return -1.0;
        };
        CHECK(at(10) == 0.0);
        CHECK(at(30) == 0.5);
        CHECK(at(35) == 1.0);
        CHECK(at(40) == 1.0);
        CHECK(asymptotic_accuracy(v) == 1.0);
    }
    SUBCASE("first fifth wrong at T = 100") {
        const auto c = learning_curve(pattern(20, 80));
        // window 20: round 30 covers rounds 11..30, round 40 covers 21..40
        CHECK(c[30 - 20].round == 30);
        CHECK(c[30 - 20].window_accuracy == 0.5);
        CHECK(c[40 - 20].window_accuracy == 1.0);
    }
    SUBCASE("window rounds up") {
        CHECK(window_length(7) == 2);
        CHECK(window_length(5) == 1);
        CHECK_THROWS_AS(learning_curve(std::vector<bool>(4, true)), InvalidArgument);
    }
}

TEST_CASE("summaries") {
    const auto s = summarize({1.0, 2.0, 3.0, 4.0});
    CHECK(s.mean == 2.5);
    CHECK(s.std == doctest::Approx(std::sqrt(5.0 / 3.0)));
    CHECK(summarize({0.7}).std == 0.0);
}

TEST_CASE("gaussian mixture has the two-class Bayes error") {
    SyntheticSpec spec;
    spec.generator = SyntheticKind::gaussian_mixture;
    spec.k = 2;
    spec.dims = 2;
    spec.rows = 1'000'000;
    spec.separation = 1.0;
    spec.seed = 4;
    const auto d = synth_generate(spec);
    CHECK(d.k == 2);
    std::size_t errors = 0;
    for (const auto& ex : d.examples) {
        const Label guess = ex.features[0] > 0.0 ? Label(2) : Label(1);
        errors += guess != *ex.true_label;
    }
    const double bayes = 0.5 * std::erfc(1.0 / std::sqrt(2.0));
    CHECK(bayes == doctest::Approx(0.1587).epsilon(1e-3));
    CHECK(std::abs(static_cast<double>(errors) / 1e6 - bayes) <= 0.002);
}

TEST_CASE("oracle-edge generator") {
    SyntheticSpec spec;
    spec.k = 4;
    spec.rows = 40000;
    spec.n_channels = 3;
    spec.gamma = 0.0;
    spec.seed = 1;
    const auto d = synth_generate(spec);
    CHECK(d.feature_names == std::vector<std::string>{"wl1", "wl2", "wl3"});
    std::vector<std::size_t> hits(3, 0);
    for (const auto& ex : d.examples) {
        for (std::size_t c = 0; c < 3; ++c) hits[c] += Label(static_cast<std::size_t>(ex.features[c])) == *ex.true_label;
    }
    for (auto h : hits) CHECK(std::abs(h / 40000.0 - 0.25) <= 0.01);

    spec.gamma = 1.0;
    for (const auto& ex : synth_generate(spec).examples) CHECK(Label(static_cast<std::size_t>(ex.features[1])) == *ex.true_label);
}

TEST_CASE("threshold generator") {
    SyntheticSpec spec;
    spec.generator = SyntheticKind::threshold_concept;
    spec.k = 3;
    spec.rows = 3000;
    spec.dims = 2;
    spec.seed = 2;
    const auto d = synth_generate(spec);
    for (const auto& ex : d.examples) {
        const auto want = std::min<std::size_t>(2, static_cast<std::size_t>(ex.features[0] * 3.0));
        CHECK(ex.true_label->index() == want);
    }
    CHECK(d.examples == synth_generate(spec).examples);
}

TEST_CASE("rho schedules") {
    ExperimentConfig c;
    c.booster.rho = 0.05;
    CHECK(resolve_rho(c, 3, 1000) == 0.05);
    c.rho_schedule = RhoSchedule::bbm_theory;
    c.booster.n_learners = 10;
    CHECK(resolve_rho(c, 3, 1'000'000'000) == doctest::Approx(theory_rho_bbm(3, 10, 1'000'000'000)));
    CHECK_THROWS_AS(resolve_rho(c, 10, 100), InvalidParameter);
    CHECK(parse_rho_schedule(to_string(RhoSchedule::ada_theory)) == RhoSchedule::ada_theory);
    CHECK_THROWS_AS(parse_rho_schedule("adaptive"), InvalidParameter);
}

TEST_CASE("empirical edge at the origin") {
    RoundOutcome o;
    o.weak_predictions = {Label(1)};
    o.cost_matrices = {logistic_cost_matrix(std::vector<double>{0.0, 0.0}, 2)};
    EdgeAccumulator acc(1);
    acc.add(o, Label(1));
    CHECK(*acc.edges()[0] == 1.0);
}

TEST_CASE("experiments") {
    SUBCASE("perfect channels in full information") {
        const auto r = run_experiment(oracle_experiment(1.0, FeedbackMode::full_information));
        CHECK(r.runs.size() == 3);
        for (const auto& run : r.runs) {
            CHECK(run.total_accuracy == 1.0);
            CHECK(run.records.size() == 400);
            // the last learner's diagonal cost is 0 once the vote is decided
            for (const auto& e : run.empirical_edges) {
                if (e) CHECK(*e == doctest::Approx(1.0));
            }
        }
        CHECK(r.asymptotic.mean == 1.0);
        CHECK(r.asymptotic.std == 0.0);
    }
    SUBCASE("bandit run bookkeeping") {
        auto c = oracle_experiment(0.6, FeedbackMode::bandit);
        const auto r = run_experiment(c);
        for (const auto& run : r.runs) {
            CHECK(run.rho_used == 0.1);
            CHECK(run.window == 80);
            std::size_t zero = 0;
            for (const auto& rec : run.records) zero += !rec.correct && rec.y_tilde != rec.y_hat;
            CHECK(run.zero_estimate_rounds == zero);
            CHECK(run.correctness().size() == 400);
        }
    }
    SUBCASE("reports are deterministic and independent of threading") {
        auto c = oracle_experiment(0.4, FeedbackMode::bandit);
        c.threads = 1;
        const auto one = report_to_json(run_experiment(c)).dump();
        c.threads = 3;
        const auto three = report_to_json(run_experiment(c)).dump();
        CHECK(one == three);
        CHECK(one.find("wall") == std::string::npos);
    }
    SUBCASE("curves round trip through json") {
        const auto report = report_to_json(run_experiment(oracle_experiment(0.5, FeedbackMode::bandit)));
        CHECK(report["schema"] == "banditboost.report");
        CHECK(report["schema_version"] == kReportSchemaVersion);
        const auto curves = curves_from_json(report);
        CHECK(curves.size() == 3);
        CHECK(curves[0].second.size() == 321);
        const auto csv = curves_to_csv(curves);
        CHECK(csv.rfind("round,window_accuracy,seed\n", 0) == 0);
        CHECK_THROWS(curves_from_json(nlohmann::json::object()));
    }
    SUBCASE("paired seeds share one stream across algorithms") {
        auto c = oracle_experiment(0.3, FeedbackMode::bandit);
        c.booster.algorithm = Algorithm::ada;
        const auto ada = run_experiment(c);
        c.booster.algorithm = Algorithm::bbm;
        const auto bbm = run_experiment(c);
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t t = 0; t < 400; ++t) CHECK(ada.runs[i].records[t].y_true == bbm.runs[i].records[t].y_true);
        }
    }
}

TEST_CASE("worker count") {
    ::unsetenv("BANDITBOOST_THREADS");
    CHECK(worker_count(4, 2) == 2);
    CHECK(worker_count(2, 10) == 2);
    CHECK(worker_count(0, 10) >= 1);
    CHECK(worker_count(5, 0) == 1);
    ::setenv("BANDITBOOST_THREADS", "1", 1);
    CHECK(worker_count(8, 8) == 1);
    ::unsetenv("BANDITBOOST_THREADS");
}

TEST_CASE("atomic write") {
    const auto dir = std::filesystem::temp_directory_path() / "banditboost_test_atomic";
    std::filesystem::create_directories(dir);
    const auto path = dir / "out.txt";
    write_file_atomic(path, "first");
    write_file_atomic(path, "second");
    std::ifstream in(path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(text == "second");
    CHECK_FALSE(std::filesystem::exists(dir / "out.txt.tmp"));
    std::filesystem::remove_all(dir);
}
