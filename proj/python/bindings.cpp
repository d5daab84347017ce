#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "banditboost/boosters.hpp"
#include "banditboost/config.hpp"
#include "banditboost/harness.hpp"
#include "banditboost/potentials.hpp"
#include "banditboost/verify.hpp"

namespace py = pybind11;
namespace bb = banditboost;

namespace {

using Matrix = std::vector<std::vector<double>>;

bb::CostMatrix to_matrix(const Matrix& rows) {
    const std::size_t k = rows.size();
    bb::CostMatrix c(k);
    for (std::size_t i = 0; i < k; ++i) {
        if (rows[i].size() != k) throw bb::InvalidArgument("cost matrix must be square");
        for (std::size_t j = 0; j < k; ++j) c(i, j) = rows[i][j];
    }
    return c;
}

Matrix from_matrix(const bb::CostMatrix& c) {
    Matrix rows(c.k(), std::vector<double>(c.k()));
    for (std::size_t i = 0; i < c.k(); ++i) {
        for (std::size_t j = 0; j < c.k(); ++j) rows[i][j] = c(i, j);
    }
    return rows;
}

std::vector<std::size_t> labels(const std::vector<bb::Label>& ls) {
    std::vector<std::size_t> out;
    for (auto l : ls) out.push_back(l.value());
    return out;
}

// Drives a booster from Python; the label answers the feedback channel.
class PyBooster {
public:
    PyBooster(const std::string& algorithm, const std::string& mode, std::size_t k, std::size_t n_learners,
              double rho, double gamma, const std::string& learner, std::uint64_t seed) {
        bb::BoosterConfig config;
        config.algorithm = bb::parse_algorithm(algorithm);
        config.mode = bb::parse_mode(mode);
        config.n_learners = n_learners;
        config.rho = rho;
        config.gamma = gamma;
        config.seed = seed;
        bb::LearnerConfig lc;
        lc.kind = bb::parse_learner_kind(learner);
        std::vector<std::unique_ptr<bb::WeakLearner>> ls;
        for (std::size_t i = 1; i <= n_learners; ++i) ls.push_back(bb::make_weak_learner(lc, k, i, seed + 1));
        booster_ = std::make_unique<bb::Booster>(config, bb::LabelSpace(k), std::move(ls));
    }

    py::dict round(const std::vector<double>& features, std::size_t label) {
        bb::RoundOutcome o;
        if (booster_->config().mode == bb::FeedbackMode::bandit) {
            bb::HiddenLabelAdversary adv{bb::Label(label)};
            o = booster_->round(features, adv);
        } else {
            bb::RevealingAdversary adv{bb::Label(label)};
            o = booster_->round(features, adv);
        }
        py::dict d;
        d["weak_predictions"] = labels(o.weak_predictions);
        d["expert_predictions"] = labels(o.expert_predictions);
        d["chosen_expert"] = o.chosen_expert;
        d["intermediate"] = o.intermediate.value();
        d["prediction"] = o.final_prediction.value();
        d["correct"] = o.correct;
        d["loss_estimate"] = o.loss_estimate.values;
        return d;
    }

    [[nodiscard]] std::vector<double> alphas() const { return booster_->state().alphas; }
    [[nodiscard]] std::vector<double> hedge_weights() const { return booster_->state().hedge_weights; }
    [[nodiscard]] std::size_t rounds() const { return booster_->state().round; }

private:
    std::unique_ptr<bb::Booster> booster_;
};

std::string run_config(const std::string& path, std::optional<std::vector<std::uint64_t>> seeds,
                       std::optional<double> rho, std::optional<std::size_t> n_learners,
                       std::optional<std::string> algorithm, std::optional<std::string> mode) {
    auto loaded = bb::load_config(path);
    auto& c = loaded.experiment;
    if (seeds) c.seeds = *seeds;
    if (rho) {
        c.booster.rho = *rho;
        c.rho_schedule = bb::RhoSchedule::constant;
    }
    if (n_learners) c.booster.n_learners = *n_learners;
    if (algorithm) c.booster.algorithm = bb::parse_algorithm(*algorithm);
    if (mode) c.booster.mode = bb::parse_mode(*mode);
    py::gil_scoped_release release;
    return bb::report_to_json(bb::run_experiment(c)).dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Online multiclass boosting with bandit feedback";

    auto base = py::register_exception<bb::Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<bb::InvalidParameter>(m, "InvalidParameter", base.ptr());
    py::register_exception<bb::ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<bb::DataError>(m, "DataError", base.ptr());
    py::register_exception<bb::BudgetExceeded>(m, "BudgetExceeded", base.ptr());

    m.def(
        "sampling_distribution",
        [](std::size_t y_hat, std::size_t k, double rho) {
            return bb::sampling_distribution(bb::Label(y_hat), bb::LabelSpace(k), rho).probs;
        },
        py::arg("y_hat"), py::arg("k"), py::arg("rho"));

    m.def(
        "estimate_loss",
        [](std::size_t y_tilde, std::size_t y_hat, bool correct, std::size_t k, double rho, bool simple) {
            const auto dist = bb::sampling_distribution(bb::Label(y_hat), bb::LabelSpace(k), rho);
            const auto est = simple ? bb::estimate_loss_simple(bb::Label(y_tilde), correct, dist)
                                    : bb::estimate_loss(bb::Label(y_tilde), bb::Label(y_hat), correct, dist);
            return est.values;
        },
        py::arg("y_tilde"), py::arg("y_hat"), py::arg("correct"), py::arg("k"), py::arg("rho"),
        py::arg("simple") = false);

    m.def(
        "estimate_cost_vector",
        [](const Matrix& cost, const std::vector<double>& lhat, std::optional<double> clip) {
            return bb::estimate_cost_vector(to_matrix(cost), lhat, clip).values;
        },
        py::arg("cost"), py::arg("lhat"), py::arg("clip") = py::none());

    m.def(
        "potential_exact",
        [](std::size_t y, std::size_t remaining, std::vector<double> s, double gamma, std::uint64_t budget) {
            const std::size_t k = s.size();
            return bb::potential_exact({bb::Label(y), remaining, std::move(s), gamma, k}, budget);
        },
        py::arg("y"), py::arg("remaining"), py::arg("s"), py::arg("gamma"),
        py::arg("budget") = bb::kDefaultEnumerationBudget);

    m.def(
        "potential_mc",
        [](std::size_t y, std::size_t remaining, std::vector<double> s, double gamma, std::size_t samples,
           std::uint64_t seed) {
            const std::size_t k = s.size();
            bb::Rng rng(seed);
            const auto e = bb::potential_mc({bb::Label(y), remaining, std::move(s), gamma, k}, samples, rng);
            return py::make_tuple(e.estimate, e.std_error);
        },
        py::arg("y"), py::arg("remaining"), py::arg("s"), py::arg("gamma"), py::arg("samples") = 10000,
        py::arg("seed") = 0);

    m.def(
        "bbm_cost_matrix",
        [](const std::vector<double>& s_prev, std::size_t learner_index, std::size_t n_learners, double gamma) {
            bb::PotentialEvaluator eval({s_prev.size(), gamma});
            bb::Rng rng(0);
            return from_matrix(bb::bbm_cost_matrix(s_prev, learner_index, n_learners, eval, rng));
        },
        py::arg("s_prev"), py::arg("learner_index"), py::arg("n_learners"), py::arg("gamma"));

    m.def(
        "logistic_cost_matrix",
        [](const std::vector<double>& s) { return from_matrix(bb::logistic_cost_matrix(s, s.size())); },
        py::arg("s"));

    m.def(
        "ada_objective",
        [](double alpha, const std::vector<double>& s, std::size_t h, const std::vector<double>& lhat) {
            const auto f = bb::ada_objective_estimate(alpha, s, bb::Label(h), lhat);
            return py::make_tuple(f.value, f.derivative);
        },
        py::arg("alpha"), py::arg("s"), py::arg("h"), py::arg("lhat"));

    m.def(
        "reduce_cost_vector",
        [](const std::vector<double>& chat, std::optional<std::size_t> known, std::uint64_t seed) {
            bb::Rng rng(seed);
            std::optional<bb::Label> k;
            if (known) k = bb::Label(*known);
            const std::vector<double> no_features;
            const auto u = bb::reduce_cost_vector(no_features, bb::EstimatedCostVector{chat, false}, k, rng);
            return py::make_tuple(u.target_label.value(), u.importance_weight);
        },
        py::arg("chat"), py::arg("known_label") = py::none(), py::arg("seed") = 0);

    m.def(
        "learning_curve",
        [](const std::vector<bool>& correct) {
            std::vector<std::pair<std::size_t, double>> out;
            for (const auto& p : bb::learning_curve(correct)) out.emplace_back(p.round, p.window_accuracy);
            return out;
        },
        py::arg("correct"));

    m.def(
        "parse_csv",
        [](const std::string& text, const std::string& label_column, bool normalize) {
            bb::DatasetSpec spec;
            spec.label_column = label_column;
            spec.normalize = normalize;
            const auto ds = bb::parse_csv(text, spec);
            std::vector<std::vector<double>> x;
            std::vector<std::size_t> y;
            for (const auto& ex : ds.examples) {
                x.push_back(ex.features);
                y.push_back(ex.true_label->value());
            }
            py::dict d;
            d["features"] = x;
            d["labels"] = y;
            d["k"] = ds.k;
            d["label_names"] = ds.label_names;
            d["feature_names"] = ds.feature_names;
            return d;
        },
        py::arg("text"), py::arg("label_column") = "label", py::arg("normalize") = true);

    m.def("_run_config", &run_config, py::arg("path"), py::arg("seeds") = py::none(), py::arg("rho") = py::none(),
          py::arg("n_learners") = py::none(), py::arg("algorithm") = py::none(), py::arg("mode") = py::none());

    m.def(
        "verify",
        [](const std::vector<std::string>& checks) {
            bb::VerifyOptions opt;
            opt.suites = checks;
            py::list out;
            for (const auto& r : bb::run_verify(opt)) {
                py::dict d;
                d["suite"] = r.suite;
                d["name"] = r.name;
                d["observed"] = r.observed;
                d["tolerance"] = r.tolerance;
                d["passed"] = r.passed();
                out.append(d);
            }
            return out;
        },
        py::arg("checks") = std::vector<std::string>{});

    py::class_<PyBooster>(m, "Booster")
        .def(py::init<const std::string&, const std::string&, std::size_t, std::size_t, double, double,
                      const std::string&, std::uint64_t>(),
             py::arg("algorithm") = "ada", py::arg("mode") = "bandit", py::arg("k") = 2, py::arg("n_learners") = 10,
             py::arg("rho") = 0.1, py::arg("gamma") = 0.1, py::arg("learner") = "naive_bayes", py::arg("seed") = 0)
        .def("round", &PyBooster::round, py::arg("features"), py::arg("label"))
        .def_property_readonly("alphas", &PyBooster::alphas)
        .def_property_readonly("hedge_weights", &PyBooster::hedge_weights)
        .def_property_readonly("rounds", &PyBooster::rounds);
}
