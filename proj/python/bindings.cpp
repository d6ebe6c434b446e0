#include <pybind11/functional.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "maddm/harness.hpp"
#include "maddm/stats.hpp"

namespace py = pybind11;
using namespace maddm;

namespace {

// Answers cross the boundary as +1 / -1.
Answer to_answer(int a) {
  if (a == 1) return Answer::positive;
  if (a == -1) return Answer::negative;
  throw py::value_error("answer must be 1 or -1");
}

py::dict outcome_dict(const EnsembleOutcome& o) {
  py::dict d;
  d["p_positive"] = o.p_positive;
  d["p_negative"] = o.p_negative;
  d["answer"] = to_int(o.answer);
  d["confidence"] = o.confidence;
  return d;
}

py::dict result_dict(const RunResult& r) {
  py::dict d;
  d["method"] = r.method;
  d["utility"] = r.utility;
  d["revenue"] = r.revenue;
  d["total_cost"] = r.total_cost;
  d["correct_count"] = r.correct_count;
  d["n_decisions"] = r.n_decisions;
  d["hired_count"] = r.hired_count;
  if (!r.trace.empty()) {
    nlohmann::json rows = r.trace;
    d["trace"] = py::module_::import("json").attr("loads")(rows.dump());
  }
  return d;
}

ExperimentPlan plan_from(const std::string& text) {
  return text.empty() ? ExperimentPlan::desk_scale() : nlohmann::json::parse(text).get<ExperimentPlan>();
}

}  // namespace

PYBIND11_MODULE(_maddm, m) {
  m.doc() = "Trust-aware advisor selection and decision aggregation";

  py::register_exception<UnknownAdvisorError>(m, "UnknownAdvisorError", PyExc_KeyError);

  py::class_<RandomSource>(m, "RandomSource")
      .def(py::init<std::uint64_t>(), py::arg("seed") = 0)
      .def("uniform", &RandomSource::uniform)
      .def("beta", &RandomSource::beta, py::arg("a"), py::arg("b"));

  py::class_<TrustRecord>(m, "TrustRecord")
      .def(py::init([](double a, double b) { return TrustRecord{a, b}; }), py::arg("alpha") = 1.0,
           py::arg("beta") = 1.0)
      .def_readwrite("alpha", &TrustRecord::alpha)
      .def_readwrite("beta", &TrustRecord::beta)
      .def_property_readonly("trustworthiness", [](const TrustRecord& r) { return trustworthiness(r); })
      .def_property_readonly("uncertainty", [](const TrustRecord& r) { return uncertainty(r); })
      .def("__repr__", [](const TrustRecord& r) {
        return "TrustRecord(alpha=" + std::to_string(r.alpha) + ", beta=" + std::to_string(r.beta) + ")";
      });

  py::class_<TrustVector>(m, "TrustVector")
      .def(py::init<std::size_t>(), py::arg("n_advisors"))
      .def(py::init<std::vector<TrustRecord>>(), py::arg("records"))
      .def("__len__", &TrustVector::size)
      .def("__getitem__", [](const TrustVector& t, AdvisorId id) { return t.at(id); })
      .def("__setitem__", [](TrustVector& t, AdvisorId id, const TrustRecord& r) { t.at(id) = r; })
      .def("tau", &TrustVector::tau)
      .def("theta", &TrustVector::theta)
      .def_property_readonly("records", &TrustVector::records)
      .def("to_json", [](const TrustVector& t) { return nlohmann::json(t).dump(); })
      .def_static("from_json",
                  [](const std::string& s) { return nlohmann::json::parse(s).get<TrustVector>(); })
      .def(py::self == py::self);

  py::class_<AnswerSet>(m, "AnswerSet")
      .def(py::init<>())
      .def(py::init<std::vector<AdvisorId>, std::vector<AdvisorId>>(), py::arg("positives"),
           py::arg("negatives"))
      .def("add", [](AnswerSet& s, AdvisorId id, int a) { s.add(id, to_answer(a)); })
      .def_property_readonly("positives", &AnswerSet::positives)
      .def_property_readonly("negatives", &AnswerSet::negatives)
      .def("flipped", &AnswerSet::flipped)
      .def("__len__", &AnswerSet::size)
      .def("__contains__", &AnswerSet::contains);

  m.def("thompson_sample", &thompson_sample, py::arg("record"), py::arg("rng"));
  m.def(
      "apply_confidence_update",
      [](TrustVector& t, const AnswerSet& s, int answer, double confidence) {
        apply_confidence_update(t, s, to_answer(answer), confidence);
      },
      py::arg("trust"), py::arg("answers"), py::arg("answer"), py::arg("confidence"));

  m.def(
      "bayesian_probabilities",
      [](const AnswerSet& s, const TrustVector& t) {
        const auto p = bayesian_probabilities(s, t);
        return std::make_pair(p.p_plus, p.p_minus);
      },
      py::arg("answers"), py::arg("trust"));
  m.def(
      "weighted_voting_probabilities",
      [](const AnswerSet& s, const TrustVector& t) {
        const auto p = weighted_voting_probabilities(s, t);
        return std::make_pair(p.p_plus, p.p_minus);
      },
      py::arg("answers"), py::arg("trust"));
  m.def(
      "ensemble_decide",
      [](const AnswerSet& s, const TrustVector& t) { return outcome_dict(ensemble_decide(s, t)); },
      py::arg("answers"), py::arg("trust"));
  m.def(
      "decide_and_update",
      [](const AnswerSet& s, TrustVector& t) { return outcome_dict(decide_and_update(s, t)); },
      py::arg("answers"), py::arg("trust"));

  m.def(
      "marginal_contribution",
      [](AdvisorId id, double cost, double sampled_trust, const AnswerSet& current,
         const TrustVector& t, double profit, double loss) {
        return marginal_contribution({id, cost}, sampled_trust, current, t, {profit, loss});
      },
      py::arg("candidate"), py::arg("cost"), py::arg("sampled_trust"), py::arg("current"),
      py::arg("trust"), py::arg("profit"), py::arg("loss"));
  m.def(
      "select_advisors",
      [](double profit, double loss, const std::vector<double>& costs, const TrustVector& t,
         const std::function<int(AdvisorId)>& oracle, RandomSource& rng) {
        std::vector<AdvisorOffer> pool;
        for (std::size_t i = 0; i < costs.size(); ++i) pool.push_back({i, costs[i]});
        const auto out = select_advisors(
            {profit, loss}, pool, t, {}, [&](AdvisorId x) { return to_answer(oracle(x)); }, rng);
        py::dict d;
        d["answers"] = out.answers;
        d["hired"] = out.hired;
        d["total_cost"] = out.total_cost;
        d["rounds"] = out.rounds;
        return d;
      },
      py::arg("profit"), py::arg("loss"), py::arg("costs"), py::arg("trust"), py::arg("oracle"),
      py::arg("rng"),
      "Costs are indexed by advisor id; the oracle maps an id to its answer (1 or -1).");

  m.def(
      "review_update",
      [](const std::vector<AnswerSet>& history, const TrustVector& t, const std::string& config) {
        DecisionHistory h;
        for (std::size_t d = 0; d < history.size(); ++d) h.append(d, history[d]);
        const auto cfg = config.empty() ? ReviewConfig{} : nlohmann::json::parse(config).get<ReviewConfig>();
        const auto r = review_update(h, t, cfg);
        return py::make_tuple(r.trust, r.passes_used, r.final_delta_tau);
      },
      py::arg("history"), py::arg("trust"), py::arg("config") = "",
      "Returns (trust, passes_used, final_delta_tau). config is a JSON object.");

  m.def(
      "em_aggregate",
      [](const std::vector<AnswerSet>& matrix, std::size_t n_advisors, double init_accuracy) {
        const auto s = em_aggregate(matrix, em_initial_state(n_advisors, init_accuracy));
        py::dict d;
        d["accuracies"] = s.accuracies;
        d["posteriors"] = s.posteriors;
        d["objective"] = s.objective;
        d["iterations"] = s.iterations;
        return d;
      },
      py::arg("matrix"), py::arg("n_advisors"), py::arg("init_accuracy") = 0.6);

  m.def(
      "generate_environment",
      [](double value_scale, double accuracy_mean, std::uint64_t seed, std::size_t n_decisions,
         std::size_t n_advisors) {
        auto c = make_environment_config(value_scale, accuracy_mean, seed);
        c.n_decisions = n_decisions;
        c.n_advisors = n_advisors;
        return environment_to_json(generate_environment(c), c).dump();
      },
      py::arg("value_scale") = 100.0, py::arg("accuracy_mean") = 0.8, py::arg("seed") = 0,
      py::arg("n_decisions") = 1000, py::arg("n_advisors") = 30,
      "Environment realization as a JSON string.");

  m.def(
      "run_method",
      [](const std::string& method, double value_scale, double accuracy_mean, std::uint64_t seed,
         std::size_t n_decisions, std::size_t exploration_first, bool trace) {
        ExperimentPlan plan;
        auto c = make_environment_config(value_scale, accuracy_mean, seed);
        c.n_decisions = n_decisions;
        const auto env = generate_environment(c);
        return result_dict(run_method(plan, method, exploration_first, env, method_seed(seed, method), trace));
      },
      py::arg("method"), py::arg("value_scale") = 100.0, py::arg("accuracy_mean") = 0.8,
      py::arg("seed") = 0, py::arg("n_decisions") = 1000, py::arg("exploration_first") = 0,
      py::arg("trace") = false);

  m.def(
      "execute_plan",
      [](const std::string& plan_json, const std::string& out_dir, bool resume) {
        const auto plan = plan_from(plan_json);
        std::vector<RunRecord> rows;
        {
          py::gil_scoped_release release;
          rows = execute_plan(plan, {out_dir, resume, {}});
        }
        py::list out;
        for (const auto& r : rows) {
          py::dict d;
          d["env"] = r.env;
          d["exploration_first"] = r.exploration_first;
          d["grid_point"] = r.grid_point;
          d["repetition"] = r.repetition;
          d["method"] = r.method;
          d["utility"] = r.utility;
          d["correct_count"] = r.correct_count;
          d["total_cost"] = r.total_cost;
          d["hired_count"] = r.hired_count;
          d["env_digest"] = r.env_digest;
          out.append(d);
        }
        return out;
      },
      py::arg("plan_json") = "", py::arg("out_dir") = "", py::arg("resume") = false,
      "Runs a plan given as a JSON string (empty: desk-scale defaults).");

  m.def(
      "mann_whitney_u",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        const auto r = mann_whitney_u(a, b);
        return py::make_tuple(r.u, r.p);
      },
      py::arg("a"), py::arg("b"));
}
