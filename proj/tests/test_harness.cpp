#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "maddm/harness.hpp"

using namespace maddm;
namespace fs = std::filesystem;

namespace {

ExperimentPlan tiny_plan() {
  ExperimentPlan p;
  p.grid = {0.6, 0.8};
  p.repetitions = 2;
  p.n_decisions = 60;
  p.n_advisors = 12;
  p.review.frequency = 5;
  p.threads = 2;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("maddm_test_" + name);
  fs::remove_all(dir);
  return dir;
}

void check_accounting(const Environment& env, const RunResult& r) {
  REQUIRE(r.trace.size() == env.n_decisions());
  double revenue = 0.0;
  double cost = 0.0;
  std::size_t correct = 0;
  for (const auto& row : r.trace) {
    const auto& d = env.decisions()[row.decision_id];
    CHECK(row.correct == (row.answer == d.truth));
    revenue += row.correct ? d.value.profit : -d.value.loss;
    cost += row.total_cost;
    correct += row.correct;
  }
  CHECK(r.revenue == revenue);
  CHECK(r.total_cost == cost);
  CHECK(r.correct_count == correct);
  CHECK(r.utility == r.revenue - r.total_cost);
}

}  // namespace

TEST_CASE("maddm accounting identity") {
  for (double acc : {0.55, 0.8, 0.95}) {
    auto cfg = make_environment_config(100.0, acc, 3);
    cfg.n_decisions = 150;
    const auto env = generate_environment(cfg);
    for (std::size_t ef : {std::size_t{0}, std::size_t{10}}) {
      MaddmConfig mc;
      mc.exploration_first_rounds = ef;
      RandomSource rng(4);
      const auto r = run_maddm(env, mc, rng, true);
      check_accounting(env, r);
      for (std::size_t d = 0; d < ef; ++d) CHECK(r.trace[d].hired.size() == env.n_advisors());
      for (const auto& row : r.trace) {
        if (row.hired.empty()) {
          CHECK(row.answer == Answer::negative);
          CHECK(row.confidence == 0.0);
          CHECK(row.total_cost == 0.0);
        }
      }
    }
  }
}

TEST_CASE("perfect free advisors") {
  auto cfg = make_environment_config(100.0, 1.0, 8);
  cfg.n_decisions = 200;
  cfg.accuracy.std = 0.0;
  cfg.cost_mean_factor = 0.0;
  cfg.cost_std = 0.0;
  const auto env = generate_environment(cfg);
  RandomSource rng(1);
  const auto r = run_maddm(env, MaddmConfig{}, rng, true);
  check_accounting(env, r);
  // Decisions whose profit and loss both clamp to zero are worth nothing, so
  // nobody is hired for them and the default answer is wrong at no cost.
  double profit = 0.0;
  for (const auto& row : r.trace) {
    const auto& d = env.decisions()[row.decision_id];
    profit += d.value.profit;
    if (d.value.stake() > 0.0) CHECK(row.correct);
    else CHECK(row.hired.empty());
  }
  CHECK(r.total_cost == 0.0);
  CHECK(r.utility == doctest::Approx(profit));
}

TEST_CASE("adversarial advisors still balance the books") {
  auto cfg = make_environment_config(100.0, 0.5, 2);
  cfg.accuracy = {0.0, 0.0, 0.0, 1.0};
  cfg.n_decisions = 100;
  const auto env = generate_environment(cfg);
  RandomSource rng(2);
  const auto r = run_maddm(env, MaddmConfig{}, rng, true);
  check_accounting(env, r);
}

TEST_CASE("seeding") {
  CHECK(cell_seed(1, 0, 0) != cell_seed(1, 0, 1));
  CHECK(cell_seed(1, 0, 1) != cell_seed(1, 1, 0));
  CHECK(cell_seed(1, 2, 3) != cell_seed(2, 2, 3));
  CHECK(method_seed(5, "MADDM") != method_seed(5, "FNA"));
  CHECK(method_seed(5, "MADDM") == method_seed(5, "MADDM"));

  const auto plan = tiny_plan();
  const auto a = cell_environment_config(plan, {0, 1, 1});
  const auto b = cell_environment_config(plan, {1, 1, 1});
  CHECK(a.seed == b.seed);
  CHECK(a.profit.mean == 100.0);
  CHECK(b.profit.mean == 500.0);
  CHECK(a.accuracy.mean == 0.8);
  CHECK(a.n_decisions == 60);
}

TEST_CASE("paired design within a cell") {
  const auto plan = tiny_plan();
  const auto rows = run_cell(plan, {0, 0, 1});
  REQUIRE(rows.size() == plan.methods.size() * plan.exploration_first.size());
  std::set<std::uint64_t> digests;
  for (const auto& r : rows) digests.insert(r.env_digest);
  CHECK(digests.size() == 1);
  const auto other = run_cell(plan, {0, 1, 1});
  CHECK(other.front().env_digest != rows.front().env_digest);

  std::map<std::pair<std::size_t, std::string>, double> u;
  for (const auto& r : rows) u[{r.exploration_first, r.method}] = r.utility;
  for (const auto& [k, v] : u) CHECK(u[{k.first, "BU"}] >= v);
}

TEST_CASE("bu bounds rv in the emitted csv") {
  auto plan = tiny_plan();
  plan.environments = {{"env1", 100.0}};
  plan.grid = {0.7};
  plan.repetitions = 1;
  plan.methods = {"BU", "RV"};
  plan.exploration_first = {0};
  const auto dir = scratch("bu_rv");
  execute_plan(plan, {dir, false, {}});
  std::ifstream in(dir / "results.csv");
  const auto rows = read_results_csv(in);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].method == "BU");
  CHECK(rows[1].method == "RV");
  CHECK(rows[0].utility >= rows[1].utility);
  fs::remove_all(dir);
}

TEST_CASE("execute_plan writes deterministic csv files") {
  const auto plan = tiny_plan();
  const auto d1 = scratch("det1");
  const auto d2 = scratch("det2");
  const auto r1 = execute_plan(plan, {d1, false, {}});
  auto single = plan;
  single.threads = 1;
  execute_plan(single, {d2, false, {}});
  CHECK(r1.size() == 2 * 2 * 2 * 2 * 5);
  for (const char* f : {"results.csv", "summary.csv", "significance.csv"}) {
    CAPTURE(f);
    CHECK(fs::exists(d1 / f));
    CHECK(slurp(d1 / f) == slurp(d2 / f));
  }
  CHECK_FALSE(fs::exists(d1 / "results.partial.csv"));

  const auto results = slurp(d1 / "results.csv");
  CHECK(results.rfind(
            "env,exploration_first,grid_index,grid_point,repetition,method,utility,"
            "utility_per_decision,correct_count,n_decisions,total_cost,hired_count,env_digest\n",
            0) == 0);
  CHECK(slurp(d1 / "summary.csv").rfind("env,exploration_first,grid_point,method,n,", 0) == 0);
  CHECK(slurp(d1 / "significance.csv").rfind("env,exploration_first,grid_point,comparator,", 0) == 0);

  // Round trip through the reader.
  std::ifstream in(d1 / "results.csv");
  const auto back = read_results_csv(in);
  std::ostringstream again;
  write_results_csv(again, back);
  CHECK(again.str() == results);

  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("resume recomputes only missing cells") {
  const auto plan = tiny_plan();
  const auto full = scratch("resume_full");
  const auto part = scratch("resume_part");
  execute_plan(plan, {full, false, {}});
  const auto expected = slurp(full / "results.csv");

  // Simulate an interrupted run: one complete cell plus part of another.
  fs::create_directories(part);
  std::istringstream in(expected);
  std::vector<RunRecord> kept;
  std::size_t extra = 0;
  for (const auto& r : read_results_csv(in)) {
    if (r.env != "env1") continue;
    if (r.grid_index == 0 && r.repetition == 0) kept.push_back(r);
    else if (r.grid_index == 1 && r.repetition == 1 && extra < 3) kept.push_back(r), ++extra;
  }
  REQUIRE(kept.size() == 13);
  std::ofstream partial(part / "results.partial.csv");
  write_results_csv(partial, kept);
  partial.close();

  std::size_t calls = 0;
  std::size_t first_done = 0;
  ExecuteOptions opts{part, true, [&](std::size_t done, std::size_t) {
                        if (calls++ == 0) first_done = done;
                      }};
  execute_plan(plan, opts);
  CHECK(calls == 7);  // 8 cells, one restored
  CHECK(first_done == 2);
  CHECK(slurp(part / "results.csv") == expected);

  // A second resume with everything present does no work.
  calls = 0;
  execute_plan(plan, opts);
  CHECK(calls == 0);
  CHECK(slurp(part / "results.csv") == expected);
  fs::remove_all(full);
  fs::remove_all(part);
}

TEST_CASE("report") {
  const auto plan = tiny_plan();
  const auto records = execute_plan(plan);
  const auto report = build_report(records);
  CHECK(report.summary.size() == 2 * 2 * 2 * 5);
  CHECK(report.significance.size() == 2 * 2 * 2 * 3);
  for (const auto& s : report.summary) {
    CHECK(s.n == 2);
    CHECK(s.ci95_low <= s.mean_utility);
    CHECK(s.ci95_high >= s.mean_utility);
  }
  for (const auto& s : report.significance) {
    CHECK(s.p_value >= 0.0);
    CHECK(s.p_value <= 1.0);
    CHECK(s.threshold == doctest::Approx(0.05 / 3.0));
    CHECK(s.significant == (s.p_value < s.threshold));
  }
}

TEST_CASE("monotone sanity with a free full pool") {
  // Majority vote over every advisor at zero cost.
  const std::vector<double> grid{0.55, 0.65, 0.75, 0.85, 0.95};
  std::vector<double> means;
  std::vector<double> sems;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::vector<double> counts;
    for (std::size_t rep = 0; rep < 10; ++rep) {
      auto cfg = make_environment_config(100.0, grid[g], cell_seed(1, g, rep));
      cfg.n_decisions = 200;
      cfg.cost_mean_factor = 0.0;
      cfg.cost_std = 0.0;
      const auto env = generate_environment(cfg);
      BaselineConfig rv;
      rv.method = BaselineMethod::rv;
      rv.rv_k = env.n_advisors();
      rv.exploration_first_rounds = 0;
      RandomSource rng(rep);
      const auto r = run_baseline(rv, StrategyConfig{}, env, rng);
      CHECK(r.total_cost == 0.0);
      counts.push_back(static_cast<double>(r.correct_count));
    }
    double mean = 0.0;
    for (double c : counts) mean += c;
    mean /= static_cast<double>(counts.size());
    double ss = 0.0;
    for (double c : counts) ss += (c - mean) * (c - mean);
    means.push_back(mean);
    sems.push_back(std::sqrt(ss / static_cast<double>(counts.size() - 1)) /
                   std::sqrt(static_cast<double>(counts.size())));
  }
  for (std::size_t g = 1; g < grid.size(); ++g) {
    CHECK(means[g] + 3.0 * std::hypot(sems[g], sems[g - 1]) >= means[g - 1]);
  }
}

TEST_CASE("trace rows serialize with the documented keys") {
  auto cfg = make_environment_config(100.0, 0.8, 1);
  cfg.n_decisions = 20;
  const auto env = generate_environment(cfg);
  RandomSource rng(1);
  const auto r = run_maddm(env, MaddmConfig{}, rng, true);
  const nlohmann::json j = r.trace.front();
  for (const char* key : {"decision_id", "p_positive", "answer", "confidence", "rounds", "hired",
                          "total_cost", "correct", "utility"}) {
    CHECK(j.contains(key));
  }
  CHECK((j.at("answer") == 1 || j.at("answer") == -1));
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1234567.0) == "1.23457e+06");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(12.5) == "12.5");
  CHECK(format_number(1e-7) == "1e-07");
}

TEST_CASE("plan json") {
  const auto desk = ExperimentPlan::desk_scale();
  CHECK(desk.grid.size() == 10);
  CHECK(desk.grid.front() == 0.55);
  CHECK(desk.grid.back() == 1.0);
  CHECK(desk.repetitions == 20);
  const auto full = ExperimentPlan::full_scale();
  CHECK(full.grid.size() == 50);
  CHECK(full.grid.front() == 0.51);
  CHECK(full.repetitions == 100);

  const nlohmann::json j = desk;
  const auto back = j.get<ExperimentPlan>();
  CHECK(back.grid == desk.grid);
  CHECK(back.methods == desk.methods);

  const auto p = nlohmann::json::parse(
                     R"({"grid":{"start":0.6,"step":0.1,"count":4},"repetitions":3,
                         "methods":["MADDM","BU"],"review":{"frequency":5}})")
                     .get<ExperimentPlan>();
  CHECK(p.grid == std::vector<double>{0.6, 0.7, 0.8, 0.9});
  CHECK(p.repetitions == 3);
  CHECK(p.review.frequency == 5);
  CHECK_THROWS(nlohmann::json::parse(R"({"methods":["XYZ"]})").get<ExperimentPlan>().validate());
  CHECK_THROWS(nlohmann::json::parse(R"({"grid":[0.3]})").get<ExperimentPlan>().validate());
}
