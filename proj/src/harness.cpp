#include "maddm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "maddm/stats.hpp"

namespace maddm {

// ---------------------------------------------------------------------------
// MADDM run loop

RunResult run_maddm(const Environment& env, const MaddmConfig& config, RandomSource& rng,
                    bool record_trace) {
  if (config.review_enabled) config.review.validate();
  RunResult result;
  result.method = "MADDM";
  const auto offers = env.offers();
  TrustVector trust(env.n_advisors());
  DecisionHistory history;

  for (const auto& decision : env.decisions()) {
    const DecisionId d = decision.id;
    SelectionOutcome selection;
    if (d < config.exploration_first_rounds) {
      for (const auto& offer : offers) {
        selection.answers.add(offer.id, env.answer(offer.id, d));
        selection.hired.push_back(offer.id);
        selection.total_cost += offer.cost;
      }
    } else {
      selection = select_advisors(
          decision.value, offers, trust, config.prior,
          [&env, d](AdvisorId id) { return env.answer(id, d); }, rng);
    }

    // Nobody hired: the decision still needs an answer; fall back to the
    // tie rule with zero confidence.
    EnsembleOutcome outcome;
    if (!selection.answers.empty()) {
      outcome = decide_and_update(selection.answers, trust, config.prior);
      history.append(d, selection.answers);
    }
    if (config.review_enabled && !history.empty() && (d + 1) % config.review.frequency == 0) {
      trust = review_update(history, trust, config.review, config.prior).trust;
    }

    const double u = result.book(decision.value, outcome.answer, decision.truth,
                                 selection.total_cost);
    result.hired_count += selection.hired.size();
    if (record_trace) {
      TraceRow row;
      row.decision_id = d;
      row.p_positive = outcome.p_positive;
      row.answer = outcome.answer;
      row.confidence = outcome.confidence;
      row.rounds = selection.rounds;
      row.hired = std::move(selection.hired);
      row.total_cost = selection.total_cost;
      row.correct = outcome.answer == decision.truth;
      row.utility = u;
      result.trace.push_back(std::move(row));
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Plans

namespace {

std::vector<double> linear_grid(double start, double step, std::size_t count) {
  std::vector<double> g(count);
  for (std::size_t k = 0; k < count; ++k) {
    // Snap to 1e-6 so that printed grid points are exact.
    g[k] = std::round((start + step * static_cast<double>(k)) * 1e6) / 1e6;
  }
  return g;
}

template <class T>
std::size_t index_of(const std::vector<T>& v, const T& x) {
  const auto it = std::find(v.begin(), v.end(), x);
  if (it == v.end()) throw std::invalid_argument("value not part of the plan");
  return static_cast<std::size_t>(it - v.begin());
}

bool is_known_method(const std::string& m) {
  return m == "MADDM" || m == "FNA" || m == "BC" || m == "RV" || m == "BU";
}

}  // namespace

void ExperimentPlan::validate() const {
  if (environments.empty()) throw std::invalid_argument("plan has no environments");
  for (const auto& e : environments) {
    if (e.name.empty() || e.name.find_first_of(",\n\"") != std::string::npos) {
      throw std::invalid_argument("environment names must be non-empty and CSV-safe");
    }
    if (!(e.value_scale >= 0.0)) throw std::invalid_argument("value_scale must be >= 0");
  }
  if (grid.empty()) throw std::invalid_argument("plan has an empty accuracy grid");
  for (double g : grid) {
    if (!(g >= 0.5 && g <= 1.0)) throw std::invalid_argument("grid means must lie in [0.5, 1]");
  }
  if (exploration_first.empty()) throw std::invalid_argument("plan has no variants");
  if (methods.empty()) throw std::invalid_argument("plan has no methods");
  for (const auto& m : methods) {
    if (!is_known_method(m)) throw std::invalid_argument("unknown method '" + m + "'");
  }
  if (repetitions == 0) throw std::invalid_argument("repetitions must be >= 1");
  if (n_decisions == 0 || n_advisors == 0) throw std::invalid_argument("empty environment");
  if (review_enabled) review.validate();
  strategy.validate();
  baseline.validate();
}

ExperimentPlan ExperimentPlan::desk_scale() {
  ExperimentPlan p;
  p.grid = linear_grid(0.55, 0.05, 10);
  p.repetitions = 20;
  return p;
}

ExperimentPlan ExperimentPlan::full_scale() {
  ExperimentPlan p;
  p.grid = linear_grid(0.51, 0.01, 50);
  p.repetitions = 100;
  return p;
}

void to_json(nlohmann::json& j, const ExperimentPlan& p) {
  nlohmann::json envs = nlohmann::json::array();
  for (const auto& e : p.environments) envs.push_back({{"name", e.name}, {"value_scale", e.value_scale}});
  j = nlohmann::json{{"environments", envs},
                     {"grid", p.grid},
                     {"exploration_first", p.exploration_first},
                     {"methods", p.methods},
                     {"repetitions", p.repetitions},
                     {"base_seed", p.base_seed},
                     {"n_decisions", p.n_decisions},
                     {"n_advisors", p.n_advisors},
                     {"accuracy_std", p.accuracy_std},
                     {"review", p.review},
                     {"review_enabled", p.review_enabled},
                     {"strategy", p.strategy},
                     {"fna_k", p.baseline.fna_k},
                     {"bc_budget_fraction", p.baseline.bc_budget_fraction},
                     {"rv_k", p.baseline.rv_k},
                     {"threads", p.threads}};
}

void from_json(const nlohmann::json& j, ExperimentPlan& p) {
  p = ExperimentPlan::desk_scale();
  if (j.contains("environments")) {
    p.environments.clear();
    for (const auto& e : j.at("environments")) {
      p.environments.push_back({e.at("name").get<std::string>(), e.at("value_scale").get<double>()});
    }
  }
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    if (g.is_array()) {
      p.grid = g.get<std::vector<double>>();
    } else {
      p.grid = linear_grid(g.at("start").get<double>(), g.at("step").get<double>(),
                           g.at("count").get<std::size_t>());
    }
  }
  if (j.contains("exploration_first")) {
    p.exploration_first = j.at("exploration_first").get<std::vector<std::size_t>>();
  }
  if (j.contains("methods")) p.methods = j.at("methods").get<std::vector<std::string>>();
  p.repetitions = j.value("repetitions", p.repetitions);
  p.base_seed = j.value("base_seed", p.base_seed);
  p.n_decisions = j.value("n_decisions", p.n_decisions);
  p.n_advisors = j.value("n_advisors", p.n_advisors);
  p.accuracy_std = j.value("accuracy_std", p.accuracy_std);
  if (j.contains("review")) p.review = j.at("review").get<ReviewConfig>();
  p.review_enabled = j.value("review_enabled", p.review_enabled);
  if (j.contains("strategy")) p.strategy = j.at("strategy").get<StrategyConfig>();
  p.baseline.fna_k = j.value("fna_k", p.baseline.fna_k);
  p.baseline.bc_budget_fraction = j.value("bc_budget_fraction", p.baseline.bc_budget_fraction);
  p.baseline.rv_k = j.value("rv_k", p.baseline.rv_k);
  p.threads = j.value("threads", p.threads);
  p.validate();
}

// ---------------------------------------------------------------------------
// Cells

std::vector<Cell> enumerate_cells(const ExperimentPlan& plan) {
  std::vector<Cell> cells;
  cells.reserve(plan.environments.size() * plan.grid.size() * plan.repetitions);
  for (std::size_t e = 0; e < plan.environments.size(); ++e) {
    for (std::size_t g = 0; g < plan.grid.size(); ++g) {
      for (std::size_t r = 0; r < plan.repetitions; ++r) cells.push_back({e, g, r});
    }
  }
  return cells;
}

std::uint64_t cell_seed(std::uint64_t base_seed, std::size_t grid_index, std::size_t repetition) {
  return derive_seed(base_seed, {grid_index, repetition});
}

std::uint64_t method_seed(std::uint64_t cell_seed, const std::string& method) {
  return derive_seed(cell_seed, {hash_name(method)});
}

EnvironmentConfig cell_environment_config(const ExperimentPlan& plan, const Cell& cell) {
  auto c = make_environment_config(plan.environments.at(cell.env_index).value_scale,
                                   plan.grid.at(cell.grid_index),
                                   cell_seed(plan.base_seed, cell.grid_index, cell.repetition));
  c.n_decisions = plan.n_decisions;
  c.n_advisors = plan.n_advisors;
  c.accuracy.std = plan.accuracy_std;
  return c;
}

RunResult run_method(const ExperimentPlan& plan, const std::string& method,
                     std::size_t exploration_first, const Environment& env, std::uint64_t seed,
                     bool record_trace) {
  RandomSource rng(seed);
  if (method == "MADDM") {
    MaddmConfig config;
    config.review = plan.review;
    config.review_enabled = plan.review_enabled;
    config.exploration_first_rounds = exploration_first;
    return run_maddm(env, config, rng, record_trace);
  }
  BaselineConfig baseline = plan.baseline;
  baseline.exploration_first_rounds = exploration_first;
  if (method == "FNA") {
    baseline.method = BaselineMethod::fna;
  } else if (method == "BC") {
    baseline.method = BaselineMethod::bc;
  } else if (method == "RV") {
    baseline.method = BaselineMethod::rv;
  } else if (method == "BU") {
    baseline.method = BaselineMethod::bu;
  } else {
    throw std::invalid_argument("unknown method '" + method + "'");
  }
  return run_baseline(baseline, plan.strategy, env, rng, record_trace);
}

void RunRecord::canonicalize() {
  auto round = [](double v) { return std::stod(format_number(v)); };
  grid_point = round(grid_point);
  utility = round(utility);
  utility_per_decision = round(utility_per_decision);
  total_cost = round(total_cost);
}

std::vector<RunRecord> run_cell(const ExperimentPlan& plan, const Cell& cell) {
  const auto config = cell_environment_config(plan, cell);
  const Environment env = generate_environment(config);
  const auto digest = env.digest();

  std::vector<RunRecord> rows;
  for (auto ef : plan.exploration_first) {
    for (const auto& method : plan.methods) {
      const auto result = run_method(plan, method, ef, env, method_seed(config.seed, method));
      RunRecord r;
      r.env = plan.environments[cell.env_index].name;
      r.exploration_first = ef;
      r.grid_index = cell.grid_index;
      r.grid_point = plan.grid[cell.grid_index];
      r.repetition = cell.repetition;
      r.method = method;
      r.utility = result.utility;
      r.utility_per_decision = result.utility / static_cast<double>(result.n_decisions);
      r.correct_count = result.correct_count;
      r.n_decisions = result.n_decisions;
      r.total_cost = result.total_cost;
      r.hired_count = result.hired_count;
      r.env_digest = digest;
      r.canonicalize();
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// CSV

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  std::string s(buf);
  if (s == "-0") s = "0";
  return s;
}

namespace {

constexpr const char* kResultsHeader =
    "env,exploration_first,grid_index,grid_point,repetition,method,utility,"
    "utility_per_decision,correct_count,n_decisions,total_cost,hired_count,env_digest";

std::string hex_digest(std::uint64_t d) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, d);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

using RecordKey = std::tuple<std::string, std::size_t, std::size_t, std::size_t, std::string>;

RecordKey key_of(const RunRecord& r) {
  return {r.env, r.exploration_first, r.grid_index, r.repetition, r.method};
}

void sort_canonical(const ExperimentPlan& plan, std::vector<RunRecord>& records) {
  std::vector<std::string> env_names;
  for (const auto& e : plan.environments) env_names.push_back(e.name);
  auto rank = [&](const RunRecord& r) {
    return std::make_tuple(index_of(env_names, r.env), index_of(plan.exploration_first, r.exploration_first),
                           r.grid_index, r.repetition, index_of(plan.methods, r.method));
  };
  std::stable_sort(records.begin(), records.end(),
                   [&](const RunRecord& a, const RunRecord& b) { return rank(a) < rank(b); });
}

}  // namespace

void write_results_csv(std::ostream& os, const std::vector<RunRecord>& records) {
  os << kResultsHeader << '\n';
  for (const auto& r : records) {
    os << r.env << ',' << r.exploration_first << ',' << r.grid_index << ','
       << format_number(r.grid_point) << ',' << r.repetition << ',' << r.method << ','
       << format_number(r.utility) << ',' << format_number(r.utility_per_decision) << ','
       << r.correct_count << ',' << r.n_decisions << ',' << format_number(r.total_cost) << ','
       << r.hired_count << ',' << hex_digest(r.env_digest) << '\n';
  }
}

std::vector<RunRecord> read_results_csv(std::istream& is) {
  std::vector<RunRecord> out;
  std::string line;
  if (!std::getline(is, line)) return out;
  if (line != kResultsHeader) throw std::runtime_error("unexpected results.csv header");
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 13) {
      throw std::runtime_error("malformed results.csv line " + std::to_string(line_no));
    }
    RunRecord r;
    try {
      r.env = f[0];
      r.exploration_first = std::stoull(f[1]);
      r.grid_index = std::stoull(f[2]);
      r.grid_point = std::stod(f[3]);
      r.repetition = std::stoull(f[4]);
      r.method = f[5];
      r.utility = std::stod(f[6]);
      r.utility_per_decision = std::stod(f[7]);
      r.correct_count = std::stoull(f[8]);
      r.n_decisions = std::stoull(f[9]);
      r.total_cost = std::stod(f[10]);
      r.hired_count = std::stoull(f[11]);
      r.env_digest = std::stoull(f[12], nullptr, 16);
    } catch (const std::logic_error&) {
      throw std::runtime_error("malformed results.csv line " + std::to_string(line_no));
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << "env,exploration_first,grid_point,method,n,mean_utility,std_utility,ci95_low,ci95_high,"
        "mean_utility_per_decision\n";
  for (const auto& r : rows) {
    os << r.env << ',' << r.exploration_first << ',' << format_number(r.grid_point) << ','
       << r.method << ',' << r.n << ',' << format_number(r.mean_utility) << ','
       << format_number(r.std_utility) << ',' << format_number(r.ci95_low) << ','
       << format_number(r.ci95_high) << ',' << format_number(r.mean_utility_per_decision) << '\n';
  }
}

void write_significance_csv(std::ostream& os, const std::vector<SignificanceRow>& rows) {
  os << "env,exploration_first,grid_point,comparator,u_statistic,p_value,bonferroni_threshold,"
        "significant\n";
  for (const auto& r : rows) {
    os << r.env << ',' << r.exploration_first << ',' << format_number(r.grid_point) << ','
       << r.comparator << ',' << format_number(r.u_statistic) << ',' << format_number(r.p_value)
       << ',' << format_number(r.threshold) << ',' << (r.significant ? 1 : 0) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Report

ComparisonReport build_report(const std::vector<RunRecord>& records) {
  // Groups in first-appearance order.
  using GroupKey = std::tuple<std::string, std::size_t, double>;
  std::vector<GroupKey> groups;
  std::map<GroupKey, std::vector<std::string>> methods_of;
  std::map<std::tuple<std::string, std::size_t, double, std::string>, std::vector<const RunRecord*>>
      rows_of;
  for (const auto& r : records) {
    const GroupKey g{r.env, r.exploration_first, r.grid_point};
    if (!methods_of.count(g)) groups.push_back(g);
    auto& ms = methods_of[g];
    if (std::find(ms.begin(), ms.end(), r.method) == ms.end()) ms.push_back(r.method);
    rows_of[{r.env, r.exploration_first, r.grid_point, r.method}].push_back(&r);
  }

  ComparisonReport report;
  for (const auto& g : groups) {
    const auto& [env, ef, point] = g;
    std::map<std::string, std::vector<double>> utilities;
    for (const auto& method : methods_of[g]) {
      std::vector<double> u;
      std::vector<double> per_decision;
      for (const auto* r : rows_of[{env, ef, point, method}]) {
        u.push_back(r->utility);
        per_decision.push_back(r->utility_per_decision);
      }
      const auto s = summarize(u);
      const auto pd = summarize(per_decision);
      report.summary.push_back({env, ef, point, method, s.n, s.mean, s.std, s.ci_low, s.ci_high,
                                pd.mean});
      utilities[method] = std::move(u);
    }
    if (!utilities.count("MADDM")) continue;
    for (const char* comparator : {"FNA", "BC", "RV"}) {
      if (!utilities.count(comparator)) continue;
      const auto t = mann_whitney_u(utilities["MADDM"], utilities[comparator]);
      SignificanceRow row;
      row.env = env;
      row.exploration_first = ef;
      row.grid_point = point;
      row.comparator = comparator;
      row.u_statistic = t.u;
      row.p_value = t.p;
      row.significant = t.p < row.threshold;
      report.significance.push_back(row);
    }
  }
  return report;
}

void write_report(const std::filesystem::path& dir, const ComparisonReport& report) {
  std::ofstream summary(dir / "summary.csv");
  write_summary_csv(summary, report.summary);
  std::ofstream significance(dir / "significance.csv");
  write_significance_csv(significance, report.significance);
  if (!summary || !significance) {
    throw std::runtime_error("failed writing report files into " + dir.string());
  }
}

// ---------------------------------------------------------------------------
// Plan execution

namespace {

std::vector<RunRecord> load_rows(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) return {};
  std::ifstream in(path);
  return read_results_csv(in);
}

}  // namespace

std::vector<RunRecord> execute_plan(const ExperimentPlan& plan, const ExecuteOptions& options) {
  plan.validate();
  const auto cells = enumerate_cells(plan);
  const bool on_disk = !options.out_dir.empty();
  const auto results_path = options.out_dir / "results.csv";
  const auto partial_path = options.out_dir / "results.partial.csv";
  if (on_disk) std::filesystem::create_directories(options.out_dir);

  // Previously completed rows, deduplicated by key.
  std::map<RecordKey, RunRecord> existing;
  if (on_disk && options.resume) {
    for (const auto& path : {results_path, partial_path}) {
      for (auto& r : load_rows(path)) existing.emplace(key_of(r), std::move(r));
    }
  }
  auto complete = [&](const Cell& c) {
    const auto& env = plan.environments[c.env_index].name;
    for (auto ef : plan.exploration_first) {
      for (const auto& m : plan.methods) {
        if (!existing.count({env, ef, c.grid_index, c.repetition, m})) return false;
      }
    }
    return true;
  };

  std::vector<RunRecord> records;
  std::vector<Cell> todo;
  for (const auto& c : cells) {
    if (complete(c)) {
      const auto& env = plan.environments[c.env_index].name;
      for (auto ef : plan.exploration_first) {
        for (const auto& m : plan.methods) {
          records.push_back(existing.at({env, ef, c.grid_index, c.repetition, m}));
        }
      }
    } else {
      todo.push_back(c);
    }
  }

  std::ofstream partial;
  if (on_disk) {
    const bool fresh = !options.resume || !std::filesystem::exists(partial_path);
    partial.open(partial_path, fresh ? std::ios::trunc : std::ios::app);
    if (!partial) throw std::runtime_error("cannot open " + partial_path.string());
    if (fresh) partial << kResultsHeader << '\n';
  }

  std::vector<std::vector<RunRecord>> computed(todo.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex mu;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t i = next++; i < todo.size(); i = next++) {
      const auto& c = todo[i];
      try {
        computed[i] = run_cell(plan, c);
        std::lock_guard lock(mu);
        if (on_disk) {
          for (const auto& r : computed[i]) {
            std::vector<RunRecord> one{r};
            std::ostringstream line;
            write_results_csv(line, one);
            const auto text = line.str();
            partial << text.substr(text.find('\n') + 1);
          }
          partial.flush();
          if (!partial) {
            throw std::runtime_error("failed writing " + partial_path.string());
          }
        }
        const auto finished = ++done;
        if (options.progress) options.progress(finished + (cells.size() - todo.size()), cells.size());
      } catch (const std::exception& e) {
        std::lock_guard lock(mu);
        if (!failure) {
          failure = std::make_exception_ptr(std::runtime_error(
              "cell " + plan.environments[c.env_index].name + "/grid " +
              std::to_string(c.grid_index) + "/rep " + std::to_string(c.repetition) + ": " +
              e.what()));
        }
        next = todo.size();
      }
    }
  };

  std::size_t n_threads = plan.threads ? plan.threads : std::thread::hardware_concurrency();
  n_threads = std::clamp<std::size_t>(n_threads, 1, std::max<std::size_t>(1, todo.size()));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (auto& rows : computed) {
    for (auto& r : rows) records.push_back(std::move(r));
  }
  sort_canonical(plan, records);

  if (on_disk) {
    {
      std::ofstream out(results_path, std::ios::trunc);
      write_results_csv(out, records);
      if (!out) throw std::runtime_error("failed writing " + results_path.string());
    }
    partial.close();
    std::filesystem::remove(partial_path);
    write_report(options.out_dir, build_report(records));
  }
  return records;
}

}  // namespace maddm
