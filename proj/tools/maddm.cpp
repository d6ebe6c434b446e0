// maddm command line: generate environments, run plans, rebuild reports and
// dump per-decision traces.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "maddm/harness.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return json::parse(in);
}

maddm::ExperimentPlan load_plan(const std::string& config, const std::string& preset) {
  if (!config.empty()) return read_json(config).get<maddm::ExperimentPlan>();
  if (preset == "full") return maddm::ExperimentPlan::full_scale();
  return maddm::ExperimentPlan::desk_scale();
}

// Writes to the named file, or stdout for "" / "-".
template <class F>
void with_output(const std::string& path, F&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  write(out);
  if (!out) throw std::runtime_error("failed writing " + path);
}

std::size_t env_index(const maddm::ExperimentPlan& plan, const std::string& name) {
  for (std::size_t i = 0; i < plan.environments.size(); ++i) {
    if (plan.environments[i].name == name) return i;
  }
  throw std::invalid_argument("plan has no environment named '" + name + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-advisor decision making simulator"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Emit one environment realization as JSON");
  std::string gen_config;
  double gen_scale = 100.0;
  double gen_accuracy = 0.8;
  std::uint64_t gen_seed = 0;
  std::optional<std::size_t> gen_decisions;
  std::optional<std::size_t> gen_advisors;
  std::string gen_out;
  gen->add_option("--config", gen_config, "Environment config JSON (overrides the flags below)")
      ->check(CLI::ExistingFile);
  gen->add_option("--value-scale", gen_scale, "Mean and std of profit and loss");
  gen->add_option("--accuracy-mean", gen_accuracy, "Mean hidden advisor accuracy");
  gen->add_option("--seed", gen_seed, "Environment seed");
  gen->add_option("--decisions", gen_decisions, "Number of decisions");
  gen->add_option("--advisors", gen_advisors, "Number of advisors");
  gen->add_option("-o,--out", gen_out, "Output file (default stdout)");

  // run
  auto* run = app.add_subcommand("run", "Execute an experiment plan");
  std::string run_config;
  std::string run_preset = "desk";
  std::string run_out;
  bool run_resume = false;
  std::optional<std::size_t> run_threads;
  bool run_quiet = false;
  run->add_option("--config", run_config, "Plan JSON")->check(CLI::ExistingFile);
  run->add_option("--preset", run_preset, "Built-in plan when no config is given")
      ->check(CLI::IsMember({"desk", "full"}));
  run->add_option("--out-dir", run_out, "Directory for results.csv, summary.csv, significance.csv")
      ->required();
  run->add_flag("--resume", run_resume, "Keep cells already present in the output directory");
  run->add_option("--threads", run_threads, "Worker threads (0 = all cores)");
  run->add_flag("-q,--quiet", run_quiet, "No progress output");

  // report
  auto* rep = app.add_subcommand("report", "Rebuild summary.csv and significance.csv from results.csv");
  std::string rep_results;
  std::string rep_out;
  rep->add_option("results", rep_results, "results.csv")->required()->check(CLI::ExistingFile);
  rep->add_option("--out-dir", rep_out, "Output directory (default: next to results.csv)");

  // trace
  auto* tr = app.add_subcommand("trace", "Dump per-decision rows of one run as JSON lines");
  std::string tr_config;
  std::string tr_preset = "desk";
  std::string tr_env = "env1";
  std::size_t tr_grid = 0;
  std::size_t tr_rep = 0;
  std::string tr_method = "MADDM";
  std::size_t tr_ef = 0;
  std::string tr_out;
  tr->add_option("--config", tr_config, "Plan JSON")->check(CLI::ExistingFile);
  tr->add_option("--preset", tr_preset, "Built-in plan when no config is given")
      ->check(CLI::IsMember({"desk", "full"}));
  tr->add_option("--env", tr_env, "Environment name");
  tr->add_option("--grid-index", tr_grid, "Index into the accuracy grid");
  tr->add_option("--rep", tr_rep, "Repetition index");
  tr->add_option("--method", tr_method, "MADDM, FNA, BC, RV or BU");
  tr->add_option("--exploration-first", tr_ef, "Exploration-first rounds");
  tr->add_option("-o,--out", tr_out, "Output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      maddm::EnvironmentConfig config =
          gen_config.empty() ? maddm::make_environment_config(gen_scale, gen_accuracy, gen_seed)
                             : read_json(gen_config).get<maddm::EnvironmentConfig>();
      if (gen_decisions) config.n_decisions = *gen_decisions;
      if (gen_advisors) config.n_advisors = *gen_advisors;
      const auto env = maddm::generate_environment(config);
      with_output(gen_out, [&](std::ostream& os) {
        os << maddm::environment_to_json(env, config).dump(2) << '\n';
      });
    } else if (run->parsed()) {
      auto plan = load_plan(run_config, run_preset);
      if (run_threads) plan.threads = *run_threads;
      maddm::ExecuteOptions options;
      options.out_dir = run_out;
      options.resume = run_resume;
      if (!run_quiet) {
        options.progress = [](std::size_t done, std::size_t total) {
          std::fprintf(stderr, "\rcells %zu/%zu", done, total);
          if (done == total) std::fputc('\n', stderr);
        };
      }
      const auto records = maddm::execute_plan(plan, options);
      if (!run_quiet) std::fprintf(stderr, "wrote %zu rows to %s\n", records.size(), run_out.c_str());
    } else if (rep->parsed()) {
      std::ifstream in(rep_results);
      const auto records = maddm::read_results_csv(in);
      const fs::path out = rep_out.empty() ? fs::path(rep_results).parent_path() : fs::path(rep_out);
      if (!out.empty()) fs::create_directories(out);
      maddm::write_report(out.empty() ? fs::path(".") : out, maddm::build_report(records));
    } else if (tr->parsed()) {
      const auto plan = load_plan(tr_config, tr_preset);
      plan.validate();
      const maddm::Cell cell{env_index(plan, tr_env), tr_grid, tr_rep};
      if (tr_grid >= plan.grid.size()) throw std::invalid_argument("grid index out of range");
      const auto config = maddm::cell_environment_config(plan, cell);
      const auto env = maddm::generate_environment(config);
      const auto result = maddm::run_method(plan, tr_method, tr_ef, env,
                                            maddm::method_seed(config.seed, tr_method), true);
      with_output(tr_out, [&](std::ostream& os) {
        for (const auto& row : result.trace) os << json(row).dump() << '\n';
      });
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
