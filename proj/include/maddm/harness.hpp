#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "maddm/baselines.hpp"
#include "maddm/bwve.hpp"
#include "maddm/environment.hpp"
#include "maddm/review.hpp"
#include "maddm/run_result.hpp"

namespace maddm {

struct MaddmConfig {
  PriorOdds prior;
  ReviewConfig review;
  bool review_enabled = true;
  std::size_t exploration_first_rounds = 0;  // hire the whole pool for this many decisions
};

/// Full method loop: select advisors, decide, update trust, periodically
/// review the history. Ground truth is used only to book utility.
RunResult run_maddm(const Environment& env, const MaddmConfig& config, RandomSource& rng,
                    bool record_trace = false);

struct EnvironmentTemplate {
  std::string name;
  double value_scale = 100.0;  // mean and std of profit and loss
};

struct ExperimentPlan {
  std::vector<EnvironmentTemplate> environments{{"env1", 100.0}, {"env2", 500.0}};
  std::vector<double> grid;                             // advisor accuracy means
  std::vector<std::size_t> exploration_first{0, 10};    // variants; 0 = standard
  std::vector<std::string> methods{"MADDM", "FNA", "BC", "RV", "BU"};
  std::size_t repetitions = 20;
  std::uint64_t base_seed = 1;
  std::size_t n_decisions = 1000;
  std::size_t n_advisors = 30;
  double accuracy_std = 0.3;
  ReviewConfig review;
  bool review_enabled = true;
  StrategyConfig strategy;
  BaselineConfig baseline;  // exploration_first_rounds is taken from the variant
  std::size_t threads = 0;  // 0 = hardware concurrency

  void validate() const;

  /// 10-point grid (0.55 ... 1.00) x 20 repetitions.
  static ExperimentPlan desk_scale();
  /// 50-point grid (0.51 ... 1.00) x 100 repetitions.
  static ExperimentPlan full_scale();
};

void to_json(nlohmann::json& j, const ExperimentPlan& p);
void from_json(const nlohmann::json& j, ExperimentPlan& p);

/// One environment realization: every variant and method runs against it.
struct Cell {
  std::size_t env_index = 0;
  std::size_t grid_index = 0;
  std::size_t repetition = 0;
};

std::vector<Cell> enumerate_cells(const ExperimentPlan& plan);

/// Seed of the environment realization. Independent of the environment
/// template, so env1 and env2 share advisor draws at the same grid point.
std::uint64_t cell_seed(std::uint64_t base_seed, std::size_t grid_index, std::size_t repetition);

/// Seed of a method's private random stream within a cell.
std::uint64_t method_seed(std::uint64_t cell_seed, const std::string& method);

EnvironmentConfig cell_environment_config(const ExperimentPlan& plan, const Cell& cell);

/// Runs one method against an environment.
RunResult run_method(const ExperimentPlan& plan, const std::string& method,
                     std::size_t exploration_first, const Environment& env, std::uint64_t seed,
                     bool record_trace = false);

// One row of results.csv.
struct RunRecord {
  std::string env;
  std::size_t exploration_first = 0;
  std::size_t grid_index = 0;
  double grid_point = 0.0;
  std::size_t repetition = 0;
  std::string method;
  double utility = 0.0;
  double utility_per_decision = 0.0;
  std::size_t correct_count = 0;
  std::size_t n_decisions = 0;
  double total_cost = 0.0;
  std::size_t hired_count = 0;
  std::uint64_t env_digest = 0;

  /// Rounds floating fields to their CSV representation.
  void canonicalize();
};

/// All rows of one cell, in variant-then-method plan order.
std::vector<RunRecord> run_cell(const ExperimentPlan& plan, const Cell& cell);

struct ExecuteOptions {
  std::filesystem::path out_dir;  // empty: in-memory only
  bool resume = false;            // keep complete cells found in out_dir
  std::function<void(std::size_t done, std::size_t total)> progress;
};

/// Runs every missing cell of the plan and returns all rows in canonical
/// order. With an output directory, completed cells are appended to
/// results.partial.csv as they finish and results.csv, summary.csv and
/// significance.csv are written at the end.
std::vector<RunRecord> execute_plan(const ExperimentPlan& plan, const ExecuteOptions& options = {});

struct SummaryRow {
  std::string env;
  std::size_t exploration_first = 0;
  double grid_point = 0.0;
  std::string method;
  std::size_t n = 0;
  double mean_utility = 0.0;
  double std_utility = 0.0;
  double ci95_low = 0.0;
  double ci95_high = 0.0;
  double mean_utility_per_decision = 0.0;
};

struct SignificanceRow {
  std::string env;
  std::size_t exploration_first = 0;
  double grid_point = 0.0;
  std::string comparator;
  double u_statistic = 0.0;
  double p_value = 1.0;
  double threshold = 0.05 / 3.0;
  bool significant = false;
};

struct ComparisonReport {
  std::vector<SummaryRow> summary;
  std::vector<SignificanceRow> significance;
};

/// Per (env, variant, grid point, method) statistics and MADDM-vs-comparator
/// Mann-Whitney tests (FNA, BC, RV; Bonferroni threshold 0.05/3).
ComparisonReport build_report(const std::vector<RunRecord>& records);

std::string format_number(double v);

void write_results_csv(std::ostream& os, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_results_csv(std::istream& is);
void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows);
void write_significance_csv(std::ostream& os, const std::vector<SignificanceRow>& rows);

/// Writes summary.csv and significance.csv into `dir`.
void write_report(const std::filesystem::path& dir, const ComparisonReport& report);

}  // namespace maddm
