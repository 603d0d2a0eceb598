#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "adarem/config.hpp"
#include "adarem/optim.hpp"
#include "adarem/problems.hpp"
#include "adarem/theory.hpp"

namespace adarem {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kStepCsvHeader = "step,loss,lr_min,lr_mean,lr_max,grad_norm";

// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitNumeric = 3,
  kExitVerification = 4,
};

struct RunSummary {
  double final_loss = 0.0;  // loss of the last CSV row
  std::optional<double> q;
  std::size_t n_included = 0;
  std::size_t n_excluded = 0;
  std::optional<double> regret;
  std::optional<double> bound;
  std::optional<std::size_t> steps_to_threshold;
  double wall_time = 0.0;
  std::size_t steps_completed = 0;
  std::vector<double> epoch_losses;  // mean CSV loss per epoch
  nlohmann::json config;
  std::string version = kVersion;
  std::optional<std::string> error;  // numeric failure, if the run stopped early

  bool ok() const { return !error.has_value(); }
  nlohmann::json to_json() const;
};

std::unique_ptr<Problem> make_problem(const RunConfig& cfg);
FeasibleSet make_feasible(const RunConfig& cfg, std::size_t dim);
std::vector<double> make_init(const RunConfig& cfg, std::size_t dim);
// init is used by AdaRem-S to set its sphere.
std::unique_ptr<Optimizer> make_optimizer(const RunConfig& cfg, const ParamVector& init);

// Runs one configuration. Writes steps.csv, summary.json and optionally
// trajectory.json under cfg.output_dir (created if needed). A numeric failure
// stops the run, keeps the rows written so far and is reported in the summary.
RunSummary run(const RunConfig& cfg);

struct ComparisonRow {
  std::string optimizer;
  double final_loss;
  std::optional<double> q;
  std::optional<std::size_t> steps_to_threshold;
  std::uint64_t problem_hash;
  std::optional<std::string> error;
};

// Runs every config (each into <out_dir>/<index>_<optimizer>) and tabulates
// them. Throws ConfigError unless all configs share problem and seed.
std::vector<ComparisonRow> compare(const std::vector<RunConfig>& configs,
                                   const std::filesystem::path& out_dir);

// Writes comparison.csv and comparison.json.
void write_comparison(const std::vector<ComparisonRow>& rows, const std::filesystem::path& out_dir);

// Regret-bound check of a quadratic-stream config. The config must use
// AdaRem, the inv_sqrt schedule, a box and zero weight decay; lambda decay is
// forced to per_step. The JSON report has R_T, bound, margin, T, config_hash.
struct VerifyReport {
  RegretVerification result;
  std::uint64_t config_hash;
  nlohmann::json to_json() const;
};

VerifyReport verify(const RunConfig& cfg);

std::string format_double(double x);

}  // namespace adarem
