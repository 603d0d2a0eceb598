#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

#include "adarem/optim.hpp"
#include "adarem/schedule.hpp"

namespace adarem {

enum class ProblemKind { quadratic, logistic, scale_invariant_net };
enum class OptimizerKind { sgd, sgdm, adam, adamw, rmsprop, adabound, adarem, adarem_s };
enum class InitKind { zeros, uniform, normal };

struct ProblemSpec {
  ProblemKind kind = ProblemKind::logistic;
  std::size_t dim = 16;           // quadratic / logistic
  std::uint64_t seed = 0;
  std::size_t samples = 1024;     // logistic / scale_invariant_net
  std::size_t batch_size = 32;
  double center_bound = 1.0;      // quadratic
  std::size_t hidden = 8;         // scale_invariant_net
  std::size_t inputs = 8;         // scale_invariant_net
  std::string data_path;          // logistic: load samples from CSV instead

  bool operator==(const ProblemSpec&) const = default;
};

// Hyperparameters for every optimizer kind; only the keys relevant to `kind`
// are read from or written to JSON, the rest stay at the kind's defaults.
struct OptimizerSpec {
  OptimizerKind kind = OptimizerKind::adarem;
  double beta = 0.999;          // adarem momentum
  double momentum = 0.9;        // sgdm
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 3e-4;
  double lambda = 0.999;
  LambdaCadence lambda_cadence = LambdaCadence::per_epoch;
  MaxScope max_scope = MaxScope::per_group;
  double final_lr = 0.4;        // adabound
  double radius = 10.0;         // adarem_s

  static OptimizerSpec defaults(OptimizerKind kind);

  bool operator==(const OptimizerSpec&) const = default;
};

struct FeasibleSpec {
  FeasibleKind kind = FeasibleKind::unconstrained;
  double half_width = 1.0;

  bool operator==(const FeasibleSpec&) const = default;
};

struct InitSpec {
  InitKind kind = InitKind::zeros;
  double scale = 1.0;  // uniform: [-scale, scale]; normal: standard deviation

  bool operator==(const InitSpec&) const = default;
};

struct MetricsSpec {
  bool record_q = true;
  bool record_regret = false;
  bool trajectory = false;           // write trajectory.json
  std::size_t q_window_start = 0;    // Q measured from this step to the end
  double min_displacement = 1e-8;
  std::optional<double> loss_threshold;

  bool operator==(const MetricsSpec&) const = default;
};

struct RunConfig {
  ProblemSpec problem;
  OptimizerSpec optimizer;
  ScheduleSpec schedule;
  FeasibleSpec feasible;
  InitSpec init;
  MetricsSpec metrics;
  std::string output_dir = "out";
  std::uint64_t seed = 0;

  // Throws ConfigError on any invariant violation.
  void validate() const;

  bool operator==(const RunConfig&) const = default;
};

std::string to_string(ProblemKind kind);
std::string to_string(OptimizerKind kind);

// Defaults for the base rate by optimizer: 0.4 for the SGD family and AdaRem,
// 0.004 for Adam, AdamW and AdaBound, 0.0001 for RMSProp.
double default_base_lr(OptimizerKind kind);

// Parses a config; unknown keys and unknown kinds are ConfigErrors. Missing
// keys take defaults (optimizer defaults depend on its kind).
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& cfg);
RunConfig load_config(const std::filesystem::path& path);

AdaRemConfig adarem_config(const RunConfig& cfg);
BaselineConfig baseline_config(const RunConfig& cfg);

// FNV-1a of the canonical JSON text.
std::uint64_t json_hash(const nlohmann::json& j);

}  // namespace adarem
