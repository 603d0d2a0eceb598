#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "adarem/params.hpp"
#include "adarem/project.hpp"

namespace adarem {

enum class LambdaCadence { per_step, per_epoch };
// Scope of max|m_t| in the adjustment denominator.
enum class MaxScope { global, per_group };

// Hyperparameters of AdaRem. Defaults are the ResNet-18 / ImageNet choices.
struct AdaRemConfig {
  double base_lr = 0.4;
  double beta = 0.999;
  double lambda = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 3e-4;
  LambdaCadence lambda_cadence = LambdaCadence::per_epoch;
  MaxScope max_scope = MaxScope::per_group;

  // Throws ConfigError unless base_lr > 0, beta and lambda in [0,1),
  // epsilon > 0 and weight_decay >= 0.
  void validate() const;

  bool operator==(const AdaRemConfig&) const = default;
};

struct AdaRemState {
  std::vector<double> m;   // EMA of past gradients; zero at construction
  std::size_t step = 0;
  double lambda_pow = 1.0;  // lambda^t, t counted at the configured cadence
  std::size_t epoch = 0;

  explicit AdaRemState(std::size_t n) : m(n, 0.0) {}
};

struct AdjustmentCoeff {
  double b;  // alignment of gradient and momentum, in [-1, 1]
  double a;  // rate multiplier 1 + lambda^t * b
};

// b = g*m / (|g| * max|m| + eps), a = 1 + lambda_pow * b.
// Requires eps > 0 and max_abs_m >= |m|; under those b is in [-1, 1] exactly,
// including after rounding.
AdjustmentCoeff adjustment_coeff(double g, double m, double max_abs_m, double eps,
                                 double lambda_pow);

// beta * m + (1 - beta) * g
std::vector<double> momentum_update(std::span<const double> m, std::span<const double> g,
                                    double beta);

struct StepResult {
  ParamVector params;
  // Effective per-coordinate step size applied to the search direction.
  std::vector<double> rates;
};

// One AdaRem iteration at scheduled base rate `lr`:
//   eta_i   = (1 + lambda^t b_i) * lr
//   theta'  = Proj_{F, diag(1/eta)}(theta - eta .* g - lr * gamma * theta)
//   m'      = beta m + (1 - beta) g          (after the parameter update)
// The step counter is incremented; lambda_pow is left to advance_lambda.
// Throws NumericError on a non-finite gradient or result.
StepResult adarem_step(const ParamVector& theta, const GradVector& g, AdaRemState& state,
                       const AdaRemConfig& cfg, const FeasibleSet& feasible, double lr);

inline StepResult adarem_step(const ParamVector& theta, const GradVector& g, AdaRemState& state,
                              const AdaRemConfig& cfg, const FeasibleSet& feasible) {
  return adarem_step(theta, g, state, cfg, feasible, cfg.base_lr);
}

// Multiplies lambda_pow by lambda on every call (per_step) or only on epoch
// boundaries (per_epoch). Epoch boundaries also bump state.epoch.
void advance_lambda(AdaRemState& state, const AdaRemConfig& cfg, bool epoch_boundary);

// ---------------------------------------------------------------------------
// Baselines

enum class BaselineKind { sgdm, adam, adamw, rmsprop, adabound };

std::string to_string(BaselineKind kind);

struct BaselineConfig {
  double lr = 0.4;
  double beta1 = 0.9;        // momentum coefficient for SGDM
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;  // coupled L2, except AdamW (decoupled)
  double final_lr = 0.4;      // AdaBound only
  double bound_gamma = 1e-3;  // AdaBound convergence speed of the bounds

  // Per-kind defaults (base rates and the selected grid values).
  static BaselineConfig defaults(BaselineKind kind);

  void validate(BaselineKind kind) const;

  bool operator==(const BaselineConfig&) const = default;
};

struct BaselineState {
  BaselineKind kind;
  std::vector<double> first_moment;   // velocity for SGDM
  std::vector<double> second_moment;  // unused by SGDM
  std::size_t step = 0;

  BaselineState(BaselineKind k, std::size_t n)
      : kind(k), first_moment(n, 0.0), second_moment(n, 0.0) {}
};

// One step of the named method at scheduled rate `lr`; projection last.
// Throws ConfigError if state.kind != kind.
StepResult baseline_step(BaselineKind kind, const ParamVector& theta, const GradVector& g,
                         BaselineState& state, const BaselineConfig& cfg,
                         const FeasibleSet& feasible, double lr);

inline StepResult baseline_step(BaselineKind kind, const ParamVector& theta, const GradVector& g,
                                BaselineState& state, const BaselineConfig& cfg,
                                const FeasibleSet& feasible) {
  return baseline_step(kind, theta, g, state, cfg, feasible, cfg.lr);
}

// ---------------------------------------------------------------------------
// Common optimizer contract used by the run loop.

class Optimizer {
 public:
  virtual ~Optimizer() = default;

  virtual std::string name() const = 0;
  // `lr` is the scheduled base rate for this step.
  virtual StepResult step(const ParamVector& theta, const GradVector& g, double lr,
                          const FeasibleSet& feasible) = 0;
  virtual void end_epoch() {}
};

class AdaRem final : public Optimizer {
 public:
  AdaRem(AdaRemConfig cfg, std::size_t n);

  std::string name() const override { return "adarem"; }
  StepResult step(const ParamVector& theta, const GradVector& g, double lr,
                  const FeasibleSet& feasible) override;
  void end_epoch() override;

  const AdaRemState& state() const { return state_; }
  AdaRemState& state() { return state_; }
  const AdaRemConfig& config() const { return cfg_; }

 private:
  AdaRemConfig cfg_;
  AdaRemState state_;
};

class Baseline final : public Optimizer {
 public:
  Baseline(BaselineKind kind, BaselineConfig cfg, std::size_t n);

  std::string name() const override { return to_string(state_.kind); }
  StepResult step(const ParamVector& theta, const GradVector& g, double lr,
                  const FeasibleSet& feasible) override;

  const BaselineState& state() const { return state_; }

 private:
  BaselineConfig cfg_;
  BaselineState state_;
};

}  // namespace adarem
