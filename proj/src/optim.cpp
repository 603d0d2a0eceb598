#include "adarem/optim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adarem/errors.hpp"

namespace adarem {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

void check_lengths(const ParamVector& theta, const GradVector& g, std::size_t state_len,
                   const char* who) {
  if (theta.size() != g.size() || theta.size() != state_len) {
    throw DimensionError(std::string(who) + ": theta/gradient/state lengths " +
                         std::to_string(theta.size()) + "/" + std::to_string(g.size()) + "/" +
                         std::to_string(state_len));
  }
}

void check_finite_gradient(const GradVector& g, std::size_t step, const char* who) {
  if (!all_finite(g.values())) {
    throw NumericError(std::string(who) + ": non-finite gradient", step);
  }
}

void check_finite_result(std::span<const double> x, std::size_t step, const char* who) {
  if (!all_finite(x)) throw NumericError(std::string(who) + ": non-finite parameters", step);
}

}  // namespace

void AdaRemConfig::validate() const {
  require(base_lr > 0.0, "adarem: base_lr must be positive");
  require(beta >= 0.0 && beta < 1.0, "adarem: beta must lie in [0, 1)");
  require(lambda >= 0.0 && lambda < 1.0, "adarem: lambda must lie in [0, 1)");
  require(epsilon > 0.0, "adarem: epsilon must be positive");
  require(weight_decay >= 0.0, "adarem: weight_decay must be non-negative");
}

AdjustmentCoeff adjustment_coeff(double g, double m, double max_abs_m, double eps,
                                 double lambda_pow) {
  const double b = (g * m) / (std::abs(g) * max_abs_m + eps);
  return {b, 1.0 + lambda_pow * b};
}

std::vector<double> momentum_update(std::span<const double> m, std::span<const double> g,
                                    double beta) {
  if (m.size() != g.size()) throw DimensionError("momentum_update: length mismatch");
  std::vector<double> out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = beta * m[i] + (1.0 - beta) * g[i];
  return out;
}

StepResult adarem_step(const ParamVector& theta, const GradVector& g, AdaRemState& state,
                       const AdaRemConfig& cfg, const FeasibleSet& feasible, double lr) {
  check_lengths(theta, g, state.m.size(), "adarem_step");
  check_finite_gradient(g, state.step, "adarem_step");
  const std::size_t n = theta.size();

  std::vector<int> scope;
  if (cfg.max_scope == MaxScope::global) scope.assign(n, 0);
  const GroupMaxAbs max_m(state.m, cfg.max_scope == MaxScope::global
                                       ? std::span<const int>(scope)
                                       : theta.group_ids());

  const auto th = theta.values();
  const auto gv = g.values();
  std::vector<double> rates(n);
  std::vector<double> y(n);
  std::vector<double> metric(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto coeff = adjustment_coeff(gv[i], state.m[i], max_m.at(i), cfg.epsilon,
                                        state.lambda_pow);
    rates[i] = coeff.a * lr;
    y[i] = th[i] - rates[i] * gv[i] - lr * cfg.weight_decay * th[i];
    metric[i] = 1.0 / rates[i];  // +inf when the rate vanishes
  }
  auto next = project(y, feasible, metric);
  check_finite_result(next, state.step, "adarem_step");

  state.m = momentum_update(state.m, gv, cfg.beta);
  ++state.step;
  return {theta.with_values(std::move(next)), std::move(rates)};
}

void advance_lambda(AdaRemState& state, const AdaRemConfig& cfg, bool epoch_boundary) {
  if (epoch_boundary) ++state.epoch;
  if (cfg.lambda_cadence == LambdaCadence::per_step || epoch_boundary) {
    state.lambda_pow *= cfg.lambda;
  }
}

// ---------------------------------------------------------------------------

std::string to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::sgdm: return "sgdm";
    case BaselineKind::adam: return "adam";
    case BaselineKind::adamw: return "adamw";
    case BaselineKind::rmsprop: return "rmsprop";
    case BaselineKind::adabound: return "adabound";
  }
  throw ConfigError("unknown baseline kind");
}

BaselineConfig BaselineConfig::defaults(BaselineKind kind) {
  BaselineConfig c;
  c.weight_decay = 1e-4;
  switch (kind) {
    case BaselineKind::sgdm:
      c.lr = 0.4;
      c.beta1 = 0.9;
      break;
    case BaselineKind::adam:
    case BaselineKind::adamw:
      c.lr = 0.004;
      break;
    case BaselineKind::adabound:
      c.lr = 0.004;
      c.final_lr = 0.4;
      break;
    case BaselineKind::rmsprop:
      c.lr = 0.0001;
      c.beta2 = 0.99;
      break;
  }
  return c;
}

void BaselineConfig::validate(BaselineKind kind) const {
  require(lr > 0.0, to_string(kind) + ": lr must be positive");
  require(beta1 >= 0.0 && beta1 < 1.0, to_string(kind) + ": beta1 must lie in [0, 1)");
  require(beta2 >= 0.0 && beta2 < 1.0, to_string(kind) + ": beta2 must lie in [0, 1)");
  require(epsilon > 0.0, to_string(kind) + ": epsilon must be positive");
  require(weight_decay >= 0.0, to_string(kind) + ": weight_decay must be non-negative");
  if (kind == BaselineKind::adabound) {
    require(final_lr > 0.0, "adabound: final_lr must be positive");
    require(bound_gamma > 0.0, "adabound: bound_gamma must be positive");
  }
}

StepResult baseline_step(BaselineKind kind, const ParamVector& theta, const GradVector& g,
                         BaselineState& state, const BaselineConfig& cfg,
                         const FeasibleSet& feasible, double lr) {
  if (state.kind != kind) {
    throw ConfigError("baseline_step: state belongs to " + to_string(state.kind) + ", asked for " +
                      to_string(kind));
  }
  check_lengths(theta, g, state.first_moment.size(), "baseline_step");
  check_finite_gradient(g, state.step, "baseline_step");

  const std::size_t n = theta.size();
  const auto th = theta.values();
  const auto gv = g.values();
  auto& m = state.first_moment;
  auto& v = state.second_moment;
  const std::size_t t = ++state.step;
  const double b1 = cfg.beta1;
  const double b2 = cfg.beta2;

  std::vector<double> next(th.begin(), th.end());
  std::vector<double> rates(n);

  switch (kind) {
    case BaselineKind::sgdm:
      for (std::size_t i = 0; i < n; ++i) {
        const double gi = gv[i] + cfg.weight_decay * th[i];
        m[i] = b1 * m[i] + gi;
        next[i] = th[i] - lr * m[i];
        rates[i] = lr;
      }
      break;

    case BaselineKind::adam:
    case BaselineKind::adamw: {
      const double bc1 = 1.0 - std::pow(b1, static_cast<double>(t));
      const double bc2 = 1.0 - std::pow(b2, static_cast<double>(t));
      const bool decoupled = kind == BaselineKind::adamw;
      for (std::size_t i = 0; i < n; ++i) {
        double p = th[i];
        double gi = gv[i];
        if (decoupled) {
          p *= 1.0 - lr * cfg.weight_decay;
        } else {
          gi += cfg.weight_decay * th[i];
        }
        m[i] = b1 * m[i] + (1.0 - b1) * gi;
        v[i] = b2 * v[i] + (1.0 - b2) * gi * gi;
        const double denom = std::sqrt(v[i] / bc2) + cfg.epsilon;
        rates[i] = lr / (bc1 * denom);
        next[i] = p - lr * (m[i] / bc1) / denom;
      }
      break;
    }

    case BaselineKind::rmsprop:
      for (std::size_t i = 0; i < n; ++i) {
        const double gi = gv[i] + cfg.weight_decay * th[i];
        v[i] = b2 * v[i] + (1.0 - b2) * gi * gi;
        rates[i] = lr / (std::sqrt(v[i]) + cfg.epsilon);
        next[i] = th[i] - rates[i] * gi;
      }
      break;

    case BaselineKind::adabound: {
      const double td = static_cast<double>(t);
      const double bc1 = 1.0 - std::pow(b1, td);
      const double bc2 = 1.0 - std::pow(b2, td);
      // final_lr follows the schedule in proportion to the base rate.
      const double final_lr = cfg.final_lr * lr / cfg.lr;
      const double lower = final_lr * (1.0 - 1.0 / (cfg.bound_gamma * td + 1.0));
      const double upper = final_lr * (1.0 + 1.0 / (cfg.bound_gamma * td));
      const double step_size = lr * std::sqrt(bc2) / bc1;
      for (std::size_t i = 0; i < n; ++i) {
        const double gi = gv[i] + cfg.weight_decay * th[i];
        m[i] = b1 * m[i] + (1.0 - b1) * gi;
        v[i] = b2 * v[i] + (1.0 - b2) * gi * gi;
        const double raw = step_size / (std::sqrt(v[i]) + cfg.epsilon);
        rates[i] = std::clamp(raw, lower, upper);
        next[i] = th[i] - rates[i] * m[i];
      }
      break;
    }

    default:
      throw ConfigError("baseline_step: unknown kind");
  }

  next = project(next, feasible);
  check_finite_result(next, state.step, "baseline_step");
  return {theta.with_values(std::move(next)), std::move(rates)};
}

// ---------------------------------------------------------------------------

AdaRem::AdaRem(AdaRemConfig cfg, std::size_t n) : cfg_(cfg), state_(n) { cfg_.validate(); }

StepResult AdaRem::step(const ParamVector& theta, const GradVector& g, double lr,
                        const FeasibleSet& feasible) {
  auto out = adarem_step(theta, g, state_, cfg_, feasible, lr);
  advance_lambda(state_, cfg_, false);
  return out;
}

void AdaRem::end_epoch() {
  if (cfg_.lambda_cadence == LambdaCadence::per_epoch) {
    advance_lambda(state_, cfg_, true);
  } else {
    ++state_.epoch;
  }
}

Baseline::Baseline(BaselineKind kind, BaselineConfig cfg, std::size_t n)
    : cfg_(cfg), state_(kind, n) {
  cfg_.validate(kind);
}

StepResult Baseline::step(const ParamVector& theta, const GradVector& g, double lr,
                          const FeasibleSet& feasible) {
  return baseline_step(state_.kind, theta, g, state_, cfg_, feasible, lr);
}

}  // namespace adarem
