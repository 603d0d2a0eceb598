#include "adarem/sphere.hpp"

#include <algorithm>
#include <cmath>

#include "adarem/errors.hpp"

namespace adarem {

namespace {

double masked_norm(std::span<const double> v, const std::vector<bool>& mask) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (mask[i]) s += v[i] * v[i];
  }
  return std::sqrt(s);
}

}  // namespace

std::vector<bool> sphere_mask(const ParamVector& theta, std::span<const int> sphere_groups) {
  std::vector<bool> mask(theta.size(), sphere_groups.empty());
  if (sphere_groups.empty()) return mask;
  const auto ids = theta.group_ids();
  for (std::size_t i = 0; i < mask.size(); ++i) {
    mask[i] = std::find(sphere_groups.begin(), sphere_groups.end(), ids[i]) != sphere_groups.end();
  }
  return mask;
}

SphereState::SphereState(const ParamVector& theta0, double r, std::vector<int> groups)
    : radius(r), virtual_norm(0.0), alpha(0.0), inner(theta0.size()),
      sphere_groups(std::move(groups)) {
  if (!(radius > 0.0)) throw DomainError("SphereState: radius must be positive");
  virtual_norm = masked_norm(theta0.values(), sphere_mask(theta0, sphere_groups));
  if (!(virtual_norm > 0.0)) throw DomainError("SphereState: initial point has zero norm");
  alpha = virtual_norm / radius;
}

std::vector<double> project_to_sphere(std::span<const double> theta, double radius) {
  if (!(radius > 0.0)) throw DomainError("project_to_sphere: radius must be positive");
  const double n = norm2(theta);
  if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("project_to_sphere: zero-norm input");
  std::vector<double> out(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) out[i] = theta[i] / n * radius;
  return out;
}

ParamVector project_to_sphere(const ParamVector& theta, double radius) {
  return theta.with_values(project_to_sphere(theta.values(), radius));
}

ParamVector project_to_sphere(const ParamVector& theta, double radius,
                              std::span<const int> sphere_groups) {
  if (!(radius > 0.0)) throw DomainError("project_to_sphere: radius must be positive");
  const auto mask = sphere_mask(theta, sphere_groups);
  const auto v = theta.values();
  const double n = masked_norm(v, mask);
  if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("project_to_sphere: zero-norm input");
  std::vector<double> out(v.begin(), v.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (mask[i]) out[i] = out[i] / n * radius;
  }
  return theta.with_values(std::move(out));
}

StepResult adarem_s_step(const ParamVector& theta_hat, const GradVector& g, SphereState& state,
                         const AdaRemConfig& cfg, const FeasibleSet& feasible, double lr) {
  const std::size_t step = state.inner.step;
  auto out = adarem_step(theta_hat, g, state.inner, cfg, feasible, lr);
  try {
    out.params = project_to_sphere(out.params, state.radius, state.sphere_groups);
  } catch (const DomainError&) {
    throw NumericError("adarem_s_step: update collapsed the sphere coordinates to zero", step);
  }
  return out;
}

double slr_update(SphereState& state, double eta_prime, double gamma, double grad_norm) {
  if (!(state.alpha > 0.0) || !(eta_prime > 0.0)) {
    throw DomainError("slr_update: alpha and eta' must be positive");
  }
  if (!(eta_prime * gamma < 1.0)) throw DomainError("slr_update: eta' * gamma must be < 1");
  const double eta = eta_prime / (state.alpha * state.alpha * (1.0 - eta_prime * gamma));
  const double radial = (1.0 - eta_prime * gamma) * state.virtual_norm;
  const double tangential = eta_prime * grad_norm / state.alpha;
  state.virtual_norm = std::hypot(radial, tangential);
  state.alpha = state.virtual_norm / state.radius;
  if (!(state.alpha >= 1e-12) || !std::isfinite(state.alpha)) {
    throw NumericError("slr_update: virtual trajectory collapsed (alpha < 1e-12)", state.inner.step);
  }
  return eta;
}

ParamVector spherical_sgd_step(const ParamVector& theta_hat, const GradVector& g, double eta,
                               double radius) {
  const auto y = elementwise(ElementwiseOp::sub, theta_hat.values(),
                             elementwise(ElementwiseOp::mul, std::vector<double>(g.size(), eta),
                                         g.values()));
  return theta_hat.with_values(project_to_sphere(y, radius));
}

ScaleInvarianceReport check_scale_invariance(const Problem& p, std::span<const double> theta,
                                             double c, std::size_t batch) {
  if (!(c > 0.0)) throw DomainError("check_scale_invariance: c must be positive");
  const auto g = p.gradient(theta, batch);
  std::vector<double> scaled(theta.begin(), theta.end());
  for (double& x : scaled) x *= c;
  auto g_scaled = p.gradient(scaled, batch);
  for (double& x : g_scaled) x *= c;

  const double gn = norm2(g);
  const double tn = norm2(theta);
  if (gn == 0.0) return {0.0, norm2(g_scaled) == 0.0 ? 0.0 : 1.0};
  return {std::abs(dot(g, theta)) / (gn * tn),
          norm2(elementwise(ElementwiseOp::sub, g, g_scaled)) / gn};
}

// ---------------------------------------------------------------------------

AdaRemS::AdaRemS(AdaRemConfig cfg, const ParamVector& theta0, double radius, bool use_slr,
                 std::vector<int> sphere_groups)
    : cfg_(cfg),
      state_(theta0, radius, std::move(sphere_groups)),
      start_(project_to_sphere(theta0, radius, state_.sphere_groups)),
      use_slr_(use_slr) {
  cfg_.validate();
  if (use_slr_ && !state_.sphere_groups.empty()) {
    // The SLR rate is only meaningful for coordinates on the sphere, and the
    // step applies one base rate to every coordinate.
    throw ConfigError("AdaRemS: slr requires the whole vector on the sphere");
  }
}

StepResult AdaRemS::step(const ParamVector& theta, const GradVector& g, double lr,
                         const FeasibleSet& feasible) {
  double rate = lr;
  if (use_slr_) {
    const auto mask = sphere_mask(theta, state_.sphere_groups);
    rate = slr_update(state_, lr, cfg_.weight_decay, masked_norm(g.values(), mask));
  }
  auto out = adarem_s_step(theta, g, state_, cfg_, feasible, rate);
  advance_lambda(state_.inner, cfg_, false);
  return out;
}

void AdaRemS::end_epoch() {
  if (cfg_.lambda_cadence == LambdaCadence::per_epoch) {
    advance_lambda(state_.inner, cfg_, true);
  } else {
    ++state_.inner.epoch;
  }
}

}  // namespace adarem
