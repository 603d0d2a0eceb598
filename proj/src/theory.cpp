#include "adarem/theory.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "adarem/errors.hpp"

namespace adarem {

void BoundInputs::validate() const {
  if (!(lambda >= 0.0 && lambda < 1.0)) throw DomainError("BoundInputs: lambda must lie in [0, 1)");
  if (!(d_inf > 0.0) || !(g2 > 0.0) || !(eta > 0.0) || dim == 0 || T == 0) {
    throw DomainError("BoundInputs: D_inf, G2, eta, dim and T must be positive");
  }
}

double theorem1_bound(const BoundInputs& b) {
  b.validate();
  const double l = b.lambda;
  const double d = static_cast<double>(b.dim);
  const double sqrt_t = std::sqrt(static_cast<double>(b.T));
  const double dd = b.d_inf * b.d_inf * d;
  const double rate_term = dd / (b.eta * std::pow(1.0 - l, 3)) * ((5.0 - 4.0 * l) * sqrt_t + 2.0 * l - 1.0);
  const double start_term = dd / (2.0 * b.eta * (1.0 - l));
  const double grad_term = b.g2 * b.g2 * d * b.eta * (2.0 * sqrt_t - 1.0);
  return rate_term + start_term + grad_term;
}

double lemma2_bound(double eta, double lambda, std::size_t T) {
  if (!(lambda >= 0.0 && lambda < 1.0)) throw DomainError("lemma2_bound: lambda must lie in [0, 1)");
  if (!(eta > 0.0)) throw DomainError("lemma2_bound: eta must be positive");
  const double sqrt_t = std::sqrt(static_cast<double>(T));
  return 2.0 / (eta * std::pow(1.0 - lambda, 3)) * ((5.0 - 4.0 * lambda) * sqrt_t + 2.0 * lambda - 1.0);
}

Lemma2Result lemma2_empirical(std::span<const CoordinateSample> stream, double eta, double lambda,
                              double eps) {
  if (stream.size() < 2) throw PreconditionError("lemma2_empirical: need T >= 2");
  double lambda_pow = 1.0;
  double prev_inv = 0.0;
  double sum = 0.0;
  for (std::size_t t = 1; t <= stream.size(); ++t) {
    lambda_pow *= lambda;
    const auto& s = stream[t - 1];
    const auto coeff = adjustment_coeff(s.g, s.m, s.max_abs_m, eps, lambda_pow);
    const double rate = eta / std::sqrt(static_cast<double>(t)) * coeff.a;
    const double inv = 1.0 / rate;
    if (t >= 2) sum += std::abs(inv - prev_inv);
    prev_inv = inv;
  }
  return {sum, lemma2_bound(eta, lambda, stream.size())};
}

std::vector<CoordinateSample> random_coordinate_stream(std::size_t T, double beta,
                                                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::student_t_distribution<double> heavy(3.0);
  std::normal_distribution<double> drift_step(0.0, 0.05);
  std::uniform_real_distribution<double> inflate(1.0, 4.0);
  std::vector<CoordinateSample> out(T);
  double m = 0.0;
  double drift = 0.0;
  for (auto& s : out) {
    drift += drift_step(rng);
    const double g = drift + heavy(rng);
    s = {g, m, std::abs(m) * inflate(rng)};
    m = beta * m + (1.0 - beta) * g;
  }
  return out;
}

std::vector<CoordinateSample> adversarial_coordinate_stream(std::size_t T,
                                                            AdversarialPattern pattern) {
  std::vector<CoordinateSample> out(T);
  std::size_t next_square = 1;
  double sign = 1.0;
  for (std::size_t t = 1; t <= T; ++t) {
    switch (pattern) {
      case AdversarialPattern::alternating: sign = (t % 2 == 1) ? 1.0 : -1.0; break;
      case AdversarialPattern::always_against: sign = -1.0; break;
      case AdversarialPattern::always_with: sign = 1.0; break;
      case AdversarialPattern::blocks: sign = ((t - 1) / 7) % 2 == 0 ? 1.0 : -1.0; break;
      case AdversarialPattern::sqrt_switch:
        if (t == next_square * next_square) {
          sign = -sign;
          ++next_square;
        }
        break;
    }
    out[t - 1] = {1.0, sign, 1.0};
  }
  return out;
}

RegretVerification check_regret(const RegretLedger& ledger, const Problem& p,
                                const FeasibleSet& feasible, const BoundInputs& inputs) {
  const double r = regret(ledger, p, feasible);
  const double bound = theorem1_bound(inputs);
  return {r, bound, bound - r, ledger.T, inputs, {}};
}

void check_theorem_regime(const Problem& p, const FeasibleSet& feasible, const AdaRemConfig& cfg,
                          ScheduleKind schedule) {
  if (schedule != ScheduleKind::inv_sqrt) {
    throw PreconditionError("regret bound requires the inv_sqrt schedule, got " +
                            to_string(schedule));
  }
  if (cfg.weight_decay != 0.0) throw PreconditionError("regret bound requires weight_decay = 0");
  if (cfg.lambda_cadence != LambdaCadence::per_step) {
    throw PreconditionError("regret bound requires per-step lambda decay");
  }
  if (feasible.kind() != FeasibleKind::box) {
    throw PreconditionError("regret bound requires a box feasible set");
  }
  if (!p.convex()) throw PreconditionError("regret bound requires a convex problem");
  if (!p.grad_bound()) throw PreconditionError("regret bound requires a known gradient bound");
}

RegretVerification verify_regret(const Problem& p, const FeasibleSet& box,
                                 const AdaRemConfig& cfg, ScheduleKind schedule, double eta,
                                 std::size_t T, std::span<const double> init,
                                 std::span<const std::size_t> checkpoints) {
  check_theorem_regime(p, box, cfg, schedule);
  cfg.validate();
  if (T == 0 || T > p.num_batches()) {
    throw PreconditionError("verify_regret: T must lie in [1, " + std::to_string(p.num_batches()) + "]");
  }
  if (init.size() != p.dimension()) throw DimensionError("verify_regret: init has wrong length");

  const BoundInputs inputs{box.diameter_inf(), *p.grad_bound(), p.dimension(), eta, cfg.lambda, T};
  inputs.validate();

  ParamVector theta(project(init, box));
  AdaRemState state(p.dimension());
  state.lambda_pow = cfg.lambda;  // theorem indexes steps from t = 1
  RegretLedger ledger;
  std::vector<RegretCheckpoint> marks;
  std::vector<std::size_t> wanted(checkpoints.begin(), checkpoints.end());
  std::sort(wanted.begin(), wanted.end());
  auto next_mark = wanted.begin();

  for (std::size_t t = 1; t <= T; ++t) {
    const std::size_t batch = t - 1;
    ledger.add(p.loss(theta.values(), batch), batch);
    const GradVector g(p.gradient(theta.values(), batch));
    const double lr = eta / std::sqrt(static_cast<double>(t));
    theta = adarem_step(theta, g, state, cfg, box, lr).params;
    advance_lambda(state, cfg, false);

    while (next_mark != wanted.end() && *next_mark == t) {
      const double r = regret(ledger, p, box);
      marks.push_back({t, r, r / static_cast<double>(t)});
      ++next_mark;
    }
  }

  auto result = check_regret(ledger, p, box, inputs);
  result.checkpoints = std::move(marks);
  return result;
}

}  // namespace adarem
