#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "adarem/metrics.hpp"
#include "adarem/optim.hpp"
#include "adarem/problems.hpp"
#include "adarem/project.hpp"
#include "adarem/schedule.hpp"

namespace adarem {

struct BoundInputs {
  double d_inf;     // ||x - y||_inf <= d_inf on F
  double g2;        // ||grad f_t||_2 <= g2 on F
  std::size_t dim;
  double eta;
  double lambda;    // must be < 1
  std::size_t T;

  // Throws DomainError unless lambda in [0, 1) and everything else positive.
  void validate() const;
};

// Regret bound of AdaRem with eta_t = eta / sqrt(t) and gamma = 0:
//   D^2 d / (eta (1-l)^3) [(5 - 4l) sqrt(T) + 2l - 1]
//   + D^2 d / (2 eta (1-l)) + G^2 d eta (2 sqrt(T) - 1)
double theorem1_bound(const BoundInputs& b);

// (2 / (eta (1-l)^3)) [(5 - 4l) sqrt(T) + 2l - 1], the bound on
// sum_{t=2..T} |1/eta_t - 1/eta_{t-1}| for one coordinate.
double lemma2_bound(double eta, double lambda, std::size_t T);

// One coordinate's view of step t: gradient, momentum and max|m_t| over the
// momentum's scope (max_abs_m >= |m|).
struct CoordinateSample {
  double g;
  double m;
  double max_abs_m;
};

struct Lemma2Result {
  double sum;
  double bound;
};

// Evaluates eta_t = (eta / sqrt(t)) (1 + lambda^t c_t), t = 1..T, with c_t the
// AdaRem alignment coefficient of stream[t-1], and sums the absolute changes
// of 1/eta_t. Requires T = stream.size() >= 2.
Lemma2Result lemma2_empirical(std::span<const CoordinateSample> stream, double eta, double lambda,
                              double eps);

// Random stream: heavy-tailed gradients with a slowly drifting mean, momentum
// accumulated with decay beta, max|m| inflated by a random factor in [1, 4).
std::vector<CoordinateSample> random_coordinate_stream(std::size_t T, double beta,
                                                       std::uint64_t seed);

enum class AdversarialPattern {
  alternating,   // c_t = +1, -1, +1, ...
  always_against,  // c_t = -1
  always_with,     // c_t = +1
  blocks,        // sign flips every 7 steps
  sqrt_switch,   // sign flips at perfect squares
};

// Saturating streams (|c_t| = 1 up to eps) that drive 1/eta_t as hard as the
// coefficient allows.
std::vector<CoordinateSample> adversarial_coordinate_stream(std::size_t T,
                                                            AdversarialPattern pattern);

struct RegretCheckpoint {
  std::size_t t;
  double regret;
  double average;  // regret / t
};

struct RegretVerification {
  double regret;
  double bound;
  double margin;  // bound - regret
  std::size_t T;
  BoundInputs inputs;
  std::vector<RegretCheckpoint> checkpoints;

  bool holds() const { return regret <= bound; }
};

// Compares a finished ledger against theorem1_bound(inputs).
RegretVerification check_regret(const RegretLedger& ledger, const Problem& p,
                                const FeasibleSet& feasible, const BoundInputs& inputs);

// Throws PreconditionError unless the run is in the regime the bound covers:
// inv_sqrt schedule, gamma = 0, per-step lambda decay, box feasible set, a
// convex problem with a known gradient bound.
void check_theorem_regime(const Problem& p, const FeasibleSet& feasible, const AdaRemConfig& cfg,
                          ScheduleKind schedule);

// Runs AdaRem for t = 1..T on f_t = batch t-1 with eta_t = eta / sqrt(t) and
// lambda^t (so lambda_pow starts at lambda), projecting onto the box every
// step, and checks the regret against the bound. `checkpoints` lists the t at
// which R_t and R_t / t are reported.
RegretVerification verify_regret(const Problem& p, const FeasibleSet& box,
                                 const AdaRemConfig& cfg, ScheduleKind schedule, double eta,
                                 std::size_t T, std::span<const double> init,
                                 std::span<const std::size_t> checkpoints = {});

}  // namespace adarem
