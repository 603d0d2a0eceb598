#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "adarem/problems.hpp"
#include "adarem/project.hpp"

namespace adarem {

struct LrStats {
  double min;
  double mean;
  double max;
};

LrStats lr_stats(std::span<const double> rates);

// Per-parameter path length and endpoints of a trajectory, plus per-step
// loss and learning-rate statistics. Memory per parameter is constant.
class TrajectoryRecord {
 public:
  explicit TrajectoryRecord(std::span<const double> start);

  void record_step(std::span<const double> before, std::span<const double> after, double loss,
                   std::span<const double> rates);

  // Appends a record that continues this one (its start must be our last
  // point); path lengths add.
  void merge(const TrajectoryRecord& later);

  std::size_t size() const { return start_.size(); }
  std::size_t steps() const { return losses_.size(); }
  std::span<const double> path_length() const { return path_; }
  std::span<const double> start() const { return start_; }
  std::span<const double> last() const { return last_; }
  std::span<const double> losses() const { return losses_; }
  std::span<const LrStats> lr_history() const { return lr_; }

 private:
  std::vector<double> path_;
  std::vector<double> start_;
  std::vector<double> last_;
  std::vector<double> losses_;
  std::vector<LrStats> lr_;
};

inline void record_step(TrajectoryRecord& rec, std::span<const double> before,
                        std::span<const double> after, double loss,
                        std::span<const double> rates) {
  rec.record_step(before, after, loss, rates);
}

struct QResult {
  double q;                // mean of path / displacement over included parameters
  std::size_t n_included;
  std::size_t n_excluded;  // displacement below the threshold
};

// Oscillation index: q_i = path_i / |last_i - start_i|, Q = mean q_i over
// parameters whose displacement is at least min_displacement. Throws
// DomainError when every parameter is excluded.
QResult q_metric(const TrajectoryRecord& rec, double min_displacement = 1e-8);

// Online-learning regret ledger: sum of f_t(theta_t) and the batches played.
struct RegretLedger {
  double cumulative_loss = 0.0;
  std::size_t T = 0;
  std::optional<double> comparator_min;
  std::vector<std::size_t> batches;

  void add(double loss, std::size_t batch);
};

// Approximate argmin over F of sum_k f_{batches[k]} by projected gradient
// descent with backtracking (Armijo, step halving) from the projection of the
// origin, stopping when an accepted step moves less than 1e-12 in max-norm or
// after max_iter iterations. The value is an upper bound on the true minimum.
Minimizer minimize_cumulative(const Problem& p, std::span<const std::size_t> batches,
                              const FeasibleSet& feasible, int max_iter = 5000);

// cumulative_loss - min_{theta in F} sum_t f_t(theta). The comparator is the
// ledger's own value if set, else the problem's closed form, else
// minimize_cumulative for convex problems. Throws UnsupportedError otherwise.
double regret(const RegretLedger& ledger, const Problem& p, const FeasibleSet& feasible);

}  // namespace adarem
