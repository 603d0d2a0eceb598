#include "adarem/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "adarem/errors.hpp"
#include "adarem/params.hpp"

namespace adarem {

LrStats lr_stats(std::span<const double> rates) {
  if (rates.empty()) return {0.0, 0.0, 0.0};
  const auto [lo, hi] = std::minmax_element(rates.begin(), rates.end());
  double sum = 0.0;
  for (double r : rates) sum += r;
  return {*lo, sum / static_cast<double>(rates.size()), *hi};
}

TrajectoryRecord::TrajectoryRecord(std::span<const double> start)
    : path_(start.size(), 0.0), start_(start.begin(), start.end()), last_(start_) {}

void TrajectoryRecord::record_step(std::span<const double> before, std::span<const double> after,
                                   double loss, std::span<const double> rates) {
  if (before.size() != size() || after.size() != size()) {
    throw DimensionError("TrajectoryRecord::record_step: length mismatch");
  }
  for (std::size_t i = 0; i < size(); ++i) path_[i] += std::abs(after[i] - before[i]);
  last_.assign(after.begin(), after.end());
  losses_.push_back(loss);
  lr_.push_back(lr_stats(rates));
}

void TrajectoryRecord::merge(const TrajectoryRecord& later) {
  if (later.size() != size()) throw DimensionError("TrajectoryRecord::merge: length mismatch");
  if (!std::equal(later.start_.begin(), later.start_.end(), last_.begin())) {
    throw DomainError("TrajectoryRecord::merge: records are not contiguous");
  }
  for (std::size_t i = 0; i < size(); ++i) path_[i] += later.path_[i];
  last_ = later.last_;
  losses_.insert(losses_.end(), later.losses_.begin(), later.losses_.end());
  lr_.insert(lr_.end(), later.lr_.begin(), later.lr_.end());
}

QResult q_metric(const TrajectoryRecord& rec, double min_displacement) {
  QResult r{0.0, 0, 0};
  double sum = 0.0;
  for (std::size_t i = 0; i < rec.size(); ++i) {
    const double d = std::abs(rec.last()[i] - rec.start()[i]);
    if (d < min_displacement || d == 0.0) {
      ++r.n_excluded;
      continue;
    }
    sum += rec.path_length()[i] / d;
    ++r.n_included;
  }
  if (r.n_included == 0) {
    throw DomainError("q_metric: degenerate trajectory, no parameter moved at least " +
                      std::to_string(min_displacement));
  }
  r.q = sum / static_cast<double>(r.n_included);
  return r;
}

void RegretLedger::add(double loss, std::size_t batch) {
  cumulative_loss += loss;
  ++T;
  batches.push_back(batch);
}

Minimizer minimize_cumulative(const Problem& p, std::span<const std::size_t> batches,
                              const FeasibleSet& feasible, int max_iter) {
  std::map<std::size_t, double> weight;
  for (std::size_t b : batches) weight[b] += 1.0;

  auto value = [&](std::span<const double> x) {
    double s = 0.0;
    for (const auto& [b, w] : weight) s += w * p.loss(x, b);
    return s;
  };
  auto grad = [&](std::span<const double> x) {
    std::vector<double> g(x.size(), 0.0);
    for (const auto& [b, w] : weight) {
      const auto gb = p.gradient(x, b);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += w * gb[i];
    }
    return g;
  };

  std::vector<double> x = project(std::vector<double>(p.dimension(), 0.0), feasible);
  double fx = value(x);
  double step = 1.0 / std::max<double>(1.0, static_cast<double>(batches.size()));
  for (int it = 0; it < max_iter; ++it) {
    const auto g = grad(x);
    bool accepted = false;
    for (int tries = 0; tries < 60; ++tries) {
      std::vector<double> y(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - step * g[i];
      y = project(y, feasible);
      double model = fx;
      double sq = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = y[i] - x[i];
        model += g[i] * d;
        sq += d * d;
      }
      model += sq / (2.0 * step);
      const double fy = value(y);
      if (fy <= model) {
        const double moved = norm_inf(elementwise(ElementwiseOp::sub, y, x));
        x = std::move(y);
        fx = fy;
        accepted = true;
        step *= 2.0;
        if (moved < 1e-12) return {x, fx};
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  return {x, fx};
}

double regret(const RegretLedger& ledger, const Problem& p, const FeasibleSet& feasible) {
  if (ledger.comparator_min) return ledger.cumulative_loss - *ledger.comparator_min;
  if (auto m = p.closed_form_min(ledger.batches, feasible)) {
    return ledger.cumulative_loss - m->value;
  }
  if (p.convex() && !ledger.batches.empty()) {
    return ledger.cumulative_loss - minimize_cumulative(p, ledger.batches, feasible).value;
  }
  throw UnsupportedError("regret: no comparator available for problem " + p.name());
}

}  // namespace adarem
