#include "adarem/project.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "adarem/errors.hpp"

namespace adarem {

namespace {

void check_weights(std::span<const double> w, std::size_t n) {
  if (w.empty()) return;
  if (w.size() != n) {
    throw DimensionError("project: " + std::to_string(w.size()) + " weights for " +
                         std::to_string(n) + " coordinates");
  }
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(w[i] > 0.0)) {
      throw DomainError("project: weight " + std::to_string(i) + " is not positive");
    }
  }
}

double weighted_distance(std::span<const double> w, std::span<const double> a,
                         std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += (w.empty() ? 1.0 : w[i]) * d * d;
  }
  return std::sqrt(s);
}

}  // namespace

FeasibleSet FeasibleSet::unconstrained() { return FeasibleSet(); }

FeasibleSet FeasibleSet::box(std::vector<double> lower, std::vector<double> upper) {
  if (lower.size() != upper.size()) {
    throw DimensionError("FeasibleSet::box: bound lengths differ");
  }
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!std::isfinite(lower[i]) || !std::isfinite(upper[i])) {
      throw DomainError("FeasibleSet::box: bounds must be finite");
    }
    if (lower[i] > upper[i]) {
      throw DomainError("FeasibleSet::box: lower > upper at coordinate " + std::to_string(i));
    }
  }
  FeasibleSet s;
  s.kind_ = FeasibleKind::box;
  s.lower_ = std::move(lower);
  s.upper_ = std::move(upper);
  return s;
}

FeasibleSet FeasibleSet::symmetric_box(std::size_t dim, double half_width) {
  if (!(half_width >= 0.0)) throw DomainError("FeasibleSet::symmetric_box: negative half width");
  return box(std::vector<double>(dim, -half_width), std::vector<double>(dim, half_width));
}

double FeasibleSet::diameter_inf() const {
  if (kind_ == FeasibleKind::unconstrained) return std::numeric_limits<double>::infinity();
  double d = 0.0;
  for (std::size_t i = 0; i < lower_.size(); ++i) d = std::max(d, upper_[i] - lower_[i]);
  return d;
}

bool FeasibleSet::contains(std::span<const double> x) const {
  if (kind_ == FeasibleKind::unconstrained) return true;
  if (x.size() != lower_.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < lower_[i] || x[i] > upper_[i]) return false;
  }
  return true;
}

std::vector<double> project(std::span<const double> y, const FeasibleSet& set,
                            std::span<const double> diag_weights) {
  check_weights(diag_weights, y.size());
  std::vector<double> x(y.begin(), y.end());
  if (set.kind() == FeasibleKind::unconstrained) return x;

  if (set.lower().size() != y.size()) {
    throw DimensionError("project: box has dimension " + std::to_string(set.lower().size()) +
                         ", point has " + std::to_string(y.size()));
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = std::min(set.upper()[i], std::max(set.lower()[i], x[i]));
  }
  return x;
}

NonexpansiveCheck nonexpansive_check(const FeasibleSet& set, std::span<const double> diag_weights,
                                     std::span<const double> z1, std::span<const double> z2) {
  if (z1.size() != z2.size()) throw DimensionError("nonexpansive_check: point lengths differ");
  const auto u1 = project(z1, set, diag_weights);
  const auto u2 = project(z2, set, diag_weights);
  return {weighted_distance(diag_weights, u1, u2), weighted_distance(diag_weights, z1, z2)};
}

}  // namespace adarem
