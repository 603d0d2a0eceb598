#pragma once

#include <span>
#include <vector>

namespace adarem {

enum class FeasibleKind { unconstrained, box };

// Convex feasible region F. Either all of R^d or an axis-aligned box.
class FeasibleSet {
 public:
  static FeasibleSet unconstrained();
  static FeasibleSet box(std::vector<double> lower, std::vector<double> upper);
  // [-half_width, half_width]^dim
  static FeasibleSet symmetric_box(std::size_t dim, double half_width);

  FeasibleKind kind() const { return kind_; }
  std::span<const double> lower() const { return lower_; }
  std::span<const double> upper() const { return upper_; }

  // D_inf = max_i (upper_i - lower_i); infinite for the unconstrained set.
  double diameter_inf() const;
  bool contains(std::span<const double> x) const;

  bool operator==(const FeasibleSet&) const = default;

 private:
  FeasibleSet() = default;

  FeasibleKind kind_ = FeasibleKind::unconstrained;
  std::vector<double> lower_;
  std::vector<double> upper_;
};

// argmin_{x in F} || diag(w)^{1/2} (x - y) ||.
//
// For a box and a diagonal metric the objective separates per coordinate, so
// the minimizer is the clamp of y regardless of the weights. Weights must be
// strictly positive (+inf is accepted: it arises as 1/eta when a rate is 0).
// An empty weight span means the identity metric.
std::vector<double> project(std::span<const double> y, const FeasibleSet& set,
                            std::span<const double> diag_weights = {});

struct NonexpansiveCheck {
  double lhs;  // weighted distance between the projections
  double rhs;  // weighted distance between the inputs
};

NonexpansiveCheck nonexpansive_check(const FeasibleSet& set, std::span<const double> diag_weights,
                                     std::span<const double> z1, std::span<const double> z2);

}  // namespace adarem
