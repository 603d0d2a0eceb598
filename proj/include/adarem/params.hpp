#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace adarem {

// Flat parameter vector with a group label per coordinate.
class ParamVector {
 public:
  ParamVector() = default;
  // All coordinates in group 0.
  explicit ParamVector(std::vector<double> values);
  ParamVector(std::vector<double> values, std::vector<int> group_ids);

  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<const int> group_ids() const { return group_ids_; }
  double operator[](std::size_t i) const { return values_[i]; }

  // Same grouping, new values. Throws DimensionError on length mismatch.
  ParamVector with_values(std::vector<double> values) const;

  bool operator==(const ParamVector&) const = default;

 private:
  std::vector<double> values_;
  std::vector<int> group_ids_;
};

// Gradient of the loss at a ParamVector. Values must be finite.
class GradVector {
 public:
  GradVector() = default;
  explicit GradVector(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  bool operator==(const GradVector&) const = default;

 private:
  std::vector<double> values_;
};

enum class ElementwiseOp { add, sub, mul, div };

// Coordinate-wise a (op) b. Throws DimensionError on length mismatch and
// DomainError when dividing by a zero coordinate.
std::vector<double> elementwise(ElementwiseOp op, std::span<const double> a,
                                std::span<const double> b);

// Per-group maximum of |v_i|. Group ids must be 0..G-1 with every id used.
class GroupMaxAbs {
 public:
  GroupMaxAbs(std::span<const double> v, std::span<const int> group_ids);

  std::size_t num_groups() const { return per_group_.size(); }
  double group(int id) const;
  // Value for the group that coordinate i belongs to.
  double at(std::size_t i) const { return per_group_[static_cast<std::size_t>(groups_[i])]; }

 private:
  std::vector<double> per_group_;
  std::vector<int> groups_;
};

GroupMaxAbs group_max_abs(std::span<const double> v, std::span<const int> group_ids);

// Helpers shared by the optimizers.
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);
double norm_inf(std::span<const double> v);
bool all_finite(std::span<const double> v);

}  // namespace adarem
