#include "adarem/params.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adarem/errors.hpp"

namespace adarem {

namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": length " + std::to_string(a) +
                         " != " + std::to_string(b));
  }
}

}  // namespace

ParamVector::ParamVector(std::vector<double> values)
    : values_(std::move(values)), group_ids_(values_.size(), 0) {}

ParamVector::ParamVector(std::vector<double> values, std::vector<int> group_ids)
    : values_(std::move(values)), group_ids_(std::move(group_ids)) {
  require_same_length(values_.size(), group_ids_.size(), "ParamVector");
}

ParamVector ParamVector::with_values(std::vector<double> values) const {
  require_same_length(values.size(), values_.size(), "ParamVector::with_values");
  return ParamVector(std::move(values), group_ids_);
}

GradVector::GradVector(std::vector<double> values) : values_(std::move(values)) {}

std::vector<double> elementwise(ElementwiseOp op, std::span<const double> a,
                                std::span<const double> b) {
  require_same_length(a.size(), b.size(), "elementwise");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    switch (op) {
      case ElementwiseOp::add: out[i] = a[i] + b[i]; break;
      case ElementwiseOp::sub: out[i] = a[i] - b[i]; break;
      case ElementwiseOp::mul: out[i] = a[i] * b[i]; break;
      case ElementwiseOp::div:
        if (b[i] == 0.0) {
          throw DomainError("elementwise div: zero divisor at coordinate " + std::to_string(i));
        }
        out[i] = a[i] / b[i];
        break;
    }
  }
  return out;
}

GroupMaxAbs::GroupMaxAbs(std::span<const double> v, std::span<const int> group_ids)
    : groups_(group_ids.begin(), group_ids.end()) {
  require_same_length(v.size(), group_ids.size(), "group_max_abs");
  if (v.empty()) throw ConfigError("group_max_abs: no coordinates");
  const int max_id = *std::max_element(groups_.begin(), groups_.end());
  if (*std::min_element(groups_.begin(), groups_.end()) < 0) {
    throw ConfigError("group_max_abs: negative group id");
  }
  per_group_.assign(static_cast<std::size_t>(max_id) + 1, -1.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    double& slot = per_group_[static_cast<std::size_t>(groups_[i])];
    slot = std::max(slot, std::abs(v[i]));
  }
  for (std::size_t gid = 0; gid < per_group_.size(); ++gid) {
    if (per_group_[gid] < 0.0) {
      throw ConfigError("group_max_abs: group " + std::to_string(gid) + " is empty");
    }
  }
}

double GroupMaxAbs::group(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= per_group_.size()) {
    throw ConfigError("group_max_abs: unknown group " + std::to_string(id));
  }
  return per_group_[static_cast<std::size_t>(id)];
}

GroupMaxAbs group_max_abs(std::span<const double> v, std::span<const int> group_ids) {
  return GroupMaxAbs(v, group_ids);
}

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_length(a.size(), b.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

double norm_inf(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace adarem
