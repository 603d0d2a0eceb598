#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "adarem/project.hpp"

namespace adarem {

// Batch id meaning "average over every batch of the problem".
inline constexpr std::size_t kFullBatch = std::numeric_limits<std::size_t>::max();

struct Minimizer {
  std::vector<double> point;
  double value;
};

// An objective that supplies the sequence f_t: f_t is the loss on batch b_t.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual std::string name() const = 0;
  virtual std::size_t dimension() const = 0;
  virtual std::size_t num_batches() const = 0;

  virtual double loss(std::span<const double> theta, std::size_t batch) const = 0;
  virtual std::vector<double> gradient(std::span<const double> theta,
                                       std::size_t batch) const = 0;

  // Minimizer over F of sum_k f_{batches[k]}, when a closed form exists.
  virtual std::optional<Minimizer> closed_form_min(std::span<const std::size_t> batches,
                                                   const FeasibleSet& feasible) const;
  // G2 with ||gradient|| <= G2 on the feasible set the problem was built for.
  virtual std::optional<double> grad_bound() const { return std::nullopt; }
  virtual bool convex() const { return false; }
  virtual bool scale_invariant() const { return false; }
  // Group label per coordinate (all zero unless overridden).
  virtual std::vector<int> group_ids() const;
};

// L(c theta) = L(theta) for all c > 0.
class ScaleInvariantProblem : public Problem {
 public:
  bool scale_invariant() const override { return true; }
};

// Deterministic sequence of batch ids. With shuffling, each epoch is a fresh
// permutation of [0, epoch_size); without it ids cycle in order.
class BatchStream {
 public:
  BatchStream(std::uint64_t seed, std::size_t epoch_size, bool shuffle = true);

  std::size_t next();
  std::size_t epoch_size() const { return order_.size(); }

 private:
  void reshuffle();

  std::mt19937_64 rng_;
  std::vector<std::size_t> order_;
  std::size_t pos_ = 0;
  bool shuffle_;
};

// ---------------------------------------------------------------------------

// f_t(x) = ||x - c_t||^2.
class OnlineQuadratic final : public Problem {
 public:
  // centers: T rows of length dim.
  OnlineQuadratic(std::vector<std::vector<double>> centers, double center_bound,
                  std::optional<double> box_half_width = std::nullopt);

  std::string name() const override { return "online_quadratic"; }
  std::size_t dimension() const override { return dim_; }
  std::size_t num_batches() const override { return centers_.size(); }
  double loss(std::span<const double> theta, std::size_t batch) const override;
  std::vector<double> gradient(std::span<const double> theta, std::size_t batch) const override;
  std::optional<Minimizer> closed_form_min(std::span<const std::size_t> batches,
                                           const FeasibleSet& feasible) const override;
  std::optional<double> grad_bound() const override;
  bool convex() const override { return true; }

  std::span<const double> center(std::size_t t) const { return centers_.at(t); }
  double center_bound() const { return center_bound_; }
  // 2 sqrt(dim) (r + center_bound): bound on ||grad f_t|| over [-r, r]^dim.
  double grad_bound_in_box(double half_width) const;

 private:
  std::vector<std::vector<double>> centers_;
  std::size_t dim_;
  double center_bound_;
  std::optional<double> box_half_width_;
};

// Centers drawn i.i.d. uniform in [-center_bound, center_bound]^dim.
OnlineQuadratic make_online_quadratic(std::size_t dim, std::size_t T, std::uint64_t seed,
                                      double center_bound,
                                      std::optional<double> box_half_width = std::nullopt);

// Row-major features with +-1 labels.
struct Dataset {
  std::size_t dim = 0;
  std::vector<double> features;
  std::vector<double> labels;

  std::size_t size() const { return labels.size(); }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(features).subspan(i * dim, dim);
  }
  bool operator==(const Dataset&) const = default;
};

// One sample per line, label in the last column. No header.
void save_csv(const Dataset& data, const std::filesystem::path& path);
Dataset load_csv(const std::filesystem::path& path);

// Mean binary logistic loss log(1 + exp(-y <theta, x>)) over a batch.
class LogisticProblem final : public Problem {
 public:
  LogisticProblem(Dataset data, std::size_t batch_size);

  std::string name() const override { return "logistic"; }
  std::size_t dimension() const override { return data_.dim; }
  std::size_t num_batches() const override { return num_batches_; }
  double loss(std::span<const double> theta, std::size_t batch) const override;
  std::vector<double> gradient(std::span<const double> theta, std::size_t batch) const override;
  bool convex() const override { return true; }

  const Dataset& data() const { return data_; }

 private:
  std::pair<std::size_t, std::size_t> range(std::size_t batch) const;

  Dataset data_;
  std::size_t batch_size_;
  std::size_t num_batches_;
};

// Labels are sign(<w*, x> / sqrt(dim) + noise) for a hidden w*, with noise
// standard deviation 0.5 and feature scales spread over [0.25, 4].
Dataset make_logistic_dataset(std::size_t dim, std::size_t n_samples, std::uint64_t seed);
LogisticProblem make_logistic(std::size_t dim, std::size_t n_samples, std::uint64_t seed,
                              std::size_t batch_size = 32);

// Two-layer classifier f(x) = sum_r v_r tanh(<w_r / ||w_r||, x>) with a fixed
// output layer v. Only the first-layer rows w_r are parameters, and each enters
// through its direction, so the loss is invariant to scaling any row (and
// hence the whole vector). Logistic loss against labels of a random teacher.
class ScaleInvariantNet final : public ScaleInvariantProblem {
 public:
  ScaleInvariantNet(std::size_t hidden, std::size_t inputs, Dataset data, std::vector<double> head,
                    std::size_t batch_size);

  std::string name() const override { return "scale_invariant_net"; }
  std::size_t dimension() const override { return hidden_ * inputs_; }
  std::size_t num_batches() const override { return num_batches_; }
  double loss(std::span<const double> theta, std::size_t batch) const override;
  std::vector<double> gradient(std::span<const double> theta, std::size_t batch) const override;

  std::size_t hidden() const { return hidden_; }
  std::size_t inputs() const { return inputs_; }

 private:
  std::pair<std::size_t, std::size_t> range(std::size_t batch) const;

  std::size_t hidden_;
  std::size_t inputs_;
  Dataset data_;
  std::vector<double> head_;
  std::size_t batch_size_;
  std::size_t num_batches_;
};

ScaleInvariantNet make_scale_invariant_net(std::size_t hidden, std::uint64_t seed,
                                           std::size_t inputs = 8, std::size_t n_samples = 256,
                                           std::size_t batch_size = 256);

// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h.
std::vector<double> finite_diff_gradient(const Problem& p, std::span<const double> theta,
                                         std::size_t batch, double h);

// ||analytic - finite difference|| / max(||analytic||, 1e-12).
double gradient_check(const Problem& p, std::span<const double> theta, std::size_t batch,
                      double h = 1e-6);

}  // namespace adarem
