#include "adarem/problems.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "adarem/errors.hpp"
#include "adarem/params.hpp"

namespace adarem {

namespace {

void check_theta(std::span<const double> theta, std::size_t dim, const std::string& who) {
  if (theta.size() != dim) {
    throw DimensionError(who + ": expected " + std::to_string(dim) + " parameters, got " +
                         std::to_string(theta.size()));
  }
}

// log(1 + exp(-s)) without overflow.
double softplus_neg(double s) {
  return s > 0.0 ? std::log1p(std::exp(-s)) : -s + std::log1p(std::exp(s));
}

// 1 / (1 + exp(s)) = sigma(-s)
double sigmoid_neg(double s) {
  if (s >= 0.0) {
    const double e = std::exp(-s);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(s));
}

std::pair<std::size_t, std::size_t> batch_range(std::size_t batch, std::size_t batch_size,
                                                std::size_t n, std::size_t num_batches) {
  if (batch == kFullBatch) return {0, n};
  if (batch >= num_batches) {
    throw DomainError("batch id " + std::to_string(batch) + " out of range");
  }
  const std::size_t lo = batch * batch_size;
  return {lo, std::min(n, lo + batch_size)};
}

std::size_t count_batches(std::size_t n, std::size_t batch_size) {
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  return (n + batch_size - 1) / batch_size;
}

}  // namespace

std::optional<Minimizer> Problem::closed_form_min(std::span<const std::size_t>,
                                                  const FeasibleSet&) const {
  return std::nullopt;
}

std::vector<int> Problem::group_ids() const { return std::vector<int>(dimension(), 0); }

// ---------------------------------------------------------------------------

BatchStream::BatchStream(std::uint64_t seed, std::size_t epoch_size, bool shuffle)
    : rng_(seed), order_(epoch_size), shuffle_(shuffle) {
  if (epoch_size == 0) throw ConfigError("BatchStream: epoch_size must be positive");
  for (std::size_t i = 0; i < epoch_size; ++i) order_[i] = i;
  reshuffle();
}

void BatchStream::reshuffle() {
  if (!shuffle_) return;
  // Fisher-Yates with the raw engine output so the sequence does not depend on
  // the standard library's distribution implementations.
  for (std::size_t i = order_.size() - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng_() % (i + 1));
    std::swap(order_[i], order_[j]);
  }
}

std::size_t BatchStream::next() {
  if (pos_ == order_.size()) {
    pos_ = 0;
    reshuffle();
  }
  return order_[pos_++];
}

// ---------------------------------------------------------------------------

OnlineQuadratic::OnlineQuadratic(std::vector<std::vector<double>> centers, double center_bound,
                                 std::optional<double> box_half_width)
    : centers_(std::move(centers)),
      dim_(centers_.empty() ? 0 : centers_.front().size()),
      center_bound_(center_bound),
      box_half_width_(box_half_width) {
  if (centers_.empty() || dim_ == 0) throw ConfigError("OnlineQuadratic: need T, dim >= 1");
  for (const auto& c : centers_) {
    if (c.size() != dim_) throw DimensionError("OnlineQuadratic: ragged centers");
  }
}

double OnlineQuadratic::loss(std::span<const double> theta, std::size_t batch) const {
  check_theta(theta, dim_, "OnlineQuadratic::loss");
  if (batch == kFullBatch) {
    double s = 0.0;
    for (std::size_t t = 0; t < centers_.size(); ++t) s += loss(theta, t);
    return s / static_cast<double>(centers_.size());
  }
  if (batch >= centers_.size()) throw DomainError("OnlineQuadratic: batch out of range");
  const auto& c = centers_[batch];
  double s = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) s += (theta[i] - c[i]) * (theta[i] - c[i]);
  return s;
}

std::vector<double> OnlineQuadratic::gradient(std::span<const double> theta,
                                              std::size_t batch) const {
  check_theta(theta, dim_, "OnlineQuadratic::gradient");
  std::vector<double> g(dim_, 0.0);
  if (batch == kFullBatch) {
    for (std::size_t t = 0; t < centers_.size(); ++t) {
      const auto gt = gradient(theta, t);
      for (std::size_t i = 0; i < dim_; ++i) g[i] += gt[i];
    }
    for (double& x : g) x /= static_cast<double>(centers_.size());
    return g;
  }
  if (batch >= centers_.size()) throw DomainError("OnlineQuadratic: batch out of range");
  const auto& c = centers_[batch];
  for (std::size_t i = 0; i < dim_; ++i) g[i] = 2.0 * (theta[i] - c[i]);
  return g;
}

std::optional<Minimizer> OnlineQuadratic::closed_form_min(std::span<const std::size_t> batches,
                                                          const FeasibleSet& feasible) const {
  if (batches.empty()) return std::nullopt;
  // sum_k ||x - c_k||^2 = K ||x - mean||^2 + const separates per coordinate,
  // so the box-constrained minimizer is the clamped mean.
  std::vector<double> mean(dim_, 0.0);
  for (std::size_t b : batches) {
    const auto& c = centers_.at(b);
    for (std::size_t i = 0; i < dim_; ++i) mean[i] += c[i];
  }
  for (double& x : mean) x /= static_cast<double>(batches.size());
  auto point = project(mean, feasible);
  double value = 0.0;
  for (std::size_t b : batches) value += loss(point, b);
  return Minimizer{std::move(point), value};
}

double OnlineQuadratic::grad_bound_in_box(double half_width) const {
  return 2.0 * std::sqrt(static_cast<double>(dim_)) * (half_width + center_bound_);
}

std::optional<double> OnlineQuadratic::grad_bound() const {
  if (!box_half_width_) return std::nullopt;
  return grad_bound_in_box(*box_half_width_);
}

OnlineQuadratic make_online_quadratic(std::size_t dim, std::size_t T, std::uint64_t seed,
                                      double center_bound, std::optional<double> box_half_width) {
  if (dim == 0 || T == 0) throw ConfigError("make_online_quadratic: dim and T must be >= 1");
  if (!(center_bound >= 0.0)) throw ConfigError("make_online_quadratic: negative center_bound");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-center_bound, center_bound);
  std::vector<std::vector<double>> centers(T, std::vector<double>(dim));
  for (auto& c : centers) {
    for (double& x : c) x = center_bound > 0.0 ? u(rng) : 0.0;
  }
  return OnlineQuadratic(std::move(centers), center_bound, box_half_width);
}

// ---------------------------------------------------------------------------

void save_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("save_csv: cannot open " + path.string());
  out.precision(17);
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double x : data.row(i)) out << x << ',';
    out << data.labels[i] << '\n';
  }
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("load_csv: cannot open " + path.string());
  Dataset data;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ConfigError("load_csv: bad number on line " + std::to_string(lineno));
      }
    }
    if (row.size() < 2) throw ConfigError("load_csv: need features and a label");
    if (data.labels.empty()) {
      data.dim = row.size() - 1;
    } else if (row.size() - 1 != data.dim) {
      throw ConfigError("load_csv: ragged row on line " + std::to_string(lineno));
    }
    data.labels.push_back(row.back());
    data.features.insert(data.features.end(), row.begin(), row.end() - 1);
  }
  return data;
}

// ---------------------------------------------------------------------------

LogisticProblem::LogisticProblem(Dataset data, std::size_t batch_size)
    : data_(std::move(data)),
      batch_size_(batch_size),
      num_batches_(count_batches(data_.size(), batch_size)) {
  if (data_.size() == 0 || data_.dim == 0) throw ConfigError("LogisticProblem: empty dataset");
  if (data_.features.size() != data_.size() * data_.dim) {
    throw DimensionError("LogisticProblem: feature matrix does not match labels");
  }
}

std::pair<std::size_t, std::size_t> LogisticProblem::range(std::size_t batch) const {
  return batch_range(batch, batch_size_, data_.size(), num_batches_);
}

double LogisticProblem::loss(std::span<const double> theta, std::size_t batch) const {
  check_theta(theta, data_.dim, "LogisticProblem::loss");
  const auto [lo, hi] = range(batch);
  double s = 0.0;
  for (std::size_t n = lo; n < hi; ++n) s += softplus_neg(data_.labels[n] * dot(theta, data_.row(n)));
  return s / static_cast<double>(hi - lo);
}

std::vector<double> LogisticProblem::gradient(std::span<const double> theta,
                                              std::size_t batch) const {
  check_theta(theta, data_.dim, "LogisticProblem::gradient");
  const auto [lo, hi] = range(batch);
  std::vector<double> g(data_.dim, 0.0);
  for (std::size_t n = lo; n < hi; ++n) {
    const auto x = data_.row(n);
    const double y = data_.labels[n];
    const double w = -y * sigmoid_neg(y * dot(theta, x));
    for (std::size_t i = 0; i < data_.dim; ++i) g[i] += w * x[i];
  }
  for (double& x : g) x /= static_cast<double>(hi - lo);
  return g;
}

Dataset make_logistic_dataset(std::size_t dim, std::size_t n_samples, std::uint64_t seed) {
  if (dim == 0) throw ConfigError("make_logistic: dim must be >= 1");
  if (n_samples < dim) throw ConfigError("make_logistic: need n_samples >= dim");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> log_scale(std::log(0.25), std::log(4.0));

  std::vector<double> scale(dim);
  for (double& s : scale) s = std::exp(log_scale(rng));
  std::vector<double> w_star(dim);
  for (double& w : w_star) w = normal(rng);

  Dataset data;
  data.dim = dim;
  data.features.resize(dim * n_samples);
  data.labels.resize(n_samples);
  const double inv_sqrt_dim = 1.0 / std::sqrt(static_cast<double>(dim));
  for (std::size_t n = 0; n < n_samples; ++n) {
    double z = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double x = scale[i] * normal(rng);
      data.features[n * dim + i] = x;
      z += w_star[i] * x;
    }
    z = z * inv_sqrt_dim + 0.5 * normal(rng);
    data.labels[n] = z >= 0.0 ? 1.0 : -1.0;
  }
  return data;
}

LogisticProblem make_logistic(std::size_t dim, std::size_t n_samples, std::uint64_t seed,
                              std::size_t batch_size) {
  return LogisticProblem(make_logistic_dataset(dim, n_samples, seed), batch_size);
}

// ---------------------------------------------------------------------------

ScaleInvariantNet::ScaleInvariantNet(std::size_t hidden, std::size_t inputs, Dataset data,
                                     std::vector<double> head, std::size_t batch_size)
    : hidden_(hidden),
      inputs_(inputs),
      data_(std::move(data)),
      head_(std::move(head)),
      batch_size_(batch_size),
      num_batches_(count_batches(data_.size(), batch_size)) {
  if (hidden_ == 0 || inputs_ == 0) throw ConfigError("ScaleInvariantNet: empty layer");
  if (data_.dim != inputs_) throw DimensionError("ScaleInvariantNet: data width != inputs");
  if (head_.size() != hidden_) throw DimensionError("ScaleInvariantNet: head size != hidden");
}

std::pair<std::size_t, std::size_t> ScaleInvariantNet::range(std::size_t batch) const {
  return batch_range(batch, batch_size_, data_.size(), num_batches_);
}

namespace {

// Row norms of the hidden x inputs weight matrix; zero rows have no direction.
std::vector<double> row_norms(std::span<const double> w, std::size_t hidden, std::size_t inputs) {
  std::vector<double> norms(hidden);
  for (std::size_t r = 0; r < hidden; ++r) {
    norms[r] = norm2(w.subspan(r * inputs, inputs));
    if (!(norms[r] > 0.0)) {
      throw DomainError("ScaleInvariantNet: row " + std::to_string(r) + " has zero norm");
    }
  }
  return norms;
}

}  // namespace

double ScaleInvariantNet::loss(std::span<const double> theta, std::size_t batch) const {
  check_theta(theta, dimension(), "ScaleInvariantNet::loss");
  const auto norms = row_norms(theta, hidden_, inputs_);
  const auto [lo, hi] = range(batch);
  double s = 0.0;
  for (std::size_t n = lo; n < hi; ++n) {
    const auto x = data_.row(n);
    double f = 0.0;
    for (std::size_t r = 0; r < hidden_; ++r) {
      f += head_[r] * std::tanh(dot(theta.subspan(r * inputs_, inputs_), x) / norms[r]);
    }
    s += softplus_neg(data_.labels[n] * f);
  }
  return s / static_cast<double>(hi - lo);
}

std::vector<double> ScaleInvariantNet::gradient(std::span<const double> theta,
                                                std::size_t batch) const {
  check_theta(theta, dimension(), "ScaleInvariantNet::gradient");
  const auto norms = row_norms(theta, hidden_, inputs_);
  const auto [lo, hi] = range(batch);
  const double inv_count = 1.0 / static_cast<double>(hi - lo);

  // Gradient with respect to the unit directions u_r first.
  std::vector<double> grad_u(dimension(), 0.0);
  std::vector<double> act(hidden_);
  for (std::size_t n = lo; n < hi; ++n) {
    const auto x = data_.row(n);
    const double y = data_.labels[n];
    double f = 0.0;
    for (std::size_t r = 0; r < hidden_; ++r) {
      act[r] = std::tanh(dot(theta.subspan(r * inputs_, inputs_), x) / norms[r]);
      f += head_[r] * act[r];
    }
    const double dl_df = -y * sigmoid_neg(y * f) * inv_count;
    for (std::size_t r = 0; r < hidden_; ++r) {
      const double dz = dl_df * head_[r] * (1.0 - act[r] * act[r]);
      for (std::size_t i = 0; i < inputs_; ++i) grad_u[r * inputs_ + i] += dz * x[i];
    }
  }

  // Chain through u = w / ||w||: dL/dw = (I - u u^T) dL/du / ||w||.
  std::vector<double> g(dimension());
  for (std::size_t r = 0; r < hidden_; ++r) {
    const auto w = theta.subspan(r * inputs_, inputs_);
    const auto gu = std::span<const double>(grad_u).subspan(r * inputs_, inputs_);
    const double radial = dot(gu, w) / norms[r];
    for (std::size_t i = 0; i < inputs_; ++i) {
      const double u = w[i] / norms[r];
      g[r * inputs_ + i] = (gu[i] - radial * u) / norms[r];
    }
  }
  return g;
}

ScaleInvariantNet make_scale_invariant_net(std::size_t hidden, std::uint64_t seed,
                                           std::size_t inputs, std::size_t n_samples,
                                           std::size_t batch_size) {
  if (hidden == 0) throw ConfigError("make_scale_invariant_net: hidden must be >= 1");
  if (inputs == 0 || n_samples == 0) throw ConfigError("make_scale_invariant_net: empty data");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<double> head(hidden);
  const double head_scale = 2.0 / std::sqrt(static_cast<double>(hidden));
  for (double& v : head) v = head_scale * normal(rng);

  // Teacher with the same architecture but its own first layer.
  std::vector<double> teacher(hidden * inputs);
  for (double& w : teacher) w = normal(rng);

  Dataset data;
  data.dim = inputs;
  data.features.resize(inputs * n_samples);
  data.labels.resize(n_samples);
  for (std::size_t n = 0; n < n_samples; ++n) {
    for (std::size_t i = 0; i < inputs; ++i) data.features[n * inputs + i] = normal(rng);
    const auto x = data.row(n);
    double f = 0.0;
    for (std::size_t r = 0; r < hidden; ++r) {
      const auto w = std::span<const double>(teacher).subspan(r * inputs, inputs);
      f += head[r] * std::tanh(dot(w, x) / norm2(w));
    }
    data.labels[n] = f >= 0.0 ? 1.0 : -1.0;
  }
  return ScaleInvariantNet(hidden, inputs, std::move(data), std::move(head), batch_size);
}

// ---------------------------------------------------------------------------

std::vector<double> finite_diff_gradient(const Problem& p, std::span<const double> theta,
                                         std::size_t batch, double h) {
  if (!(h > 0.0)) throw DomainError("finite_diff_gradient: step must be positive");
  std::vector<double> x(theta.begin(), theta.end());
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    x[i] = orig + h;
    const double up = p.loss(x, batch);
    x[i] = orig - h;
    const double down = p.loss(x, batch);
    x[i] = orig;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

double gradient_check(const Problem& p, std::span<const double> theta, std::size_t batch,
                      double h) {
  const auto analytic = p.gradient(theta, batch);
  const auto numeric = finite_diff_gradient(p, theta, batch, h);
  const auto diff = elementwise(ElementwiseOp::sub, analytic, numeric);
  return norm2(diff) / std::max(norm2(analytic), 1e-12);
}

}  // namespace adarem
