#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "adarem/optim.hpp"
#include "adarem/params.hpp"
#include "adarem/problems.hpp"
#include "adarem/project.hpp"

namespace adarem {

// State of AdaRem-S. The coordinates in `sphere_groups` (all coordinates when
// empty) are kept on the sphere of radius R; the rest follow plain AdaRem.
struct SphereState {
  double radius;
  double virtual_norm;  // rho: norm of the equivalent Euclidean iterate
  double alpha;         // rho / radius
  AdaRemState inner;
  std::vector<int> sphere_groups;

  // rho_0 = ||theta0|| over the sphere coordinates, alpha_0 = rho_0 / R.
  SphereState(const ParamVector& theta0, double radius, std::vector<int> sphere_groups = {});
};

// theta / ||theta|| * R. Throws DomainError for a zero vector or R <= 0.
std::vector<double> project_to_sphere(std::span<const double> theta, double radius);
ParamVector project_to_sphere(const ParamVector& theta, double radius);

// True for coordinates that live on the sphere.
std::vector<bool> sphere_mask(const ParamVector& theta, std::span<const int> sphere_groups);

// Renormalizes only the masked coordinates to radius R.
ParamVector project_to_sphere(const ParamVector& theta, double radius,
                              std::span<const int> sphere_groups);

// One AdaRem-S iteration at sphere rate `lr`: the AdaRem update (weight decay
// and feasible-set projection included) at theta_hat, then renormalization.
// Momentum is built from the on-sphere gradient. lambda_pow is left to the
// caller. Throws NumericError if the sphere coordinates collapse to zero.
StepResult adarem_s_step(const ParamVector& theta_hat, const GradVector& g, SphereState& state,
                         const AdaRemConfig& cfg, const FeasibleSet& feasible, double lr);

// Sphere learning rate. Returns eta = eta_prime / (alpha^2 (1 - eta_prime gamma))
// for the current alpha, then advances the virtual Euclidean trajectory:
//   rho' = sqrt(((1 - eta_prime gamma) rho)^2 + (eta_prime grad_norm / alpha)^2)
//   alpha' = rho' / R
// grad_norm is ||grad L|| at the on-sphere point; the Euclidean gradient at
// the virtual point is that divided by alpha (gradients scale as 1/c).
// The (1 - eta_prime gamma) factor accounts for the Euclidean iterate shrinking
// under weight decay before the gradient step; with gamma = 0 the rate is
// eta_prime / alpha^2.
// Throws NumericError when alpha falls below 1e-12.
double slr_update(SphereState& state, double eta_prime, double gamma, double grad_norm);

// normalize(theta_hat - eta g) * R
ParamVector spherical_sgd_step(const ParamVector& theta_hat, const GradVector& g, double eta,
                               double radius);

struct ScaleInvarianceReport {
  double orthogonality;  // |<grad L, theta>| / (||grad L|| ||theta||)
  double homogeneity;    // ||grad L(theta) - c grad L(c theta)|| / ||grad L(theta)||
};

// Residuals of <grad L, theta> = 0 and grad L(theta) = c grad L(c theta).
// Both are 0 for a zero gradient.
ScaleInvarianceReport check_scale_invariance(const Problem& p, std::span<const double> theta,
                                             double c, std::size_t batch = kFullBatch);

// AdaRem-S behind the common optimizer contract. With use_slr the scheduled
// rate is taken as the Euclidean rate eta' and converted by slr_update using
// the configured weight decay.
class AdaRemS final : public Optimizer {
 public:
  AdaRemS(AdaRemConfig cfg, const ParamVector& theta0, double radius, bool use_slr,
          std::vector<int> sphere_groups = {});

  std::string name() const override { return "adarem_s"; }
  StepResult step(const ParamVector& theta, const GradVector& g, double lr,
                  const FeasibleSet& feasible) override;
  void end_epoch() override;

  // theta0 mapped onto the sphere; the run starts here.
  const ParamVector& initial_point() const { return start_; }
  const SphereState& state() const { return state_; }

 private:
  AdaRemConfig cfg_;
  SphereState state_;
  ParamVector start_;
  bool use_slr_;
};

}  // namespace adarem
