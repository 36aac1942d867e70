#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "sgbl/errors.hpp"
#include "sgbl/linalg.hpp"
#include "sgbl/model.hpp"

namespace sgbl {

/// Scaled Student prior: density proportional to prod_i (tau^2 + theta_i^2)^-2
/// on the l1 ball of radius c1.
struct StudentPriorConfig {
  double tau = 0.0;
  double c1 = 1e4;

  /// Checks tau > 0, c1 > 0 and the technical condition c1 > 2 d tau.
  void validate(Index d) const;
};

/// Two-Gaussian mixture per coordinate: p N(0, v1) + (1 - p) N(0, v0).
struct SpikeSlabConfig {
  double p = 0.0;
  double v0 = 0.0;
  double v1 = 1.0;

  void validate() const;
};

using PriorSpec = std::variant<StudentPriorConfig, SpikeSlabConfig>;

std::string prior_kind(const PriorSpec& prior);
void validate_prior(const PriorSpec& prior, Index d);

/// log of the unnormalized Student density; -inf outside the l1 ball.
double student_log_density_unnorm(const Vector& theta, const StudentPriorConfig& cfg);

/// Requires ||theta||_1 < c1; throws ConfigError on the boundary or outside.
Vector student_grad_log_density(const Vector& theta, const StudentPriorConfig& cfg);

/// tau = 1 / (n sqrt(d)).
double default_tau(Index n, Index d);

/// Draws each coordinate as tau * T / sqrt(3) with T ~ t_3 (this is the law
/// whose density is proportional to (tau^2 + x^2)^-2), then rejects draws
/// outside the l1 ball. Throws when the rejection rate exceeds 0.999.
Coefficients sample_student_prior(const StudentPriorConfig& cfg, Index d, Rng& rng);
Coefficients sample_student_prior(const StudentPriorConfig& cfg, Index d, std::uint64_t seed);

/// One unrestricted coordinate draw from the (tau^2 + x^2)^-2 law.
double sample_student_coordinate(double tau, Rng& rng);

/// Normalizing constant of the unrestricted 1-d density (tau^2 + x^2)^-2,
/// i.e. pi / (2 tau^3), in log form.
double student_log_normalizer_1d(double tau);

double spike_slab_log_density(const Vector& theta, const SpikeSlabConfig& cfg);
Vector spike_slab_grad_log_density(const Vector& theta, const SpikeSlabConfig& cfg);

/// p = 1 - exp(-1/d), v0 = 1 / (2 n^2 d log d), v1 = 1.
SpikeSlabConfig spike_slab_defaults(Index n, Index d);

Coefficients sample_spike_slab_prior(const SpikeSlabConfig& cfg, Index d, Rng& rng);

/// Prior log density (normalized for spike-and-slab, unnormalized for Student).
double prior_log_density(const Vector& theta, const PriorSpec& prior);
/// True when the prior density is positive and differentiable at theta.
bool prior_interior(const Vector& theta, const PriorSpec& prior);
Vector prior_grad_log_density(const Vector& theta, const PriorSpec& prior);

/// Student prior translated to `center` and restricted to the l1 ball of
/// radius 2 d tau around it.
class TranslatedPrior {
 public:
  TranslatedPrior(Coefficients center, StudentPriorConfig base);

  const Coefficients& center() const noexcept { return center_; }
  const StudentPriorConfig& base() const noexcept { return base_; }
  double radius() const noexcept { return radius_; }

  /// Unnormalized log density; -inf outside the ball.
  double log_density_unnorm(const Vector& theta) const;

 private:
  Coefficients center_;
  StudentPriorConfig base_;
  double radius_;
};

struct TranslatedDraw {
  Coefficients theta;
  std::int64_t attempts;  // proposals used, >= 1
};

/// Rejection sampler from the unrestricted product density.
TranslatedDraw sample_translated_prior(const TranslatedPrior& tp, Rng& rng);
Coefficients sample_translated_prior(const TranslatedPrior& tp, std::uint64_t seed);

}  // namespace sgbl
