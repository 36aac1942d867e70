#pragma once

#include <memory>
#include <string>

#include "sgbl/linalg.hpp"
#include "sgbl/model.hpp"
#include "sgbl/priors.hpp"

namespace sgbl {

/// Unnormalized log density with gradient, as consumed by the samplers.
class LogTarget {
 public:
  virtual ~LogTarget() = default;

  virtual Index dim() const = 0;
  /// -inf outside the support.
  virtual double log_density(const Vector& theta) const = 0;
  /// Points where the density is positive and differentiable.
  virtual bool interior(const Vector& theta) const = 0;
  /// Log density and gradient in one evaluation. Requires interior(theta).
  virtual double log_density_and_grad(const Vector& theta, Vector& grad) const = 0;

  Vector grad(const Vector& theta) const {
    Vector g;
    log_density_and_grad(theta, g);
    return g;
  }
};

/// alpha * log L_n(theta) + log pi(theta). alpha = 1 is the usual posterior;
/// alpha = 0 is accepted as the degenerate prior-only target.
class FractionalTarget final : public LogTarget {
 public:
  FractionalTarget(double alpha, std::shared_ptr<const Dataset> data, PriorSpec prior);

  double alpha() const noexcept { return alpha_; }
  const Dataset& data() const noexcept { return *data_; }
  const PriorSpec& prior() const noexcept { return prior_; }

  Index dim() const override { return data_->dim(); }
  double log_density(const Vector& theta) const override;
  bool interior(const Vector& theta) const override;
  double log_density_and_grad(const Vector& theta, Vector& grad) const override;

 private:
  double alpha_;
  std::shared_ptr<const Dataset> data_;
  PriorSpec prior_;
};

/// Independent N(mean, variance I) target. Sampler calibration hook.
class GaussianTarget final : public LogTarget {
 public:
  explicit GaussianTarget(Index d, double variance = 1.0)
      : mean_(Vector::Zero(d)), variance_(variance) {}
  GaussianTarget(Vector mean, double variance) : mean_(std::move(mean)), variance_(variance) {}

  Index dim() const override { return mean_.size(); }
  double log_density(const Vector& theta) const override {
    return -0.5 * (theta - mean_).squaredNorm() / variance_;
  }
  bool interior(const Vector& theta) const override { return theta.allFinite(); }
  double log_density_and_grad(const Vector& theta, Vector& grad) const override {
    grad = -(theta - mean_) / variance_;
    return log_density(theta);
  }

 private:
  Vector mean_;
  double variance_;
};

/// Equals FractionalTarget::log_density; kept as the named operation.
double log_target_unnorm(const FractionalTarget& target, const Vector& theta);
/// Throws ConfigError for non-interior theta.
Vector grad_log_target(const FractionalTarget& target, const Vector& theta);

struct SampleSet;
/// Coordinate-wise mean of retained draws.
Coefficients posterior_mean(const SampleSet& samples);

}  // namespace sgbl
