#include "sgbl/posterior.hpp"

#include <cmath>
#include <limits>

#include "sgbl/sampler.hpp"

namespace sgbl {

FractionalTarget::FractionalTarget(double alpha, std::shared_ptr<const Dataset> data,
                                   PriorSpec prior)
    : alpha_(alpha), data_(std::move(data)), prior_(std::move(prior)) {
  require(data_ != nullptr, "fractional target needs a dataset");
  require(alpha_ >= 0.0 && alpha_ <= 1.0, "alpha must be in [0, 1]");
  data_->validate();
  validate_prior(prior_, data_->dim());
}

double FractionalTarget::log_density(const Vector& theta) const {
  require_dims(theta.size(), dim(), "log_target");
  const double lp = prior_log_density(theta, prior_);
  if (lp == -std::numeric_limits<double>::infinity()) return lp;
  return alpha_ * log_likelihood(theta, *data_) + lp;
}

bool FractionalTarget::interior(const Vector& theta) const {
  return theta.size() == dim() && prior_interior(theta, prior_);
}

double FractionalTarget::log_density_and_grad(const Vector& theta, Vector& grad) const {
  require_dims(theta.size(), dim(), "grad_log_target");
  if (!prior_interior(theta, prior_)) {
    throw ConfigError("gradient requested at a point outside the interior of the prior support");
  }
  const double ll = log_likelihood_and_grad(theta, *data_, grad);
  grad *= alpha_;
  grad += prior_grad_log_density(theta, prior_);
  return alpha_ * ll + prior_log_density(theta, prior_);
}

double log_target_unnorm(const FractionalTarget& target, const Vector& theta) {
  return target.log_density(theta);
}

Vector grad_log_target(const FractionalTarget& target, const Vector& theta) {
  return target.grad(theta);
}

Coefficients posterior_mean(const SampleSet& samples) {
  if (samples.size() == 0) throw ConfigError("posterior_mean: empty sample set");
  return Coefficients(samples.draws.colwise().mean().transpose());
}

}  // namespace sgbl
