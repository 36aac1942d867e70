#include "sgbl/priors.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace sgbl {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093454835606594728112;

double log_normal_pdf0(double x, double var) {
  return -0.5 * (kLog2Pi + std::log(var)) - 0.5 * x * x / var;
}

double logaddexp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

}  // namespace

void StudentPriorConfig::validate(Index d) const {
  require(tau > 0.0 && std::isfinite(tau), "student prior: tau must be > 0");
  require(c1 > 0.0, "student prior: c1 must be > 0");
  require(c1 > 2.0 * static_cast<double>(d) * tau, "student prior: requires c1 > 2 d tau");
}

void SpikeSlabConfig::validate() const {
  // p = 1 and v0 = v1 are accepted as degenerate limits.
  require(p > 0.0 && p <= 1.0, "spike-slab: p must be in (0, 1]");
  require(v0 > 0.0 && v1 > 0.0, "spike-slab: variances must be > 0");
  require(v0 <= v1, "spike-slab: requires v0 <= v1");
}

std::string prior_kind(const PriorSpec& prior) {
  return std::holds_alternative<StudentPriorConfig>(prior) ? "student" : "spike_slab";
}

void validate_prior(const PriorSpec& prior, Index d) {
  if (const auto* s = std::get_if<StudentPriorConfig>(&prior)) {
    s->validate(d);
  } else {
    std::get<SpikeSlabConfig>(prior).validate();
  }
}

// ---------------------------------------------------------------------------
// Student

double student_log_density_unnorm(const Vector& theta, const StudentPriorConfig& cfg) {
  if (theta.lpNorm<1>() > cfg.c1) return kNegInf;
  const double t2 = cfg.tau * cfg.tau;
  double s = 0.0;
  for (Index i = 0; i < theta.size(); ++i) s += std::log(t2 + theta[i] * theta[i]);
  return -2.0 * s;
}

Vector student_grad_log_density(const Vector& theta, const StudentPriorConfig& cfg) {
  if (!(theta.lpNorm<1>() < cfg.c1)) {
    throw ConfigError("student prior gradient requested outside the open l1 ball");
  }
  const double t2 = cfg.tau * cfg.tau;
  return theta.unaryExpr([t2](double v) { return -4.0 * v / (t2 + v * v); });
}

double default_tau(Index n, Index d) {
  require(n >= 1 && d >= 1, "default_tau needs n, d >= 1");
  return 1.0 / (static_cast<double>(n) * std::sqrt(static_cast<double>(d)));
}

double student_log_normalizer_1d(double tau) {
  return std::log(std::numbers::pi / 2.0) - 3.0 * std::log(tau);
}

double sample_student_coordinate(double tau, Rng& rng) {
  std::student_t_distribution<double> t3(3.0);
  return tau * t3(rng) / std::sqrt(3.0);
}

Coefficients sample_student_prior(const StudentPriorConfig& cfg, Index d, Rng& rng) {
  cfg.validate(d);
  constexpr int kMaxAttempts = 1000;  // all rejected => rate > 0.999
  Vector v(d);
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    for (Index i = 0; i < d; ++i) v[i] = sample_student_coordinate(cfg.tau, rng);
    if (v.lpNorm<1>() <= cfg.c1) return Coefficients(v);
  }
  throw ConfigError("student prior sampler: rejection rate above 0.999, c1 too small");
}

Coefficients sample_student_prior(const StudentPriorConfig& cfg, Index d, std::uint64_t seed) {
  Rng rng(seed);
  return sample_student_prior(cfg, d, rng);
}

// ---------------------------------------------------------------------------
// Spike and slab

double spike_slab_log_density(const Vector& theta, const SpikeSlabConfig& cfg) {
  const double lp = std::log(cfg.p);
  const double lq = cfg.p < 1.0 ? std::log1p(-cfg.p) : kNegInf;
  double s = 0.0;
  for (Index i = 0; i < theta.size(); ++i) {
    s += logaddexp(lp + log_normal_pdf0(theta[i], cfg.v1),
                   lq + log_normal_pdf0(theta[i], cfg.v0));
  }
  return s;
}

Vector spike_slab_grad_log_density(const Vector& theta, const SpikeSlabConfig& cfg) {
  const double lp = std::log(cfg.p);
  const double lq = cfg.p < 1.0 ? std::log1p(-cfg.p) : kNegInf;
  Vector g(theta.size());
  for (Index i = 0; i < theta.size(); ++i) {
    const double a1 = lp + log_normal_pdf0(theta[i], cfg.v1);
    const double a0 = lq + log_normal_pdf0(theta[i], cfg.v0);
    const double lse = logaddexp(a1, a0);
    const double r1 = std::exp(a1 - lse);
    const double r0 = a0 == kNegInf ? 0.0 : std::exp(a0 - lse);
    g[i] = -theta[i] * (r1 / cfg.v1 + r0 / cfg.v0);
  }
  return g;
}

SpikeSlabConfig spike_slab_defaults(Index n, Index d) {
  require(d >= 2, "spike_slab_defaults needs d >= 2");
  require(n >= 1, "spike_slab_defaults needs n >= 1");
  const double dd = static_cast<double>(d);
  const double nn = static_cast<double>(n);
  SpikeSlabConfig cfg;
  cfg.p = -std::expm1(-1.0 / dd);
  cfg.v0 = 1.0 / (2.0 * nn * nn * dd * std::log(dd));
  cfg.v1 = 1.0;
  return cfg;
}

Coefficients sample_spike_slab_prior(const SpikeSlabConfig& cfg, Index d, Rng& rng) {
  cfg.validate();
  std::bernoulli_distribution slab(cfg.p);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(d);
  for (Index i = 0; i < d; ++i) {
    const double sd = std::sqrt(slab(rng) ? cfg.v1 : cfg.v0);
    v[i] = sd * normal(rng);
  }
  return Coefficients(std::move(v));
}

// ---------------------------------------------------------------------------
// Generic dispatch

double prior_log_density(const Vector& theta, const PriorSpec& prior) {
  if (const auto* s = std::get_if<StudentPriorConfig>(&prior)) {
    return student_log_density_unnorm(theta, *s);
  }
  return spike_slab_log_density(theta, std::get<SpikeSlabConfig>(prior));
}

bool prior_interior(const Vector& theta, const PriorSpec& prior) {
  if (const auto* s = std::get_if<StudentPriorConfig>(&prior)) {
    return theta.lpNorm<1>() < s->c1;
  }
  return theta.allFinite();
}

Vector prior_grad_log_density(const Vector& theta, const PriorSpec& prior) {
  if (const auto* s = std::get_if<StudentPriorConfig>(&prior)) {
    return student_grad_log_density(theta, *s);
  }
  return spike_slab_grad_log_density(theta, std::get<SpikeSlabConfig>(prior));
}

// ---------------------------------------------------------------------------
// Translated prior

TranslatedPrior::TranslatedPrior(Coefficients center, StudentPriorConfig base)
    : center_(std::move(center)), base_(base) {
  const Index d = center_.dim();
  base_.validate(d);
  radius_ = 2.0 * static_cast<double>(d) * base_.tau;
  require(center_.l1() <= base_.c1 - radius_,
          "translated prior: requires ||center||_1 <= c1 - 2 d tau");
}

double TranslatedPrior::log_density_unnorm(const Vector& theta) const {
  const Vector delta = theta - center_.values();
  if (delta.lpNorm<1>() > radius_) return kNegInf;
  const double t2 = base_.tau * base_.tau;
  double s = 0.0;
  for (Index i = 0; i < delta.size(); ++i) s += std::log(t2 + delta[i] * delta[i]);
  return -2.0 * s;
}

TranslatedDraw sample_translated_prior(const TranslatedPrior& tp, Rng& rng) {
  const Index d = tp.center().dim();
  Vector delta(d);
  constexpr std::int64_t kMaxAttempts = 1000000;
  for (std::int64_t attempt = 1; attempt <= kMaxAttempts; ++attempt) {
    for (Index i = 0; i < d; ++i) delta[i] = sample_student_coordinate(tp.base().tau, rng);
    if (delta.lpNorm<1>() <= tp.radius()) {
      return {Coefficients(tp.center().values() + delta), attempt};
    }
  }
  throw NumericalError("translated prior sampler: no acceptance in 1e6 proposals");
}

Coefficients sample_translated_prior(const TranslatedPrior& tp, std::uint64_t seed) {
  Rng rng(seed);
  return sample_translated_prior(tp, rng).theta;
}

}  // namespace sgbl
