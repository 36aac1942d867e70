#include "sgbl/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sgbl/priors.hpp"

namespace sgbl {

RateBound epsilon_n_student(Index n, Index d, Index s_star, double c1, double K1) {
  require(n >= 1 && d >= 1, "epsilon_n: need n, d >= 1");
  require(s_star >= 1, "epsilon_n: need s_star >= 1");
  const double nn = static_cast<double>(n);
  const double arg = c1 * nn * std::sqrt(static_cast<double>(d)) / static_cast<double>(s_star);
  require(arg > 1.0, "epsilon_n: need c1 n sqrt(d) / s_star > 1");
  RateBound r;
  r.k1_arm = K1 / nn;
  r.sparsity_arm = 4.0 * static_cast<double>(s_star) * std::log(arg) / nn;
  r.epsilon_n = std::max(r.k1_arm, r.sparsity_arm);
  r.n = n;
  r.d = d;
  r.s_star = s_star;
  r.c1 = c1;
  r.K1 = K1;
  return r;
}

RateBound epsilon_n_spike_slab(Index n, Index d, Index s_star, double K1) {
  require(n >= 1 && d >= 1 && n * d > 1, "epsilon_n_spike_slab: need n d > 1");
  require(s_star >= 0, "epsilon_n_spike_slab: need s_star >= 0");
  const double nn = static_cast<double>(n);
  RateBound r;
  r.k1_arm = K1 / nn;
  r.sparsity_arm = static_cast<double>(s_star) * std::log(nn * static_cast<double>(d)) / nn;
  r.epsilon_n = std::max(r.k1_arm, r.sparsity_arm);
  r.n = n;
  r.d = d;
  r.s_star = s_star;
  r.K1 = K1;
  return r;
}

double h_alpha(double alpha) {
  require(alpha > 0.0 && alpha < 1.0, "h_alpha: alpha must be in (0, 1)");
  return alpha >= 0.5 ? 2.0 * (alpha + 1.0) / (1.0 - alpha) : 2.0 * (alpha + 1.0) / alpha;
}

double concentration_bound(double alpha, double epsilon_n, ConcentrationMetric metric) {
  require(alpha > 0.0 && alpha < 1.0, "concentration_bound: alpha must be in (0, 1)");
  switch (metric) {
    case ConcentrationMetric::renyi:
      return 2.0 * (alpha + 1.0) / (1.0 - alpha) * epsilon_n;
    case ConcentrationMetric::hellinger2:
      return h_alpha(alpha) * epsilon_n;
    case ConcentrationMetric::tv2:
      return 4.0 * (alpha + 1.0) / ((1.0 - alpha) * alpha) * epsilon_n;
  }
  return 0.0;
}

double expectation_bound(double alpha, double epsilon_n) {
  require(alpha > 0.0 && alpha < 1.0, "expectation_bound: alpha must be in (0, 1)");
  return (1.0 + alpha) / (1.0 - alpha) * epsilon_n;
}

double misspecified_r_n(Index n, Index d, double c1, Index theta_star_l0, double K1) {
  require(theta_star_l0 >= 1, "misspecified_r_n: need ||theta*||_0 >= 1");
  require(n >= 1 && d >= 1, "misspecified_r_n: need n, d >= 1");
  const double nn = static_cast<double>(n);
  const double s = static_cast<double>(theta_star_l0);
  const double arm = (4.0 * s * std::log(c1 * nn * std::sqrt(static_cast<double>(d)) / s) +
                      std::numbers::ln2) / nn;
  return std::max(K1 / nn, arm);
}

double misspecified_r_n(Index n, Index d, double c1, const Coefficients& theta_star, double K1) {
  return misspecified_r_n(n, d, c1, theta_star.s_star(), K1);
}

double misspecified_bound(double alpha, double kl_star, double r_n) {
  require(alpha > 0.0 && alpha < 1.0, "misspecified_bound: alpha must be in (0, 1)");
  return alpha / (1.0 - alpha) * kl_star + (1.0 + alpha) / (1.0 - alpha) * r_n;
}

double excess_risk_rate(double epsilon_n, double gamma) {
  require(epsilon_n > 0.0, "excess_risk_rate: epsilon_n must be > 0");
  require(gamma >= 0.0, "excess_risk_rate: gamma must be >= 0");
  if (std::isinf(gamma)) return epsilon_n;
  return std::pow(epsilon_n, (gamma + 1.0) / (gamma + 2.0));
}

double kl_lemma_bound(Index s_star, double c1, double tau) {
  require(s_star >= 1 && tau > 0.0, "kl_lemma_bound: need s_star >= 1, tau > 0");
  const double s = static_cast<double>(s_star);
  const double arg = c1 / (tau * s);
  require(arg > 1.0, "kl_lemma_bound: need c1 / (tau s_star) > 1");
  return 4.0 * s * std::log(arg) + std::numbers::ln2;
}

double l2_lemma_bound(Index d, double tau) { return 4.0 * static_cast<double>(d) * tau * tau; }

LemmaReport verify_lemmas_mc(Index n, Index d, Index s_star, double c1, const Vector& theta0,
                             Index n_mc, std::uint64_t seed) {
  require(d >= 2 && d <= 10, "verify_lemmas_mc: need 2 <= d <= 10");
  require_dims(theta0.size(), d, "verify_lemmas_mc");
  require(n_mc >= 100, "verify_lemmas_mc: n_mc must be >= 100");
  LemmaReport rep;
  rep.n_mc = n_mc;
  rep.tau = default_tau(n, d);
  const StudentPriorConfig base{rep.tau, c1};
  const TranslatedPrior tp(Coefficients(theta0), base);
  rep.kl_bound = kl_lemma_bound(std::max<Index>(s_star, 1), c1, rep.tau);
  rep.l2_bound = l2_lemma_bound(d, rep.tau);

  Rng rng(seed);
  const double t2 = rep.tau * rep.tau;
  auto log_unnorm = [t2](const Vector& v) {
    double s = 0.0;
    for (Index i = 0; i < v.size(); ++i) s += std::log(t2 + v[i] * v[i]);
    return -2.0 * s;
  };

  // Proposals from the unrestricted product density: those inside the
  // radius-2d tau ball are exact p0 draws (delta = theta - theta0), and the
  // acceptance frequency estimates Z_p0 / Z_unrestricted.
  double kl_mean = 0.0, kl_m2 = 0.0, l2_mean = 0.0, l2_m2 = 0.0;
  Index k = 0;
  Vector delta(d);
  for (Index j = 0; j < n_mc; ++j) {
    for (Index i = 0; i < d; ++i) delta[i] = sample_student_coordinate(rep.tau, rng);
    if (delta.lpNorm<1>() > tp.radius()) continue;
    ++k;
    const Vector theta = theta0 + delta;
    const double term = log_unnorm(delta) - log_unnorm(theta);
    const double sq = delta.squaredNorm();
    const double dk = term - kl_mean;
    kl_mean += dk / static_cast<double>(k);
    kl_m2 += dk * (term - kl_mean);
    const double dl = sq - l2_mean;
    l2_mean += dl / static_cast<double>(k);
    l2_m2 += dl * (sq - l2_mean);
  }
  // Same proposal for Z_pi / Z_unrestricted (fraction inside the c1 ball).
  Index inside = 0;
  for (Index j = 0; j < n_mc; ++j) {
    for (Index i = 0; i < d; ++i) delta[i] = sample_student_coordinate(rep.tau, rng);
    if (delta.lpNorm<1>() <= c1) ++inside;
  }
  rep.accepted_translated = k;
  rep.accepted_prior = inside;
  if (k < 100 || inside < 100) {
    throw NumericalError("verify_lemmas_mc: importance-sampling effective sample size below 100");
  }
  const double nmc = static_cast<double>(n_mc);
  const double p0 = static_cast<double>(k) / nmc;
  const double ppi = static_cast<double>(inside) / nmc;
  rep.kl_estimate = kl_mean - std::log(p0) + std::log(ppi);
  const double var_term = k > 1 ? kl_m2 / static_cast<double>(k - 1) : 0.0;
  rep.kl_se = std::sqrt(var_term / static_cast<double>(k) + (1.0 - p0) / (p0 * nmc) +
                        (1.0 - ppi) / (ppi * nmc));
  rep.l2_estimate = l2_mean;
  rep.l2_se = std::sqrt((k > 1 ? l2_m2 / static_cast<double>(k - 1) : 0.0) / static_cast<double>(k));
  rep.kl_pass = rep.kl_estimate + 3.0 * rep.kl_se <= rep.kl_bound;
  rep.l2_pass = rep.l2_estimate + 3.0 * rep.l2_se <= rep.l2_bound;
  return rep;
}

}  // namespace sgbl
