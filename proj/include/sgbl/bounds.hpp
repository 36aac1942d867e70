#pragma once

#include <cstdint>
#include <string>

#include "sgbl/linalg.hpp"
#include "sgbl/model.hpp"

namespace sgbl {

/// eps_n = max(K1, sparsity term) / n with both arms kept.
struct RateBound {
  double epsilon_n = 0.0;
  double k1_arm = 0.0;        // K1 / n
  double sparsity_arm = 0.0;  // sparsity-log term / n
  Index n = 0;
  Index d = 0;
  Index s_star = 0;
  double c1 = 0.0;
  double K1 = 0.0;
};

/// (K1 v 4 s log(c1 n sqrt(d) / s)) / n. Requires s >= 1 and c1 n sqrt(d) / s > 1.
RateBound epsilon_n_student(Index n, Index d, Index s_star, double c1, double K1);

/// (K1 v s log(n d)) / n. Requires n d > 1.
RateBound epsilon_n_spike_slab(Index n, Index d, Index s_star, double K1);

/// 2(a+1)/(1-a) on [0.5, 1), 2(a+1)/a on (0, 0.5).
double h_alpha(double alpha);

enum class ConcentrationMetric { renyi, hellinger2, tv2 };

double concentration_bound(double alpha, double epsilon_n, ConcentrationMetric metric);

/// (1 + a)/(1 - a) eps_n.
double expectation_bound(double alpha, double epsilon_n);

/// (K1 / n) v (4 s log(c1 n sqrt(d) / s) + log 2) / n with s = ||theta*||_0.
double misspecified_r_n(Index n, Index d, double c1, Index theta_star_l0, double K1);
double misspecified_r_n(Index n, Index d, double c1, const Coefficients& theta_star, double K1);

/// a/(1-a) KL(P0, P*) + (1+a)/(1-a) r_n.
double misspecified_bound(double alpha, double kl_star, double r_n);

/// eps_n^((gamma + 1)/(gamma + 2)).
double excess_risk_rate(double epsilon_n, double gamma);

/// 4 s log(c1 / (tau s)) + log 2. Requires c1 / (tau s) > 1.
double kl_lemma_bound(Index s_star, double c1, double tau);

/// 4 d tau^2.
double l2_lemma_bound(Index d, double tau);

struct LemmaReport {
  double tau = 0.0;
  double kl_estimate = 0.0;
  double kl_se = 0.0;
  double kl_bound = 0.0;
  bool kl_pass = false;
  double l2_estimate = 0.0;
  double l2_se = 0.0;
  double l2_bound = 0.0;
  bool l2_pass = false;
  Index accepted_translated = 0;  // effective sample size of p0 draws
  Index accepted_prior = 0;       // proposals inside the l1 ball of radius c1
  Index n_mc = 0;
};

/// Monte Carlo check of the translated-prior lemmas with tau = 1/(n sqrt d):
/// KL(p0, pi) through importance-sampled normalizing constants (proposal =
/// unrestricted product density) and E_p0 ||theta - theta0||^2. A bound
/// passes when estimate + 3 SE stays below it. Requires d <= 10; throws
/// NumericalError when fewer than 100 proposals are accepted.
LemmaReport verify_lemmas_mc(Index n, Index d, Index s_star, double c1, const Vector& theta0,
                             Index n_mc, std::uint64_t seed);

}  // namespace sgbl
