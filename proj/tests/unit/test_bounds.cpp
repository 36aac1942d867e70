#include <cmath>

#include "doctest.h"
#include "sgbl/bounds.hpp"

using namespace sgbl;
using doctest::Approx;

TEST_CASE("student rate") {
  const RateBound r = epsilon_n_student(100, 50, 2, 100.0, 2.0);
  CHECK(r.epsilon_n == Approx(0.8379).epsilon(1e-4));
  CHECK(r.epsilon_n == Approx(8.0 * std::log(100.0 * 100.0 * std::sqrt(50.0) / 2.0) / 100.0).epsilon(1e-14));
  CHECK(r.k1_arm == Approx(0.02).epsilon(1e-14));
  CHECK(r.epsilon_n == std::max(r.k1_arm, r.sparsity_arm));
  const RateBound big = epsilon_n_student(100, 50, 2, 100.0, 1e6);
  CHECK(big.epsilon_n == Approx(1e4).epsilon(1e-14));
  CHECK(big.epsilon_n == std::max(big.k1_arm, big.sparsity_arm));
  double prev = INFINITY;
  for (Index n = 50; n <= 100000; n *= 2) {
    const double e = epsilon_n_student(n, 50, 3, 1e4, 2.0).epsilon_n;
    CHECK(e < prev);
    prev = e;
  }
  CHECK_THROWS_AS(epsilon_n_student(100, 50, 0, 100.0, 2.0), ConfigError);
  CHECK_THROWS_AS(epsilon_n_student(1, 1, 2, 1.0, 2.0), ConfigError);
  CHECK(epsilon_n_student(100, 50, 2, 100.0, 2.0).epsilon_n == r.epsilon_n);
}

TEST_CASE("spike-and-slab rate") {
  const RateBound r = epsilon_n_spike_slab(100, 50, 2, 2.0);
  CHECK(r.epsilon_n == Approx(0.17034).epsilon(1e-4));
  CHECK(epsilon_n_spike_slab(100, 50, 0, 2.0).epsilon_n == Approx(0.02).epsilon(1e-14));
  CHECK(r.epsilon_n == std::max(r.k1_arm, r.sparsity_arm));
}

TEST_CASE("h_alpha and concentration multipliers") {
  CHECK(h_alpha(0.5) == Approx(6.0).epsilon(1e-14));
  CHECK(h_alpha(0.25) == Approx(10.0).epsilon(1e-14));
  CHECK(h_alpha(0.75) == Approx(14.0).epsilon(1e-14));
  CHECK_THROWS_AS(h_alpha(0.0), ConfigError);
  CHECK_THROWS_AS(h_alpha(1.0), ConfigError);

  CHECK(concentration_bound(0.5, 0.1, ConcentrationMetric::renyi) == Approx(0.6).epsilon(1e-14));
  CHECK(concentration_bound(0.5, 0.1, ConcentrationMetric::hellinger2) == Approx(0.6).epsilon(1e-14));
  // 4 (a+1) / ((1-a) a) at a = 1/2 is 24
  CHECK(concentration_bound(0.5, 0.1, ConcentrationMetric::tv2) == Approx(2.4).epsilon(1e-14));
  for (double a = 0.05; a < 1.0; a += 0.05) {
    CHECK(concentration_bound(a, 0.1, ConcentrationMetric::renyi) <=
          concentration_bound(a, 0.1, ConcentrationMetric::tv2));
  }
}

TEST_CASE("expectation bound") {
  CHECK(expectation_bound(0.5, 0.1) == Approx(0.3).epsilon(1e-14));
  CHECK(expectation_bound(1e-9, 0.1) == Approx(0.1).epsilon(1e-7));
  double prev = 0.0;
  for (double a = 0.05; a < 1.0; a += 0.05) {
    CHECK(expectation_bound(a, 0.1) > prev);
    prev = expectation_bound(a, 0.1);
  }
}

TEST_CASE("misspecified remainder") {
  CHECK(misspecified_r_n(100, 50, 100.0, 2, 2.0) == Approx(0.8448).epsilon(1e-4));
  CHECK(misspecified_r_n(100, 50, 100.0, 2, 2.0) ==
        Approx(epsilon_n_student(100, 50, 2, 100.0, 2.0).sparsity_arm + std::log(2.0) / 100.0).epsilon(1e-14));
  CHECK(misspecified_r_n(100, 50, 100.0, 2, 1e6) == Approx(1e4).epsilon(1e-14));
  Vector v = Vector::Zero(50);
  v[3] = 0.7;
  v[9] = -1.1;
  CHECK(misspecified_r_n(100, 50, 100.0, Coefficients(v), 2.0) == misspecified_r_n(100, 50, 100.0, 2, 2.0));
  CHECK_THROWS_AS(misspecified_r_n(100, 50, 100.0, 0, 2.0), ConfigError);
  CHECK(misspecified_bound(0.5, 0.2, 0.1) == Approx(0.2 + 0.3).epsilon(1e-14));
}

TEST_CASE("excess risk rate") {
  CHECK(excess_risk_rate(0.04, 0.0) == Approx(0.2).epsilon(1e-14));
  CHECK(excess_risk_rate(0.04, 1e9) == Approx(0.04).epsilon(1e-6));
  CHECK(excess_risk_rate(0.01, 1.0) == Approx(0.04642).epsilon(1e-4));
  CHECK_THROWS_AS(excess_risk_rate(0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(excess_risk_rate(0.1, -1.0), ConfigError);
}

TEST_CASE("lemma bounds") {
  CHECK(kl_lemma_bound(1, 10.0, 0.005) == Approx(31.097).epsilon(1e-4));
  CHECK(kl_lemma_bound(1, 20.0, 0.005) - kl_lemma_bound(1, 10.0, 0.005) ==
        Approx(4.0 * std::log(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(kl_lemma_bound(1, 0.001, 0.005), ConfigError);
  CHECK(l2_lemma_bound(4, 0.005) == Approx(4e-4).epsilon(1e-14));
}

TEST_CASE("Monte Carlo lemma verification") {
  Vector theta0 = Vector::Zero(4);
  theta0[1] = 1.5;
  const LemmaReport r = verify_lemmas_mc(100, 4, 1, 10.0, theta0, 200000, 7);
  CHECK(r.tau == Approx(0.005).epsilon(1e-14));
  CHECK(r.kl_bound == Approx(31.097).epsilon(1e-4));
  CHECK(r.l2_bound == Approx(4e-4).epsilon(1e-12));
  CHECK(r.kl_pass);
  CHECK(r.l2_pass);
  CHECK(r.kl_estimate + 3.0 * r.kl_se <= r.kl_bound);
  CHECK(r.l2_estimate + 3.0 * r.l2_se <= r.l2_bound);
  CHECK(r.accepted_translated >= 100);

  const LemmaReport z = verify_lemmas_mc(100, 4, 1, 10.0, Vector::Zero(4), 200000, 7);
  CHECK(z.kl_estimate < r.kl_estimate);

  const LemmaReport again = verify_lemmas_mc(100, 4, 1, 10.0, theta0, 200000, 7);
  CHECK(again.kl_estimate == r.kl_estimate);
  CHECK(again.l2_estimate == r.l2_estimate);
  CHECK_THROWS_AS(verify_lemmas_mc(100, 11, 1, 10.0, Vector::Zero(11), 1000, 1), ConfigError);
}
