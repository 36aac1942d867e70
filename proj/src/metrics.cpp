#include "sgbl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Eigenvalues>

namespace sgbl {

// ---------------------------------------------------------------------------
// Two-point kernels

double renyi(const BinaryLaw& p, const BinaryLaw& r, double alpha) {
  require(alpha > 0.0 && alpha < 1.0, "renyi: alpha must be in (0, 1)");
  // a - 1 = r+ (exp(alpha log(p+/r+)) - 1) + r- (exp(alpha log(p-/r-)) - 1)
  const double am1 = r.pos() * std::expm1(alpha * (p.log_pos - r.log_pos)) +
                     r.neg() * std::expm1(alpha * (p.log_neg - r.log_neg));
  // a <= 1 by Hoelder; clip rounding so the divergence stays >= 0.
  return std::max(0.0, std::log1p(std::min(am1, 0.0)) / (alpha - 1.0));
}

double hellinger2(const BinaryLaw& p, const BinaryLaw& r) {
  const double a = std::exp(0.5 * p.log_pos) - std::exp(0.5 * r.log_pos);
  const double b = std::exp(0.5 * p.log_neg) - std::exp(0.5 * r.log_neg);
  return a * a + b * b;
}

double total_variation(const BinaryLaw& p, const BinaryLaw& r) {
  return std::abs(p.pos() - r.pos());
}

double kl(const BinaryLaw& p, const BinaryLaw& r) {
  const double v = p.pos() * (p.log_pos - r.log_pos) + p.neg() * (p.log_neg - r.log_neg);
  return std::max(0.0, v);
}

BinaryLaw bernoulli_law(double prob_pos) {
  return {std::log(prob_pos), std::log1p(-prob_pos)};
}

namespace {

void check_open_unit(double p, const char* name) {
  if (!(p > 0.0 && p < 1.0)) {
    throw ConfigError(std::string(name) + " must be in the open interval (0, 1)");
  }
}

}  // namespace

double bernoulli_renyi(double p, double q, double alpha) {
  check_open_unit(p, "p");
  check_open_unit(q, "q");
  return renyi(bernoulli_law(p), bernoulli_law(q), alpha);
}

double bernoulli_hellinger2(double p, double q) {
  check_open_unit(p, "p");
  check_open_unit(q, "q");
  return hellinger2(bernoulli_law(p), bernoulli_law(q));
}

double bernoulli_tv(double p, double q) {
  check_open_unit(p, "p");
  check_open_unit(q, "q");
  return std::abs(p - q);
}

double bernoulli_kl(double p, double q) {
  check_open_unit(p, "p");
  check_open_unit(q, "q");
  return kl(bernoulli_law(p), bernoulli_law(q));
}

// ---------------------------------------------------------------------------
// Joint divergences

namespace {

struct MeanSe {
  double mean;
  double se;
};

template <class F>
MeanSe average(Index n, F&& f) {
  // Welford keeps the zero-divergence case exactly zero.
  double mean = 0.0;
  double m2 = 0.0;
  for (Index j = 0; j < n; ++j) {
    const double v = f(j);
    const double delta = v - mean;
    mean += delta / static_cast<double>(j + 1);
    m2 += delta * (v - mean);
  }
  const double var = n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
  return {mean, std::sqrt(std::max(0.0, var) / static_cast<double>(n))};
}

struct Scores {
  Vector s;
  Vector s0;
};

Scores scores(const Vector& theta, const Vector& theta0, const Matrix& X) {
  require_dims(theta.size(), X.cols(), "joint divergence theta");
  require_dims(theta0.size(), X.cols(), "joint divergence theta0");
  require(X.rows() >= 1, "joint divergence needs design draws");
  return {X * theta, X * theta0};
}

Matrix draw_design(const DesignDistribution& design, Index n_mc, std::uint64_t seed) {
  require(n_mc >= 1, "n_mc must be >= 1");
  design.validate();
  Rng rng(seed);
  return design.sample(n_mc, rng);
}

}  // namespace

DivergenceEstimate joint_renyi(const Vector& theta, const Vector& theta0, double alpha,
                               const Matrix& X, const LabelGenerator& truth) {
  require(alpha > 0.0 && alpha < 1.0, "renyi: alpha must be in (0, 1)");
  const auto sc = scores(theta, theta0, X);
  // Inner average of a(x) - 1, then log1p; delta method for the error.
  const MeanSe m = average(X.rows(), [&](Index j) {
    const BinaryLaw p = logistic_law(sc.s[j]);
    const BinaryLaw r = truth.law(sc.s0[j]);
    return std::min(0.0, r.pos() * std::expm1(alpha * (p.log_pos - r.log_pos)) +
                             r.neg() * std::expm1(alpha * (p.log_neg - r.log_neg)));
  });
  const double value = std::max(0.0, std::log1p(m.mean) / (alpha - 1.0));
  const double se = m.se / ((1.0 + m.mean) * (1.0 - alpha));
  return {value, se, X.rows()};
}

DivergenceEstimate joint_hellinger2(const Vector& theta, const Vector& theta0, const Matrix& X,
                                    const LabelGenerator& truth) {
  const auto sc = scores(theta, theta0, X);
  const MeanSe m = average(X.rows(), [&](Index j) {
    return hellinger2(logistic_law(sc.s[j]), truth.law(sc.s0[j]));
  });
  return {m.mean, m.se, X.rows()};
}

DivergenceEstimate joint_tv(const Vector& theta, const Vector& theta0, const Matrix& X,
                            const LabelGenerator& truth) {
  const auto sc = scores(theta, theta0, X);
  const MeanSe m = average(X.rows(), [&](Index j) {
    return total_variation(logistic_law(sc.s[j]), truth.law(sc.s0[j]));
  });
  return {m.mean, m.se, X.rows()};
}

DivergenceEstimate joint_kl(const Vector& theta, const Vector& theta0, const Matrix& X,
                            const LabelGenerator& truth) {
  const auto sc = scores(theta, theta0, X);
  const MeanSe m = average(X.rows(), [&](Index j) {
    return kl(truth.law(sc.s0[j]), logistic_law(sc.s[j]));
  });
  return {m.mean, m.se, X.rows()};
}

DivergenceEstimate joint_renyi_mc(const Vector& theta, const Vector& theta0, double alpha,
                                  const DesignDistribution& design, Index n_mc,
                                  std::uint64_t seed) {
  return joint_renyi(theta, theta0, alpha, draw_design(design, n_mc, seed));
}

DivergenceEstimate joint_hellinger2_mc(const Vector& theta, const Vector& theta0,
                                       const DesignDistribution& design, Index n_mc,
                                       std::uint64_t seed) {
  return joint_hellinger2(theta, theta0, draw_design(design, n_mc, seed));
}

DivergenceEstimate joint_tv_mc(const Vector& theta, const Vector& theta0,
                               const DesignDistribution& design, Index n_mc, std::uint64_t seed) {
  return joint_tv(theta, theta0, draw_design(design, n_mc, seed));
}

DivergenceEstimate joint_kl_mc(const Vector& theta, const Vector& theta0,
                               const DesignDistribution& design, Index n_mc, std::uint64_t seed) {
  return joint_kl(theta, theta0, draw_design(design, n_mc, seed));
}

JointDivergences joint_divergences_from_scores(const Eigen::Ref<const Vector>& score,
                                               const std::vector<BinaryLaw>& truth_laws,
                                               double alpha) {
  require_dims(score.size(), static_cast<Index>(truth_laws.size()), "joint divergences");
  const Index m = score.size();
  double am1 = 0.0, h2 = 0.0, tv = 0.0, klv = 0.0;
  for (Index j = 0; j < m; ++j) {
    const BinaryLaw p = logistic_law(score[j]);
    const BinaryLaw& r = truth_laws[static_cast<std::size_t>(j)];
    am1 += std::min(0.0, r.pos() * std::expm1(alpha * (p.log_pos - r.log_pos)) +
                             r.neg() * std::expm1(alpha * (p.log_neg - r.log_neg)));
    h2 += hellinger2(p, r);
    tv += total_variation(p, r);
    klv += kl(r, p);
  }
  const double inv = 1.0 / static_cast<double>(m);
  JointDivergences out;
  out.renyi = std::max(0.0, std::log1p(am1 * inv) / (alpha - 1.0));
  out.hellinger2 = h2 * inv;
  out.tv = tv * inv;
  out.kl = klv * inv;
  return out;
}

// ---------------------------------------------------------------------------
// Design statistics

DesignStats design_stats(const Matrix& rows) {
  require(rows.rows() >= 1, "design_stats needs at least one row");
  const Index n = rows.rows();
  const double inv = 1.0 / static_cast<double>(n);
  DesignStats out;
  out.n = n;
  const Vector norms = rows.rowwise().norm();
  out.K1 = 2.0 * norms.sum() * inv;
  out.K2 = 4.0 * norms.squaredNorm() * inv;
  out.G = rows.transpose() * rows * inv;
  out.G = 0.5 * (out.G + out.G.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(out.G, Eigen::EigenvaluesOnly);
  out.lambda_min = std::max(0.0, es.eigenvalues()[0]);
  out.singular_warning = n < rows.cols();
  return out;
}

DesignStats design_stats(const DesignDistribution& design, Index n_mc, std::uint64_t seed) {
  return design_stats(draw_design(design, n_mc, seed));
}

DesignStats design_stats(const Dataset& data) { return design_stats(data.X); }

double weighted_param_error(const Vector& theta, const Vector& theta0, const Matrix& G) {
  require_dims(theta.size(), theta0.size(), "weighted_param_error");
  require(G.rows() == G.cols(), "weighted_param_error: G must be square");
  require_dims(G.rows(), theta.size(), "weighted_param_error");
  const Vector diff = theta - theta0;
  return std::max(0.0, diff.dot(G * diff));
}

// ---------------------------------------------------------------------------
// Compatibility numbers

Vector compatibility_weights(const Matrix& X, const Vector& theta0) {
  require_dims(X.cols(), theta0.size(), "compatibility_weights");
  const Vector score = X * theta0;
  return score.unaryExpr([](double t) { return std::sqrt(sigmoid(t) * sigmoid(-t)); });
}

namespace {

// Calls f(indices) for every k-subset of {0..d-1} in lexicographic order.
template <class F>
void for_each_subset(Index d, Index k, F&& f) {
  std::vector<Index> idx(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    f(idx);
    Index i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == d - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < k; ++j)
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

}  // namespace

CompatibilityNumbers compatibility_numbers_weighted(const Matrix& A, Index s) {
  const Index d = A.cols();
  if (d > 15) throw ConfigError("compatibility numbers: d > 15 is not supported (enumeration)");
  require(s >= 1 && s <= d, "compatibility numbers: need 1 <= s <= d");
  const Matrix gram = A.transpose() * A;
  const double scale = std::max(1.0, gram.diagonal().cwiseAbs().maxCoeff());

  CompatibilityNumbers out;
  out.phi1 = std::numeric_limits<double>::infinity();
  out.phi2 = std::numeric_limits<double>::infinity();

  for (Index k = 1; k <= s; ++k) {
    for_each_subset(d, k, [&](const std::vector<Index>& S) {
      Matrix M(k, k);
      for (Index a = 0; a < k; ++a)
        for (Index b = 0; b < k; ++b)
          M(a, b) = gram(S[static_cast<std::size_t>(a)], S[static_cast<std::size_t>(b)]);
      Eigen::SelfAdjointEigenSolver<Matrix> es(M, Eigen::EigenvaluesOnly);
      const double lmin = es.eigenvalues()[0];
      out.phi2 = std::min(out.phi2, std::max(0.0, lmin));
      if (lmin <= 1e-13 * scale) {
        out.phi1 = 0.0;
        return;
      }
      // On a fixed sign orthant sigma, ||theta||_1 = sigma'theta, so the
      // minimum of theta'M theta / (sigma'theta)^2 is 1 / (sigma'M^-1 sigma),
      // attained at M^-1 sigma when that point lies inside the orthant.
      // Solutions on the orthant boundary belong to a smaller support.
      const Eigen::LDLT<Matrix> ldlt(M);
      Vector sigma(k);
      const std::uint64_t patterns = std::uint64_t{1} << (k - 1);
      for (std::uint64_t mask = 0; mask < patterns; ++mask) {
        sigma[0] = 1.0;
        for (Index a = 1; a < k; ++a) sigma[a] = (mask >> (a - 1)) & 1U ? -1.0 : 1.0;
        const Vector w = ldlt.solve(sigma);
        if ((sigma.array() * w.array() > 0.0).all()) {
          out.phi1 = std::min(out.phi1, static_cast<double>(k) / sigma.dot(w));
        }
      }
    });
  }
  return out;
}

CompatibilityNumbers compatibility_numbers(const Matrix& X, const Vector& theta0, Index s) {
  const Vector w = compatibility_weights(X, theta0);
  return compatibility_numbers_weighted(w.asDiagonal() * X, s);
}

}  // namespace sgbl
