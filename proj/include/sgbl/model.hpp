#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sgbl/errors.hpp"
#include "sgbl/linalg.hpp"
#include "sgbl/rng.hpp"

namespace sgbl {

/// Coefficient vector with sparsity metadata computed on demand.
class Coefficients {
 public:
  Coefficients() = default;
  explicit Coefficients(Vector values) : values_(std::move(values)) {}

  static Coefficients zeros(Index d) { return Coefficients(Vector::Zero(d)); }

  const Vector& values() const noexcept { return values_; }
  Index dim() const noexcept { return values_.size(); }
  double operator[](Index i) const { return values_[i]; }

  std::vector<Index> support() const;
  Index s_star() const;
  double l1() const { return values_.lpNorm<1>(); }
  double l2() const { return values_.norm(); }

 private:
  Vector values_;
};

enum class DesignKind { gaussian, uniform_sphere, point_mass, finite_grid };

/// Law of a single covariate row X. `point_mass` and `finite_grid` exist so
/// closed-form two-point values and exhaustive averages can serve as oracles.
struct DesignDistribution {
  DesignKind kind = DesignKind::gaussian;
  Index dim = 0;
  double variance = 0.0;  // gaussian: X ~ N(0, variance * I)
  Matrix points;          // point_mass: 1 row; finite_grid: uniform over rows

  static DesignDistribution gaussian(Index d, double variance);
  /// N(0, I/d): E||X||^2 = 1.
  static DesignDistribution gaussian_default(Index d) { return gaussian(d, 1.0 / static_cast<double>(d)); }
  static DesignDistribution uniform_sphere(Index d);
  static DesignDistribution point_mass(const Vector& x);
  static DesignDistribution finite_grid(Matrix rows);

  void validate() const;
  /// n draws, one per row.
  Matrix sample(Index n, Rng& rng) const;
  std::string name() const;
};

/// Probability of a binary label given a linear score, in log space.
struct BinaryLaw {
  double log_pos;  // log P(Y = +1 | x)
  double log_neg;  // log P(Y = -1 | x)

  double pos() const;
  double neg() const;
};

double log_sigmoid(double t);
double sigmoid(double t);
BinaryLaw logistic_law(double score);

enum class LinkKind { logistic, probit, label_flip };

/// True label mechanism used for data generation. Non-logistic links are the
/// misspecified generators.
struct LabelGenerator {
  LinkKind link = LinkKind::logistic;
  double probit_scale = 1.0;  // probit: P(+1) = Phi(probit_scale * score)
  double flip_rate = 0.0;     // label_flip: logistic labels flipped w.p. rho

  static LabelGenerator logistic() { return {}; }
  static LabelGenerator probit(double scale = 1.0) { return {LinkKind::probit, scale, 0.0}; }
  static LabelGenerator label_flip(double rho) { return {LinkKind::label_flip, 1.0, rho}; }

  void validate() const;
  BinaryLaw law(double score) const;
  std::string name() const;
};

struct DatasetMeta {
  DesignDistribution design;
  Vector theta0;
  std::uint64_t seed = 0;
  LabelGenerator generator;
};

/// Rows of X are observations; y holds exactly -1 or +1.
struct Dataset {
  Matrix X;
  Vector y;
  DatasetMeta meta;

  Index n() const noexcept { return X.rows(); }
  Index dim() const noexcept { return X.cols(); }
  void validate() const;
};

/// P(Y = y | x, theta) = sigma(y x'theta).
double conditional_prob(const Vector& theta, const Vector& x, int y);

double log_likelihood(const Vector& theta, const Dataset& data);

/// r_n(theta, theta0) = log L(theta0) - log L(theta).
double neg_log_lik_ratio(const Vector& theta, const Vector& theta0, const Dataset& data);

Vector grad_log_likelihood(const Vector& theta, const Dataset& data);

/// Log-likelihood and its gradient from one pass over X.
double log_likelihood_and_grad(const Vector& theta, const Dataset& data, Vector& grad);

/// s_star coordinates chosen uniformly, each set to +-magnitude.
Coefficients generate_theta0(Index d, Index s_star, double magnitude, std::uint64_t seed);

Dataset generate_dataset(const Vector& theta0, Index n, const DesignDistribution& design,
                         std::uint64_t seed,
                         const LabelGenerator& generator = LabelGenerator::logistic());

/// Stable digest of (X, y), used to tie sample sets to their data.
std::string data_digest(const Dataset& data);

}  // namespace sgbl
