#pragma once

#include <cstdint>
#include <vector>

#include "sgbl/linalg.hpp"
#include "sgbl/model.hpp"

namespace sgbl {

// Two-point divergences. Argument order follows D(P, R): P is raised to alpha.

/// (1/(alpha-1)) log(p^a r^(1-a) + (1-p)^a (1-r)^(1-a)), evaluated as
/// log1p of a sum of expm1 terms so that P == R gives exactly 0.
double renyi(const BinaryLaw& p, const BinaryLaw& r, double alpha);
/// (sqrt p - sqrt r)^2 + (sqrt(1-p) - sqrt(1-r))^2
double hellinger2(const BinaryLaw& p, const BinaryLaw& r);
/// |P(+1) - R(+1)|
double total_variation(const BinaryLaw& p, const BinaryLaw& r);
/// KL(P || R)
double kl(const BinaryLaw& p, const BinaryLaw& r);

BinaryLaw bernoulli_law(double prob_pos);

/// Throws ConfigError when p or q is not in the open interval (0, 1).
double bernoulli_renyi(double p, double q, double alpha);
double bernoulli_hellinger2(double p, double q);
double bernoulli_tv(double p, double q);
double bernoulli_kl(double p, double q);

struct DivergenceEstimate {
  double value = 0.0;
  double std_error = 0.0;
  Index n_mc = 0;
};

// Joint divergences between P_theta and P_theta0 on (X, Y) with a shared
// design marginal. `truth` is the label law of the reference P_theta0
// (logistic for the well-specified model).

DivergenceEstimate joint_renyi(const Vector& theta, const Vector& theta0, double alpha,
                               const Matrix& design_draws,
                               const LabelGenerator& truth = LabelGenerator::logistic());
DivergenceEstimate joint_hellinger2(const Vector& theta, const Vector& theta0,
                                    const Matrix& design_draws,
                                    const LabelGenerator& truth = LabelGenerator::logistic());
DivergenceEstimate joint_tv(const Vector& theta, const Vector& theta0, const Matrix& design_draws,
                            const LabelGenerator& truth = LabelGenerator::logistic());
/// KL(P_theta0, P_theta).
DivergenceEstimate joint_kl(const Vector& theta, const Vector& theta0, const Matrix& design_draws,
                            const LabelGenerator& truth = LabelGenerator::logistic());

DivergenceEstimate joint_renyi_mc(const Vector& theta, const Vector& theta0, double alpha,
                                  const DesignDistribution& design, Index n_mc,
                                  std::uint64_t seed);
DivergenceEstimate joint_hellinger2_mc(const Vector& theta, const Vector& theta0,
                                       const DesignDistribution& design, Index n_mc,
                                       std::uint64_t seed);
DivergenceEstimate joint_tv_mc(const Vector& theta, const Vector& theta0,
                               const DesignDistribution& design, Index n_mc, std::uint64_t seed);
DivergenceEstimate joint_kl_mc(const Vector& theta, const Vector& theta0,
                               const DesignDistribution& design, Index n_mc, std::uint64_t seed);

/// Posterior-averaging kernel: `score[j] = x_j' theta` for a fixed set of
/// design draws, `truth_laws[j]` the reference label law at x_j. Lets the
/// harness score many draws against one design sample.
struct JointDivergences {
  double renyi = 0.0;
  double hellinger2 = 0.0;
  double tv = 0.0;
  double kl = 0.0;
};
JointDivergences joint_divergences_from_scores(const Eigen::Ref<const Vector>& score,
                                               const std::vector<BinaryLaw>& truth_laws,
                                               double alpha);

struct DesignStats {
  double K1 = 0.0;  // 2 E||X||
  double K2 = 0.0;  // 4 E||X||^2
  Matrix G;         // E[X X']
  double lambda_min = 0.0;
  Index n = 0;
  bool singular_warning = false;  // empirical G from fewer rows than columns
};

DesignStats design_stats(const DesignDistribution& design, Index n_mc, std::uint64_t seed);
DesignStats design_stats(const Matrix& rows);
DesignStats design_stats(const Dataset& data);

/// (theta - theta0)' G (theta - theta0).
double weighted_param_error(const Vector& theta, const Vector& theta0, const Matrix& G);

struct CompatibilityNumbers {
  double phi1 = 0.0;
  double phi2 = 0.0;
};

/// w_i = sqrt(sigma(x_i'theta0) (1 - sigma(x_i'theta0))).
Vector compatibility_weights(const Matrix& X, const Vector& theta0);

/// Compatibility numbers of the weighted design A = W0 X (rows = observations)
/// over supports of size <= s. phi2 is the smallest eigenvalue of A_S'A_S
/// over supports; phi1 minimizes ||A theta||^2 ||theta||_0 / ||theta||_1^2
/// exactly on every support and sign orthant. Limited to d <= 15.
CompatibilityNumbers compatibility_numbers_weighted(const Matrix& A, Index s);
CompatibilityNumbers compatibility_numbers(const Matrix& X, const Vector& theta0, Index s);

}  // namespace sgbl
