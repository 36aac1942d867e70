#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "sgbl/linalg.hpp"
#include "sgbl/model.hpp"

namespace sgbl {

/// Low-noise condition P(|p(X) - 1/2| <= h) <= C h^gamma for 0 < h < h_star.
struct MarginParams {
  double C = 1.0;
  double gamma = 0.0;
  double h_star = 0.4;
  double rms_residual = 0.0;  // of the log-log fit
  std::size_t points_used = 0;
};

using Classifier = std::function<int(const Vector&)>;

/// sign(x'theta) with ties resolved to +1.
int plug_in_classifier(const Vector& theta, const Vector& x);
Classifier make_plug_in(Vector theta);

struct RiskEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// P(Y != eta(X)) under the logistic law at theta0, Monte Carlo over X.
RiskEstimate misclassification_risk_mc(const Classifier& eta, const Vector& theta0,
                                       const DesignDistribution& design, Index n_mc,
                                       std::uint64_t seed);

/// Excess risk of the plug-in classifier of theta over the Bayes classifier,
/// from E[|2 p(X) - 1| 1{eta_theta(X) != eta*(X)}].
RiskEstimate excess_risk_mc(const Vector& theta, const Vector& theta0,
                            const DesignDistribution& design, Index n_mc, std::uint64_t seed);
/// Same quantity as R(eta_theta) - R(eta*) on common design draws.
RiskEstimate excess_risk_difference_mc(const Vector& theta, const Vector& theta0,
                                       const DesignDistribution& design, Index n_mc,
                                       std::uint64_t seed);

/// Pointwise excess risk averaged over a fixed design sample.
double excess_risk_from_scores(const Eigen::Ref<const Vector>& score,
                               const Eigen::Ref<const Vector>& score0);

/// Risk of the randomized rule Y = +1 w.p. p_theta(x):
/// E[p0 (1 - p_theta) + (1 - p0) p_theta].
RiskEstimate randomized_classifier_risk_mc(const Vector& theta, const Vector& theta0,
                                           const DesignDistribution& design, Index n_mc,
                                           std::uint64_t seed);

struct MarginPoint {
  double h;
  double prob;
};

/// Empirical P(|sigma(X'theta0) - 1/2| <= h) on a grid of h in (0, 1/2).
std::vector<MarginPoint> margin_curve(const Vector& theta0, const DesignDistribution& design,
                                      const std::vector<double>& h_grid, Index n_mc,
                                      std::uint64_t seed);

/// Log-log least squares fit of the margin curve. h_star is the largest grid
/// value below 0.4 whose prefix fit keeps the RMS log residual under
/// `max_rms_residual`.
MarginParams fit_gamma(const std::vector<MarginPoint>& curve, double max_rms_residual = 0.05);

/// Geometric grid of `count` values on [lo, hi].
std::vector<double> geometric_grid(double lo, double hi, std::size_t count);

}  // namespace sgbl
