#include "sgbl/risk.hpp"

#include <algorithm>
#include <cmath>

namespace sgbl {

int plug_in_classifier(const Vector& theta, const Vector& x) {
  require_dims(theta.size(), x.size(), "plug_in_classifier");
  return x.dot(theta) >= 0.0 ? 1 : -1;
}

Classifier make_plug_in(Vector theta) {
  return [theta = std::move(theta)](const Vector& x) { return plug_in_classifier(theta, x); };
}

namespace {

Matrix draw(const DesignDistribution& design, Index n_mc, std::uint64_t seed) {
  require(n_mc >= 2, "n_mc must be >= 2");
  design.validate();
  Rng rng(seed);
  return design.sample(n_mc, rng);
}

template <class F>
RiskEstimate average(Index n, F&& f) {
  double mean = 0.0;
  double m2 = 0.0;
  for (Index j = 0; j < n; ++j) {
    const double v = f(j);
    const double delta = v - mean;
    mean += delta / static_cast<double>(j + 1);
    m2 += delta * (v - mean);
  }
  return {mean, std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n))};
}

int sign_of(double score) { return score >= 0.0 ? 1 : -1; }

// P(Y != label | x) when P(Y = +1 | x) = sigma(score0).
double error_prob(int label, double score0) {
  return label == 1 ? sigmoid(-score0) : sigmoid(score0);
}

}  // namespace

RiskEstimate misclassification_risk_mc(const Classifier& eta, const Vector& theta0,
                                       const DesignDistribution& design, Index n_mc,
                                       std::uint64_t seed) {
  require_dims(theta0.size(), design.dim, "misclassification_risk_mc");
  const Matrix X = draw(design, n_mc, seed);
  const Vector s0 = X * theta0;
  return average(n_mc, [&](Index j) {
    return error_prob(eta(X.row(j).transpose()), s0[j]);
  });
}

double excess_risk_from_scores(const Eigen::Ref<const Vector>& score,
                               const Eigen::Ref<const Vector>& score0) {
  require_dims(score.size(), score0.size(), "excess_risk_from_scores");
  double total = 0.0;
  for (Index j = 0; j < score.size(); ++j) {
    // |2 sigma(t) - 1| = |tanh(t / 2)|
    if (sign_of(score[j]) != sign_of(score0[j])) total += std::abs(std::tanh(0.5 * score0[j]));
  }
  return total / static_cast<double>(score.size());
}

RiskEstimate excess_risk_mc(const Vector& theta, const Vector& theta0,
                            const DesignDistribution& design, Index n_mc, std::uint64_t seed) {
  require_dims(theta.size(), design.dim, "excess_risk_mc");
  require_dims(theta0.size(), design.dim, "excess_risk_mc");
  const Matrix X = draw(design, n_mc, seed);
  const Vector s = X * theta;
  const Vector s0 = X * theta0;
  return average(n_mc, [&](Index j) {
    return sign_of(s[j]) != sign_of(s0[j]) ? std::abs(std::tanh(0.5 * s0[j])) : 0.0;
  });
}

RiskEstimate excess_risk_difference_mc(const Vector& theta, const Vector& theta0,
                                       const DesignDistribution& design, Index n_mc,
                                       std::uint64_t seed) {
  require_dims(theta.size(), design.dim, "excess_risk_difference_mc");
  require_dims(theta0.size(), design.dim, "excess_risk_difference_mc");
  const Matrix X = draw(design, n_mc, seed);
  const Vector s = X * theta;
  const Vector s0 = X * theta0;
  return average(n_mc, [&](Index j) {
    return error_prob(sign_of(s[j]), s0[j]) - error_prob(sign_of(s0[j]), s0[j]);
  });
}

RiskEstimate randomized_classifier_risk_mc(const Vector& theta, const Vector& theta0,
                                           const DesignDistribution& design, Index n_mc,
                                           std::uint64_t seed) {
  require_dims(theta.size(), design.dim, "randomized_classifier_risk_mc");
  require_dims(theta0.size(), design.dim, "randomized_classifier_risk_mc");
  const Matrix X = draw(design, n_mc, seed);
  const Vector s = X * theta;
  const Vector s0 = X * theta0;
  return average(n_mc, [&](Index j) {
    const double p0 = sigmoid(s0[j]);
    const double p = sigmoid(s[j]);
    return p0 * (1.0 - p) + (1.0 - p0) * p;
  });
}

std::vector<MarginPoint> margin_curve(const Vector& theta0, const DesignDistribution& design,
                                      const std::vector<double>& h_grid, Index n_mc,
                                      std::uint64_t seed) {
  require_dims(theta0.size(), design.dim, "margin_curve");
  for (double h : h_grid) require(h > 0.0 && h < 0.5, "margin_curve: h must be in (0, 1/2)");
  const Matrix X = draw(design, n_mc, seed);
  const Vector s0 = X * theta0;
  std::vector<double> gap(static_cast<std::size_t>(n_mc));
  for (Index j = 0; j < n_mc; ++j) gap[static_cast<std::size_t>(j)] = std::abs(sigmoid(s0[j]) - 0.5);
  std::sort(gap.begin(), gap.end());
  std::vector<MarginPoint> out;
  out.reserve(h_grid.size());
  for (double h : h_grid) {
    const auto count = std::upper_bound(gap.begin(), gap.end(), h) - gap.begin();
    out.push_back({h, static_cast<double>(count) / static_cast<double>(n_mc)});
  }
  return out;
}

namespace {

struct LineFit {
  double intercept;
  double slope;
  double rms;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  const double intercept = my - slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - intercept - slope * x[i];
    ss += r * r;
  }
  return {intercept, slope, std::sqrt(ss / n)};
}

}  // namespace

MarginParams fit_gamma(const std::vector<MarginPoint>& curve, double max_rms_residual) {
  require(curve.size() >= 5, "fit_gamma needs at least 5 curve points");
  std::vector<MarginPoint> pts;
  for (const auto& p : curve) {
    if (p.prob > 0.0 && p.h > 0.0 && p.h < 0.4) pts.push_back(p);
  }
  if (pts.empty()) throw ConfigError("fit_gamma: all probabilities are zero on the grid");
  std::sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.h < b.h; });
  require(pts.size() >= 3, "fit_gamma needs at least 3 positive points below h = 0.4");

  auto fit_prefix = [&](std::size_t count) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < count; ++i) {
      lx.push_back(std::log(pts[i].h));
      ly.push_back(std::log(pts[i].prob));
    }
    return fit_line(lx, ly);
  };

  // Largest admissible h_star first; the smallest prefix (3 points) is the
  // fallback when no prefix meets the residual threshold.
  std::size_t used = 3;
  LineFit fit = fit_prefix(3);
  for (std::size_t count = pts.size(); count >= 3; --count) {
    const LineFit f = fit_prefix(count);
    if (f.rms <= max_rms_residual) {
      used = count;
      fit = f;
      break;
    }
  }
  MarginParams out;
  out.gamma = std::max(0.0, fit.slope);
  out.C = std::exp(fit.intercept);
  out.h_star = pts[used - 1].h;
  out.rms_residual = fit.rms;
  out.points_used = used;
  return out;
}

std::vector<double> geometric_grid(double lo, double hi, std::size_t count) {
  require(lo > 0.0 && hi > lo && count >= 2, "geometric_grid: need 0 < lo < hi, count >= 2");
  std::vector<double> g(count);
  const double r = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) g[i] = lo * std::exp(r * static_cast<double>(i));
  g.back() = hi;
  return g;
}

}  // namespace sgbl
