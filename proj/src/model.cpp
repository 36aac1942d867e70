#include "sgbl/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <sstream>
#include <iomanip>

namespace sgbl {

std::vector<Index> Coefficients::support() const {
  std::vector<Index> s;
  for (Index i = 0; i < values_.size(); ++i) {
    if (values_[i] != 0.0) s.push_back(i);
  }
  return s;
}

Index Coefficients::s_star() const {
  return static_cast<Index>((values_.array() != 0.0).count());
}

// ---------------------------------------------------------------------------
// Design distributions

DesignDistribution DesignDistribution::gaussian(Index d, double variance) {
  DesignDistribution out;
  out.kind = DesignKind::gaussian;
  out.dim = d;
  out.variance = variance;
  out.validate();
  return out;
}

DesignDistribution DesignDistribution::uniform_sphere(Index d) {
  DesignDistribution out;
  out.kind = DesignKind::uniform_sphere;
  out.dim = d;
  out.validate();
  return out;
}

DesignDistribution DesignDistribution::point_mass(const Vector& x) {
  DesignDistribution out;
  out.kind = DesignKind::point_mass;
  out.dim = x.size();
  out.points = x.transpose();
  out.validate();
  return out;
}

DesignDistribution DesignDistribution::finite_grid(Matrix rows) {
  DesignDistribution out;
  out.kind = DesignKind::finite_grid;
  out.dim = rows.cols();
  out.points = std::move(rows);
  out.validate();
  return out;
}

void DesignDistribution::validate() const {
  require(dim >= 1, "design dimension must be >= 1");
  switch (kind) {
    case DesignKind::gaussian:
      require(variance > 0.0 && std::isfinite(variance), "gaussian design requires variance > 0");
      break;
    case DesignKind::uniform_sphere:
      break;
    case DesignKind::point_mass:
      require(points.rows() == 1 && points.cols() == dim, "point_mass design needs one row");
      break;
    case DesignKind::finite_grid:
      require(points.rows() >= 1 && points.cols() == dim, "finite_grid design needs rows");
      break;
  }
}

Matrix DesignDistribution::sample(Index n, Rng& rng) const {
  Matrix X(n, dim);
  switch (kind) {
    case DesignKind::gaussian: {
      std::normal_distribution<double> normal(0.0, std::sqrt(variance));
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < dim; ++j) X(i, j) = normal(rng);
      break;
    }
    case DesignKind::uniform_sphere: {
      std::normal_distribution<double> normal(0.0, 1.0);
      for (Index i = 0; i < n; ++i) {
        double norm2 = 0.0;
        do {
          for (Index j = 0; j < dim; ++j) X(i, j) = normal(rng);
          norm2 = X.row(i).squaredNorm();
        } while (norm2 == 0.0);
        X.row(i) /= std::sqrt(norm2);
      }
      break;
    }
    case DesignKind::point_mass:
      X = points.replicate(n, 1);
      break;
    case DesignKind::finite_grid: {
      std::uniform_int_distribution<Index> pick(0, points.rows() - 1);
      for (Index i = 0; i < n; ++i) X.row(i) = points.row(pick(rng));
      break;
    }
  }
  return X;
}

std::string DesignDistribution::name() const {
  switch (kind) {
    case DesignKind::gaussian: return "gaussian";
    case DesignKind::uniform_sphere: return "uniform_sphere";
    case DesignKind::point_mass: return "point_mass";
    case DesignKind::finite_grid: return "finite_grid";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Link functions

double log_sigmoid(double t) {
  // log sigma(t) = -log1p(exp(-t)), branched so exp never overflows.
  return t >= 0.0 ? -std::log1p(std::exp(-t)) : t - std::log1p(std::exp(t));
}

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double BinaryLaw::pos() const { return std::exp(log_pos); }
double BinaryLaw::neg() const { return std::exp(log_neg); }

BinaryLaw logistic_law(double score) {
  return {log_sigmoid(score), log_sigmoid(-score)};
}

namespace {

double log_normal_cdf(double z) {
  if (z < -30.0) {
    // erfc underflows below about -38; asymptotic Mills-ratio series instead
    const double r = 1.0 / (z * z);
    const double series = 1.0 - r * (1.0 - 3.0 * r * (1.0 - 5.0 * r * (1.0 - 7.0 * r)));
    return -0.5 * z * z - std::log(-z) - 0.5 * std::log(2.0 * M_PI) + std::log(series);
  }
  if (z > 0.0) return std::log1p(-0.5 * std::erfc(z / std::sqrt(2.0)));
  return std::log(0.5 * std::erfc(-z / std::sqrt(2.0)));
}

}  // namespace

void LabelGenerator::validate() const {
  switch (link) {
    case LinkKind::logistic: break;
    case LinkKind::probit:
      require(probit_scale > 0.0, "probit scale must be > 0");
      break;
    case LinkKind::label_flip:
      require(flip_rate >= 0.0 && flip_rate < 0.5, "flip rate must be in [0, 0.5)");
      break;
  }
}

BinaryLaw LabelGenerator::law(double score) const {
  switch (link) {
    case LinkKind::logistic:
      return logistic_law(score);
    case LinkKind::probit:
      return {log_normal_cdf(probit_scale * score), log_normal_cdf(-probit_scale * score)};
    case LinkKind::label_flip: {
      const double p = sigmoid(score);
      const double q = 1.0 - p;
      return {std::log((1.0 - flip_rate) * p + flip_rate * q),
              std::log((1.0 - flip_rate) * q + flip_rate * p)};
    }
  }
  return logistic_law(score);
}

std::string LabelGenerator::name() const {
  switch (link) {
    case LinkKind::logistic: return "logistic";
    case LinkKind::probit: return "probit";
    case LinkKind::label_flip: return "label_flip";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Dataset and likelihood

void Dataset::validate() const {
  require(X.rows() >= 1, "dataset needs n >= 1");
  require(X.cols() >= 2, "dataset needs d >= 2");
  require_dims(y.size(), X.rows(), "dataset labels");
  for (Index i = 0; i < y.size(); ++i) {
    require(y[i] == 1.0 || y[i] == -1.0, "labels must be exactly -1 or +1");
  }
}

double conditional_prob(const Vector& theta, const Vector& x, int y) {
  require_dims(theta.size(), x.size(), "conditional_prob");
  require(y == 1 || y == -1, "label must be -1 or +1");
  return sigmoid(static_cast<double>(y) * x.dot(theta));
}

double log_likelihood(const Vector& theta, const Dataset& data) {
  require_dims(theta.size(), data.dim(), "log_likelihood");
  const Vector margin = data.y.cwiseProduct(data.X * theta);
  double total = 0.0;
  for (Index i = 0; i < margin.size(); ++i) total += log_sigmoid(margin[i]);
  return total;
}

double neg_log_lik_ratio(const Vector& theta, const Vector& theta0, const Dataset& data) {
  require_dims(theta0.size(), data.dim(), "neg_log_lik_ratio");
  return log_likelihood(theta0, data) - log_likelihood(theta, data);
}

double log_likelihood_and_grad(const Vector& theta, const Dataset& data, Vector& grad) {
  require_dims(theta.size(), data.dim(), "log_likelihood_and_grad");
  const Vector score = data.X * theta;
  Vector weight(score.size());
  double total = 0.0;
  for (Index i = 0; i < score.size(); ++i) {
    const double m = data.y[i] * score[i];
    total += log_sigmoid(m);
    // d/dtheta log sigma(m) = y x (1 - sigma(m)) = y x sigma(-m)
    weight[i] = data.y[i] * sigmoid(-m);
  }
  grad.noalias() = data.X.transpose() * weight;
  return total;
}

Vector grad_log_likelihood(const Vector& theta, const Dataset& data) {
  Vector g;
  log_likelihood_and_grad(theta, data, g);
  return g;
}

Coefficients generate_theta0(Index d, Index s_star, double magnitude, std::uint64_t seed) {
  require(d >= 1, "d must be >= 1");
  require(s_star >= 1, "s_star must be >= 1");
  require(s_star <= d, "s_star must not exceed d");
  require(magnitude > 0.0, "magnitude must be > 0");
  Rng rng(seed);
  std::vector<Index> idx(static_cast<std::size_t>(d));
  std::iota(idx.begin(), idx.end(), Index{0});
  // Partial Fisher-Yates: first s_star entries form a uniform subset.
  for (Index k = 0; k < s_star; ++k) {
    std::uniform_int_distribution<Index> pick(k, d - 1);
    std::swap(idx[static_cast<std::size_t>(k)], idx[static_cast<std::size_t>(pick(rng))]);
  }
  std::bernoulli_distribution coin(0.5);
  Vector v = Vector::Zero(d);
  for (Index k = 0; k < s_star; ++k) {
    v[idx[static_cast<std::size_t>(k)]] = coin(rng) ? magnitude : -magnitude;
  }
  return Coefficients(std::move(v));
}

Dataset generate_dataset(const Vector& theta0, Index n, const DesignDistribution& design,
                         std::uint64_t seed, const LabelGenerator& generator) {
  require(n >= 1, "n must be >= 1");
  design.validate();
  generator.validate();
  require_dims(theta0.size(), design.dim, "generate_dataset");
  Rng rng(seed);
  Dataset out;
  out.X = design.sample(n, rng);
  out.y.resize(n);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (Index i = 0; i < n; ++i) {
    const double p = generator.law(out.X.row(i).dot(theta0)).pos();
    out.y[i] = unif(rng) < p ? 1.0 : -1.0;
  }
  out.meta.design = design;
  out.meta.theta0 = theta0;
  out.meta.seed = seed;
  out.meta.generator = generator;
  return out;
}

std::string data_digest(const Dataset& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const double* p, Index count) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(p);
    for (Index i = 0; i < count * static_cast<Index>(sizeof(double)); ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  const Matrix Xc = data.X;  // column-major copy, layout fixed
  feed(Xc.data(), Xc.size());
  feed(data.y.data(), data.y.size());
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace sgbl
