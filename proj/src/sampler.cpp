#include "sgbl/sampler.hpp"

#include <cmath>
#include <limits>

namespace sgbl {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_finite(const Vector& grad, const Vector& theta) {
  if (!grad.allFinite()) throw NumericalError("non-finite gradient in Langevin step", theta);
}

Vector standard_normal(Index d, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector xi(d);
  for (Index i = 0; i < d; ++i) xi[i] = normal(rng);
  return xi;
}

// log q(to | from) up to a constant, q = N(from + h grad_from, 2h I).
double log_proposal(const Vector& to, const Vector& from, const Vector& grad_from, double h) {
  return -(to - from - h * grad_from).squaredNorm() / (4.0 * h);
}

}  // namespace

std::string to_string(Algorithm a) { return a == Algorithm::ula ? "ula" : "mala"; }

Algorithm algorithm_from_string(const std::string& s) {
  if (s == "ula" || s == "ULA") return Algorithm::ula;
  if (s == "mala" || s == "MALA") return Algorithm::mala;
  throw ConfigError("unknown sampler algorithm: " + s);
}

void SamplerConfig::validate() const {
  require(step_size > 0.0 && std::isfinite(step_size), "step size must be > 0");
  require(n_iter >= 1, "n_iter must be >= 1");
  require(burn_in >= 0 && burn_in < n_iter, "burn_in must be in [0, n_iter)");
  require(thinning >= 1, "thinning must be >= 1");
  if (tune) {
    require(tune_low > 0.0 && tune_low < tune_high && tune_high < 1.0, "invalid tuning band");
    require(tune_round >= 10, "tune_round must be >= 10");
  }
}

StepResult ula_step(Vector& theta, Vector& grad, const LogTarget& target, double h, Rng& rng) {
  check_finite(grad, theta);
  Vector proposal = theta + h * grad + std::sqrt(2.0 * h) * standard_normal(theta.size(), rng);
  if (!target.interior(proposal)) return {false, true};
  Vector g;
  target.log_density_and_grad(proposal, g);
  check_finite(g, proposal);
  theta = std::move(proposal);
  grad = std::move(g);
  return {true, false};
}

StepResult mala_step_with_noise(Vector& theta, double& logp, Vector& grad,
                                const LogTarget& target, double h, const Vector& xi, double u,
                                double* log_ratio) {
  check_finite(grad, theta);
  Vector proposal = theta + h * grad + std::sqrt(2.0 * h) * xi;
  if (!target.interior(proposal)) {
    if (log_ratio) *log_ratio = kNegInf;
    return {false, true};
  }
  Vector g;
  const double lp = target.log_density_and_grad(proposal, g);
  check_finite(g, proposal);
  const double lr = lp - logp + log_proposal(theta, proposal, g, h) -
                    log_proposal(proposal, theta, grad, h);
  if (log_ratio) *log_ratio = lr;
  if (std::log(u) < lr) {
    theta = std::move(proposal);
    grad = std::move(g);
    logp = lp;
    return {true, false};
  }
  return {false, false};
}

StepResult mala_step(Vector& theta, double& logp, Vector& grad, const LogTarget& target, double h,
                     Rng& rng) {
  const Vector xi = standard_normal(theta.size(), rng);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  return mala_step_with_noise(theta, logp, grad, target, h, xi, u);
}

double tune_step_size(const LogTarget& target, const SamplerConfig& cfg, Vector& start, Rng& rng) {
  if (cfg.algorithm != Algorithm::mala) return cfg.step_size;
  constexpr double kTargetRate = 0.574;
  double h = cfg.step_size;
  Vector grad;
  double logp = target.log_density_and_grad(start, grad);
  for (int round = 0; round < cfg.tune_max_rounds; ++round) {
    std::int64_t accepted = 0;
    for (std::int64_t i = 0; i < cfg.tune_round; ++i) {
      if (mala_step(start, logp, grad, target, h, rng).accepted) ++accepted;
    }
    const double rate = static_cast<double>(accepted) / static_cast<double>(cfg.tune_round);
    if (rate >= cfg.tune_low && rate <= cfg.tune_high) break;
    // Multiplicative Robbins-Monro style update on log h; collapse fast on
    // a dead chain.
    h *= rate == 0.0 ? 0.1 : std::exp(2.0 * (rate - kTargetRate));
  }
  return h;
}

TargetSummary summarize(const FractionalTarget& target) {
  return {target.alpha(), prior_kind(target.prior()), data_digest(target.data())};
}

std::uint64_t chain_seed(std::uint64_t master, std::uint64_t chain_index) {
  return derive_seed(master, {0x636861696eULL, chain_index});
}

SampleSet run_chain(const LogTarget& target, const SamplerConfig& cfg) {
  cfg.validate();
  const Index d = target.dim();
  Rng rng(cfg.seed);

  Vector theta;
  switch (cfg.init) {
    case InitKind::zero:
      theta = Vector::Zero(d);
      break;
    case InitKind::supplied:
      require_dims(cfg.init_value.size(), d, "sampler init");
      theta = cfg.init_value;
      break;
    case InitKind::prior_draw: {
      const auto* ft = dynamic_cast<const FractionalTarget*>(&target);
      require(ft != nullptr, "prior_draw init needs a fractional target");
      if (const auto* s = std::get_if<StudentPriorConfig>(&ft->prior())) {
        theta = sample_student_prior(*s, d, rng).values();
      } else {
        theta = sample_spike_slab_prior(std::get<SpikeSlabConfig>(ft->prior()), d, rng).values();
      }
      break;
    }
  }
  if (!target.interior(theta)) throw ConfigError("sampler init is outside the target support");

  SampleSet out;
  out.config = cfg;
  if (const auto* ft = dynamic_cast<const FractionalTarget*>(&target)) out.target = summarize(*ft);

  double h = cfg.step_size;
  if (cfg.tune) h = tune_step_size(target, cfg, theta, rng);
  out.step_size = h;

  Vector grad;
  double logp = target.log_density_and_grad(theta, grad);

  out.draws.resize(cfg.expected_draws(), d);
  Index kept = 0;
  std::int64_t accepted = 0;
  std::int64_t boundary = 0;
  for (std::int64_t it = 0; it < cfg.n_iter; ++it) {
    StepResult r;
    if (cfg.algorithm == Algorithm::ula) {
      r = ula_step(theta, grad, target, h, rng);
    } else {
      r = mala_step(theta, logp, grad, target, h, rng);
    }
    if (r.accepted) ++accepted;
    if (r.left_support) ++boundary;
    if (it >= cfg.burn_in && (it - cfg.burn_in + 1) % cfg.thinning == 0) {
      out.draws.row(kept++) = theta.transpose();
    }
  }
  out.steps = cfg.n_iter;
  out.boundary_rejections = boundary;
  out.acceptance_rate = cfg.algorithm == Algorithm::ula
                            ? 1.0
                            : static_cast<double>(accepted) / static_cast<double>(cfg.n_iter);
  if (2 * boundary > cfg.n_iter) {
    throw NumericalError(
        "more than half of the Langevin steps left the prior support; use a smaller step size "
        "or a larger c1",
        theta);
  }
  return out;
}

}  // namespace sgbl
