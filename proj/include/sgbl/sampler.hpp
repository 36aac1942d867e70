#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "sgbl/linalg.hpp"
#include "sgbl/posterior.hpp"
#include "sgbl/rng.hpp"

namespace sgbl {

enum class Algorithm { ula, mala };
enum class InitKind { zero, prior_draw, supplied };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);

struct SamplerConfig {
  double step_size = 1e-3;
  std::int64_t n_iter = 20000;
  std::int64_t burn_in = 5000;
  std::int64_t thinning = 5;
  Algorithm algorithm = Algorithm::mala;
  InitKind init = InitKind::zero;
  Vector init_value;  // used when init == supplied
  std::uint64_t seed = 0;

  /// Pilot phase: adapt step_size until MALA acceptance lands in
  /// [tune_low, tune_high]; the pilot iterations are discarded and the chain
  /// then runs with the frozen step size.
  bool tune = false;
  double tune_low = 0.45;
  double tune_high = 0.70;
  std::int64_t tune_round = 200;
  int tune_max_rounds = 60;

  void validate() const;
  std::int64_t expected_draws() const { return (n_iter - burn_in) / thinning; }
};

struct TargetSummary {
  double alpha = 1.0;
  std::string prior_kind;
  std::string data_digest;
};

struct SampleSet {
  Matrix draws;  // one retained draw per row
  double acceptance_rate = 1.0;
  std::int64_t boundary_rejections = 0;
  std::int64_t steps = 0;
  double step_size = 0.0;  // after tuning
  SamplerConfig config;
  TargetSummary target;

  Index size() const noexcept { return draws.rows(); }
  Index dim() const noexcept { return draws.cols(); }
};

struct StepResult {
  bool accepted = true;
  bool left_support = false;
};

/// theta <- theta + h grad + sqrt(2h) xi. A proposal outside the support is
/// rejected (theta unchanged, left_support set). `grad` is the gradient at
/// theta on entry and is updated on a move.
StepResult ula_step(Vector& theta, Vector& grad, const LogTarget& target, double h, Rng& rng);

/// ULA proposal followed by a Metropolis-Hastings correction with the Gaussian
/// proposal density ratio. `logp` and `grad` describe theta on entry.
StepResult mala_step(Vector& theta, double& logp, Vector& grad, const LogTarget& target, double h,
                     Rng& rng);

/// Same step with an explicit noise vector (xi = 0 gives the deterministic
/// drift); returns the MH log acceptance ratio through `log_ratio`.
StepResult mala_step_with_noise(Vector& theta, double& logp, Vector& grad,
                                const LogTarget& target, double h, const Vector& xi,
                                double u, double* log_ratio = nullptr);

/// Tuned step size for MALA (unchanged for ULA), starting from cfg.step_size at
/// `start`. Deterministic in `rng`.
double tune_step_size(const LogTarget& target, const SamplerConfig& cfg, Vector& start, Rng& rng);

/// Runs one chain. Throws NumericalError when more than half the steps leave
/// the support or a gradient is non-finite.
SampleSet run_chain(const LogTarget& target, const SamplerConfig& cfg);

/// Summary of a fractional target for provenance.
TargetSummary summarize(const FractionalTarget& target);

/// Seed of chain `chain_index` under master seed `master`.
std::uint64_t chain_seed(std::uint64_t master, std::uint64_t chain_index);

}  // namespace sgbl
