#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sgbl/io.hpp"
#include "sgbl/linalg.hpp"
#include "sgbl/model.hpp"
#include "sgbl/sampler.hpp"

namespace sgbl {

enum class ExperimentKind { rates, spike_slab, misspecified };

std::string to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& s);

struct GridPoint {
  Index n = 0;
  Index d = 0;
  Index s_star = 0;
  double alpha = 0.5;
};

struct McSizes {
  Index design_draws = 2000;   // common X sample for posterior averaging
  Index stats_draws = 100000;  // K1, G, lambda_min
  Index max_draws = 1000;      // retained draws scored against the X sample
  Index oracle_draws = 20000;  // theta* KL minimization
  Index margin_draws = 200000;
};

struct ExperimentSpec {
  std::string name = "rates";
  ExperimentKind kind = ExperimentKind::rates;
  std::vector<Index> n_grid{100, 200, 400, 800};
  std::vector<Index> d_grid{50};
  std::vector<Index> s_grid{3};
  std::vector<double> alpha_grid{0.5};
  json design = json{{"kind", "gaussian"}};  // dimension filled per grid point
  double c1 = 1e4;
  double tau = 0.0;  // 0: 1 / (n sqrt d) per grid point
  double theta0_magnitude = -1.0;  // < 0: sd(x'theta0) = 1 under the design
  bool theta0_unit_l2 = false;     // forced on for spike_slab
  LabelGenerator generator;
  SamplerConfig sampler = default_sampler();
  Index replications = 20;
  McSizes mc;
  std::uint64_t seed = 20240601;
  unsigned threads = 1;
  std::filesystem::path out_dir;

  static SamplerConfig default_sampler();

  std::vector<GridPoint> grid() const;
  void validate() const;
};

ExperimentSpec spec_from_json(const json& j);
json to_json(const ExperimentSpec& spec);
ExperimentSpec load_spec(const std::filesystem::path& path);

/// One (grid point, replication). Posterior averages are over retained draws.
struct Record {
  std::size_t grid_index = 0;
  Index rep = 0;
  GridPoint point;
  std::uint64_t master_seed = 0;
  std::uint64_t theta0_seed = 0;
  std::uint64_t mc_seed = 0;
  std::uint64_t data_seed = 0;
  std::uint64_t chain_seed = 0;

  double renyi = 0.0;
  double hellinger2 = 0.0;
  double tv2 = 0.0;
  double kl = 0.0;
  double g_error = 0.0;
  double l2_error = 0.0;
  double excess_risk = 0.0;
  double mean_l2_error = 0.0;  // posterior-mean estimator
  double mean_excess_risk = 0.0;

  double acceptance_rate = 0.0;
  double step_size = 0.0;
  Index draws = 0;
  double score_tail = 0.0;  // fraction of |x'theta0| > 3 in the X sample
  double gamma = 0.0;       // fitted margin exponent at theta0

  double K1 = 0.0;
  double lambda_min = 0.0;
  double eps_student = 0.0;
  double eps_spike_slab = 0.0;
  double epsilon_n = 0.0;  // of the prior in use
  double bound_renyi = 0.0;
  double bound_hellinger2 = 0.0;
  double bound_tv2 = 0.0;
  double bound_expectation = 0.0;

  // misspecified runs
  double kl_star = 0.0;
  double r_n = 0.0;
  double misspec_bound = 0.0;
  Index theta_star_l0 = 0;
  double theta_star_gap = 0.0;  // ||theta* - theta0||_inf

  double seconds = 0.0;
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::vector<Record> records;  // sorted by (grid_index, rep)
  double seconds = 0.0;
};

ExperimentResult run_experiment(const ExperimentSpec& spec);
/// The named entry points share one pipeline; the estimation and risk
/// quantities are filled on every rates run.
ExperimentResult run_concentration_experiment(const ExperimentSpec& spec);
ExperimentResult run_estimation_experiment(const ExperimentSpec& spec);
ExperimentResult run_risk_experiment(const ExperimentSpec& spec);
ExperimentResult run_spike_slab_experiment(ExperimentSpec spec);
ExperimentResult run_misspecified_experiment(const ExperimentSpec& spec);

struct SummaryRow {
  GridPoint point;
  Index reps = 0;
  double mean_renyi = 0.0, mean_hellinger2 = 0.0, median_hellinger2 = 0.0;
  double mean_tv2 = 0.0, mean_kl = 0.0;
  double mean_g_error = 0.0, mean_l2_error = 0.0, mean_mean_l2_error = 0.0;
  double mean_excess_risk = 0.0, median_excess_risk = 0.0;
  double mean_acceptance = 0.0;
  double K1 = 0.0, lambda_min = 0.0;
  double eps_student = 0.0, eps_spike_slab = 0.0, epsilon_n = 0.0;
  double bound_hellinger2 = 0.0, bound_renyi = 0.0, bound_tv2 = 0.0;
  double gamma = 0.0;
  double ratio_hellinger2 = 0.0;   // mean H2 / (H_alpha eps_n)
  double ratio_h2_rate = 0.0;      // mean H2 / eps_n
  double ratio_estimation = 0.0;   // mean l2 / (eps_n / lambda_min)
  double ratio_risk_sqrt = 0.0;    // mean excess / sqrt(eps_n)
  double ratio_risk_gamma = 0.0;   // mean excess / eps_n^((gamma+1)/(gamma+2))
  double mean_kl_star = 0.0, mean_misspec_bound = 0.0, ratio_misspec = 0.0;
  double max_theta_star_gap = 0.0;
  Index jensen_violations = 0;
};

std::vector<SummaryRow> summarize(const ExperimentResult& result);

/// Least squares slope of log(y) on log(x); NaN when fewer than two positive pairs.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);
bool strictly_decreasing(const std::vector<double>& v);
/// max / min of positive values; +inf when some value is not positive.
double spread_factor(const std::vector<double>& v);

/// records.csv, summary.csv, timings.csv, manifest.json and two-column
/// log-log plot files under `dir`.
void emit_rate_report(const ExperimentResult& result, const std::filesystem::path& dir);
void write_summary_csv(const std::vector<SummaryRow>& rows, const std::filesystem::path& path);
void write_records_csv(const std::vector<Record>& records, const std::filesystem::path& path);

/// Pseudo-true parameter: minimizes the Monte Carlo KL from the true label
/// law to the logistic family over a design sample by multi-start L-BFGS
/// (gradient information only). Throws NumericalError when no start reaches `grad_tol`.
struct PseudoTrue {
  Vector theta;
  double kl = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
};
PseudoTrue pseudo_true_parameter(const Vector& theta0, const Matrix& design_draws,
                                 const LabelGenerator& generator, int starts, std::uint64_t seed,
                                 double grad_tol = 1e-8, int max_iter = 5000);

/// l0 count with entries below rel_tol * max|theta| treated as zero.
Index effective_l0(const Vector& theta, double rel_tol = 1e-2);

}  // namespace sgbl
