// One PASS/FAIL line per acceptance criterion; exit status 1 when any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>

#include "sgbl/bounds.hpp"
#include "sgbl/experiment.hpp"
#include "sgbl/metrics.hpp"
#include "sgbl/posterior.hpp"
#include "sgbl/priors.hpp"
#include "sgbl/sampler.hpp"
#include "support.hpp"

using namespace sgbl;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + fmt("%.4g", v[i]);
  return s + "]";
}

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

template <class F>
std::vector<double> column(const std::vector<SummaryRow>& rows, F f) {
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(f(r));
  return out;
}

Outcome gradients() {
  double worst = 0.0;
  Rng rng(101);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (Index d : {5, 20}) {
    const Index n = 100;
    Vector th0 = generate_theta0(d, 2, 1.0, 7).values();
    auto data = std::make_shared<const Dataset>(
        generate_dataset(th0, n, DesignDistribution::gaussian_default(d), 8));
    const double tau = default_tau(n, d);
    const FractionalTarget st(0.5, data, StudentPriorConfig{tau, 1e4});
    const FractionalTarget ss(0.5, data, spike_slab_defaults(n, d));
    for (int rep = 0; rep < 100; ++rep) {
      // half the points on the parameter scale, half on the prior's inner scale
      const double scale = rep % 2 ? 0.5 : 5.0 * tau;
      Vector th(d);
      for (auto& x : th) x = scale * nd(rng);
      for (const FractionalTarget* t : {&st, &ss}) {
        const Vector fd =
            test::five_point_difference([&](const Vector& x) { return t->log_density(x); }, th, 1e-5 * scale);
        worst = std::max(worst, test::rel_error(grad_log_target(*t, th), fd));
      }
    }
  }
  return {worst <= 1e-6, "max relative error " + fmt("%.3g", worst)};
}

double variance_of(const Matrix& draws) {
  const double m = draws.col(0).mean();
  return (draws.col(0).array() - m).square().mean();
}

Outcome sampler_calibration() {
  SamplerConfig c;
  c.burn_in = 1000;
  c.thinning = 1;
  c.n_iter = 1000000;
  c.seed = 202;
  c.algorithm = Algorithm::ula;
  c.step_size = 0.1;
  const GaussianTarget target(1);
  const double ula = variance_of(run_chain(target, c).draws);
  const double ula_expected = 1.0 / (1.0 - 0.1 / 2.0);
  c.algorithm = Algorithm::mala;
  c.step_size = 0.5;
  const double mala = variance_of(run_chain(target, c).draws);
  const bool ok = std::abs(ula / ula_expected - 1.0) <= 0.03 && std::abs(mala - 1.0) <= 0.02;
  return {ok, "ULA var " + fmt("%.5f", ula) + " (target " + fmt("%.5f", ula_expected) + "), MALA var " +
                  fmt("%.5f", mala)};
}

Outcome divergence_identities() {
  Rng rng(303);
  std::uniform_real_distribution<double> u(1e-3, 1.0 - 1e-3);
  int violations = 0;
  double worst_identity = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const double p = u(rng), q = u(rng);
    const double tv = bernoulli_tv(p, q), h2 = bernoulli_hellinger2(p, q);
    const double half = bernoulli_renyi(p, q, 0.5);
    double prev = 0.0;
    for (double a : {0.25, 0.5, 0.75}) {
      if (bernoulli_renyi(p, p, a) != 0.0) ++violations;
      const double d = bernoulli_renyi(p, q, a);
      if (d < prev) ++violations;
      prev = d;
      if (0.5 * a * tv * tv > d) ++violations;
    }
    if (h2 > half) ++violations;
    worst_identity = std::max(worst_identity, std::abs(h2 - 2.0 * (1.0 - std::exp(-0.5 * half))));
  }
  return {violations == 0 && worst_identity <= 1e-12,
          std::to_string(violations) + " inequality violations, identity error " + fmt("%.3g", worst_identity)};
}

Outcome lemmas() {
  Vector theta0 = Vector::Zero(4);
  theta0[0] = 1.0;
  const LemmaReport r = verify_lemmas_mc(100, 4, 1, 10.0, theta0, 200000, 404);
  const bool ok = r.tau == 0.005 && r.kl_pass && r.l2_pass && std::abs(r.kl_bound - 31.097) < 1e-3;
  return {ok, "KL " + fmt("%.4g", r.kl_estimate) + " +- " + fmt("%.2g", r.kl_se) + " <= " +
                  fmt("%.5g", r.kl_bound) + ", l2 " + fmt("%.3g", r.l2_estimate) + " +- " +
                  fmt("%.2g", r.l2_se) + " <= " + fmt("%.3g", r.l2_bound)};
}

ExperimentSpec rate_spec(ExperimentKind kind) {
  ExperimentSpec s;
  s.name = kind == ExperimentKind::rates ? "acceptance_rates" : "acceptance_spike_slab";
  s.kind = kind;
  s.n_grid = {100, 200, 400, 800};
  s.d_grid = {50};
  s.s_grid = {3};
  s.alpha_grid = {0.5};
  s.replications = 20;
  s.threads = workers();
  if (kind == ExperimentKind::spike_slab) s.theta0_unit_l2 = true;
  return s;
}

Outcome concentration(const std::vector<SummaryRow>& rows) {
  const auto h2 = column(rows, [](auto& r) { return r.mean_hellinger2; });
  const auto bound = column(rows, [](auto& r) { return r.bound_hellinger2; });
  bool below = true;
  for (std::size_t i = 0; i < rows.size(); ++i) below = below && h2[i] <= bound[i];
  const bool dec = strictly_decreasing(h2);
  return {dec && below, "mean H2 " + list(h2) + (dec ? " decreasing" : " not strictly decreasing") +
                            ", 6 eps_n " + list(bound)};
}

Outcome estimation(const std::vector<SummaryRow>& rows) {
  const auto ratio = column(rows, [](auto& r) { return r.ratio_estimation; });
  Index jensen = 0;
  for (const auto& r : rows) jensen += r.jensen_violations;
  const double spread = spread_factor(ratio);
  return {spread <= 5.0 && jensen == 0, "l2 / (eps_n / lambda_min) " + list(ratio) + " spread " +
                                            fmt("%.3g", spread) + ", Jensen violations " +
                                            std::to_string(jensen)};
}

Outcome excess_risk(const std::vector<SummaryRow>& rows) {
  const auto risk = column(rows, [](auto& r) { return r.mean_excess_risk; });
  const auto rs = column(rows, [](auto& r) { return r.ratio_risk_sqrt; });
  const auto rg = column(rows, [](auto& r) { return r.ratio_risk_gamma; });
  const bool dec = strictly_decreasing(risk);
  const double s1 = spread_factor(rs), s2 = spread_factor(rg);
  return {dec && s1 <= 5.0 && s2 <= 5.0,
          "mean excess risk " + list(risk) + (dec ? " decreasing" : " not decreasing") +
              ", sqrt-ratio spread " + fmt("%.3g", s1) + ", gamma-ratio spread " + fmt("%.3g", s2) +
              " (gamma " + fmt("%.3g", rows.front().gamma) + ")"};
}

Outcome spike_slab(const std::vector<SummaryRow>& rows) {
  const Outcome c = concentration(rows);
  const Outcome e = estimation(rows);
  const Outcome r = excess_risk(rows);
  return {c.pass && e.pass && r.pass, c.detail + "; " + e.detail + "; " + r.detail};
}

Outcome misspecification() {
  ExperimentSpec s;
  s.name = "acceptance_misspec";
  s.kind = ExperimentKind::misspecified;
  s.n_grid = {200, 800};
  s.d_grid = {20};
  s.s_grid = {2};
  s.alpha_grid = {0.5};
  s.generator = LabelGenerator::probit();
  s.replications = 20;
  s.threads = workers();
  const auto rows = summarize(run_experiment(s));
  const auto ratio = column(rows, [](auto& r) { return r.ratio_misspec; });
  bool bounded = true;
  for (double x : ratio) bounded = bounded && x <= 1.0;
  const double spread = spread_factor(ratio);

  ExperimentSpec control = s;
  control.name = "acceptance_misspec_control";
  control.generator = LabelGenerator::logistic();
  control.n_grid = {200};
  control.replications = 2;
  double gap = 0.0;
  for (const auto& rec : run_experiment(control).records) gap = std::max(gap, rec.theta_star_gap);

  return {bounded && spread <= 5.0 && gap <= 1e-3,
          "D_a / bound " + list(ratio) + " spread " + fmt("%.3g", spread) + ", KL* " +
              fmt("%.3g", rows.front().mean_kl_star) + ", control gap " + fmt("%.3g", gap)};
}

Outcome compatibility() {
  Rng rng(1010);
  std::normal_distribution<double> nd(0.0, 1.0);
  double worst = 0.0;
  for (Index d : {6, 9, 12}) {
    Matrix X(2 * d, d);
    for (auto& x : X.reshaped()) x = nd(rng);
    Vector th0(d);
    for (auto& x : th0) x = 0.5 * nd(rng);
    const Matrix A = compatibility_weights(X, th0).asDiagonal() * X;
    for (Index s : {1, 2, 3})
      worst = std::max(worst, std::abs(compatibility_numbers(X, th0, s).phi2 - test::phi2_oracle(A, s)));
  }
  Matrix Q = Matrix::Zero(15, 12);
  Q.topRows(12) = Matrix::Identity(12, 12);
  bool exact = true;
  for (Index s = 1; s <= 4; ++s) exact = exact && compatibility_numbers_weighted(Q, s).phi2 == 1.0;
  return {worst <= 1e-8 && exact,
          "max |phi2 - oracle| " + fmt("%.3g", worst) + (exact ? ", orthonormal = 1" : ", orthonormal != 1")};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Outcome determinism() {
  ExperimentSpec s;
  s.name = "acceptance_determinism";
  s.n_grid = {100, 200};
  s.d_grid = {10};
  s.s_grid = {2};
  s.replications = 3;
  s.sampler.n_iter = 4000;
  s.sampler.burn_in = 1000;
  s.mc.stats_draws = 20000;
  s.mc.margin_draws = 20000;
  const fs::path base = fs::temp_directory_path() / "sgbl_acceptance_determinism";
  s.threads = 1;
  emit_rate_report(run_experiment(s), base / "a");
  s.threads = std::max(2u, workers());
  emit_rate_report(run_experiment(s), base / "b");
  const std::string a = slurp(base / "a" / "summary.csv"), b = slurp(base / "b" / "summary.csv");
  return {!a.empty() && a == b, std::to_string(a.size()) + " bytes, " + (a == b ? "identical" : "different")};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& f) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("%s %2d %-28s %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
    std::fflush(stdout);
  };

  report(1, "gradient-consistency", gradients);
  report(2, "sampler-calibration", sampler_calibration);
  report(3, "divergence-identities", divergence_identities);
  report(4, "lemma-verification", lemmas);

  std::vector<SummaryRow> rates;
  std::string rates_error;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    rates = summarize(run_experiment(rate_spec(ExperimentKind::rates)));
  } catch (const std::exception& e) {
    rates_error = e.what();
  }
  std::printf("     rates grid: %.1f s\n", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  auto on_rates = [&](Outcome (*f)(const std::vector<SummaryRow>&)) {
    return [&rates, &rates_error, f]() -> Outcome {
      if (!rates_error.empty()) return {false, "error: " + rates_error};
      return f(rates);
    };
  };
  report(5, "concentration-rate", on_rates(concentration));
  report(6, "estimation-ratio", on_rates(estimation));
  report(7, "excess-risk-rate", on_rates(excess_risk));
  report(8, "spike-and-slab", [] { return spike_slab(summarize(run_experiment(rate_spec(ExperimentKind::spike_slab)))); });
  report(9, "misspecification", misspecification);
  report(10, "compatibility-numbers", compatibility);
  report(11, "determinism", determinism);

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
