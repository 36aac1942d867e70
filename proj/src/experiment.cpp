#include "sgbl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>

#include "sgbl/bounds.hpp"
#include "sgbl/metrics.hpp"
#include "sgbl/posterior.hpp"
#include "sgbl/priors.hpp"
#include "sgbl/risk.hpp"

#ifndef SGBL_VERSION
#define SGBL_VERSION "unknown"
#endif

namespace sgbl {

namespace fs = std::filesystem;

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::rates: return "rates";
    case ExperimentKind::spike_slab: return "spike_slab";
    case ExperimentKind::misspecified: return "misspecified";
  }
  return "rates";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
  if (s == "rates" || s == "concentration" || s == "estimation" || s == "risk")
    return ExperimentKind::rates;
  if (s == "spike_slab") return ExperimentKind::spike_slab;
  if (s == "misspecified" || s == "misspec") return ExperimentKind::misspecified;
  throw ConfigError("unknown experiment kind: " + s);
}

SamplerConfig ExperimentSpec::default_sampler() {
  SamplerConfig c;
  c.algorithm = Algorithm::mala;
  c.step_size = 1e-3;
  c.n_iter = 20000;
  c.burn_in = 5000;
  c.thinning = 5;
  c.tune = true;
  return c;
}

std::vector<GridPoint> ExperimentSpec::grid() const {
  std::vector<GridPoint> g;
  for (Index d : d_grid)
    for (Index s : s_grid)
      for (double a : alpha_grid)
        for (Index n : n_grid) g.push_back({n, d, s, a});
  return g;
}

void ExperimentSpec::validate() const {
  require(!n_grid.empty() && !d_grid.empty() && !s_grid.empty() && !alpha_grid.empty(),
          "experiment grid must be non-empty");
  for (const auto& p : grid()) {
    require(p.d >= 2, "d must be >= 2");
    require(p.s_star >= 1 && p.s_star <= p.d, "s_star must be in [1, d]");
    require(p.s_star < p.n, "every grid point needs s_star < n");
    require(p.alpha > 0.0 && p.alpha < 1.0, "alpha must be in (0, 1)");
  }
  require(replications >= 1, "replications must be >= 1");
  require(mc.design_draws >= 2 && mc.stats_draws >= 2 && mc.max_draws >= 1 &&
              mc.oracle_draws >= 2 && mc.margin_draws >= 2,
          "Monte Carlo sizes too small");
  require(c1 > 0.0, "c1 must be > 0");
  require(tau >= 0.0, "tau must be >= 0");
  require(threads >= 1, "threads must be >= 1");
  generator.validate();
  sampler.validate();
  if (kind != ExperimentKind::misspecified) {
    require(generator.link == LinkKind::logistic,
            "non-logistic generators belong to misspecified experiments");
  }
}

namespace {

template <class T>
std::vector<T> scalar_or_list(const json& j, const char* key, std::vector<T> fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j[key];
  if (v.is_array()) return v.get<std::vector<T>>();
  return {v.get<T>()};
}

}  // namespace

ExperimentSpec spec_from_json(const json& j) {
  ExperimentSpec s;
  try {
    s.name = j.value("name", s.name);
    s.kind = experiment_kind_from_string(j.value("kind", to_string(s.kind)));
    s.n_grid = scalar_or_list<Index>(j, "n", s.n_grid);
    s.d_grid = scalar_or_list<Index>(j, "d", s.d_grid);
    s.s_grid = scalar_or_list<Index>(j, "s_star", s.s_grid);
    s.alpha_grid = scalar_or_list<double>(j, "alpha", s.alpha_grid);
    if (j.contains("design")) s.design = j["design"];
    if (j.contains("prior")) {
      const auto& p = j["prior"];
      s.c1 = p.value("c1", s.c1);
      s.tau = p.value("tau", s.tau);
    }
    if (j.contains("theta0")) {
      const auto& t = j["theta0"];
      s.theta0_magnitude = t.value("magnitude", s.theta0_magnitude);
      s.theta0_unit_l2 = t.value("unit_l2", s.theta0_unit_l2);
    }
    if (j.contains("generator")) s.generator = generator_from_json(j["generator"]);
    if (j.contains("sampler")) s.sampler = sampler_config_from_json(j["sampler"], s.sampler);
    s.replications = j.value("replications", s.replications);
    if (j.contains("mc")) {
      const auto& m = j["mc"];
      s.mc.design_draws = m.value("design_draws", s.mc.design_draws);
      s.mc.stats_draws = m.value("stats_draws", s.mc.stats_draws);
      s.mc.max_draws = m.value("max_draws", s.mc.max_draws);
      s.mc.oracle_draws = m.value("oracle_draws", s.mc.oracle_draws);
      s.mc.margin_draws = m.value("margin_draws", s.mc.margin_draws);
    }
    s.seed = j.value("seed", s.seed);
    s.threads = j.value("threads", s.threads);
    if (j.contains("out")) s.out_dir = j["out"].get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
  if (s.kind == ExperimentKind::spike_slab) s.theta0_unit_l2 = true;
  s.validate();
  return s;
}

json to_json(const ExperimentSpec& s) {
  json prior{{"kind", s.kind == ExperimentKind::spike_slab ? "spike_slab" : "student"},
             {"c1", s.c1}};
  if (s.tau > 0.0) prior["tau"] = s.tau;
  return json{{"name", s.name},
              {"kind", to_string(s.kind)},
              {"n", s.n_grid},
              {"d", s.d_grid},
              {"s_star", s.s_grid},
              {"alpha", s.alpha_grid},
              {"design", s.design},
              {"prior", prior},
              {"theta0", {{"magnitude", s.theta0_magnitude}, {"unit_l2", s.theta0_unit_l2}}},
              {"generator", to_json(s.generator)},
              {"sampler", to_json(s.sampler)},
              {"replications", s.replications},
              {"mc",
               {{"design_draws", s.mc.design_draws},
                {"stats_draws", s.mc.stats_draws},
                {"max_draws", s.mc.max_draws},
                {"oracle_draws", s.mc.oracle_draws},
                {"margin_draws", s.mc.margin_draws}}},
              {"seed", s.seed},
              {"threads", s.threads}};
}

ExperimentSpec load_spec(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config: " + path.string());
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return spec_from_json(j);
}

// ---------------------------------------------------------------------------
// Pseudo-true parameter

namespace {

struct CrossEntropy {
  const Matrix& X;
  const Vector& p;  // true P(Y = +1 | x_j)

  double value_and_grad(const Vector& theta, Vector& grad) const {
    const Vector s = X * theta;
    Vector w(s.size());
    double f = 0.0;
    for (Index j = 0; j < s.size(); ++j) {
      f -= p[j] * log_sigmoid(s[j]) + (1.0 - p[j]) * log_sigmoid(-s[j]);
      w[j] = sigmoid(s[j]) - p[j];
    }
    const double inv = 1.0 / static_cast<double>(s.size());
    grad = X.transpose() * w * inv;
    return f * inv;
  }
};

}  // namespace

PseudoTrue pseudo_true_parameter(const Vector& theta0, const Matrix& design_draws,
                                 const LabelGenerator& generator, int starts, std::uint64_t seed,
                                 double grad_tol, int max_iter) {
  require_dims(theta0.size(), design_draws.cols(), "pseudo_true_parameter");
  require(starts >= 1, "pseudo_true_parameter: starts must be >= 1");
  generator.validate();
  const Index m = design_draws.rows();
  const Index d = design_draws.cols();
  const Vector s0 = design_draws * theta0;
  Vector p(m);
  std::vector<BinaryLaw> truth(static_cast<std::size_t>(m));
  for (Index j = 0; j < m; ++j) {
    truth[static_cast<std::size_t>(j)] = generator.law(s0[j]);
    p[j] = truth[static_cast<std::size_t>(j)].pos();
  }
  const CrossEntropy obj{design_draws, p};

  // Lipschitz constant of the gradient: sigma' <= 1/4.
  const Matrix Gm = design_draws.transpose() * design_draws / static_cast<double>(m);
  Eigen::SelfAdjointEigenSolver<Matrix> es(Gm, Eigen::EigenvaluesOnly);
  const double L = std::max(0.25 * es.eigenvalues().maxCoeff(), 1e-300);

  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  PseudoTrue best;
  double best_f = std::numeric_limits<double>::infinity();
  bool any_converged = false;
  for (int k = 0; k < starts; ++k) {
    Vector theta = Vector::Zero(d);
    if (k == 1) theta = theta0;
    if (k >= 2) {
      for (Index i = 0; i < d; ++i) theta[i] = theta0[i] + normal(rng);
    }
    Vector g;
    double f = obj.value_and_grad(theta, g);
    int it = 0;
    // L-BFGS two-loop recursion with Armijo backtracking.
    constexpr std::size_t memory = 10;
    std::vector<Vector> S, Y;
    std::vector<double> rho;
    while (g.norm() > grad_tol && it < max_iter) {
      Vector q = g;
      std::vector<double> a(S.size());
      for (std::size_t i = S.size(); i-- > 0;) {
        a[i] = rho[i] * S[i].dot(q);
        q -= a[i] * Y[i];
      }
      q *= S.empty() ? 1.0 / L : S.back().dot(Y.back()) / Y.back().squaredNorm();
      for (std::size_t i = 0; i < S.size(); ++i) q += (a[i] - rho[i] * Y[i].dot(q)) * S[i];
      Vector dir = -q;
      if (!(dir.dot(g) < 0.0)) {
        dir = -g / L;
        S.clear();
        Y.clear();
        rho.clear();
      }
      double step = 1.0;
      Vector cand, gc;
      double fc = 0.0;
      bool ok = false;
      for (int bt = 0; bt < 60; ++bt) {
        cand = theta + step * dir;
        fc = obj.value_and_grad(cand, gc);
        if (fc <= f + 1e-4 * step * g.dot(dir)) {
          ok = true;
          break;
        }
        step *= 0.5;
      }
      if (!ok) break;
      Vector sk = cand - theta, yk = gc - g;
      const double sy = sk.dot(yk);
      if (sy > 1e-300) {
        if (S.size() == memory) {
          S.erase(S.begin());
          Y.erase(Y.begin());
          rho.erase(rho.begin());
        }
        S.push_back(std::move(sk));
        Y.push_back(std::move(yk));
        rho.push_back(1.0 / sy);
      }
      theta = std::move(cand);
      g = std::move(gc);
      f = fc;
      ++it;
    }
    const bool converged = g.norm() <= grad_tol;
    any_converged = any_converged || converged;
    if (converged && f < best_f) {
      best_f = f;
      best.theta = theta;
      best.grad_norm = g.norm();
      best.iterations = it;
    }
    if (!any_converged && k == starts - 1) {
      throw NumericalError("pseudo_true_parameter: gradient norm " + format_double(g.norm()) +
                               " above tolerance after " + std::to_string(it) + " iterations",
                           theta);
    }
  }
  const Vector s = design_draws * best.theta;
  double klv = 0.0;
  for (Index j = 0; j < m; ++j) klv += kl(truth[static_cast<std::size_t>(j)], logistic_law(s[j]));
  best.kl = klv / static_cast<double>(m);
  return best;
}

Index effective_l0(const Vector& theta, double rel_tol) {
  const double top = theta.cwiseAbs().maxCoeff();
  if (!(top > 0.0)) return 0;
  return (theta.array().abs() > rel_tol * top).count();
}

// ---------------------------------------------------------------------------
// Pipeline

namespace {

double mean_square_coordinate(const DesignDistribution& design) {
  switch (design.kind) {
    case DesignKind::gaussian: return design.variance;
    case DesignKind::uniform_sphere: return 1.0 / static_cast<double>(design.dim);
    case DesignKind::point_mass:
    case DesignKind::finite_grid:
      return design.points.array().square().mean();
  }
  return 1.0;
}

Vector make_theta0(const ExperimentSpec& spec, const GridPoint& p, const DesignDistribution& design,
                   std::uint64_t seed) {
  if (spec.theta0_magnitude == 0.0) return Vector::Zero(p.d);
  double mag = spec.theta0_magnitude;
  if (mag < 0.0) mag = 1.0 / std::sqrt(static_cast<double>(p.s_star) * mean_square_coordinate(design));
  Vector t = generate_theta0(p.d, p.s_star, mag, seed).values();
  if (spec.theta0_unit_l2) t /= t.norm();
  return t;
}

PriorSpec make_prior(const ExperimentSpec& spec, const GridPoint& p) {
  if (spec.kind == ExperimentKind::spike_slab) return spike_slab_defaults(p.n, p.d);
  const double tau = spec.tau > 0.0 ? spec.tau : default_tau(p.n, p.d);
  return StudentPriorConfig{tau, spec.c1};
}

struct SharedStats {
  DesignDistribution design;
  DesignStats stats;
};

Record run_task(const ExperimentSpec& spec, std::size_t gi, const GridPoint& p, Index rep,
                const SharedStats& shared) {
  const auto t_start = std::chrono::steady_clock::now();
  const auto urep = static_cast<std::uint64_t>(rep);
  const auto ud = static_cast<std::uint64_t>(p.d);
  const auto us = static_cast<std::uint64_t>(p.s_star);
  Record r;
  r.grid_index = gi;
  r.rep = rep;
  r.point = p;
  r.master_seed = spec.seed;
  // theta0 and the scoring X sample depend on the replication, not on n, so
  // the n-grid is compared on common random numbers.
  r.theta0_seed = derive_seed(spec.seed, {1, urep, ud, us});
  r.mc_seed = derive_seed(spec.seed, {2, urep, ud});
  r.data_seed = derive_seed(spec.seed, {3, static_cast<std::uint64_t>(gi), urep});
  r.chain_seed = derive_seed(spec.seed, {4, static_cast<std::uint64_t>(gi), urep});

  const DesignDistribution& design = shared.design;
  const Vector theta0 = make_theta0(spec, p, design, r.theta0_seed);
  auto data = std::make_shared<Dataset>(
      generate_dataset(theta0, p.n, design, r.data_seed, spec.generator));
  const PriorSpec prior = make_prior(spec, p);
  const FractionalTarget target(p.alpha, data, prior);

  SamplerConfig cfg = spec.sampler;
  cfg.seed = r.chain_seed;
  const SampleSet samples = run_chain(target, cfg);
  r.acceptance_rate = samples.acceptance_rate;
  r.step_size = samples.step_size;
  r.draws = samples.size();
  require(r.draws >= 1, "sampler returned no draws");

  // Errors over every retained draw. The posterior-averaged squared error is
  // split as ||mean - theta0||^2 + mean ||theta - mean||^2.
  const Matrix& D = samples.draws;
  const Vector mean = D.colwise().mean().transpose();
  const Matrix centered = D.rowwise() - mean.transpose();
  const double spread = centered.rowwise().squaredNorm().mean();
  r.mean_l2_error = (mean - theta0).squaredNorm();
  r.l2_error = r.mean_l2_error + spread;
  const Matrix& G = shared.stats.G;
  const Matrix delta = D.rowwise() - theta0.transpose();
  r.g_error = ((delta * G).cwiseProduct(delta)).rowwise().sum().mean();

  // Divergences and risk against a common X sample.
  Rng mc_rng(r.mc_seed);
  const Matrix Xmc = design.sample(spec.mc.design_draws, mc_rng);
  const Vector s0 = Xmc * theta0;
  r.score_tail = (s0.array().abs() > 3.0).cast<double>().mean();
  std::vector<BinaryLaw> truth(static_cast<std::size_t>(s0.size()));
  for (Index j = 0; j < s0.size(); ++j) truth[static_cast<std::size_t>(j)] = spec.generator.law(s0[j]);

  const Index m = std::min<Index>(spec.mc.max_draws, D.rows());
  Matrix sub(m, p.d);
  for (Index k = 0; k < m; ++k) {
    // evenly spaced over the chain, last draw included
    const Index idx = (m == 1) ? D.rows() - 1 : (k * (D.rows() - 1)) / (m - 1);
    sub.row(k) = D.row(idx);
  }
  const Matrix S = Xmc * sub.transpose();
  for (Index k = 0; k < m; ++k) {
    const JointDivergences jd = joint_divergences_from_scores(S.col(k), truth, p.alpha);
    r.renyi += jd.renyi;
    r.hellinger2 += jd.hellinger2;
    r.tv2 += jd.tv * jd.tv;
    r.kl += jd.kl;
    r.excess_risk += excess_risk_from_scores(S.col(k), s0);
  }
  const double invm = 1.0 / static_cast<double>(m);
  r.renyi *= invm;
  r.hellinger2 *= invm;
  r.tv2 *= invm;
  r.kl *= invm;
  r.excess_risk *= invm;
  r.mean_excess_risk = excess_risk_from_scores(Xmc * mean, s0);

  // Margin exponent at theta0.
  const auto curve = margin_curve(theta0, design, geometric_grid(0.005, 0.35, 12),
                                  spec.mc.margin_draws, derive_seed(r.mc_seed, {7}));
  r.gamma = fit_gamma(curve).gamma;

  // Bounds from the same inputs.
  r.K1 = shared.stats.K1;
  r.lambda_min = shared.stats.lambda_min;
  r.eps_student = epsilon_n_student(p.n, p.d, p.s_star, spec.c1, r.K1).epsilon_n;
  r.eps_spike_slab = epsilon_n_spike_slab(p.n, p.d, p.s_star, r.K1).epsilon_n;
  r.epsilon_n = spec.kind == ExperimentKind::spike_slab ? r.eps_spike_slab : r.eps_student;
  r.bound_renyi = concentration_bound(p.alpha, r.epsilon_n, ConcentrationMetric::renyi);
  r.bound_hellinger2 = concentration_bound(p.alpha, r.epsilon_n, ConcentrationMetric::hellinger2);
  r.bound_tv2 = concentration_bound(p.alpha, r.epsilon_n, ConcentrationMetric::tv2);
  r.bound_expectation = expectation_bound(p.alpha, r.epsilon_n);

  if (spec.kind == ExperimentKind::misspecified) {
    Rng orng(derive_seed(r.mc_seed, {8}));
    const Matrix Xo = design.sample(spec.mc.oracle_draws, orng);
    const PseudoTrue star =
        pseudo_true_parameter(theta0, Xo, spec.generator, 4, derive_seed(r.mc_seed, {9}));
    r.kl_star = star.kl;
    r.theta_star_l0 = std::max<Index>(1, effective_l0(star.theta));
    r.theta_star_gap = (star.theta - theta0).cwiseAbs().maxCoeff();
    r.r_n = misspecified_r_n(p.n, p.d, spec.c1, r.theta_star_l0, r.K1);
    r.misspec_bound = misspecified_bound(p.alpha, r.kl_star, r.r_n);
  }

  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return r;
}

std::string describe(const GridPoint& p, Index rep) {
  return "grid point (n=" + std::to_string(p.n) + ", d=" + std::to_string(p.d) +
         ", s*=" + std::to_string(p.s_star) + ", alpha=" + format_double(p.alpha) +
         "), replication " + std::to_string(rep);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec_in) {
  ExperimentSpec spec = spec_in;
  if (spec.kind == ExperimentKind::spike_slab) spec.theta0_unit_l2 = true;
  spec.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const auto grid = spec.grid();

  // Design statistics once per dimension.
  std::map<Index, SharedStats> shared;
  for (const auto& p : grid) {
    if (shared.count(p.d)) continue;
    SharedStats s;
    s.design = design_from_json(spec.design, p.d);
    require_dims(s.design.dim, p.d, "experiment design");
    s.stats = design_stats(s.design, spec.mc.stats_draws,
                           derive_seed(spec.seed, {5, static_cast<std::uint64_t>(p.d)}));
    if (!(s.stats.lambda_min >= 1e-10)) {
      throw ConfigError("design has lambda_min(G) = " + format_double(s.stats.lambda_min) +
                        " below 1e-10 at d = " + std::to_string(p.d));
    }
    shared.emplace(p.d, std::move(s));
  }

  struct Task {
    std::size_t gi;
    Index rep;
  };
  std::vector<Task> tasks;
  for (std::size_t gi = 0; gi < grid.size(); ++gi)
    for (Index rep = 0; rep < spec.replications; ++rep) tasks.push_back({gi, rep});

  std::vector<Record> records(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= tasks.size()) return;
      const auto& t = tasks[k];
      const auto& p = grid[t.gi];
      try {
        records[k] = run_task(spec, t.gi, p, t.rep, shared.at(p.d));
      } catch (const ConfigError& e) {
        errors[k] = std::make_exception_ptr(ConfigError(describe(p, t.rep) + ": " + e.what()));
      } catch (const NumericalError& e) {
        errors[k] = std::make_exception_ptr(
            NumericalError(describe(p, t.rep) + ": " + e.what(), e.state()));
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const unsigned nthreads = std::max(1u, std::min<unsigned>(spec.threads,
                                                            static_cast<unsigned>(tasks.size())));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::sort(records.begin(), records.end(), [](const Record& a, const Record& b) {
    return std::tie(a.grid_index, a.rep) < std::tie(b.grid_index, b.rep);
  });
  ExperimentResult out;
  out.spec = spec;
  out.records = std::move(records);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

ExperimentResult run_concentration_experiment(const ExperimentSpec& spec) {
  require(spec.kind == ExperimentKind::rates, "concentration experiment needs kind 'rates'");
  return run_experiment(spec);
}

ExperimentResult run_estimation_experiment(const ExperimentSpec& spec) {
  return run_concentration_experiment(spec);
}

ExperimentResult run_risk_experiment(const ExperimentSpec& spec) {
  return run_concentration_experiment(spec);
}

ExperimentResult run_spike_slab_experiment(ExperimentSpec spec) {
  spec.kind = ExperimentKind::spike_slab;
  spec.theta0_unit_l2 = true;
  return run_experiment(spec);
}

ExperimentResult run_misspecified_experiment(const ExperimentSpec& spec) {
  require(spec.kind == ExperimentKind::misspecified,
          "misspecified experiment needs kind 'misspecified'");
  return run_experiment(spec);
}

// ---------------------------------------------------------------------------
// Summary and report

namespace {

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

}  // namespace

std::vector<SummaryRow> summarize(const ExperimentResult& result) {
  require(!result.records.empty(), "summarize: no records");
  std::map<std::size_t, std::vector<const Record*>> by_grid;
  for (const auto& r : result.records) by_grid[r.grid_index].push_back(&r);
  std::vector<SummaryRow> rows;
  for (const auto& [gi, recs] : by_grid) {
    auto col = [&](double Record::*f) {
      std::vector<double> v;
      for (const Record* r : recs) v.push_back(r->*f);
      return v;
    };
    const Record& first = *recs.front();
    SummaryRow s;
    s.point = first.point;
    s.reps = static_cast<Index>(recs.size());
    s.mean_renyi = mean_of(col(&Record::renyi));
    s.mean_hellinger2 = mean_of(col(&Record::hellinger2));
    s.median_hellinger2 = median_of(col(&Record::hellinger2));
    s.mean_tv2 = mean_of(col(&Record::tv2));
    s.mean_kl = mean_of(col(&Record::kl));
    s.mean_g_error = mean_of(col(&Record::g_error));
    s.mean_l2_error = mean_of(col(&Record::l2_error));
    s.mean_mean_l2_error = mean_of(col(&Record::mean_l2_error));
    s.mean_excess_risk = mean_of(col(&Record::excess_risk));
    s.median_excess_risk = median_of(col(&Record::excess_risk));
    s.mean_acceptance = mean_of(col(&Record::acceptance_rate));
    s.K1 = first.K1;
    s.lambda_min = first.lambda_min;
    s.eps_student = first.eps_student;
    s.eps_spike_slab = first.eps_spike_slab;
    s.epsilon_n = first.epsilon_n;
    s.bound_hellinger2 = first.bound_hellinger2;
    s.bound_renyi = first.bound_renyi;
    s.bound_tv2 = first.bound_tv2;
    s.gamma = mean_of(col(&Record::gamma));
    s.ratio_hellinger2 = s.mean_hellinger2 / s.bound_hellinger2;
    s.ratio_h2_rate = s.mean_hellinger2 / s.epsilon_n;
    s.ratio_estimation = s.mean_l2_error / (s.epsilon_n / s.lambda_min);
    s.ratio_risk_sqrt = s.mean_excess_risk / std::sqrt(s.epsilon_n);
    s.ratio_risk_gamma = s.mean_excess_risk / excess_risk_rate(s.epsilon_n, s.gamma);
    s.mean_kl_star = mean_of(col(&Record::kl_star));
    s.mean_misspec_bound = mean_of(col(&Record::misspec_bound));
    s.ratio_misspec = s.mean_misspec_bound > 0.0 ? s.mean_renyi / s.mean_misspec_bound : 0.0;
    for (const Record* r : recs) {
      s.max_theta_star_gap = std::max(s.max_theta_star_gap, r->theta_star_gap);
      if (r->mean_l2_error > r->l2_error) ++s.jensen_violations;
    }
    rows.push_back(s);
  }
  return rows;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size(), "loglog_slope: size mismatch");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  if (lx.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double mx = mean_of(lx), my = mean_of(ly);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  return sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

double spread_factor(const std::vector<double>& v) {
  require(!v.empty(), "spread_factor: empty input");
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double x : v) {
    if (!(x > 0.0)) return std::numeric_limits<double>::infinity();
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return hi / lo;
}

namespace {

std::ofstream open_report(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  return os;
}

template <class... Ts>
void csv_line(std::ostream& os, const Ts&... vals) {
  bool first = true;
  auto put = [&](const auto& v) {
    if (!first) os << ',';
    first = false;
    if constexpr (std::is_floating_point_v<std::decay_t<decltype(v)>>) {
      os << format_double(v);
    } else {
      os << v;
    }
  };
  (put(vals), ...);
  os << '\n';
}

}  // namespace

void write_records_csv(const std::vector<Record>& records, const fs::path& path) {
  auto os = open_report(path);
  os << "grid_index,rep,n,d,s_star,alpha,master_seed,theta0_seed,mc_seed,data_seed,chain_seed,"
        "renyi,hellinger2,tv2,kl,g_error,l2_error,excess_risk,mean_l2_error,mean_excess_risk,"
        "acceptance_rate,step_size,draws,score_tail,gamma,K1,lambda_min,eps_student,"
        "eps_spike_slab,epsilon_n,bound_renyi,bound_hellinger2,bound_tv2,bound_expectation,"
        "kl_star,r_n,misspec_bound,theta_star_l0,theta_star_gap\n";
  for (const auto& r : records) {
    csv_line(os, r.grid_index, r.rep, r.point.n, r.point.d, r.point.s_star, r.point.alpha,
             r.master_seed, r.theta0_seed, r.mc_seed, r.data_seed, r.chain_seed, r.renyi,
             r.hellinger2, r.tv2, r.kl, r.g_error, r.l2_error, r.excess_risk, r.mean_l2_error,
             r.mean_excess_risk, r.acceptance_rate, r.step_size, r.draws, r.score_tail, r.gamma,
             r.K1, r.lambda_min, r.eps_student, r.eps_spike_slab, r.epsilon_n, r.bound_renyi,
             r.bound_hellinger2, r.bound_tv2, r.bound_expectation, r.kl_star, r.r_n,
             r.misspec_bound, r.theta_star_l0, r.theta_star_gap);
  }
}

void write_summary_csv(const std::vector<SummaryRow>& rows, const fs::path& path) {
  auto os = open_report(path);
  os << "n,d,s_star,alpha,reps,mean_renyi,mean_hellinger2,median_hellinger2,mean_tv2,mean_kl,"
        "mean_g_error,mean_l2_error,mean_mean_l2_error,mean_excess_risk,median_excess_risk,"
        "mean_acceptance,K1,lambda_min,eps_student,eps_spike_slab,epsilon_n,bound_hellinger2,"
        "bound_renyi,bound_tv2,gamma,ratio_hellinger2,ratio_h2_rate,ratio_estimation,"
        "ratio_risk_sqrt,ratio_risk_gamma,mean_kl_star,mean_misspec_bound,ratio_misspec,"
        "max_theta_star_gap,jensen_violations\n";
  for (const auto& s : rows) {
    csv_line(os, s.point.n, s.point.d, s.point.s_star, s.point.alpha, s.reps, s.mean_renyi,
             s.mean_hellinger2, s.median_hellinger2, s.mean_tv2, s.mean_kl, s.mean_g_error,
             s.mean_l2_error, s.mean_mean_l2_error, s.mean_excess_risk, s.median_excess_risk,
             s.mean_acceptance, s.K1, s.lambda_min, s.eps_student, s.eps_spike_slab, s.epsilon_n,
             s.bound_hellinger2, s.bound_renyi, s.bound_tv2, s.gamma, s.ratio_hellinger2,
             s.ratio_h2_rate, s.ratio_estimation, s.ratio_risk_sqrt, s.ratio_risk_gamma,
             s.mean_kl_star, s.mean_misspec_bound, s.ratio_misspec, s.max_theta_star_gap,
             s.jensen_violations);
  }
}

void emit_rate_report(const ExperimentResult& result, const fs::path& dir) {
  require(!result.records.empty(), "emit_rate_report: no results");
  fs::create_directories(dir);
  const auto rows = summarize(result);
  write_records_csv(result.records, dir / "records.csv");
  write_summary_csv(rows, dir / "summary.csv");
  {
    auto os = open_report(dir / "timings.csv");
    os << "grid_index,rep,seconds\n";
    for (const auto& r : result.records) csv_line(os, r.grid_index, r.rep, r.seconds);
  }

  // Plot files and slopes, one series per (d, s*, alpha) slice of the grid.
  json slopes = json::array();
  std::map<std::tuple<Index, Index, double>, std::vector<const SummaryRow*>> slices;
  for (const auto& s : rows) slices[{s.point.d, s.point.s_star, s.point.alpha}].push_back(&s);
  const std::vector<std::pair<std::string, double SummaryRow::*>> series{
      {"hellinger2", &SummaryRow::mean_hellinger2}, {"renyi", &SummaryRow::mean_renyi},
      {"tv2", &SummaryRow::mean_tv2},               {"l2_error", &SummaryRow::mean_l2_error},
      {"g_error", &SummaryRow::mean_g_error},       {"excess_risk", &SummaryRow::mean_excess_risk},
      {"epsilon_n", &SummaryRow::epsilon_n}};
  for (const auto& [key, slice] : slices) {
    const auto [d, s_star, alpha] = key;
    std::string tag = "d" + std::to_string(d) + "_s" + std::to_string(s_star) + "_a" +
                      format_double(alpha);
    json entry{{"d", d}, {"s_star", s_star}, {"alpha", alpha}};
    std::vector<double> ns;
    for (const auto* s : slice) ns.push_back(static_cast<double>(s->point.n));
    for (const auto& [label, field] : series) {
      std::vector<double> ys;
      auto os = open_report(dir / (label + "_vs_n_" + tag + ".dat"));
      os << "# n " << label << '\n';
      for (const auto* s : slice) {
        ys.push_back(s->*field);
        os << s->point.n << ' ' << format_double(s->*field) << '\n';
      }
      const double slope = loglog_slope(ns, ys);
      entry["loglog_slope_" + label] = std::isfinite(slope) ? json(slope) : json(nullptr);
    }
    slopes.push_back(entry);
  }

  json manifest{{"name", result.spec.name},
                {"kind", to_string(result.spec.kind)},
                {"master_seed", result.spec.seed},
                {"version", SGBL_VERSION},
                {"records", result.records.size()},
                {"grid_points", rows.size()},
                {"seconds", result.seconds},
                {"slopes", slopes},
                {"spec", to_json(result.spec)},
                {"files",
                 {{"records", "records.csv"},
                  {"summary", "summary.csv"},
                  {"timings", "timings.csv"}}}};
  auto os = open_report(dir / "manifest.json");
  os << manifest.dump(2) << '\n';
}

}  // namespace sgbl
