// Command line front end. Exit codes: 0 success, 2 config error, 3 numerical failure.
#include <cstdio>
#include <iomanip>
#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "sgbl/bounds.hpp"
#include "sgbl/experiment.hpp"
#include "sgbl/io.hpp"
#include "sgbl/metrics.hpp"
#include "sgbl/posterior.hpp"
#include "sgbl/priors.hpp"
#include "sgbl/risk.hpp"
#include "sgbl/sampler.hpp"

using namespace sgbl;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  unsigned threads = 0;
};

json read_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config: " + path);
  try {
    json j;
    is >> j;
    return j;
  } catch (const json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
}

void emit(const json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  const fs::path p(out);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + out);
  os << j.dump(2) << '\n';
}

DesignDistribution parse_design(const std::string& kind, Index d, double variance) {
  json j{{"kind", kind}};
  if (variance > 0.0) j["variance"] = variance;
  return design_from_json(j, d);
}

json divergences_json(const JointDivergences& jd) {
  return json{{"renyi", jd.renyi}, {"hellinger2", jd.hellinger2}, {"tv", jd.tv}, {"kl", jd.kl}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse generalized Bayesian logistic regression toolkit"};
  app.set_version_flag("--version", SGBL_VERSION);
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "JSON config file");
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& s) { common.seed = s; common.seed_set = true; },
        "Master seed");
    sub->add_option("--out", common.out, "Output file or directory");
    sub->add_option("--threads", common.threads, "Worker threads");
  };

  // sample
  auto* sample = app.add_subcommand("sample", "Run a Langevin chain on a fractional posterior");
  add_common(sample);
  std::string data_path, prior_kind = "student", algo = "mala", save_data;
  Index gen_n = 200, gen_d = 20, gen_s = 2;
  double magnitude = 1.0, alpha = 0.5, tau = 0.0, c1 = 1e4, step = 1e-3;
  std::int64_t n_iter = 20000, burn_in = 5000, thin = 5;
  bool tune = false;
  sample->add_option("--data", data_path, "Dataset CSV (y,x1..xd); generated when omitted");
  sample->add_option("--n", gen_n, "Generated sample size");
  sample->add_option("--d", gen_d, "Generated dimension");
  sample->add_option("--s-star", gen_s, "Generated sparsity");
  sample->add_option("--magnitude", magnitude, "Generated nonzero magnitude");
  sample->add_option("--save-data", save_data, "Write the generated dataset here");
  sample->add_option("--alpha", alpha, "Fractional power")->check(CLI::Range(0.0, 1.0));
  sample->add_option("--prior", prior_kind, "student or spike_slab")
      ->check(CLI::IsMember({"student", "spike_slab"}));
  sample->add_option("--tau", tau, "Student scale (default 1/(n sqrt d))");
  sample->add_option("--c1", c1, "l1 radius of the Student prior");
  sample->add_option("--algorithm", algo, "ula or mala")->check(CLI::IsMember({"ula", "mala"}));
  sample->add_option("--step", step, "Step size");
  sample->add_option("--n-iter", n_iter, "Iterations");
  sample->add_option("--burn-in", burn_in, "Burn-in iterations");
  sample->add_option("--thin", thin, "Thinning");
  sample->add_flag("--tune", tune, "Pilot-tune the MALA step size");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "Evaluate rate and bound formulas");
  add_common(bounds);
  Index b_n = 100, b_d = 50, b_s = 3;
  double b_alpha = 0.5, b_c1 = 1e4, b_K1 = -1.0, b_gamma = 0.0, b_kl = 0.0;
  Index b_l0 = 0;
  bounds->add_option("--n", b_n, "Sample size");
  bounds->add_option("--d", b_d, "Dimension");
  bounds->add_option("--s-star", b_s, "Sparsity");
  bounds->add_option("--alpha", b_alpha, "Fractional power");
  bounds->add_option("--c1", b_c1, "l1 radius");
  bounds->add_option("--K1", b_K1, "2 E||X|| (default: N(0, I/d) design, estimated)");
  bounds->add_option("--gamma", b_gamma, "Margin exponent");
  bounds->add_option("--kl-star", b_kl, "KL(P0, P*) for the misspecified bound");
  bounds->add_option("--theta-star-l0", b_l0, "||theta*||_0 (default s*)");

  // diverge
  auto* diverge = app.add_subcommand("diverge", "Joint divergences between two parameters");
  add_common(diverge);
  std::string theta_s, theta0_s, design_kind = "gaussian";
  double d_alpha = 0.5, d_var = 0.0, p_two = -1.0, q_two = -1.0;
  Index d_nmc = 100000;
  diverge->add_option("--theta", theta_s, "Comma separated theta");
  diverge->add_option("--theta0", theta0_s, "Comma separated theta0");
  diverge->add_option("--alpha", d_alpha, "Renyi order");
  diverge->add_option("--design", design_kind, "gaussian or uniform_sphere");
  diverge->add_option("--variance", d_var, "Gaussian design variance (default 1/d)");
  diverge->add_option("--n-mc", d_nmc, "Design draws");
  diverge->add_option("--p", p_two, "Two-point mode: P(+1) of the first law");
  diverge->add_option("--q", q_two, "Two-point mode: P(+1) of the second law");

  // risk
  auto* risk = app.add_subcommand("risk", "Misclassification and excess risk, margin fit");
  add_common(risk);
  std::string r_theta, r_theta0, r_design = "gaussian";
  double r_var = 0.0;
  Index r_nmc = 200000;
  risk->add_option("--theta", r_theta, "Comma separated theta")->required();
  risk->add_option("--theta0", r_theta0, "Comma separated theta0")->required();
  risk->add_option("--design", r_design, "gaussian or uniform_sphere");
  risk->add_option("--variance", r_var, "Gaussian design variance (default 1/d)");
  risk->add_option("--n-mc", r_nmc, "Design draws");

  // rates / misspec
  auto* rates = app.add_subcommand("rates", "Concentration, estimation and risk rate experiment");
  add_common(rates);
  std::string rates_kind;
  rates->add_option("--kind", rates_kind, "rates or spike_slab (overrides the config)");
  auto* misspec = app.add_subcommand("misspec", "Misspecified-model experiment");
  add_common(misspec);

  // verify-lemmas
  auto* lemmas = app.add_subcommand("verify-lemmas", "Monte Carlo check of the translated prior");
  add_common(lemmas);
  Index l_n = 100, l_d = 4, l_s = 1, l_nmc = 200000;
  double l_c1 = 10.0;
  std::string l_theta0;
  lemmas->add_option("--n", l_n, "Sample size (tau = 1/(n sqrt d))");
  lemmas->add_option("--d", l_d, "Dimension (<= 10)");
  lemmas->add_option("--s-star", l_s, "Sparsity");
  lemmas->add_option("--c1", l_c1, "l1 radius");
  lemmas->add_option("--theta0", l_theta0, "Comma separated theta0 (default e_1 ... e_s)");
  lemmas->add_option("--n-mc", l_nmc, "Proposals");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*sample) {
      SamplerConfig cfg;
      json jc = common.config.empty() ? json::object() : read_json_file(common.config);
      cfg.algorithm = algorithm_from_string(algo);
      cfg.step_size = step;
      cfg.n_iter = n_iter;
      cfg.burn_in = burn_in;
      cfg.thinning = thin;
      cfg.tune = tune;
      if (jc.contains("sampler")) cfg = sampler_config_from_json(jc["sampler"], cfg);
      if (jc.contains("alpha")) alpha = jc["alpha"].get<double>();
      cfg.seed = common.seed_set ? common.seed : jc.value("seed", std::uint64_t{0});

      std::shared_ptr<Dataset> data;
      if (!data_path.empty()) {
        data = std::make_shared<Dataset>(read_dataset(data_path));
      } else {
        const auto design = DesignDistribution::gaussian_default(gen_d);
        const auto theta0 = generate_theta0(gen_d, gen_s, magnitude, derive_seed(cfg.seed, {1}));
        data = std::make_shared<Dataset>(
            generate_dataset(theta0.values(), gen_n, design, derive_seed(cfg.seed, {3})));
        if (!save_data.empty()) write_dataset(*data, save_data);
      }
      PriorSpec prior;
      if (jc.contains("prior")) {
        prior = prior_from_json(jc["prior"]);
      } else if (prior_kind == "student") {
        prior = StudentPriorConfig{tau > 0.0 ? tau : default_tau(data->n(), data->dim()), c1};
      } else {
        prior = spike_slab_defaults(data->n(), data->dim());
      }
      const FractionalTarget target(alpha, data, prior);
      SampleSet s = run_chain(target, cfg);
      s.target = summarize(target);
      const std::string out = common.out.empty() ? "samples.csv" : common.out;
      write_sample_set(s, out);
      json summary{{"draws", s.size()},
                   {"acceptance_rate", s.acceptance_rate},
                   {"step_size", s.step_size},
                   {"boundary_rejections", s.boundary_rejections},
                   {"posterior_mean", to_json(posterior_mean(s).values())},
                   {"prior", to_json(prior)},
                   {"samples", out}};
      std::cout << summary.dump(2) << '\n';
    } else if (*bounds) {
      double K1 = b_K1;
      if (K1 < 0.0) {
        K1 = design_stats(DesignDistribution::gaussian_default(b_d), 100000,
                          common.seed_set ? common.seed : 1).K1;
      }
      const auto st = epsilon_n_student(b_n, b_d, b_s, b_c1, K1);
      const auto ss = epsilon_n_spike_slab(b_n, b_d, b_s, K1);
      const Index l0 = b_l0 > 0 ? b_l0 : b_s;
      const double rn = misspecified_r_n(b_n, b_d, b_c1, l0, K1);
      const double tau = default_tau(b_n, b_d);
      json j{{"K1", K1},
             {"tau", tau},
             {"epsilon_n_student", st.epsilon_n},
             {"epsilon_n_spike_slab", ss.epsilon_n},
             {"H_alpha", h_alpha(b_alpha)},
             {"renyi_bound", concentration_bound(b_alpha, st.epsilon_n, ConcentrationMetric::renyi)},
             {"hellinger2_bound",
              concentration_bound(b_alpha, st.epsilon_n, ConcentrationMetric::hellinger2)},
             {"tv2_bound", concentration_bound(b_alpha, st.epsilon_n, ConcentrationMetric::tv2)},
             {"expectation_bound", expectation_bound(b_alpha, st.epsilon_n)},
             {"excess_risk_rate", excess_risk_rate(st.epsilon_n, b_gamma)},
             {"r_n", rn},
             {"misspecified_bound", misspecified_bound(b_alpha, b_kl, rn)},
             {"l2_lemma_bound", l2_lemma_bound(b_d, tau)}};
      if (b_c1 / (tau * static_cast<double>(b_s)) > 1.0)
        j["kl_lemma_bound"] = kl_lemma_bound(b_s, b_c1, tau);
      emit(j, common.out);
    } else if (*diverge) {
      if (p_two >= 0.0 || q_two >= 0.0) {
        json j{{"renyi", bernoulli_renyi(p_two, q_two, d_alpha)},
               {"hellinger2", bernoulli_hellinger2(p_two, q_two)},
               {"tv", bernoulli_tv(p_two, q_two)},
               {"kl", bernoulli_kl(p_two, q_two)}};
        emit(j, common.out);
      } else {
        require(!theta_s.empty() && !theta0_s.empty(), "diverge needs --theta and --theta0 or --p/--q");
        const Vector th = parse_vector(theta_s), th0 = parse_vector(theta0_s);
        require_dims(th.size(), th0.size(), "diverge");
        const auto design = parse_design(design_kind, th.size(), d_var);
        Rng rng(common.seed_set ? common.seed : 1);
        const Matrix X = design.sample(d_nmc, rng);
        auto pack = [](const DivergenceEstimate& e) {
          return json{{"value", e.value}, {"std_error", e.std_error}};
        };
        json j{{"renyi", pack(joint_renyi(th, th0, d_alpha, X))},
               {"hellinger2", pack(joint_hellinger2(th, th0, X))},
               {"tv", pack(joint_tv(th, th0, X))},
               {"kl", pack(joint_kl(th, th0, X))},
               {"n_mc", d_nmc}};
        emit(j, common.out);
      }
    } else if (*risk) {
      const Vector th = parse_vector(r_theta), th0 = parse_vector(r_theta0);
      require_dims(th.size(), th0.size(), "risk");
      const auto design = parse_design(r_design, th.size(), r_var);
      const std::uint64_t seed = common.seed_set ? common.seed : 1;
      const auto bayes = misclassification_risk_mc(make_plug_in(th0), th0, design, r_nmc, seed);
      const auto plug = misclassification_risk_mc(make_plug_in(th), th0, design, r_nmc, seed);
      const auto excess = excess_risk_mc(th, th0, design, r_nmc, seed);
      const auto curve = margin_curve(th0, design, geometric_grid(0.005, 0.35, 12), r_nmc,
                                      derive_seed(seed, {7}));
      const auto mp = fit_gamma(curve);
      json j{{"bayes_risk", bayes.value},
             {"plug_in_risk", plug.value},
             {"excess_risk", excess.value},
             {"excess_risk_se", excess.std_error},
             {"margin", {{"C", mp.C}, {"gamma", mp.gamma}, {"h_star", mp.h_star},
                         {"rms_residual", mp.rms_residual}}}};
      emit(j, common.out);
    } else if (*rates || *misspec) {
      json j = common.config.empty() ? json::object() : read_json_file(common.config);
      if (*misspec) {
        j["kind"] = "misspecified";
        if (!j.contains("generator")) j["generator"] = json{{"link", "probit"}};
      } else if (!rates_kind.empty()) {
        j["kind"] = rates_kind;
      }
      if (common.seed_set) j["seed"] = common.seed;
      if (common.threads > 0) j["threads"] = common.threads;
      ExperimentSpec spec = spec_from_json(j);
      if (!common.out.empty()) spec.out_dir = common.out;
      if (spec.out_dir.empty()) spec.out_dir = "out/" + spec.name;
      const ExperimentResult res = run_experiment(spec);
      emit_rate_report(res, spec.out_dir);
      std::cout << "wrote " << res.records.size() << " records to " << spec.out_dir.string()
                << " in " << std::setprecision(3) << res.seconds << " s\n";
    } else if (*lemmas) {
      Vector theta0 = Vector::Zero(l_d);
      if (!l_theta0.empty()) {
        theta0 = parse_vector(l_theta0);
      } else {
        for (Index i = 0; i < std::min(l_s, l_d); ++i) theta0[i] = 1.0;
      }
      const auto rep = verify_lemmas_mc(l_n, l_d, l_s, l_c1, theta0, l_nmc,
                                        common.seed_set ? common.seed : 1);
      json j{{"tau", rep.tau},
             {"kl", {{"estimate", rep.kl_estimate}, {"std_error", rep.kl_se},
                     {"bound", rep.kl_bound}, {"pass", rep.kl_pass}}},
             {"l2", {{"estimate", rep.l2_estimate}, {"std_error", rep.l2_se},
                     {"bound", rep.l2_bound}, {"pass", rep.l2_pass}}},
             {"accepted_translated", rep.accepted_translated},
             {"accepted_prior", rep.accepted_prior},
             {"n_mc", rep.n_mc}};
      emit(j, common.out);
      return rep.kl_pass && rep.l2_pass ? 0 : 1;
    }
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
