#include <memory>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sgbl/bounds.hpp"
#include "sgbl/experiment.hpp"
#include "sgbl/io.hpp"
#include "sgbl/metrics.hpp"
#include "sgbl/posterior.hpp"
#include "sgbl/priors.hpp"
#include "sgbl/sampler.hpp"

namespace py = pybind11;
using namespace sgbl;

namespace {

std::shared_ptr<const Dataset> make_data(const Matrix& X, const Vector& y) {
  auto data = std::make_shared<Dataset>();
  data->X = X;
  data->y = y;
  data->validate();
  return data;
}

FractionalTarget make_target(const Matrix& X, const Vector& y, double alpha, const std::string& prior) {
  return FractionalTarget(alpha, make_data(X, y), prior_from_json(json::parse(prior)));
}

ConcentrationMetric metric_from(const std::string& m) {
  if (m == "renyi") return ConcentrationMetric::renyi;
  if (m == "hellinger2") return ConcentrationMetric::hellinger2;
  if (m == "tv2") return ConcentrationMetric::tv2;
  throw ConfigError("unknown metric: " + m);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sparse Gibbs posteriors for logistic regression";
  m.attr("__version__") = SGBL_VERSION;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def("bernoulli_renyi", &bernoulli_renyi, py::arg("p"), py::arg("q"), py::arg("alpha"));
  m.def("bernoulli_hellinger2", &bernoulli_hellinger2, py::arg("p"), py::arg("q"));
  m.def("bernoulli_tv", &bernoulli_tv, py::arg("p"), py::arg("q"));
  m.def("bernoulli_kl", &bernoulli_kl, py::arg("p"), py::arg("q"));

  m.def("epsilon_n_student",
        [](Index n, Index d, Index s, double c1, double K1) { return epsilon_n_student(n, d, s, c1, K1).epsilon_n; },
        py::arg("n"), py::arg("d"), py::arg("s_star"), py::arg("c1"), py::arg("K1"));
  m.def("epsilon_n_spike_slab",
        [](Index n, Index d, Index s, double K1) { return epsilon_n_spike_slab(n, d, s, K1).epsilon_n; },
        py::arg("n"), py::arg("d"), py::arg("s_star"), py::arg("K1"));
  m.def("h_alpha", &h_alpha, py::arg("alpha"));
  m.def("concentration_bound",
        [](double a, double eps, const std::string& metric) { return concentration_bound(a, eps, metric_from(metric)); },
        py::arg("alpha"), py::arg("epsilon_n"), py::arg("metric") = "renyi");
  m.def("expectation_bound", &expectation_bound, py::arg("alpha"), py::arg("epsilon_n"));
  m.def("excess_risk_rate", &excess_risk_rate, py::arg("epsilon_n"), py::arg("gamma"));
  m.def("kl_lemma_bound", &kl_lemma_bound, py::arg("s_star"), py::arg("c1"), py::arg("tau"));
  m.def("misspecified_bound", &misspecified_bound, py::arg("alpha"), py::arg("kl_star"), py::arg("r_n"));

  m.def("default_tau", &default_tau, py::arg("n"), py::arg("d"));
  m.def("generate_theta0",
        [](Index d, Index s, double magnitude, std::uint64_t seed) { return generate_theta0(d, s, magnitude, seed).values(); },
        py::arg("d"), py::arg("s_star"), py::arg("magnitude"), py::arg("seed"));
  m.def("generate_dataset",
        [](const Vector& theta0, Index n, const std::string& design, std::uint64_t seed, const std::string& gen) {
          const Dataset d = generate_dataset(theta0, n, design_from_json(json::parse(design), theta0.size()), seed,
                                             generator_from_json(json::parse(gen)));
          return py::make_tuple(d.X, d.y);
        },
        py::arg("theta0"), py::arg("n"), py::arg("design"), py::arg("seed"), py::arg("generator"));
  m.def("log_likelihood",
        [](const Vector& theta, const Matrix& X, const Vector& y) { return log_likelihood(theta, *make_data(X, y)); },
        py::arg("theta"), py::arg("X"), py::arg("y"));
  m.def("log_target",
        [](const Vector& theta, const Matrix& X, const Vector& y, double alpha, const std::string& prior) {
          return make_target(X, y, alpha, prior).log_density(theta);
        },
        py::arg("theta"), py::arg("X"), py::arg("y"), py::arg("alpha"), py::arg("prior"));
  m.def("grad_log_target",
        [](const Vector& theta, const Matrix& X, const Vector& y, double alpha, const std::string& prior) {
          return grad_log_target(make_target(X, y, alpha, prior), theta);
        },
        py::arg("theta"), py::arg("X"), py::arg("y"), py::arg("alpha"), py::arg("prior"));
  m.def("sample",
        [](const Matrix& X, const Vector& y, double alpha, const std::string& prior, const std::string& sampler) {
          const FractionalTarget target = make_target(X, y, alpha, prior);
          SampleSet s;
          {
            py::gil_scoped_release release;
            s = run_chain(target, sampler_config_from_json(json::parse(sampler)));
          }
          py::dict out;
          out["draws"] = s.draws;
          out["acceptance_rate"] = s.acceptance_rate;
          out["step_size"] = s.step_size;
          out["boundary_rejections"] = s.boundary_rejections;
          return out;
        },
        py::arg("X"), py::arg("y"), py::arg("alpha"), py::arg("prior"), py::arg("sampler"));
  m.def("compatibility_numbers",
        [](const Matrix& X, const Vector& theta0, Index s) {
          const auto c = compatibility_numbers(X, theta0, s);
          return py::make_tuple(c.phi1, c.phi2);
        },
        py::arg("X"), py::arg("theta0"), py::arg("s"));
  m.def("run_experiment",
        [](const std::string& spec_json, const std::string& out_dir) {
          ExperimentSpec spec = spec_from_json(json::parse(spec_json));
          ExperimentResult r;
          {
            py::gil_scoped_release release;
            r = run_experiment(spec);
            if (!out_dir.empty()) emit_rate_report(r, out_dir);
          }
          py::list rows;
          for (const auto& s : summarize(r)) {
            py::dict row;
            row["n"] = s.point.n;
            row["d"] = s.point.d;
            row["s_star"] = s.point.s_star;
            row["alpha"] = s.point.alpha;
            row["mean_hellinger2"] = s.mean_hellinger2;
            row["mean_renyi"] = s.mean_renyi;
            row["mean_l2_error"] = s.mean_l2_error;
            row["mean_excess_risk"] = s.mean_excess_risk;
            row["epsilon_n"] = s.epsilon_n;
            row["bound_hellinger2"] = s.bound_hellinger2;
            row["ratio_estimation"] = s.ratio_estimation;
            row["jensen_violations"] = s.jensen_violations;
            rows.append(row);
          }
          return rows;
        },
        py::arg("spec"), py::arg("out_dir") = "");
}
