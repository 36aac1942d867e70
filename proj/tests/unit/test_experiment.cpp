#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "sgbl/experiment.hpp"

using namespace sgbl;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

ExperimentSpec small_spec() {
  ExperimentSpec s;
  s.name = "small";
  s.n_grid = {60, 120};
  s.d_grid = {5};
  s.s_grid = {1};
  s.replications = 2;
  s.sampler.n_iter = 1500;
  s.sampler.burn_in = 500;
  s.sampler.thinning = 2;
  s.mc.design_draws = 300;
  s.mc.stats_draws = 5000;
  s.mc.max_draws = 100;
  s.mc.oracle_draws = 2000;
  s.mc.margin_draws = 5000;
  s.seed = 11;
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("spec validation and JSON") {
  ExperimentSpec s = small_spec();
  CHECK(s.grid().size() == 2);
  s.alpha_grid = {1.0};
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = small_spec();
  s.s_grid = {200};
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = small_spec();
  s.generator = LabelGenerator::probit();
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s.kind = ExperimentKind::misspecified;
  CHECK_NOTHROW(s.validate());

  const ExperimentSpec back = spec_from_json(to_json(small_spec()));
  CHECK(back.n_grid == small_spec().n_grid);
  CHECK(back.sampler.n_iter == 1500);
  CHECK(back.mc.design_draws == 300);
  CHECK(to_json(back) == to_json(small_spec()));
  CHECK_THROWS_AS(spec_from_json(json{{"kind", "bogus"}}), ConfigError);
  const ExperimentSpec scalar = spec_from_json(json{{"n", 300}, {"alpha", 0.25}});
  CHECK(scalar.n_grid == std::vector<Index>{300});
  CHECK(scalar.alpha_grid == std::vector<double>{0.25});
}

TEST_CASE("records: bookkeeping, bounds and invariants") {
  const ExperimentResult r = run_experiment(small_spec());
  REQUIRE(r.records.size() == 4);
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    const Record& rec = r.records[i];
    CHECK(rec.grid_index == i / 2);
    CHECK(rec.rep == static_cast<Index>(i % 2));
    CHECK(rec.draws == 500);
    CHECK(rec.mean_l2_error <= rec.l2_error);
    CHECK(rec.hellinger2 >= 0.0);
    CHECK(rec.hellinger2 <= rec.renyi + 1e-14);
    CHECK(rec.epsilon_n == rec.eps_student);
    CHECK(rec.bound_hellinger2 == Approx(6.0 * rec.epsilon_n));
    // 2 E||X|| with ||X||^2 ~ chi2_5 / 5
    CHECK(rec.K1 == Approx(2.0 * 2.0 * std::sqrt(2.0) / std::tgamma(2.5) / std::sqrt(5.0)).epsilon(0.02));
  }
  // theta0 and the design sample are shared across n at a fixed replication
  CHECK(r.records[0].theta0_seed == r.records[2].theta0_seed);
  CHECK(r.records[0].data_seed != r.records[2].data_seed);
  CHECK(r.records[0].chain_seed != r.records[1].chain_seed);

  const auto rows = summarize(r);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].reps == 2);
  CHECK(rows[0].jensen_violations == 0);
  CHECK(rows[0].mean_hellinger2 == Approx(0.5 * (r.records[0].hellinger2 + r.records[1].hellinger2)));
}

TEST_CASE("determinism and thread independence") {
  ExperimentSpec a = small_spec();
  const auto r1 = run_experiment(a);
  a.threads = 3;
  const auto r3 = run_experiment(a);
  REQUIRE(r1.records.size() == r3.records.size());
  for (std::size_t i = 0; i < r1.records.size(); ++i) {
    CHECK(r1.records[i].hellinger2 == r3.records[i].hellinger2);
    CHECK(r1.records[i].l2_error == r3.records[i].l2_error);
    CHECK(r1.records[i].excess_risk == r3.records[i].excess_risk);
  }
  const fs::path base = fs::temp_directory_path() / "sgbl_test_experiment";
  emit_rate_report(r1, base / "one");
  emit_rate_report(r3, base / "three");
  CHECK(slurp(base / "one" / "summary.csv") == slurp(base / "three" / "summary.csv"));
  CHECK(slurp(base / "one" / "records.csv") == slurp(base / "three" / "records.csv"));
  for (const char* f : {"manifest.json", "timings.csv", "hellinger2_vs_n_d5_s1_a0.5.dat"})
    CHECK(fs::exists(base / "one" / f));
  const json manifest = json::parse(slurp(base / "one" / "manifest.json"));
  CHECK(manifest.at("master_seed") == 11);
}

TEST_CASE("pseudo-true parameter") {
  Rng rng(3);
  const Index d = 4;
  const Matrix X = DesignDistribution::gaussian(d, 1.0).sample(4000, rng);
  Vector th0 = Vector::Zero(d);
  th0 << 0.8, 0.0, -0.5, 0.0;
  const PseudoTrue well = pseudo_true_parameter(th0, X, LabelGenerator::logistic(), 4, 5);
  CHECK((well.theta - th0).lpNorm<Eigen::Infinity>() < 1e-3);
  CHECK(well.kl == Approx(0.0).epsilon(1e-9));
  CHECK(well.grad_norm <= 1e-8);

  // probit(x't) is close to logistic(1.7 x't): theta* stays on the ray of theta0
  const PseudoTrue mis = pseudo_true_parameter(th0, X, LabelGenerator::probit(), 4, 5);
  CHECK(mis.kl > 0.0);
  const double scale = mis.theta.dot(th0) / th0.squaredNorm();
  CHECK(scale == Approx(1.7).epsilon(0.1));
  CHECK((mis.theta - scale * th0).norm() < 0.05 * mis.theta.norm());
  CHECK(effective_l0(mis.theta) == 2);
}

TEST_CASE("helpers") {
  CHECK(loglog_slope({1, 2, 4, 8}, {1, 0.5, 0.25, 0.125}) == Approx(-1.0).epsilon(1e-12));
  CHECK(std::isnan(loglog_slope({1}, {1})));
  CHECK(strictly_decreasing({3, 2, 1}));
  CHECK_FALSE(strictly_decreasing({3, 3, 1}));
  CHECK(spread_factor({1, 5, 2}) == 5.0);
  CHECK(std::isinf(spread_factor({1, 0})));
  Vector v(4);
  v << 1.0, 0.005, -0.5, 0.0;
  CHECK(effective_l0(v) == 2);
  CHECK(experiment_kind_from_string("misspec") == ExperimentKind::misspecified);
  CHECK_THROWS_AS(experiment_kind_from_string("nope"), ConfigError);
}
