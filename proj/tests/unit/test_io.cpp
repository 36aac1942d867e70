#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "sgbl/io.hpp"
#include "sgbl/posterior.hpp"

using namespace sgbl;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "sgbl_test_io";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("format_double round-trips") {
  Rng rng(1);
  std::normal_distribution<double> nd(0.0, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double x = nd(rng) * std::pow(10.0, static_cast<double>(i % 40 - 20));
    CHECK(std::stod(format_double(x)) == x);
  }
  CHECK(std::stod(format_double(0.1)) == 0.1);
}

TEST_CASE("dataset round-trip is bit-exact") {
  const Coefficients th0 = generate_theta0(7, 2, 1.3, 5);
  const Dataset data = generate_dataset(th0.values(), 40, DesignDistribution::gaussian_default(7), 9,
                                        LabelGenerator::probit(1.5));
  const fs::path p = scratch("data.csv");
  write_dataset(data, p);
  CHECK(fs::exists(sidecar_path(p)));
  const Dataset back = read_dataset(p);
  CHECK(back.X == data.X);
  CHECK(back.y == data.y);
  CHECK(back.meta.theta0 == data.meta.theta0);
  CHECK(back.meta.seed == 9);
  CHECK(back.meta.generator.link == LinkKind::probit);
  CHECK(back.meta.generator.probit_scale == 1.5);
  CHECK(back.meta.design.variance == data.meta.design.variance);
  CHECK(data_digest(back) == data_digest(data));
  std::ifstream is(p);
  std::string header;
  std::getline(is, header);
  CHECK(header == "y,x1,x2,x3,x4,x5,x6,x7");
}

TEST_CASE("0/1 labels are remapped") {
  const fs::path p = scratch("zero_one.csv");
  fs::remove(sidecar_path(p));
  {
    std::ofstream os(p);
    os << "y,x1,x2\n1,0.5,1\n0,-0.5,2\n1,1,1\n";
  }
  const Dataset d = read_dataset(p);
  CHECK(d.y[0] == 1.0);
  CHECK(d.y[1] == -1.0);
  CHECK(d.dim() == 2);
  {
    std::ofstream os(p);
    os << "y,x1\n2,0.5\n";
  }
  CHECK_THROWS_AS(read_dataset(p), ConfigError);
  {
    std::ofstream os(p);
    os << "y,x1,x2\n1,0.5\n";
  }
  CHECK_THROWS_AS(read_dataset(p), ConfigError);
}

TEST_CASE("sample set round-trip is bit-exact") {
  SampleSet s;
  s.draws = Matrix::Random(25, 4) * 1e-3;
  s.acceptance_rate = 0.573;
  s.boundary_rejections = 2;
  s.steps = 1234;
  s.step_size = 3.7e-5;
  s.config.seed = 42;
  s.config.algorithm = Algorithm::ula;
  s.target = {0.5, "student", "abc"};
  const fs::path p = scratch("draws.csv");
  write_sample_set(s, p);
  const SampleSet back = read_sample_set(p);
  CHECK(back.draws == s.draws);
  CHECK(back.acceptance_rate == s.acceptance_rate);
  CHECK(back.steps == 1234);
  CHECK(back.step_size == s.step_size);
  CHECK(back.config.seed == 42);
  CHECK(back.config.algorithm == Algorithm::ula);
  CHECK(back.target.prior_kind == "student");
  CHECK(back.target.data_digest == "abc");
  CHECK(posterior_mean(back).values() == posterior_mean(s).values());
}

TEST_CASE("prior, design, generator and sampler JSON") {
  const PriorSpec st = StudentPriorConfig{0.01, 50.0};
  const PriorSpec back = prior_from_json(to_json(st));
  CHECK(std::get<StudentPriorConfig>(back).tau == 0.01);
  CHECK(std::get<StudentPriorConfig>(back).c1 == 50.0);
  const PriorSpec ss = SpikeSlabConfig{0.02, 1e-6, 1.0};
  CHECK(std::get<SpikeSlabConfig>(prior_from_json(to_json(ss))).v0 == 1e-6);
  CHECK_THROWS_AS(prior_from_json(json{{"kind", "horseshoe"}}), ConfigError);

  const auto g = design_from_json(json{{"kind", "gaussian"}}, 8);
  CHECK(g.variance == 0.125);
  CHECK(design_from_json(to_json(DesignDistribution::uniform_sphere(3)), 3).kind == DesignKind::uniform_sphere);
  CHECK_THROWS_AS(design_from_json(json{{"kind", "cauchy"}}, 3), ConfigError);

  CHECK(generator_from_json(to_json(LabelGenerator::label_flip(0.1))).flip_rate == 0.1);
  CHECK_THROWS_AS(generator_from_json(json{{"link", "cloglog"}}), ConfigError);

  SamplerConfig cfg;
  cfg.step_size = 0.25;
  cfg.n_iter = 300;
  cfg.burn_in = 100;
  cfg.thinning = 2;
  const SamplerConfig c2 = sampler_config_from_json(to_json(cfg));
  CHECK(c2.step_size == 0.25);
  CHECK(c2.expected_draws() == 100);
  const SamplerConfig c3 = sampler_config_from_json(json{{"init", json::array({1.0, 2.0})}});
  CHECK(c3.init == InitKind::supplied);
  CHECK(c3.init_value.size() == 2);

  const Vector v = parse_vector("1, -2.5,3e-3");
  CHECK(v.size() == 3);
  CHECK(v[2] == 3e-3);
  CHECK_THROWS_AS(parse_vector("1,abc"), ConfigError);
  CHECK(vector_from_json(to_json(v)) == v);
}
