#include "sgbl/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace sgbl {

namespace fs = std::filesystem;

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ConfigError("cannot parse number: '" + s + "'");
  }
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  if (pos != s.size()) throw ConfigError("cannot parse number: '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string strip(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  std::size_t b = 0;
  while (b < s.size() && s[b] == ' ') ++b;
  return s.substr(b);
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot open for writing: " + p.string());
  return os;
}

std::ifstream open_in(const fs::path& p) {
  std::ifstream is(p);
  if (!is) throw ConfigError("cannot open for reading: " + p.string());
  return is;
}

Matrix read_matrix_csv(const fs::path& p, std::vector<std::string>& header) {
  auto is = open_in(p);
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("empty CSV: " + p.string());
  header = split(strip(line), ',');
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    line = strip(line);
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) {
      throw ConfigError("ragged CSV row in " + p.string());
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_double(strip(c)));
    rows.push_back(std::move(row));
  }
  Matrix M(static_cast<Index>(rows.size()), static_cast<Index>(header.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < header.size(); ++j)
      M(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return M;
}

}  // namespace

json to_json(const Vector& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vector vector_from_json(const json& j) {
  if (!j.is_array()) throw ConfigError("expected a numeric array");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Index>(i)] = j[i].get<double>();
  return v;
}

json to_json(const DesignDistribution& design) {
  json j{{"kind", design.name()}, {"dim", design.dim}};
  switch (design.kind) {
    case DesignKind::gaussian:
      j["variance"] = design.variance;
      break;
    case DesignKind::uniform_sphere:
      break;
    case DesignKind::point_mass:
      j["point"] = to_json(Vector(design.points.row(0).transpose()));
      break;
    case DesignKind::finite_grid: {
      json rows = json::array();
      for (Index i = 0; i < design.points.rows(); ++i)
        rows.push_back(to_json(Vector(design.points.row(i).transpose())));
      j["points"] = rows;
      break;
    }
  }
  return j;
}

DesignDistribution design_from_json(const json& j, Index d) {
  const std::string kind = j.value("kind", "gaussian");
  const Index dim = j.value("dim", d);
  if (kind == "gaussian") {
    const double var = j.contains("variance") && !j["variance"].is_null()
                           ? j["variance"].get<double>()
                           : 1.0 / static_cast<double>(dim);
    return DesignDistribution::gaussian(dim, var);
  }
  if (kind == "uniform_sphere" || kind == "sphere") return DesignDistribution::uniform_sphere(dim);
  if (kind == "point_mass") return DesignDistribution::point_mass(vector_from_json(j.at("point")));
  if (kind == "finite_grid") {
    const auto& rows = j.at("points");
    require(!rows.empty(), "finite_grid needs points");
    Matrix M(static_cast<Index>(rows.size()), static_cast<Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
      M.row(static_cast<Index>(i)) = vector_from_json(rows[i]).transpose();
    return DesignDistribution::finite_grid(std::move(M));
  }
  throw ConfigError("unknown design kind: " + kind);
}

json to_json(const PriorSpec& prior) {
  if (const auto* s = std::get_if<StudentPriorConfig>(&prior)) {
    return json{{"kind", "student"}, {"tau", s->tau}, {"c1", s->c1}};
  }
  const auto& ss = std::get<SpikeSlabConfig>(prior);
  return json{{"kind", "spike_slab"}, {"p", ss.p}, {"v0", ss.v0}, {"v1", ss.v1}};
}

PriorSpec prior_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "student") {
    return StudentPriorConfig{j.at("tau").get<double>(), j.value("c1", 1e4)};
  }
  if (kind == "spike_slab") {
    return SpikeSlabConfig{j.at("p").get<double>(), j.at("v0").get<double>(), j.value("v1", 1.0)};
  }
  throw ConfigError("unknown prior kind: " + kind);
}

json to_json(const LabelGenerator& gen) {
  json j{{"link", gen.name()}};
  if (gen.link == LinkKind::probit) j["scale"] = gen.probit_scale;
  if (gen.link == LinkKind::label_flip) j["rho"] = gen.flip_rate;
  return j;
}

LabelGenerator generator_from_json(const json& j) {
  const std::string link = j.value("link", "logistic");
  LabelGenerator g;
  if (link == "logistic") {
    g = LabelGenerator::logistic();
  } else if (link == "probit") {
    g = LabelGenerator::probit(j.value("scale", 1.0));
  } else if (link == "label_flip") {
    g = LabelGenerator::label_flip(j.value("rho", 0.1));
  } else {
    throw ConfigError("unknown label generator: " + link);
  }
  g.validate();
  return g;
}

json to_json(const SamplerConfig& cfg) {
  json j{{"algorithm", to_string(cfg.algorithm)},
         {"step_size", cfg.step_size},
         {"n_iter", cfg.n_iter},
         {"burn_in", cfg.burn_in},
         {"thinning", cfg.thinning},
         {"seed", cfg.seed},
         {"tune", cfg.tune}};
  switch (cfg.init) {
    case InitKind::zero: j["init"] = "zero"; break;
    case InitKind::prior_draw: j["init"] = "prior_draw"; break;
    case InitKind::supplied: j["init"] = to_json(cfg.init_value); break;
  }
  return j;
}

SamplerConfig sampler_config_from_json(const json& j, const SamplerConfig& defaults) {
  SamplerConfig c = defaults;
  if (j.contains("algorithm")) c.algorithm = algorithm_from_string(j["algorithm"].get<std::string>());
  c.step_size = j.value("step_size", c.step_size);
  c.n_iter = j.value("n_iter", c.n_iter);
  c.burn_in = j.value("burn_in", c.burn_in);
  c.thinning = j.value("thinning", c.thinning);
  c.seed = j.value("seed", c.seed);
  c.tune = j.value("tune", c.tune);
  if (j.contains("init")) {
    const auto& init = j["init"];
    if (init.is_array()) {
      c.init = InitKind::supplied;
      c.init_value = vector_from_json(init);
    } else if (init == "zero") {
      c.init = InitKind::zero;
    } else if (init == "prior_draw") {
      c.init = InitKind::prior_draw;
    } else {
      throw ConfigError("unknown sampler init");
    }
  }
  c.validate();
  return c;
}

fs::path sidecar_path(const fs::path& csv) {
  fs::path p = csv;
  p.replace_extension(".json");
  return p;
}

void write_dataset(const Dataset& data, const fs::path& csv) {
  data.validate();
  {
    auto os = open_out(csv);
    os << 'y';
    for (Index j = 0; j < data.dim(); ++j) os << ",x" << (j + 1);
    os << '\n';
    for (Index i = 0; i < data.n(); ++i) {
      os << (data.y[i] > 0 ? "1" : "-1");
      for (Index j = 0; j < data.dim(); ++j) os << ',' << format_double(data.X(i, j));
      os << '\n';
    }
  }
  json meta{{"n", data.n()},
            {"d", data.dim()},
            {"design", to_json(data.meta.design)},
            {"theta0", to_json(data.meta.theta0)},
            {"seed", data.meta.seed},
            {"generator", to_json(data.meta.generator)}};
  auto os = open_out(sidecar_path(csv));
  os << meta.dump(2) << '\n';
}

Dataset read_dataset(const fs::path& csv) {
  std::vector<std::string> header;
  const Matrix M = read_matrix_csv(csv, header);
  require(header.size() >= 3 && strip(header[0]) == "y", "dataset CSV header must be y,x1,...,xd");
  Dataset data;
  data.y = M.col(0);
  data.X = M.rightCols(M.cols() - 1);
  const bool zero_one = (data.y.array() == 0.0 || data.y.array() == 1.0).all();
  if (zero_one) data.y = (2.0 * data.y.array() - 1.0).matrix();
  const fs::path side = sidecar_path(csv);
  if (fs::exists(side)) {
    json meta;
    auto is = open_in(side);
    is >> meta;
    data.meta.design = design_from_json(meta.at("design"), data.dim());
    data.meta.theta0 = vector_from_json(meta.at("theta0"));
    data.meta.seed = meta.value("seed", std::uint64_t{0});
    if (meta.contains("generator")) data.meta.generator = generator_from_json(meta["generator"]);
  }
  data.validate();
  return data;
}

void write_sample_set(const SampleSet& samples, const fs::path& csv) {
  {
    auto os = open_out(csv);
    for (Index j = 0; j < samples.dim(); ++j) os << (j ? "," : "") << "theta" << (j + 1);
    os << '\n';
    for (Index i = 0; i < samples.size(); ++i) {
      for (Index j = 0; j < samples.dim(); ++j)
        os << (j ? "," : "") << format_double(samples.draws(i, j));
      os << '\n';
    }
  }
  json meta{{"draws", samples.size()},
            {"dim", samples.dim()},
            {"acceptance_rate", samples.acceptance_rate},
            {"boundary_rejections", samples.boundary_rejections},
            {"steps", samples.steps},
            {"step_size", samples.step_size},
            {"config", to_json(samples.config)},
            {"target",
             {{"alpha", samples.target.alpha},
              {"prior_kind", samples.target.prior_kind},
              {"data_digest", samples.target.data_digest}}}};
  auto os = open_out(sidecar_path(csv));
  os << meta.dump(2) << '\n';
}

SampleSet read_sample_set(const fs::path& csv) {
  std::vector<std::string> header;
  SampleSet s;
  s.draws = read_matrix_csv(csv, header);
  const fs::path side = sidecar_path(csv);
  if (fs::exists(side)) {
    json meta;
    auto is = open_in(side);
    is >> meta;
    s.acceptance_rate = meta.value("acceptance_rate", 1.0);
    s.boundary_rejections = meta.value("boundary_rejections", std::int64_t{0});
    s.steps = meta.value("steps", std::int64_t{0});
    s.step_size = meta.value("step_size", 0.0);
    if (meta.contains("config")) s.config = sampler_config_from_json(meta["config"]);
    if (meta.contains("target")) {
      s.target.alpha = meta["target"].value("alpha", 1.0);
      s.target.prior_kind = meta["target"].value("prior_kind", "");
      s.target.data_digest = meta["target"].value("data_digest", "");
    }
  }
  return s;
}

Vector parse_vector(const std::string& text) {
  std::vector<double> vals;
  for (const auto& cell : split(text, ',')) {
    const std::string c = strip(cell);
    if (!c.empty()) vals.push_back(parse_double(c));
  }
  require(!vals.empty(), "empty vector");
  return Eigen::Map<const Vector>(vals.data(), static_cast<Index>(vals.size()));
}

}  // namespace sgbl
