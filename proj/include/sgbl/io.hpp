#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "sgbl/model.hpp"
#include "sgbl/priors.hpp"
#include "sgbl/sampler.hpp"

namespace sgbl {

using json = nlohmann::json;

/// Shortest form that round-trips through strtod (17 significant digits).
std::string format_double(double x);

json to_json(const DesignDistribution& design);
DesignDistribution design_from_json(const json& j, Index d);

json to_json(const PriorSpec& prior);
PriorSpec prior_from_json(const json& j);

json to_json(const LabelGenerator& gen);
LabelGenerator generator_from_json(const json& j);

json to_json(const SamplerConfig& cfg);
/// Fields missing from `j` keep the values of `defaults`.
SamplerConfig sampler_config_from_json(const json& j, const SamplerConfig& defaults = {});

json to_json(const Vector& v);
Vector vector_from_json(const json& j);

/// Sidecar path of a CSV file: same stem, ".json" extension.
std::filesystem::path sidecar_path(const std::filesystem::path& csv);

/// CSV with header `y,x1,...,xd` (17 significant digits) plus JSON sidecar
/// holding the generation record.
void write_dataset(const Dataset& data, const std::filesystem::path& csv);
/// Reads the CSV and, when present, the sidecar. Labels given as 0/1 are
/// remapped to -1/+1.
Dataset read_dataset(const std::filesystem::path& csv);

/// Draw matrix as CSV (header `theta1,...,thetad`, one draw per row) plus a
/// sidecar with the sampler configuration, acceptance rate and data digest.
void write_sample_set(const SampleSet& samples, const std::filesystem::path& csv);
SampleSet read_sample_set(const std::filesystem::path& csv);

/// Parses a comma separated list of reals.
Vector parse_vector(const std::string& text);

}  // namespace sgbl
