#pragma once

// File formats: state and value CSVs, JSON model/run descriptions, per-chain
// sample files and run manifests.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "mixtrans/inference.hpp"
#include "mixtrans/simulate.hpp"

namespace mixtrans::io {

using json = nlohmann::json;
namespace fs = std::filesystem;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kVersion = "0.1.0";

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// Single numeric column, optional header. Lists every bad row on failure.
std::vector<double> read_values_csv(const fs::path& path);
/// Single integer column of 1-based states, optional "state" header. K = 0
/// takes the largest label seen.
StateSequence read_states_csv(const fs::path& path, int K = 0);
void write_states_csv(const fs::path& path, const StateSequence& s);

/// Hex SHA-1 of "blob <size>\0<bytes>", as git hashes file contents.
std::string git_blob_sha1(const std::string& bytes);
std::string file_blob_sha1(const fs::path& path);
std::string read_file(const fs::path& path);
/// Writes through a temporary file and renames it into place.
void write_file_atomic(const fs::path& path, const std::string& text);

json to_json(const WeightPrior& p);
WeightPrior weight_prior_from_json(const json& j);
json to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const json& j);
json to_json(const McmcConfig& c);
/// Starts from `base` and applies the keys present; unknown keys are errors.
McmcConfig mcmc_config_from_json(const json& j, McmcConfig base = {});
json to_json(const ScenarioSpec& s);
ScenarioSpec scenario_from_json(const json& j);
json to_json(const Truth& t);
Truth truth_from_json(const json& j);
json to_json(const TransitionTensor& q);
TransitionTensor tensor_from_json(const json& j);
json to_json(const MtdParams& p);
MtdParams mtd_params_from_json(const json& j);
json to_json(const MtdgParams& p);
MtdgParams mtdg_params_from_json(const json& j);
/// Includes the lexicographic configuration table next to each lambda vector.
json to_json(const MmtdParams& p);
MmtdParams mmtd_params_from_json(const json& j);

/// Model section of a fit config: {"profile", "K", "L", "R", "delta_scale"}.
struct ModelConfig {
  std::string profile = "mmtd-sdm";
  int K = 0;  // 0: infer from data
  int L = 1;
  int R = 1;
  double delta_scale = 1.0;
};
json to_json(const ModelConfig& m);
ModelConfig model_config_from_json(const json& j);

/// Rejects keys outside `allowed`.
void require_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where);

/// chain_<c>.csv (weights, group counts, log-marginal, swap counts) and
/// q_chain_<c>.csv (transition blocks) for every chain.
std::vector<fs::path> write_samples(const fs::path& dir, const PosteriorSamples& samples);
/// Reads the files written by write_samples given the spec and config.
PosteriorSamples read_samples(const fs::path& dir, const ModelSpec& spec, const McmcConfig& config);

struct RunManifest {
  std::string command;
  json config;
  std::string data_hash;
  std::uint64_t seed = 0;
  json extra = json::object();
  std::vector<std::string> outputs;
};
void write_manifest(const fs::path& path, const RunManifest& m);
json read_json(const fs::path& path);

}  // namespace mixtrans::io
