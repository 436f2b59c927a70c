#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "perco/exploration.hpp"
#include "perco/graph.hpp"
#include "perco/percolation.hpp"
#include "perco/spectral.hpp"

namespace perco {

enum class Experiment {
  E1_tree_pc,
  E2_expander_dichotomy,
  E3_square_lattice,
  E4_triangular,
  E5_theorem1_girth_series,
  E6_gm_slab_trend,
  E7_lemma_escape,
  E8_drift_check,
};

std::string_view experiment_name(Experiment e) noexcept;
/// Throws std::invalid_argument for an unknown name.
Experiment parse_experiment(std::string_view name);
const std::vector<Experiment>& all_experiments();

/// Config file layout:
///   {"experiment": "E3_square_lattice", "seed": 7, "out": "runs/e3",
///    "params": {"trials": 40}}
/// `params` overrides the per-experiment defaults; unknown keys are errors.
struct ExperimentConfig {
  Experiment experiment = Experiment::E1_tree_pc;
  std::uint64_t seed = 1;
  std::string out;
  nlohmann::json params = nlohmann::json::object();
};

/// Defaults for every parameter of an experiment.
nlohmann::json default_params(Experiment e);

/// Defaults overlaid with cfg.params.
nlohmann::json effective_params(const ExperimentConfig& cfg);

/// Parses a config document. Throws ConfigError on malformed JSON (with
/// line and column) or a missing/ill-typed top-level field.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Every violated constraint, each naming the module precondition it breaks.
std::vector<std::string> validate_config(const ExperimentConfig& cfg);

/// FNV-1a 64 of the canonical dump of {experiment, seed, params}, as 16 hex
/// digits. The output directory is not part of the hash.
std::string config_hash(const ExperimentConfig& cfg);

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct Artifact {
  std::string name;
  std::string content;
};

struct ExperimentResult {
  std::vector<Artifact> artifacts;  // excludes manifest.json
  std::vector<Check> checks;
  nlohmann::json seeds = nlohmann::json::array();
  double wall_seconds = 0.0;
  std::string hash;

  bool all_pass() const noexcept;
};

/// Runs the experiment in memory. Throws std::invalid_argument when
/// validate_config reports violations.
ExperimentResult execute(const ExperimentConfig& cfg);

/// execute() plus writing every artifact, checks.json and manifest.json
/// into cfg.out (created if needed).
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Random connected vertex set of `size` vertices grown from `start` by
/// adding uniformly chosen frontier vertices with dist <= max_dist.
/// Returns fewer vertices when the region is exhausted.
VertexSet random_connected_set(const RootedBall& ball, Vertex start, int size, int max_dist,
                               std::uint64_t seed);

nlohmann::json pc_json(const PcEstimate& e);
nlohmann::json spectral_json(const SpectralEstimate& e);
/// {tau, survived, boundary_hit, end, steps, seed, params}
nlohmann::json trace_json(const ExplorationTrace& t);

}  // namespace perco
