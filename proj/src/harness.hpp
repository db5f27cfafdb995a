#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "radii.hpp"

namespace imlab {

// Experiment configuration. Every field has a default, so the minimal valid
// config is "{}"; parsing is strict (unknown keys are errors) and the
// resolved form round-trips losslessly through config_to_json.

struct ForcingConfig {
  std::uint64_t seed = 71;
  double smoothness = 2.0;  // spectral decay of the random draw
  double amplitude = 0.05;  // target H norm after scaling (0 = no forcing)
  std::string file;         // snapshot path; when set it overrides the draw
};

struct ModelConfig {
  std::string kind = "ns2d";  // ns2d | hns3d | prepared2d | prepared3d
  int d = 2;
  double theta = 1.0;  // 1 in 2D, 5/4 in 3D
  int M = 16;          // modes per axis, |j_i| <= M
  double dealias = 2.0 / 3.0;
  double nu = 1.0;
  ForcingConfig forcing;
};

struct ProjectorConfig {
  std::string mode = "gap";  // gap | fixed | annulus
  std::optional<double> L;   // empty = empirical Lipschitz estimate
  long long lambda_max = 100000;
  // fixed mode
  double lambda_N = 0.0;
  double lambda_N1 = 0.0;
  double k = 0.0;
  long long N = 0;
  // annulus mode (3D band construction)
  double b = 3.0;
  long long lambda_start = 12;
  long long budget = 2000000;
  double chat = 0.25;
  double hbar = 0.25;  // smallness-threshold parameter in the band report
};

struct CutoffConfig {
  std::string mode = "fixed";  // fixed | empirical (radius-chain estimate)
  double rho = 1.0;
  double r2 = 3.0;
};

struct RunConfig {
  double tend = 1.0;
  double dt = 0.01;
  int record_every = 10;
  bool snapshots = true;
  int samples = 8;         // batch size for cone / band / tracking stages
  double horizon = 0.5;    // cone and tracking horizon
  double amplitude = 0.1;  // initial-state scale
  std::uint64_t seed = 1;  // initial-state seed base
};

struct ChartConfig {
  int n1 = 5;
  int n2 = 5;
  double h1 = 0.04;
  double h2 = 0.04;
  double amplitude = 0.25;   // slice-origin scale
  std::uint64_t seed = 901;  // slice-origin seed
};

struct ToleranceConfig {
  double stationary = 1e-11;
  double bvp = 1e-9;
  double phi = 1e-6;
  double phi_T0 = 0.5;
  double phi_T_max = 64.0;
};

struct ExperimentConfig {
  ModelConfig model;
  ProjectorConfig projector;
  CutoffConfig cutoff;
  RunConfig run;
  ChartConfig chart;
  ToleranceConfig tolerances;
  RadiiConstants radii_constants;
  RadiiOverrides radii_overrides;
  std::vector<std::string> scenarios;
  std::string output_dir = "out";
};

// parse + validate raw JSON text; on failure `config` is empty and every
// error message names the offending key
struct ConfigParse {
  std::optional<ExperimentConfig> config;
  std::vector<std::string> errors;
};
ConfigParse validate_config(const std::string& raw_json);

// canonical resolved serialization (defaults applied, keys sorted); feeding
// it back through validate_config reproduces the same config
std::string config_to_json(const ExperimentConfig& cfg);

// FNV-1a 64-bit hash of the canonical serialization, as 16 hex digits
std::string config_hash(const ExperimentConfig& cfg);

const std::map<std::string, int>& module_versions();
extern const char* const kVersion;

// the scenario names run_scenario understands, in documentation order
const std::vector<std::string>& scenario_names();

struct ScenarioOutcome {
  int exit_code = 0;  // 0 ok, 2 validation failure, 3 numerical failure
  std::vector<std::string> artifacts;  // paths relative to output_dir
  std::string error;                   // set when exit_code != 0
};

// Executes the config's scenario list in order (or the single `only`
// scenario when given), writing newline-delimited JSON records, CSV
// summaries and binary snapshots under output_dir. Every record carries the
// config hash and module versions; a manifest embedding the resolved config
// is written whenever anything ran. Deterministic given the config seeds,
// except for the manifest timestamp.
ScenarioOutcome run_scenario(const ExperimentConfig& cfg, const std::string& only = "");

}  // namespace imlab
