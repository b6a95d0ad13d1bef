#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "opg/harness.hpp"

namespace opg {

enum class ExperimentKind { Gen, Run, Limit, Improve, Sweep, Basin, Contextual };

enum class RunMode { Expected, DelayedExpected, DelayedStochastic };

// Parsed and validated experiment description. Flags override file values;
// the canonical JSON echo of the resolved config is hashed into every
// summary.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Run;

  BanditSpec instance;
  std::optional<std::string> instance_file;

  // dynamics
  std::optional<double> eta;
  long steps = 100000;
  double grad_tol = 1e-10;
  long record_every = 1000;

  // run
  RunMode run_mode = RunMode::Expected;
  long run_update_interval = 1;

  // improve
  long improve_iters = 40;
  long improve_steps_per_iter = 500;

  // contextual
  int ctx_group_size = 8;
  double ctx_delta_v = 0.0;
  long ctx_update_interval = 250;
  long ctx_total_steps = 100000;
  int ctx_n_contexts = 20;
  double ctx_eta = 0.3;
  long ctx_record_every = 250;

  // sweep
  std::optional<std::vector<double>> v_values;
  std::optional<std::vector<double>> delta_v_values;

  // basin
  int basin_resolution = 60;
  std::optional<double> basin_v;

  // single-baseline kinds (run, limit); delta is relative to V^mu
  std::optional<double> v_single;
  std::optional<double> delta_v_single;

  std::uint64_t seed = 0;
  bool seed_given = false;
  double eps = kDefaultSupportEps;
  std::string out = "out/";
  int threads = 1;

  static ExperimentKind parse_kind(const std::string& s);
  static ExperimentConfig from_json_text(const std::string& text);

  // Canonical echo (sorted keys, resolved values).
  std::string canonical_json() const;
  std::uint64_t config_hash() const;

  void validate() const;
};

// Runs the experiment and writes every output file under the `out` prefix.
// Returns the list of files written, in deterministic order.
std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& cfg);

}  // namespace opg
