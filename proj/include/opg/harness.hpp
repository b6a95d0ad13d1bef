#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "opg/contextual.hpp"
#include "opg/dynamics.hpp"
#include "opg/improve.hpp"
#include "opg/limit.hpp"

namespace opg {

// Instance generator description. Rewards default to uniform [0,1] draws;
// logits default to zeros unless a linear slope or explicit list is given.
struct BanditSpec {
  int n_arms = 0;
  std::optional<std::vector<double>> rewards;
  std::optional<std::vector<double>> logits;
  std::optional<double> logit_slope;

  void validate() const;
};

struct Instance {
  RewardModel rewards;
  SimplexPolicy mu;
  LogitPolicy l0;  // equals the behavior logits, so pi_0 = mu
};

Instance generate_instance(const BanditSpec& spec, std::uint64_t seed);

// Dynamics settings shared by the experiment drivers. When eta is absent the
// per-baseline default rule applies (0.9/b below critical, 1.0 otherwise).
struct RunOptions {
  std::optional<double> eta;
  long steps = 100000;
  double grad_tol = 1e-10;
  long record_every = 1000;
  double support_eps = kDefaultSupportEps;
  int threads = 1;
};

struct SweepRow {
  double v = 0.0;
  double final_reward = 0.0;
  double final_entropy = 0.0;
  long final_support_size = 0;
  double tau_star = 0.0;  // 0 sentinel outside BelowCritical
  RegimeTag regime = RegimeTag::BelowCritical;
  // L1 distance between the run's final policy and the closed-form limit;
  // NaN above critical where no closed form exists.
  double limit_l1 = 0.0;
};

struct SweepResult {
  std::vector<double> v_values;
  std::vector<TrajectoryLog> logs;
  std::vector<SweepRow> rows;
  std::vector<SimplexPolicy> finals;
};

// Runs the expected dynamics once per baseline; baselines are processed by a
// worker pool and assembled in configuration order.
SweepResult sweep_baseline(const Instance& instance, const std::vector<double>& v_values,
                           const RunOptions& opts);

// 12 baselines spanning [min r - 0.5, V^mu + 0.3].
std::vector<double> default_v_grid(const Instance& instance);

struct ImprovementRun {
  double v = 0.0;
  // index n: expected reward of the behavior policy after n refreshes
  std::vector<double> reward_per_iteration;
  std::vector<double> entropy_per_iteration;
  std::vector<long> support_per_iteration;
};

// Finite-step improvement scheme: each iteration runs the expected dynamics
// for steps_per_iter against a frozen behavior policy, then refreshes the
// behavior policy to the current policy.
std::vector<ImprovementRun> improvement_experiment(const Instance& instance,
                                                   const std::vector<double>& v_values,
                                                   long iters, long steps_per_iter,
                                                   const RunOptions& opts);

struct BasinCell {
  double x = 0.0;  // pi0 = (x, y, 1 - x - y)
  double y = 0.0;
  int limit_arm = 0;
};

struct BasinResult {
  double v = 0.0;
  int resolution = 0;
  std::vector<BasinCell> cells;
  std::vector<SimplexPolicy> finals;           // same order as cells
  std::vector<std::size_t> candidate_support;  // closed-form candidate set
};

// Classifies the limit of every interior barycentric grid point of a 3-arm
// instance with V above critical.
BasinResult basin_map(const Instance& instance, double V, int resolution,
                      const RunOptions& opts);

// Independent +-1 reward tables with at least one success and one failure
// arm per context; uniform context weights and zero initial logits.
ContextSet gen_binary_contexts(int n_contexts, int n_arms, std::uint64_t seed);

}  // namespace opg
