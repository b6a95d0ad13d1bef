#pragma once

#include <vector>

#include "opg/dynamics.hpp"
#include "opg/rng.hpp"
#include "opg/types.hpp"

namespace opg {

// One tabular problem: a reward table and the initial policy parameters.
// Contexts share nothing; each keeps its own behavior policy and logits.
struct BanditContext {
  RewardModel rewards;
  LogitPolicy init_logits;
};

struct ContextSet {
  std::vector<BanditContext> contexts;
  SimplexPolicy weights;  // sampling distribution over contexts

  void validate() const;
};

struct ContextualConfig {
  int group_size = 8;          // samples per context visit (G)
  double delta_v = 0.0;        // offset added to the empirical baseline
  double eta = 0.1;
  long total_steps = 1000;
  long update_interval = 250;  // behavior refresh period (N)
  long record_every = 100;
  double support_eps = kDefaultSupportEps;

  void validate() const;
};

struct ArmSample {
  std::size_t arm;
  double reward;
};

// Arithmetic mean of the sampled rewards.
double empirical_baseline(const std::vector<ArmSample>& samples);

// Mutable state of a contextual run.
struct ContextualState {
  std::vector<std::vector<double>> logits;     // current policy per context
  std::vector<SimplexPolicy> behaviors;        // mu(.|x), refreshed every N steps
  std::vector<double> behavior_value;          // V^{mu(.|x)} at last refresh
  std::vector<AdvantageProfile> adv;           // diagnostics profile per context
  long steps_taken = 0;

  static ContextualState init(const ContextSet& ctxs, double delta_v);
  void refresh(const ContextSet& ctxs, double delta_v);
};

struct ContextualStepInfo {
  std::size_t context;
  double vhat;
  double v_mu;  // exact behavior value of the visited context
};

// Samples a context by weight, draws G arms from its behavior policy, and
// applies the averaged update with advantage r(y_i) - (vhat + delta_v).
ContextualStepInfo contextual_step(ContextualState& state, const ContextSet& ctxs,
                                   const ContextualConfig& cfg, Rng& rng);

struct AggregatePoint {
  long step;
  double mean_reward;   // weight-weighted mean of per-context expected rewards
  double mean_entropy;
};

struct ContextualRunResult {
  std::vector<TrajectoryLog> per_context;
  std::vector<AggregatePoint> aggregate;
  // Empirical distribution of vhat - V^{mu(.|x)} across visits.
  double vhat_residual_mean = 0.0;
  double vhat_residual_std = 0.0;
  long vhat_residual_count = 0;
};

ContextualRunResult run_contextual(const ContextSet& ctxs, const ContextualConfig& cfg,
                                   Rng& rng);

}  // namespace opg
