#pragma once

#include <vector>

#include "opg/core.hpp"
#include "opg/rng.hpp"
#include "opg/types.hpp"

namespace opg {

struct DynamicsConfig {
  double eta = 1.0;            // step size
  long steps = 1000;           // step budget
  double grad_tol = 1e-10;     // stop when gradient max-norm drops below this
  long record_every = 1;       // logging stride
  double support_eps = kDefaultSupportEps;

  void validate() const;
};

struct DelayedConfig {
  long update_interval = 1;    // N: steps between behavior refreshes
  long total_steps = 1000;
  bool expected_updates = false;  // true: exact gradient; false: sampled

  void validate() const;
};

// Baseline for delayed runs: a fixed scalar V, or an offset added to the
// behavior policy's expected reward at every refresh.
struct BaselineSpec {
  enum class Kind { Absolute, OffsetFromBehavior };

  Kind kind = Kind::Absolute;
  double value = 0.0;

  static BaselineSpec absolute(double v) { return {Kind::Absolute, v}; }
  static BaselineSpec offset(double dv) { return {Kind::OffsetFromBehavior, dv}; }

  double resolve(double v_mu) const {
    return kind == Kind::Absolute ? value : v_mu + value;
  }
};

struct TrajectoryPoint {
  long step = 0;
  double expected_reward = 0.0;
  double entropy = 0.0;
  long support_size = 0;
  double phi = 0.0;
  double tau_t = 0.0;
  double grad_maxnorm = 0.0;
};

// Per-step time series of one run; step indices are strictly increasing.
struct TrajectoryLog {
  std::vector<TrajectoryPoint> points;
};

struct RunResult {
  LogitPolicy logits;
  TrajectoryLog log;
};

// g_y = a_y - b pi(y); the exact gradient of
//   F(l) = sum_y a_y l(y) - b ln sum_z exp(l(z)).
std::vector<double> expected_gradient(const LogitPolicy& l, const AdvantageProfile& adv);

// l + eta g. The logit total is conserved because sum_y g_y = 0.
LogitPolicy ascent_step(const LogitPolicy& l, const AdvantageProfile& adv, double eta);

// Fixed-step ascent against a fixed behavior policy and baseline. Stops on
// the gradient criterion or the step budget; aborts with DivergenceError if
// any logit magnitude passes kLogitGuard.
RunResult run_expected(const LogitPolicy& l0, const SimplexPolicy& mu, const RewardModel& r,
                       double V, const DynamicsConfig& cfg);

// One explicit Euler step of the probability-space flow
//   d pi(y) = pi(y) (a_y - b pi(y) - tau_t),
// with negatives clipped to zero and the result renormalized. Exists for
// cross-validation of the logit integrator.
SimplexPolicy simplex_flow_step(const SimplexPolicy& p, const AdvantageProfile& adv, double dt);

// Phi = sum_y a_y pi(y) - (b/2) sum_y pi(y)^2; nondecreasing along the
// expected dynamics when b > 0 and eta < 1/b.
double lyapunov_phi(const SimplexPolicy& p, const AdvantageProfile& adv);

// tau_t = sum_z a_z pi(z) - b sum_z pi(z)^2
double threshold_tau_t(const SimplexPolicy& p, const AdvantageProfile& adv);

// Single-sample update for a given arm:
//   l + eta (r(y) - V) (e_y - softmax(l)).
LogitPolicy sample_update(const LogitPolicy& l, std::size_t arm, const RewardModel& r,
                          double V, double eta);

// Draws y ~ mu and applies sample_update; the mu-average of the increment
// equals eta times the expected gradient.
LogitPolicy stochastic_step(const LogitPolicy& l, const SimplexPolicy& mu, const RewardModel& r,
                            double V, double eta, Rng& rng);

// Delayed-update scheme: the behavior policy starts at softmax(l0) and is
// reset to the current policy every update_interval steps. The baseline is
// re-resolved at each refresh.
RunResult run_delayed(const LogitPolicy& l0, const RewardModel& r, const BaselineSpec& baseline,
                      const DynamicsConfig& cfg, const DelayedConfig& dcfg, Rng& rng);

// Runs the expected ascent from pi0 until the replicator field
// pi(y)(g_y - tau_t) is stationary. Used where no gradient criterion exists
// (b < 0 limits, uniform-on-subset limits).
SimplexPolicy settle_to_limit(const SimplexPolicy& pi0, const AdvantageProfile& adv,
                              double eta = 1.0, long max_steps = 500000,
                              double field_tol = 1e-13);

// 0.9/b below critical (inside the proven eta < 1/b bound), 1.0 otherwise.
double default_step_size(const AdvantageProfile& adv);

}  // namespace opg
