#pragma once

#include <string>
#include <vector>

#include "opg/limit.hpp"
#include "opg/types.hpp"

namespace opg {

// One entry of the improvement iteration. Entry 0 is the initial behavior
// policy (tau is NaN there); entry n >= 1 holds T_V^n mu together with the
// threshold used by that application.
struct ImprovementIterate {
  long n = 0;
  std::vector<double> mu;   // full-length; zeros on arms that left the support
  double v_mu = 0.0;
  double tau = 0.0;
  long support_size = 0;
  double off_mass = 0.0;    // mass outside Y_inf
};

struct ImprovementTrace {
  std::vector<double> rewards;
  double v_baseline = 0.0;
  double v_inf = 0.0;
  std::vector<std::size_t> y_inf;
  std::vector<ImprovementIterate> iterates;
};

// Fitted and conjectured decay rates of the off-Y_inf mass. c_theory is a
// reading of the ratio recursion, max over surviving non-optimal arms of
// (r(y) - V) / (V_inf - V); it is validated empirically, not proved.
struct ConcentrationEstimate {
  double c_hat = 0.0;
  double c_theory = 0.0;
  bool fitted = false;
  std::string note;
  double envelope_constant = 0.0;  // sup_n off_n / max(c_hat, c_theory)^n
};

struct LimitReward {
  double v_inf = 0.0;
  std::vector<std::size_t> y_inf;
};

struct ValueIdentity {
  double defect = 0.0;        // |V^pi - (V + (V^mu - V) sum pi^2/mu + tau sum pi/mu)|
  double v_pi = 0.0;
  double rhs = 0.0;
  double cs_lower_bound = 0.0;  // V^mu + tau sum pi/mu
  bool cs_bound_holds = false;
};

// Bisection bracket for the optimality threshold V_0; behavior exactly at the
// boundary point is not claimed.
struct ThresholdResult {
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

// The improvement operator: the closed-form limit policy for V < V^mu.
// Raises RegimeError when V >= V^mu.
LimitResult apply_T(const SimplexPolicy& mu, const RewardModel& r, double V,
                    double tol = kCriticalTol);

// Applies the operator n_iters times. Arms that leave the support are dropped
// from the active arm set between iterations; they do not reappear. The
// threshold is exactly zero from the second application on.
ImprovementTrace iterate_T(const SimplexPolicy& mu0, const RewardModel& r, double V,
                           long n_iters, double tol = kCriticalTol);

// Limit reward of the iteration, computed from one closed-form application:
// V_inf = max reward over supp(T_V mu0), Y_inf its achieving set.
LimitReward limit_reward(const SimplexPolicy& mu0, const RewardModel& r, double V,
                         double tol = kCriticalTol);

// Checks the closed-form value identity for pi = T_V mu and the
// Cauchy-Schwarz improvement bound.
ValueIdentity value_identity_check(const SimplexPolicy& mu, const RewardModel& r, double V,
                                   double tol = kCriticalTol);

// Bisects V over [min r - 1, V^mu) on the monotone predicate "some optimal
// arm survives one application". Predicate monotonicity is probed at 10
// points before bisecting.
ThresholdResult optimality_threshold(const SimplexPolicy& mu0, const RewardModel& r, double tol);

// Geometric-mean decay rate of the off-Y_inf mass, with the conjectured rate
// for comparison. Returns an informative no-fit when fewer than 5 iterates
// carry positive off-mass.
ConcentrationEstimate concentration_fit(const ImprovementTrace& trace);

}  // namespace opg
