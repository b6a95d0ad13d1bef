#pragma once

#include <optional>
#include <vector>

#include "opg/core.hpp"
#include "opg/types.hpp"

namespace opg {

// Closed-form limit of the expected dynamics.
//
// BelowCritical: policy(y) = (a_y - tau_star)^+ / b, support = {a_y > tau_star}.
// AtCritical:    support = argmax_y a_y, masses proportional to pi0 there.
// AboveCritical: support is the union of vertices reachable from some initial
//                condition; the realized limit depends on pi0 and is obtained
//                by running the dynamics when pi0 is supplied.
struct LimitResult {
  std::optional<SimplexPolicy> policy;
  double tau_star = 0.0;    // meaningful only when tau_defined
  bool tau_defined = false; // true only BelowCritical
  std::vector<std::size_t> support;
  Regime regime{RegimeTag::BelowCritical, 0.0};
  bool depends_on_pi0 = false;
};

// Water-filling threshold: the unique tau >= 0 with
//   sum_y (a_y - tau)^+ = b.
// If min a_y >= 0 the only solution is tau = 0. Otherwise sorts a descending
// and scans prefix sums; the candidate (prefix_k - b)/k is accepted while it
// stays below the k-th sorted value. Requires b > 0.
double solve_tau(const AdvantageProfile& adv);

// Independent oracle: bisection on the monotone map tau -> sum (a - tau)^+
// over [0, max a]. Ships alongside the sort-scan so the two can validate each
// other; the sort-scan is the primary solver.
double solve_tau_bisect(const AdvantageProfile& adv);

// Support of the limit policy where it is closed-form (Below/AtCritical).
std::vector<std::size_t> limit_support(const SimplexPolicy& mu, const RewardModel& r, double V,
                                       double tol = kCriticalTol);

// Full limit computation. pi0 is required for the AtCritical branch and,
// when supplied AboveCritical, selects the realized limit by running the
// dynamics from it.
LimitResult limit_policy(const SimplexPolicy& mu, const RewardModel& r, double V,
                         const std::optional<SimplexPolicy>& pi0 = std::nullopt,
                         double tol = kCriticalTol);

// { y : a_y - max_z a_z - b > 0 }: the arms that are the limit for some
// initial condition when b < 0.
std::vector<std::size_t> candidate_support_above(const AdvantageProfile& adv);

// Checks supp(limit at V1) is contained in supp(limit at V2) for
// V2 <= V1 <= V^mu.
bool support_monotonicity_check(const SimplexPolicy& mu, const RewardModel& r, double V1,
                                double V2, double tol = kCriticalTol);

}  // namespace opg
