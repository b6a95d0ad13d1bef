#pragma once

#include <vector>

#include "opg/types.hpp"

namespace opg {

// pi(y) = exp(l(y)) / sum_z exp(l(z)), evaluated with a max shift so large
// logits cannot overflow. The stored logits are not modified.
SimplexPolicy softmax(const LogitPolicy& l);

// sum_y p(y) r(y)
double expected_reward(const SimplexPolicy& p, const RewardModel& r);

// -sum_y p(y) ln p(y), nats, with 0 ln 0 := 0.
double entropy(const SimplexPolicy& p);

// { y : p(y) > eps }, ascending. Softmax policies never reach exact zero, so
// numerical support needs a threshold; eps = kDefaultSupportEps by default.
std::vector<std::size_t> support(const SimplexPolicy& p, double eps = kDefaultSupportEps);

// a_y = mu(y) (r(y) - V), b = V^mu - V. Requires mu with full support.
AdvantageProfile advantage_profile(const SimplexPolicy& mu, const RewardModel& r, double V);

// Compares V against V^mu with tolerance tol. Near-zero b is treated as
// AtCritical because b enters step-size denominators.
Regime classify_regime(const SimplexPolicy& mu, const RewardModel& r, double V,
                       double tol = kCriticalTol);

}  // namespace opg
