#include "opg/limit.hpp"

#include <algorithm>
#include <cmath>

#include "opg/dynamics.hpp"
#include "opg/numeric.hpp"

namespace opg {

namespace {

// Arms tied with the maximum within a small relative band count as argmax.
std::vector<std::size_t> argmax_set(const std::vector<double>& xs) {
  const double m = *std::max_element(xs.begin(), xs.end());
  const double band = 1e-12 * std::max(1.0, std::abs(m));
  std::vector<std::size_t> out;
  for (std::size_t y = 0; y < xs.size(); ++y) {
    if (xs[y] >= m - band) out.push_back(y);
  }
  return out;
}

double plus_sum(const std::vector<double>& a, double tau) {
  std::vector<double> terms;
  terms.reserve(a.size());
  for (double v : a) {
    if (v > tau) terms.push_back(v - tau);
  }
  return compensated_sum(terms);
}

}  // namespace

double solve_tau(const AdvantageProfile& adv) {
  if (!(adv.b > 0.0)) {
    throw RegimeError("solve_tau: requires b > 0 (baseline below critical)");
  }
  const double a_min = *std::min_element(adv.a.begin(), adv.a.end());
  if (a_min >= 0.0) return 0.0;

  std::vector<double> sorted = adv.a;
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double prefix = 0.0;
  double tau = 0.0;
  bool found = false;
  for (std::size_t k = 1; k <= sorted.size(); ++k) {
    prefix += sorted[k - 1];
    const double candidate = (prefix - adv.b) / static_cast<double>(k);
    if (sorted[k - 1] > candidate) {
      tau = candidate;
      found = true;
    }
  }
  if (!found) {
    // k = 1 always qualifies when b > 0; reaching here means corrupt input.
    throw InternalError("solve_tau: no feasible prefix found");
  }
  return tau;
}

double solve_tau_bisect(const AdvantageProfile& adv) {
  if (!(adv.b > 0.0)) {
    throw RegimeError("solve_tau_bisect: requires b > 0 (baseline below critical)");
  }
  const double a_min = *std::min_element(adv.a.begin(), adv.a.end());
  if (a_min >= 0.0) return 0.0;

  double lo = 0.0;
  double hi = *std::max_element(adv.a.begin(), adv.a.end());
  for (int iter = 0; iter < 200 && lo < hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double g = plus_sum(adv.a, mid);
    if (g > adv.b) {
      lo = mid;
    } else if (g < adv.b) {
      hi = mid;
    } else {
      return mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<std::size_t> limit_support(const SimplexPolicy& mu, const RewardModel& r, double V,
                                       double tol) {
  const Regime regime = classify_regime(mu, r, V, tol);
  const AdvantageProfile adv = advantage_profile(mu, r, V);
  switch (regime.tag) {
    case RegimeTag::BelowCritical: {
      const double tau = solve_tau(adv);
      std::vector<std::size_t> out;
      for (std::size_t y = 0; y < adv.size(); ++y) {
        if (adv.a[y] > tau) out.push_back(y);
      }
      return out;
    }
    case RegimeTag::AtCritical:
      return argmax_set(adv.a);
    case RegimeTag::AboveCritical:
      throw RegimeError("limit_support: no closed-form support above critical");
  }
  throw InternalError("limit_support: unreachable");
}

LimitResult limit_policy(const SimplexPolicy& mu, const RewardModel& r, double V,
                         const std::optional<SimplexPolicy>& pi0, double tol) {
  if (!mu.full_support()) {
    throw PreconditionError("limit_policy: behavior policy must have full support");
  }
  const Regime regime = classify_regime(mu, r, V, tol);
  const AdvantageProfile adv = advantage_profile(mu, r, V);
  LimitResult result;
  result.regime = regime;

  switch (regime.tag) {
    case RegimeTag::BelowCritical: {
      const double tau = solve_tau(adv);
      std::vector<double> w(adv.size(), 0.0);
      for (std::size_t y = 0; y < adv.size(); ++y) {
        if (adv.a[y] > tau) {
          w[y] = (adv.a[y] - tau) / adv.b;
          result.support.push_back(y);
        }
      }
      result.policy = SimplexPolicy::normalized(std::move(w));
      result.tau_star = tau;
      result.tau_defined = true;
      break;
    }
    case RegimeTag::AtCritical: {
      if (!pi0.has_value()) {
        throw PreconditionError("limit_policy: pi0 required at the critical baseline");
      }
      if (pi0->size() != mu.size()) {
        throw InvalidInputError("limit_policy: pi0 length mismatch");
      }
      if (!pi0->full_support()) {
        throw PreconditionError("limit_policy: pi0 must have full support");
      }
      result.support = argmax_set(adv.a);
      std::vector<double> w(adv.size(), 0.0);
      for (std::size_t y : result.support) w[y] = (*pi0)[y];
      result.policy = SimplexPolicy::normalized(std::move(w));
      result.depends_on_pi0 = true;
      break;
    }
    case RegimeTag::AboveCritical: {
      result.support = candidate_support_above(adv);
      result.depends_on_pi0 = true;
      if (pi0.has_value()) {
        if (pi0->size() != mu.size()) {
          throw InvalidInputError("limit_policy: pi0 length mismatch");
        }
        result.policy = settle_to_limit(*pi0, adv);
      }
      break;
    }
  }
  return result;
}

std::vector<std::size_t> candidate_support_above(const AdvantageProfile& adv) {
  if (!(adv.b < 0.0)) {
    throw RegimeError("candidate_support_above: requires b < 0 (baseline above critical)");
  }
  const double a_max = *std::max_element(adv.a.begin(), adv.a.end());
  std::vector<std::size_t> out;
  for (std::size_t y = 0; y < adv.size(); ++y) {
    if (adv.a[y] - a_max - adv.b > 0.0) out.push_back(y);
  }
  return out;
}

bool support_monotonicity_check(const SimplexPolicy& mu, const RewardModel& r, double V1,
                                double V2, double tol) {
  if (!(V2 <= V1)) {
    throw PreconditionError("support_monotonicity_check: requires V2 <= V1");
  }
  const double v_mu = expected_reward(mu, r);
  if (V1 > v_mu + tol) {
    throw PreconditionError("support_monotonicity_check: requires V1 <= V^mu");
  }
  const std::vector<std::size_t> s1 = limit_support(mu, r, V1, tol);
  const std::vector<std::size_t> s2 = limit_support(mu, r, V2, tol);
  return std::includes(s2.begin(), s2.end(), s1.begin(), s1.end());
}

}  // namespace opg
