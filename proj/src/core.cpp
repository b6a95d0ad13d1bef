#include "opg/core.hpp"

#include <algorithm>
#include <cmath>

#include "opg/numeric.hpp"

namespace opg {

SimplexPolicy softmax(const LogitPolicy& l) {
  const std::vector<double>& x = l.values();
  const double shift = *std::max_element(x.begin(), x.end());
  std::vector<double> e(x.size());
  for (std::size_t y = 0; y < x.size(); ++y) e[y] = std::exp(x[y] - shift);
  const double total = compensated_sum(e);
  for (double& v : e) v /= total;
  return SimplexPolicy(std::move(e));
}

double expected_reward(const SimplexPolicy& p, const RewardModel& r) {
  if (p.size() != r.size()) {
    throw InvalidInputError("expected_reward: policy and reward lengths differ");
  }
  return compensated_dot(p.values(), r.values());
}

double entropy(const SimplexPolicy& p) {
  std::vector<double> terms(p.size(), 0.0);
  for (std::size_t y = 0; y < p.size(); ++y) {
    if (p[y] > 0.0) terms[y] = -p[y] * std::log(p[y]);
  }
  return compensated_sum(terms);
}

std::vector<std::size_t> support(const SimplexPolicy& p, double eps) {
  if (!(eps > 0.0)) throw InvalidInputError("support: eps must be positive");
  std::vector<std::size_t> out;
  for (std::size_t y = 0; y < p.size(); ++y) {
    if (p[y] > eps) out.push_back(y);
  }
  return out;
}

AdvantageProfile advantage_profile(const SimplexPolicy& mu, const RewardModel& r, double V) {
  if (mu.size() != r.size()) {
    throw InvalidInputError("advantage_profile: policy and reward lengths differ");
  }
  if (!std::isfinite(V)) throw InvalidInputError("advantage_profile: non-finite baseline");
  if (!mu.full_support()) {
    throw PreconditionError("advantage_profile: behavior policy must have full support");
  }
  std::vector<double> a(mu.size());
  for (std::size_t y = 0; y < mu.size(); ++y) a[y] = mu[y] * (r[y] - V);
  // b = V^mu - V algebraically; summing a keeps sum(a) - b = 0 exact, so a
  // flat reward table yields an exactly zero profile.
  const double b = compensated_sum(a);
  return AdvantageProfile(std::move(a), b);
}

Regime classify_regime(const SimplexPolicy& mu, const RewardModel& r, double V, double tol) {
  if (!(tol >= 0.0)) throw InvalidInputError("classify_regime: tol must be >= 0");
  const double v_mu = expected_reward(mu, r);
  RegimeTag tag;
  if (V < v_mu - tol) {
    tag = RegimeTag::BelowCritical;
  } else if (V > v_mu + tol) {
    tag = RegimeTag::AboveCritical;
  } else {
    tag = RegimeTag::AtCritical;
  }
  return Regime{tag, v_mu};
}

}  // namespace opg
