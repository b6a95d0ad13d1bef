#include "opg/types.hpp"

#include <algorithm>
#include <cmath>

#include "opg/numeric.hpp"

namespace opg {

RewardModel::RewardModel(std::vector<double> rewards) : rewards_(std::move(rewards)) {
  if (rewards_.empty()) {
    throw InvalidInputError("RewardModel: empty reward table");
  }
  for (double r : rewards_) {
    if (!std::isfinite(r)) {
      throw InvalidInputError("RewardModel: non-finite reward entry");
    }
  }
}

double RewardModel::min() const noexcept {
  return *std::min_element(rewards_.begin(), rewards_.end());
}

double RewardModel::max() const noexcept {
  return *std::max_element(rewards_.begin(), rewards_.end());
}

SimplexPolicy::SimplexPolicy(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) {
    throw InvalidInputError("SimplexPolicy: empty probability vector");
  }
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw InvalidInputError("SimplexPolicy: entries must be finite and >= 0");
    }
  }
  const double total = compensated_sum(probs_);
  if (std::abs(total - 1.0) > kSimplexSumTol) {
    throw InvalidInputError("SimplexPolicy: entries sum to " + std::to_string(total) +
                            ", expected 1 within 1e-12");
  }
}

SimplexPolicy SimplexPolicy::uniform(std::size_t n) {
  if (n == 0) throw InvalidInputError("SimplexPolicy::uniform: n must be positive");
  return SimplexPolicy(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

SimplexPolicy SimplexPolicy::normalized(std::vector<double> weights) {
  if (weights.empty()) {
    throw InvalidInputError("SimplexPolicy::normalized: empty weight vector");
  }
  for (double& w : weights) {
    if (!std::isfinite(w)) {
      throw InvalidInputError("SimplexPolicy::normalized: non-finite weight");
    }
    if (w < 0.0) w = 0.0;
  }
  const double total = compensated_sum(weights);
  if (!(total > 0.0)) {
    throw InvalidInputError("SimplexPolicy::normalized: total mass is not positive");
  }
  for (double& w : weights) w /= total;
  return SimplexPolicy(std::move(weights));
}

bool SimplexPolicy::full_support() const noexcept {
  for (double p : probs_) {
    if (!(p > 0.0)) return false;
  }
  return true;
}

LogitPolicy::LogitPolicy(std::vector<double> logits) : logits_(std::move(logits)) {
  if (logits_.empty()) {
    throw InvalidInputError("LogitPolicy: empty logit vector");
  }
  for (double l : logits_) {
    if (!std::isfinite(l)) {
      throw InvalidInputError("LogitPolicy: non-finite logit");
    }
  }
}

LogitPolicy LogitPolicy::zeros(std::size_t n) {
  if (n == 0) throw InvalidInputError("LogitPolicy::zeros: n must be positive");
  return LogitPolicy(std::vector<double>(n, 0.0));
}

LogitPolicy LogitPolicy::from_policy(const SimplexPolicy& p) {
  if (!p.full_support()) {
    throw PreconditionError("LogitPolicy::from_policy: policy must have full support");
  }
  std::vector<double> logits(p.size());
  for (std::size_t y = 0; y < p.size(); ++y) logits[y] = std::log(p[y]);
  return LogitPolicy(std::move(logits));
}

AdvantageProfile::AdvantageProfile(std::vector<double> a_in, double b_in)
    : a(std::move(a_in)), b(b_in) {
  if (a.empty()) throw InvalidInputError("AdvantageProfile: empty coefficient vector");
  if (!std::isfinite(b)) throw InvalidInputError("AdvantageProfile: non-finite b");
  const double total = compensated_sum(a);
  if (std::abs(total - b) > 1e-12) {
    throw InvalidInputError("AdvantageProfile: b does not match sum of a within 1e-12");
  }
}

std::string to_string(RegimeTag tag) {
  switch (tag) {
    case RegimeTag::BelowCritical: return "BelowCritical";
    case RegimeTag::AtCritical: return "AtCritical";
    case RegimeTag::AboveCritical: return "AboveCritical";
  }
  return "Unknown";
}

}  // namespace opg
