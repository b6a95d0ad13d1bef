#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "opg/errors.hpp"

namespace opg {

inline constexpr double kSimplexSumTol = 1e-12;
inline constexpr double kCriticalTol = 1e-12;
inline constexpr double kDefaultSupportEps = 1e-9;
inline constexpr double kLogitGuard = 1e12;

// Per-arm reward table r(y). Entries must be finite; the table is immutable.
class RewardModel {
 public:
  explicit RewardModel(std::vector<double> rewards);

  std::size_t size() const noexcept { return rewards_.size(); }
  double operator[](std::size_t y) const noexcept { return rewards_[y]; }
  const std::vector<double>& values() const noexcept { return rewards_; }

  double min() const noexcept;
  double max() const noexcept;

 private:
  std::vector<double> rewards_;
};

// Probability distribution over a finite arm set. Entries are nonnegative and
// sum to one within kSimplexSumTol.
class SimplexPolicy {
 public:
  explicit SimplexPolicy(std::vector<double> probs);

  static SimplexPolicy uniform(std::size_t n);
  // Clips negatives to zero and divides by the compensated total.
  static SimplexPolicy normalized(std::vector<double> weights);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t y) const noexcept { return probs_[y]; }
  const std::vector<double>& values() const noexcept { return probs_; }

  bool full_support() const noexcept;

 private:
  std::vector<double> probs_;
};

// Unnormalized log-probabilities; the trained representation.
class LogitPolicy {
 public:
  explicit LogitPolicy(std::vector<double> logits);

  static LogitPolicy zeros(std::size_t n);
  // Elementwise log; requires full support.
  static LogitPolicy from_policy(const SimplexPolicy& p);

  std::size_t size() const noexcept { return logits_.size(); }
  double operator[](std::size_t y) const noexcept { return logits_[y]; }
  const std::vector<double>& values() const noexcept { return logits_; }

 private:
  std::vector<double> logits_;
};

// Sufficient statistics of the expected dynamics:
//   a_y = mu(y) (r(y) - V),   b = sum_y a_y = V^mu - V.
struct AdvantageProfile {
  AdvantageProfile(std::vector<double> a_in, double b_in);

  std::vector<double> a;
  double b;

  std::size_t size() const noexcept { return a.size(); }
};

enum class RegimeTag { BelowCritical, AtCritical, AboveCritical };

// Position of the baseline V relative to the critical value V^mu.
struct Regime {
  RegimeTag tag;
  double v_mu;
};

std::string to_string(RegimeTag tag);

}  // namespace opg
