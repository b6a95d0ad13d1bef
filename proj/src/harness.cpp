#include "opg/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <thread>

#include "opg/numeric.hpp"

namespace opg {

namespace {

// Deterministic fan-out: workers pull indices from a shared counter and write
// into preallocated slots; the first failure (by index) is rethrown.
void parallel_for_indexed(std::size_t count, int threads,
                          const std::function<void(std::size_t)>& body) {
  const int workers =
      std::max(1, std::min<int>(threads, static_cast<int>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < count; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
  }
}

double l1_distance(const SimplexPolicy& p, const SimplexPolicy& q) {
  double d = 0.0;
  for (std::size_t y = 0; y < p.size(); ++y) d += std::abs(p[y] - q[y]);
  return d;
}

}  // namespace

void BanditSpec::validate() const {
  if (n_arms < 1) throw ConfigError("BanditSpec: n_arms must be >= 1");
  if (rewards && static_cast<int>(rewards->size()) != n_arms) {
    throw ConfigError("BanditSpec: explicit rewards length differs from n_arms");
  }
  if (logits && static_cast<int>(logits->size()) != n_arms) {
    throw ConfigError("BanditSpec: explicit logits length differs from n_arms");
  }
  if (logits && logit_slope) {
    throw ConfigError("BanditSpec: give either explicit logits or a slope, not both");
  }
}

Instance generate_instance(const BanditSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng = Rng::stream(seed, 0);

  std::vector<double> rewards;
  if (spec.rewards) {
    rewards = *spec.rewards;
  } else {
    rewards.resize(static_cast<std::size_t>(spec.n_arms));
    for (double& r : rewards) r = rng.uniform(0.0, 1.0);
  }

  std::vector<double> logits(static_cast<std::size_t>(spec.n_arms), 0.0);
  if (spec.logits) {
    logits = *spec.logits;
  } else if (spec.logit_slope) {
    for (std::size_t y = 0; y < logits.size(); ++y) {
      logits[y] = *spec.logit_slope * static_cast<double>(y);
    }
  }

  LogitPolicy l0{std::move(logits)};
  SimplexPolicy mu = softmax(l0);
  return Instance{RewardModel{std::move(rewards)}, std::move(mu), std::move(l0)};
}

std::vector<double> default_v_grid(const Instance& instance) {
  const double v_mu = expected_reward(instance.mu, instance.rewards);
  const double lo = instance.rewards.min() - 0.5;
  const double hi = v_mu + 0.3;
  const int count = 12;
  std::vector<double> grid(count);
  for (int i = 0; i < count; ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return grid;
}

SweepResult sweep_baseline(const Instance& instance, const std::vector<double>& v_values,
                           const RunOptions& opts) {
  if (v_values.empty()) throw ConfigError("sweep_baseline: empty baseline list");

  SweepResult result;
  result.v_values = v_values;
  result.logs.resize(v_values.size());
  result.rows.resize(v_values.size());
  result.finals.reserve(v_values.size());
  std::vector<std::optional<SimplexPolicy>> finals(v_values.size());

  parallel_for_indexed(v_values.size(), opts.threads, [&](std::size_t i) {
    const double v = v_values[i];
    const AdvantageProfile adv = advantage_profile(instance.mu, instance.rewards, v);
    DynamicsConfig cfg;
    cfg.eta = opts.eta.value_or(default_step_size(adv));
    cfg.steps = opts.steps;
    cfg.grad_tol = opts.grad_tol;
    cfg.record_every = opts.record_every;
    cfg.support_eps = opts.support_eps;

    RunResult run = run_expected(instance.l0, instance.mu, instance.rewards, v, cfg);
    const SimplexPolicy final_pi = softmax(run.logits);
    const Regime regime = classify_regime(instance.mu, instance.rewards, v);

    SweepRow row;
    row.v = v;
    row.final_reward = expected_reward(final_pi, instance.rewards);
    row.final_entropy = entropy(final_pi);
    row.final_support_size = static_cast<long>(support(final_pi, opts.support_eps).size());
    row.regime = regime.tag;
    row.tau_star = 0.0;
    row.limit_l1 = std::numeric_limits<double>::quiet_NaN();
    if (regime.tag == RegimeTag::BelowCritical) {
      const LimitResult lim = limit_policy(instance.mu, instance.rewards, v);
      row.tau_star = lim.tau_star;
      row.limit_l1 = l1_distance(final_pi, *lim.policy);
    } else if (regime.tag == RegimeTag::AtCritical) {
      const LimitResult lim =
          limit_policy(instance.mu, instance.rewards, v, softmax(instance.l0));
      row.limit_l1 = l1_distance(final_pi, *lim.policy);
    }

    result.logs[i] = std::move(run.log);
    result.rows[i] = row;
    finals[i] = final_pi;
  });

  for (auto& f : finals) result.finals.push_back(std::move(*f));
  return result;
}

std::vector<ImprovementRun> improvement_experiment(const Instance& instance,
                                                   const std::vector<double>& v_values,
                                                   long iters, long steps_per_iter,
                                                   const RunOptions& opts) {
  if (iters < 1) throw ConfigError("improvement_experiment: iters must be >= 1");
  if (steps_per_iter < 1) {
    throw ConfigError("improvement_experiment: steps_per_iter must be >= 1");
  }
  std::vector<ImprovementRun> runs(v_values.size());

  parallel_for_indexed(v_values.size(), opts.threads, [&](std::size_t i) {
    const double v = v_values[i];
    ImprovementRun out;
    out.v = v;

    // Arms whose behavior mass underflows to zero have left the support for
    // good; they are dropped from the active arm set so every inner run sees
    // a full-support behavior policy on the arms that remain.
    const std::size_t n = instance.rewards.size();
    std::vector<std::size_t> active(n);
    for (std::size_t y = 0; y < n; ++y) active[y] = y;
    std::vector<double> logits = instance.l0.values();
    std::vector<double> mu_full = softmax(instance.l0).values();

    auto record = [&]() {
      const SimplexPolicy mu{std::vector<double>(mu_full)};
      out.reward_per_iteration.push_back(expected_reward(mu, instance.rewards));
      out.entropy_per_iteration.push_back(entropy(mu));
      out.support_per_iteration.push_back(
          static_cast<long>(support(mu, opts.support_eps).size()));
    };
    record();

    for (long it = 0; it < iters; ++it) {
      std::vector<std::size_t> survivors;
      for (std::size_t k = 0; k < active.size(); ++k) {
        if (mu_full[active[k]] > 0.0) survivors.push_back(active[k]);
      }
      active = std::move(survivors);
      std::vector<double> mu_w(active.size()), r_w(active.size()), l_w(active.size());
      for (std::size_t k = 0; k < active.size(); ++k) {
        mu_w[k] = mu_full[active[k]];
        r_w[k] = instance.rewards[active[k]];
        l_w[k] = logits[active[k]];
      }
      const SimplexPolicy mu = SimplexPolicy::normalized(std::move(mu_w));
      const RewardModel rewards{std::move(r_w)};

      const AdvantageProfile adv = advantage_profile(mu, rewards, v);
      DynamicsConfig cfg;
      cfg.eta = opts.eta.value_or(default_step_size(adv));
      cfg.steps = steps_per_iter;
      cfg.grad_tol = opts.grad_tol;
      cfg.record_every = steps_per_iter;  // only endpoints matter here
      cfg.support_eps = opts.support_eps;
      RunResult run = run_expected(LogitPolicy{std::move(l_w)}, mu, rewards, v, cfg);

      const SimplexPolicy pi = softmax(run.logits);
      std::fill(mu_full.begin(), mu_full.end(), 0.0);
      for (std::size_t k = 0; k < active.size(); ++k) {
        logits[active[k]] = run.logits[k];
        mu_full[active[k]] = pi[k];
      }
      record();
    }
    runs[i] = std::move(out);
  });
  return runs;
}

BasinResult basin_map(const Instance& instance, double V, int resolution,
                      const RunOptions& opts) {
  if (instance.rewards.size() != 3) {
    throw ConfigError("basin_map: instance must have exactly 3 arms");
  }
  if (resolution < 3) throw ConfigError("basin_map: resolution must be >= 3");
  const Regime regime = classify_regime(instance.mu, instance.rewards, V);
  if (regime.tag != RegimeTag::AboveCritical) {
    throw PreconditionError("basin_map: requires V > V^mu");
  }
  const AdvantageProfile adv = advantage_profile(instance.mu, instance.rewards, V);

  BasinResult result;
  result.v = V;
  result.resolution = resolution;
  result.candidate_support = candidate_support_above(adv);

  const double res = static_cast<double>(resolution);
  std::vector<std::pair<int, int>> points;
  for (int i = 1; i <= resolution - 2; ++i) {
    for (int j = 1; j <= resolution - 1 - i; ++j) {
      points.emplace_back(i, j);
    }
  }

  result.cells.resize(points.size());
  std::vector<std::optional<SimplexPolicy>> finals(points.size());
  const double eta = opts.eta.value_or(1.0);

  parallel_for_indexed(points.size(), opts.threads, [&](std::size_t k) {
    const auto [i, j] = points[k];
    const double x = static_cast<double>(i) / res;
    const double y = static_cast<double>(j) / res;
    const SimplexPolicy pi0 = SimplexPolicy::normalized({x, y, 1.0 - x - y});
    const SimplexPolicy final_pi = settle_to_limit(pi0, adv, eta, opts.steps);
    result.cells[k] = {x, y, static_cast<int>(argmax_index(final_pi.values()))};
    finals[k] = final_pi;
  });

  result.finals.reserve(points.size());
  for (auto& f : finals) result.finals.push_back(std::move(*f));
  return result;
}

ContextSet gen_binary_contexts(int n_contexts, int n_arms, std::uint64_t seed) {
  if (n_contexts < 1) throw ConfigError("gen_binary_contexts: n_contexts must be >= 1");
  if (n_arms < 2) throw ConfigError("gen_binary_contexts: n_arms must be >= 2");
  Rng rng = Rng::stream(seed, 0);

  std::vector<BanditContext> contexts;
  contexts.reserve(static_cast<std::size_t>(n_contexts));
  for (int c = 0; c < n_contexts; ++c) {
    // Success-sparse tables (3 in 10 arms succeed on average) keep a spread
    // of per-context baselines, including failure-heavy contexts where a
    // conservative offset visibly widens the retained support.
    std::vector<double> rewards(static_cast<std::size_t>(n_arms));
    for (;;) {
      bool any_pos = false, any_neg = false;
      for (double& r : rewards) {
        r = rng.next_double() < 0.3 ? 1.0 : -1.0;
        (r > 0 ? any_pos : any_neg) = true;
      }
      if (any_pos && any_neg) break;  // redraw degenerate all-equal tables
    }
    // Sloped initial logits keep same-reward arms off an exact tie, matching
    // the non-uniform behavior policies of the single-instance experiments.
    std::vector<double> logits(static_cast<std::size_t>(n_arms));
    for (std::size_t y = 0; y < logits.size(); ++y) {
      logits[y] = 0.1 * static_cast<double>(y);
    }
    contexts.push_back(
        BanditContext{RewardModel{std::move(rewards)}, LogitPolicy{std::move(logits)}});
  }
  return ContextSet{std::move(contexts),
                    SimplexPolicy::uniform(static_cast<std::size_t>(n_contexts))};
}

}  // namespace opg
