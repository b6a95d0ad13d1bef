#include "opg/contextual.hpp"

#include <algorithm>
#include <cmath>

#include "opg/numeric.hpp"

namespace opg {

void ContextSet::validate() const {
  if (contexts.empty()) throw InvalidInputError("ContextSet: no contexts");
  if (weights.size() != contexts.size()) {
    throw InvalidInputError("ContextSet: weights length mismatch");
  }
  for (const auto& ctx : contexts) {
    if (ctx.rewards.size() < 2) {
      throw InvalidInputError("ContextSet: every context needs at least 2 arms");
    }
    if (ctx.init_logits.size() != ctx.rewards.size()) {
      throw InvalidInputError("ContextSet: logit/reward length mismatch");
    }
  }
}

void ContextualConfig::validate() const {
  if (group_size < 1) throw InvalidInputError("ContextualConfig: G must be >= 1");
  if (!(eta > 0.0)) throw InvalidInputError("ContextualConfig: eta must be positive");
  if (total_steps < 1) throw InvalidInputError("ContextualConfig: total_steps must be >= 1");
  if (update_interval < 1) {
    throw InvalidInputError("ContextualConfig: update_interval must be >= 1");
  }
  if (record_every < 1) throw InvalidInputError("ContextualConfig: record_every must be >= 1");
  if (!std::isfinite(delta_v)) throw InvalidInputError("ContextualConfig: non-finite delta_v");
}

double empirical_baseline(const std::vector<ArmSample>& samples) {
  if (samples.empty()) throw InvalidInputError("empirical_baseline: empty sample list");
  std::vector<double> rewards(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) rewards[i] = samples[i].reward;
  return compensated_sum(rewards) / static_cast<double>(samples.size());
}

ContextualState ContextualState::init(const ContextSet& ctxs, double delta_v) {
  ContextualState st;
  st.logits.reserve(ctxs.contexts.size());
  for (const auto& ctx : ctxs.contexts) st.logits.push_back(ctx.init_logits.values());
  st.refresh(ctxs, delta_v);
  return st;
}

void ContextualState::refresh(const ContextSet& ctxs, double delta_v) {
  behaviors.clear();
  behavior_value.clear();
  adv.clear();
  for (std::size_t x = 0; x < ctxs.contexts.size(); ++x) {
    SimplexPolicy mu = softmax(LogitPolicy(std::vector<double>(logits[x])));
    const double v_mu = expected_reward(mu, ctxs.contexts[x].rewards);
    behavior_value.push_back(v_mu);
    adv.push_back(advantage_profile(mu, ctxs.contexts[x].rewards, v_mu + delta_v));
    behaviors.push_back(std::move(mu));
  }
}

ContextualStepInfo contextual_step(ContextualState& state, const ContextSet& ctxs,
                                   const ContextualConfig& cfg, Rng& rng) {
  const std::size_t x = rng.sample(ctxs.weights);
  const RewardModel& r = ctxs.contexts[x].rewards;
  const std::size_t n = r.size();

  std::vector<ArmSample> samples(static_cast<std::size_t>(cfg.group_size));
  for (auto& s : samples) {
    s.arm = rng.sample(state.behaviors[x]);
    s.reward = r[s.arm];
  }
  const double vhat = empirical_baseline(samples);
  const double baseline = vhat + cfg.delta_v;

  const SimplexPolicy pi = softmax(LogitPolicy(std::vector<double>(state.logits[x])));

  // (eta/G) sum_i (r_i - baseline) (e_{y_i} - pi)
  std::vector<double> indicator_sum(n, 0.0);
  double advantage_total = 0.0;
  for (const auto& s : samples) {
    const double advantage = s.reward - baseline;
    indicator_sum[s.arm] += advantage;
    advantage_total += advantage;
  }
  const double scale = cfg.eta / static_cast<double>(cfg.group_size);
  std::vector<double>& l = state.logits[x];
  for (std::size_t y = 0; y < n; ++y) {
    l[y] += scale * (indicator_sum[y] - advantage_total * pi[y]);
    if (!(std::abs(l[y]) <= kLogitGuard)) {
      throw DivergenceError("contextual_step: logit magnitude exceeded guard",
                            state.steps_taken + 1);
    }
  }
  ++state.steps_taken;
  return {x, vhat, state.behavior_value[x]};
}

ContextualRunResult run_contextual(const ContextSet& ctxs, const ContextualConfig& cfg,
                                   Rng& rng) {
  ctxs.validate();
  cfg.validate();

  ContextualState state = ContextualState::init(ctxs, cfg.delta_v);
  const std::size_t n_ctx = ctxs.contexts.size();

  ContextualRunResult out;
  out.per_context.resize(n_ctx);

  double res_sum = 0.0;
  double res_sq_sum = 0.0;
  long res_count = 0;

  auto record_all = [&](long step) {
    std::vector<double> rewards(n_ctx), entropies(n_ctx);
    for (std::size_t x = 0; x < n_ctx; ++x) {
      const SimplexPolicy pi = softmax(LogitPolicy(std::vector<double>(state.logits[x])));
      const RewardModel& r = ctxs.contexts[x].rewards;
      const AdvantageProfile& adv = state.adv[x];
      std::vector<double> g(pi.size());
      for (std::size_t y = 0; y < pi.size(); ++y) g[y] = adv.a[y] - adv.b * pi[y];
      TrajectoryPoint pt;
      pt.step = step;
      pt.expected_reward = expected_reward(pi, r);
      pt.entropy = entropy(pi);
      pt.support_size = static_cast<long>(support(pi, cfg.support_eps).size());
      pt.phi = lyapunov_phi(pi, adv);
      pt.tau_t = threshold_tau_t(pi, adv);
      pt.grad_maxnorm = max_abs(g);
      out.per_context[x].points.push_back(pt);
      rewards[x] = pt.expected_reward;
      entropies[x] = pt.entropy;
    }
    AggregatePoint agg;
    agg.step = step;
    agg.mean_reward = compensated_dot(ctxs.weights.values(), rewards);
    agg.mean_entropy = compensated_dot(ctxs.weights.values(), entropies);
    out.aggregate.push_back(agg);
  };

  for (long step = 0; step < cfg.total_steps; ++step) {
    if (step % cfg.update_interval == 0) state.refresh(ctxs, cfg.delta_v);
    if (step % cfg.record_every == 0) record_all(step);
    const ContextualStepInfo info = contextual_step(state, ctxs, cfg, rng);
    const double residual = info.vhat - info.v_mu;
    res_sum += residual;
    res_sq_sum += residual * residual;
    ++res_count;
  }
  record_all(cfg.total_steps);

  out.vhat_residual_count = res_count;
  if (res_count > 0) {
    out.vhat_residual_mean = res_sum / static_cast<double>(res_count);
    const double var =
        std::max(0.0, res_sq_sum / static_cast<double>(res_count) -
                          out.vhat_residual_mean * out.vhat_residual_mean);
    out.vhat_residual_std = std::sqrt(var);
  }
  return out;
}

}  // namespace opg
