#include "opg/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "opg/numeric.hpp"

namespace opg {

namespace {

void softmax_into(const std::vector<double>& logits, std::vector<double>& probs) {
  const double shift = *std::max_element(logits.begin(), logits.end());
  for (std::size_t y = 0; y < logits.size(); ++y) probs[y] = std::exp(logits[y] - shift);
  const double total = compensated_sum(probs);
  for (double& p : probs) p /= total;
}

long count_support(const std::vector<double>& probs, double eps) {
  long n = 0;
  for (double p : probs) {
    if (p > eps) ++n;
  }
  return n;
}

struct StepStats {
  double reward;
  double entropy;
  double phi;
  double tau;
};

StepStats compute_stats(const std::vector<double>& probs, const std::vector<double>& a,
                        double b, const RewardModel& r) {
  double s_ap = 0.0, c_ap = 0.0;
  double s_pp = 0.0, c_pp = 0.0;
  double s_pr = 0.0, c_pr = 0.0;
  double s_h = 0.0, c_h = 0.0;
  for (std::size_t y = 0; y < probs.size(); ++y) {
    const double p = probs[y];
    auto add = [](double& sum, double& comp, double x) {
      const double t = sum + x;
      if (std::abs(sum) >= std::abs(x)) {
        comp += (sum - t) + x;
      } else {
        comp += (x - t) + sum;
      }
      sum = t;
    };
    add(s_ap, c_ap, a[y] * p);
    add(s_pp, c_pp, p * p);
    add(s_pr, c_pr, p * r[y]);
    if (p > 0.0) add(s_h, c_h, -p * std::log(p));
  }
  const double ap = s_ap + c_ap;
  const double pp = s_pp + c_pp;
  StepStats st;
  st.reward = s_pr + c_pr;
  st.entropy = s_h + c_h;
  st.phi = ap - 0.5 * b * pp;
  st.tau = ap - b * pp;
  return st;
}

void guard_logits(const std::vector<double>& logits, long step) {
  for (double l : logits) {
    if (!(std::abs(l) <= kLogitGuard)) {
      throw DivergenceError("dynamics: logit magnitude exceeded guard", step);
    }
  }
}

}  // namespace

void DynamicsConfig::validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw InvalidInputError("DynamicsConfig: eta must be positive and finite");
  }
  if (steps < 1) throw InvalidInputError("DynamicsConfig: steps must be >= 1");
  if (!(grad_tol >= 0.0)) throw InvalidInputError("DynamicsConfig: grad_tol must be >= 0");
  if (record_every < 1) throw InvalidInputError("DynamicsConfig: record_every must be >= 1");
  if (!(support_eps > 0.0)) throw InvalidInputError("DynamicsConfig: support_eps must be > 0");
}

void DelayedConfig::validate() const {
  if (update_interval < 1) throw InvalidInputError("DelayedConfig: update_interval must be >= 1");
  if (total_steps < 1) throw InvalidInputError("DelayedConfig: total_steps must be >= 1");
}

std::vector<double> expected_gradient(const LogitPolicy& l, const AdvantageProfile& adv) {
  if (l.size() != adv.size()) {
    throw InvalidInputError("expected_gradient: logit and profile lengths differ");
  }
  const SimplexPolicy pi = softmax(l);
  std::vector<double> g(l.size());
  for (std::size_t y = 0; y < l.size(); ++y) g[y] = adv.a[y] - adv.b * pi[y];
  return g;
}

LogitPolicy ascent_step(const LogitPolicy& l, const AdvantageProfile& adv, double eta) {
  if (!(eta > 0.0)) throw InvalidInputError("ascent_step: eta must be positive");
  const std::vector<double> g = expected_gradient(l, adv);
  std::vector<double> next(l.values());
  for (std::size_t y = 0; y < next.size(); ++y) next[y] += eta * g[y];
  return LogitPolicy(std::move(next));
}

RunResult run_expected(const LogitPolicy& l0, const SimplexPolicy& mu, const RewardModel& r,
                       double V, const DynamicsConfig& cfg) {
  cfg.validate();
  const AdvantageProfile adv = advantage_profile(mu, r, V);
  if (l0.size() != adv.size()) {
    throw InvalidInputError("run_expected: logit and instance lengths differ");
  }

  std::vector<double> logits = l0.values();
  const std::size_t n = logits.size();
  std::vector<double> probs(n), grad(n);
  TrajectoryLog log;
  long last_recorded = -1;

  auto record = [&](long step, double gnorm) {
    const StepStats st = compute_stats(probs, adv.a, adv.b, r);
    log.points.push_back({step, st.reward, st.entropy, count_support(probs, cfg.support_eps),
                          st.phi, st.tau, gnorm});
    last_recorded = step;
  };

  for (long step = 0;; ++step) {
    softmax_into(logits, probs);
    for (std::size_t y = 0; y < n; ++y) grad[y] = adv.a[y] - adv.b * probs[y];
    const double gnorm = max_abs(grad);
    if (step % cfg.record_every == 0) record(step, gnorm);
    if (gnorm < cfg.grad_tol || step >= cfg.steps) {
      if (last_recorded != step) record(step, gnorm);
      break;
    }
    for (std::size_t y = 0; y < n; ++y) logits[y] += cfg.eta * grad[y];
    guard_logits(logits, step + 1);
  }
  return {LogitPolicy(std::move(logits)), std::move(log)};
}

SimplexPolicy simplex_flow_step(const SimplexPolicy& p, const AdvantageProfile& adv, double dt) {
  if (!(dt > 0.0)) throw InvalidInputError("simplex_flow_step: dt must be positive");
  if (p.size() != adv.size()) {
    throw InvalidInputError("simplex_flow_step: lengths differ");
  }
  const double tau = threshold_tau_t(p, adv);
  std::vector<double> next(p.size());
  for (std::size_t y = 0; y < p.size(); ++y) {
    next[y] = p[y] + dt * p[y] * (adv.a[y] - adv.b * p[y] - tau);
  }
  return SimplexPolicy::normalized(std::move(next));
}

double lyapunov_phi(const SimplexPolicy& p, const AdvantageProfile& adv) {
  if (p.size() != adv.size()) throw InvalidInputError("lyapunov_phi: lengths differ");
  const double ap = compensated_dot(p.values(), adv.a);
  const double pp = compensated_dot(p.values(), p.values());
  return ap - 0.5 * adv.b * pp;
}

double threshold_tau_t(const SimplexPolicy& p, const AdvantageProfile& adv) {
  if (p.size() != adv.size()) throw InvalidInputError("threshold_tau_t: lengths differ");
  const double ap = compensated_dot(p.values(), adv.a);
  const double pp = compensated_dot(p.values(), p.values());
  return ap - adv.b * pp;
}

LogitPolicy sample_update(const LogitPolicy& l, std::size_t arm, const RewardModel& r,
                          double V, double eta) {
  if (l.size() != r.size()) throw InvalidInputError("sample_update: lengths differ");
  if (arm >= l.size()) throw InvalidInputError("sample_update: arm index out of range");
  const SimplexPolicy pi = softmax(l);
  const double advantage = r[arm] - V;
  std::vector<double> next(l.values());
  for (std::size_t y = 0; y < next.size(); ++y) {
    const double indicator = (y == arm) ? 1.0 : 0.0;
    next[y] += eta * advantage * (indicator - pi[y]);
  }
  return LogitPolicy(std::move(next));
}

LogitPolicy stochastic_step(const LogitPolicy& l, const SimplexPolicy& mu, const RewardModel& r,
                            double V, double eta, Rng& rng) {
  if (!mu.full_support()) {
    throw PreconditionError("stochastic_step: behavior policy must have full support");
  }
  const std::size_t arm = rng.sample(mu);
  return sample_update(l, arm, r, V, eta);
}

RunResult run_delayed(const LogitPolicy& l0, const RewardModel& r, const BaselineSpec& baseline,
                      const DynamicsConfig& cfg, const DelayedConfig& dcfg, Rng& rng) {
  cfg.validate();
  dcfg.validate();
  if (l0.size() != r.size()) throw InvalidInputError("run_delayed: lengths differ");

  std::vector<double> logits = l0.values();
  const std::size_t n = logits.size();
  std::vector<double> probs(n), grad(n), behavior(n), a(n);
  double b = 0.0;
  double V = 0.0;
  TrajectoryLog log;
  long last_recorded = -1;

  auto refresh = [&]() {
    softmax_into(logits, behavior);
    const double v_mu = compensated_dot(behavior, r.values());
    V = baseline.resolve(v_mu);
    b = v_mu - V;
    for (std::size_t y = 0; y < n; ++y) a[y] = behavior[y] * (r[y] - V);
  };

  auto record = [&](long step, double gnorm) {
    const StepStats st = compute_stats(probs, a, b, r);
    log.points.push_back({step, st.reward, st.entropy, count_support(probs, cfg.support_eps),
                          st.phi, st.tau, gnorm});
    last_recorded = step;
  };

  for (long step = 0;; ++step) {
    // Refresh only ahead of an actual update; a terminal-step refresh would
    // change the recorded diagnostics without any dynamics following it.
    if (step < dcfg.total_steps && step % dcfg.update_interval == 0) refresh();
    softmax_into(logits, probs);
    for (std::size_t y = 0; y < n; ++y) grad[y] = a[y] - b * probs[y];
    const double gnorm = max_abs(grad);
    if (step % cfg.record_every == 0) record(step, gnorm);
    if (gnorm < cfg.grad_tol || step >= dcfg.total_steps) {
      if (last_recorded != step) record(step, gnorm);
      break;
    }
    if (dcfg.expected_updates) {
      for (std::size_t y = 0; y < n; ++y) logits[y] += cfg.eta * grad[y];
    } else {
      const double u = rng.next_double();
      std::size_t arm = n;
      double acc = 0.0;
      for (std::size_t y = 0; y < n; ++y) {
        acc += behavior[y];
        if (u < acc) {
          arm = y;
          break;
        }
      }
      if (arm == n) {
        // cumulative rounding left u uncovered; take the last arm with mass
        arm = n - 1;
        while (arm > 0 && behavior[arm] <= 0.0) --arm;
      }
      const double advantage = r[arm] - V;
      for (std::size_t y = 0; y < n; ++y) {
        const double indicator = (y == arm) ? 1.0 : 0.0;
        logits[y] += cfg.eta * advantage * (indicator - probs[y]);
      }
    }
    guard_logits(logits, step + 1);
  }
  return {LogitPolicy(std::move(logits)), std::move(log)};
}

SimplexPolicy settle_to_limit(const SimplexPolicy& pi0, const AdvantageProfile& adv,
                              double eta, long max_steps, double field_tol) {
  if (pi0.size() != adv.size()) throw InvalidInputError("settle_to_limit: lengths differ");
  if (!pi0.full_support()) {
    throw PreconditionError("settle_to_limit: pi0 must lie in the open simplex");
  }
  std::vector<double> logits(pi0.size());
  for (std::size_t y = 0; y < pi0.size(); ++y) logits[y] = std::log(pi0[y]);
  const std::size_t n = logits.size();
  std::vector<double> probs(n);
  for (long step = 0; step < max_steps; ++step) {
    softmax_into(logits, probs);
    double s_ap = 0.0, s_pp = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      s_ap += adv.a[y] * probs[y];
      s_pp += probs[y] * probs[y];
    }
    const double tau = s_ap - adv.b * s_pp;
    double field_max = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      const double field = probs[y] * (adv.a[y] - adv.b * probs[y] - tau);
      field_max = std::max(field_max, std::abs(field));
    }
    if (field_max < field_tol) break;
    for (std::size_t y = 0; y < n; ++y) {
      logits[y] += eta * (adv.a[y] - adv.b * probs[y]);
    }
    guard_logits(logits, step + 1);
  }
  softmax_into(logits, probs);
  return SimplexPolicy(std::move(probs));
}

double default_step_size(const AdvantageProfile& adv) {
  if (adv.b > kCriticalTol) return 0.9 / adv.b;
  return 1.0;
}

}  // namespace opg
