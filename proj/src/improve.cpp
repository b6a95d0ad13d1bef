#include "opg/improve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "opg/numeric.hpp"

namespace opg {

namespace {

double off_mass_of(const std::vector<double>& mu, const std::vector<std::size_t>& y_inf) {
  std::vector<bool> in_inf(mu.size(), false);
  for (std::size_t y : y_inf) in_inf[y] = true;
  std::vector<double> terms;
  terms.reserve(mu.size());
  for (std::size_t y = 0; y < mu.size(); ++y) {
    if (!in_inf[y]) terms.push_back(mu[y]);
  }
  return compensated_sum(terms);
}

void require_below_critical(const SimplexPolicy& mu, const RewardModel& r, double V,
                            double tol, const char* who) {
  const Regime regime = classify_regime(mu, r, V, tol);
  if (regime.tag != RegimeTag::BelowCritical) {
    throw RegimeError(std::string(who) + ": requires V < V^mu");
  }
}

}  // namespace

LimitResult apply_T(const SimplexPolicy& mu, const RewardModel& r, double V, double tol) {
  if (!mu.full_support()) {
    throw PreconditionError("apply_T: behavior policy must have full support");
  }
  require_below_critical(mu, r, V, tol, "apply_T");
  return limit_policy(mu, r, V, std::nullopt, tol);
}

LimitReward limit_reward(const SimplexPolicy& mu0, const RewardModel& r, double V, double tol) {
  require_below_critical(mu0, r, V, tol, "limit_reward");
  const std::vector<std::size_t> supp = limit_support(mu0, r, V, tol);
  double v_inf = -std::numeric_limits<double>::infinity();
  for (std::size_t y : supp) v_inf = std::max(v_inf, r[y]);
  LimitReward out;
  out.v_inf = v_inf;
  for (std::size_t y : supp) {
    if (r[y] == v_inf) out.y_inf.push_back(y);
  }
  return out;
}

ImprovementTrace iterate_T(const SimplexPolicy& mu0, const RewardModel& r, double V,
                           long n_iters, double tol) {
  if (n_iters < 1) throw InvalidInputError("iterate_T: n_iters must be >= 1");
  if (!mu0.full_support()) {
    throw PreconditionError("iterate_T: initial behavior policy must have full support");
  }
  require_below_critical(mu0, r, V, tol, "iterate_T");

  ImprovementTrace trace;
  trace.rewards = r.values();
  trace.v_baseline = V;
  const LimitReward lr = limit_reward(mu0, r, V, tol);
  trace.v_inf = lr.v_inf;
  trace.y_inf = lr.y_inf;

  const std::size_t n = mu0.size();
  std::vector<std::size_t> active(n);
  for (std::size_t y = 0; y < n; ++y) active[y] = y;
  std::vector<double> mu_active = mu0.values();

  {
    ImprovementIterate it0;
    it0.n = 0;
    it0.mu = mu0.values();
    it0.v_mu = expected_reward(mu0, r);
    it0.tau = std::numeric_limits<double>::quiet_NaN();
    it0.support_size = static_cast<long>(n);
    it0.off_mass = off_mass_of(it0.mu, trace.y_inf);
    trace.iterates.push_back(std::move(it0));
  }

  for (long iter = 1; iter <= n_iters; ++iter) {
    // Restricted instance on the active arm set; mu_active is a simplex there.
    std::vector<double> r_active(active.size());
    for (std::size_t i = 0; i < active.size(); ++i) r_active[i] = r[active[i]];
    const SimplexPolicy mu_restricted = SimplexPolicy::normalized(std::vector<double>(mu_active));
    const RewardModel r_restricted{std::vector<double>(r_active)};

    const double v_mu = expected_reward(mu_restricted, r_restricted);
    if (!(V < v_mu - tol)) {
      throw RegimeError("iterate_T: baseline reached V^mu during iteration");
    }
    const AdvantageProfile adv = advantage_profile(mu_restricted, r_restricted, V);
    const double tau = solve_tau(adv);
    if (iter >= 2 && tau != 0.0) {
      throw InternalError("iterate_T: threshold must vanish from the second application");
    }

    std::vector<double> next(active.size(), 0.0);
    for (std::size_t i = 0; i < active.size(); ++i) {
      if (adv.a[i] > tau) next[i] = (adv.a[i] - tau) / adv.b;
    }

    std::vector<std::size_t> new_active;
    std::vector<double> new_mu;
    std::vector<double> full(n, 0.0);
    for (std::size_t i = 0; i < active.size(); ++i) {
      if (next[i] > 0.0) {
        new_active.push_back(active[i]);
        new_mu.push_back(next[i]);
        full[active[i]] = next[i];
      }
    }

    ImprovementIterate rec;
    rec.n = iter;
    rec.v_mu = compensated_dot(full, trace.rewards);
    rec.tau = tau;
    rec.support_size = static_cast<long>(new_active.size());
    rec.off_mass = off_mass_of(full, trace.y_inf);
    rec.mu = std::move(full);

    if (rec.v_mu < trace.iterates.back().v_mu - 1e-10) {
      throw InternalError("iterate_T: expected reward decreased across an application");
    }
    trace.iterates.push_back(std::move(rec));

    active = std::move(new_active);
    mu_active = std::move(new_mu);
  }
  return trace;
}

ValueIdentity value_identity_check(const SimplexPolicy& mu, const RewardModel& r, double V,
                                   double tol) {
  const LimitResult lim = apply_T(mu, r, V, tol);
  const SimplexPolicy& pi = *lim.policy;
  const double v_mu = lim.regime.v_mu;
  const double tau = lim.tau_star;

  std::vector<double> sq_terms(pi.size()), lin_terms(pi.size());
  for (std::size_t y = 0; y < pi.size(); ++y) {
    sq_terms[y] = pi[y] * pi[y] / mu[y];
    lin_terms[y] = pi[y] / mu[y];
  }
  const double sq = compensated_sum(sq_terms);
  const double lin = compensated_sum(lin_terms);

  ValueIdentity out;
  out.v_pi = expected_reward(pi, r);
  out.rhs = V + (v_mu - V) * sq + tau * lin;
  out.defect = std::abs(out.v_pi - out.rhs);
  out.cs_lower_bound = v_mu + tau * lin;
  out.cs_bound_holds = out.v_pi >= out.cs_lower_bound - 1e-10;
  return out;
}

ThresholdResult optimality_threshold(const SimplexPolicy& mu0, const RewardModel& r,
                                     double tol) {
  if (!(tol > 0.0)) throw InvalidInputError("optimality_threshold: tol must be positive");
  if (!mu0.full_support()) {
    throw PreconditionError("optimality_threshold: mu0 must have full support");
  }
  const double r_max = r.max();
  const double v_mu = expected_reward(mu0, r);
  double lo = r.min() - 1.0;
  double hi = v_mu;

  auto optimal_at = [&](double v) {
    return limit_reward(mu0, r, v).v_inf == r_max;
  };

  if (!optimal_at(lo)) {
    throw InternalError("optimality_threshold: predicate false at V = min r - 1");
  }

  // Probe for monotonicity before trusting bisection.
  const double lo0 = lo;
  const double hi0 = hi;
  bool seen_false = false;
  for (int k = 1; k <= 10; ++k) {
    const double v = lo0 + (hi0 - lo0) * static_cast<double>(k) / 11.0;
    const bool ok = optimal_at(v);
    if (seen_false && ok) {
      throw InternalError("optimality_threshold: predicate not monotone across probes");
    }
    if (!ok) {
      if (!seen_false) hi = v;
      seen_false = true;
    } else {
      lo = v;
    }
  }

  for (int iter = 0; iter < 200 && hi - lo > tol; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (optimal_at(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {0.5 * (lo + hi), lo, hi};
}

ConcentrationEstimate concentration_fit(const ImprovementTrace& trace) {
  if (trace.iterates.size() < 2) {
    throw InvalidInputError("concentration_fit: trace has no applications");
  }
  ConcentrationEstimate est;

  // Conjectured rate from the ratio recursion: surviving non-optimal arms of
  // the first application shrink by (r(y) - V) / (V_inf - V) per iteration.
  est.c_theory = 0.0;
  const std::vector<double>& mu1 = trace.iterates[1].mu;
  std::vector<bool> in_inf(mu1.size(), false);
  for (std::size_t y : trace.y_inf) in_inf[y] = true;
  for (std::size_t y = 0; y < mu1.size(); ++y) {
    if (mu1[y] > 0.0 && !in_inf[y]) {
      est.c_theory = std::max(
          est.c_theory, (trace.rewards[y] - trace.v_baseline) / (trace.v_inf - trace.v_baseline));
    }
  }

  std::vector<double> off;
  for (std::size_t i = 1; i < trace.iterates.size(); ++i) {
    if (!(trace.iterates[i].off_mass > 0.0)) break;
    off.push_back(trace.iterates[i].off_mass);
  }
  if (off.size() < 5) {
    est.fitted = false;
    est.c_hat = std::numeric_limits<double>::quiet_NaN();
    est.note = "off-mass already concentrated; no decay rate to fit";
    return est;
  }

  est.fitted = true;
  est.c_hat = std::pow(off.back() / off.front(),
                       1.0 / static_cast<double>(off.size() - 1));
  est.note = "c_theory is a conjectured rate from the ratio recursion";
  if (!(est.c_hat <= 1.0 + 1e-12)) {
    throw InternalError("concentration_fit: off-mass grew across iterations");
  }
  if (!(est.c_theory < 1.0)) {
    throw InternalError("concentration_fit: surviving ratio reached one");
  }

  const double c = std::max(est.c_hat, est.c_theory);
  double envelope = 0.0;
  if (c > 0.0) {
    double cn = 1.0;
    for (std::size_t i = 0; i < off.size(); ++i) {
      cn *= c;
      envelope = std::max(envelope, off[i] / cn);
    }
  }
  est.envelope_constant = envelope;
  return est;
}

}  // namespace opg
