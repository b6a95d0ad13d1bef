#include <cmath>
#include <functional>
#include <vector>

#include "doctest.h"
#include "opg/contextual.hpp"
#include "opg/core.hpp"
#include "opg/harness.hpp"
#include "opg/numeric.hpp"

using namespace opg;

namespace {

ContextSet two_arm_set(std::vector<double> rewards_a, std::vector<double> rewards_b) {
  std::vector<BanditContext> ctxs;
  ctxs.push_back({RewardModel{std::move(rewards_a)}, LogitPolicy::zeros(2)});
  ctxs.push_back({RewardModel{std::move(rewards_b)}, LogitPolicy::zeros(2)});
  return ContextSet{std::move(ctxs), SimplexPolicy::uniform(2)};
}

// Enumerates all G-tuples of arms weighted by mu and applies fn.
void for_each_tuple(const SimplexPolicy& mu, int G,
                    const std::function<void(const std::vector<std::size_t>&, double)>& fn) {
  std::vector<std::size_t> arms(static_cast<std::size_t>(G), 0);
  const std::size_t n = mu.size();
  for (;;) {
    double prob = 1.0;
    for (std::size_t a : arms) prob *= mu[a];
    fn(arms, prob);
    std::size_t k = 0;
    while (k < arms.size()) {
      if (++arms[k] < n) break;
      arms[k] = 0;
      ++k;
    }
    if (k == arms.size()) return;
  }
}

}  // namespace

TEST_CASE("empirical baseline is the sample mean") {
  CHECK(empirical_baseline({{0, 1.0}, {1, -1.0}, {0, 1.0}, {2, 1.0}}) == 0.5);
  CHECK(empirical_baseline({{0, 3.0}, {1, 3.0}, {2, 3.0}}) == 3.0);
  CHECK_THROWS_AS(empirical_baseline({}), InvalidInputError);
}

TEST_CASE("empirical baseline is unbiased under resampling") {
  // exhaustive enumeration over all G-tuples, G <= 3, n <= 4
  for (int G : {1, 2, 3}) {
    SimplexPolicy mu = SimplexPolicy::normalized({1.0, 2.0, 3.0, 4.0});
    RewardModel r({0.3, -0.7, 1.1, 0.5});
    double expectation = 0.0;
    for_each_tuple(mu, G, [&](const std::vector<std::size_t>& arms, double prob) {
      double vhat = 0.0;
      for (std::size_t a : arms) vhat += r[a];
      expectation += prob * vhat / static_cast<double>(G);
    });
    CHECK(std::abs(expectation - expected_reward(mu, r)) <= 1e-12);
  }
}

TEST_CASE("identical samples with no offset produce no update") {
  ContextSet ctxs = two_arm_set({1.0, 1.0}, {1.0, 1.0});
  ContextualConfig cfg;
  cfg.group_size = 4;
  cfg.delta_v = 0.0;
  cfg.eta = 0.5;
  cfg.total_steps = 50;
  cfg.update_interval = 10;
  cfg.record_every = 50;
  ContextualState st = ContextualState::init(ctxs, cfg.delta_v);
  Rng rng(1);
  for (int s = 0; s < 50; ++s) contextual_step(st, ctxs, cfg, rng);
  for (const auto& l : st.logits) {
    CHECK(l[0] == 0.0);
    CHECK(l[1] == 0.0);
  }
}

TEST_CASE("expected update direction matches the exact-baseline gradient") {
  // E[update] with the empirical baseline equals (1 - 1/G) times the expected
  // gradient at V = V^mu; verified by exhaustive enumeration.
  SimplexPolicy mu = SimplexPolicy::normalized({1.0, 2.0, 2.0});
  RewardModel r({1.0, -1.0, 0.5});
  const double v_mu = expected_reward(mu, r);
  std::vector<double> logits = {0.2, -0.1, 0.4};
  const SimplexPolicy pi = softmax(LogitPolicy(logits));

  for (int G : {2, 3}) {
    std::vector<double> expectation(3, 0.0);
    for_each_tuple(mu, G, [&](const std::vector<std::size_t>& arms, double prob) {
      double vhat = 0.0;
      for (std::size_t a : arms) vhat += r[a];
      vhat /= static_cast<double>(G);
      std::vector<double> upd(3, 0.0);
      for (std::size_t a : arms) {
        const double adv = r[a] - vhat;
        for (std::size_t y = 0; y < 3; ++y) {
          upd[y] += adv * ((y == a ? 1.0 : 0.0) - pi[y]) / static_cast<double>(G);
        }
      }
      for (std::size_t y = 0; y < 3; ++y) expectation[y] += prob * upd[y];
    });
    std::vector<double> g =
        expected_gradient(LogitPolicy(logits), advantage_profile(mu, r, v_mu));
    const double scale = 1.0 - 1.0 / static_cast<double>(G);
    for (std::size_t y = 0; y < 3; ++y) {
      CHECK(std::abs(expectation[y] - scale * g[y]) <= 1e-12);
    }
  }
}

TEST_CASE("aggregate curves are the weighted mean of per-context stats") {
  ContextSet ctxs = gen_binary_contexts(5, 4, 42);
  ContextualConfig cfg;
  cfg.group_size = 4;
  cfg.delta_v = -0.1;
  cfg.eta = 0.3;
  cfg.total_steps = 2000;
  cfg.update_interval = 100;
  cfg.record_every = 200;
  Rng rng = Rng::stream(42, 0);
  ContextualRunResult res = run_contextual(ctxs, cfg, rng);

  REQUIRE(res.per_context.size() == 5);
  for (std::size_t i = 0; i < res.aggregate.size(); ++i) {
    std::vector<double> rewards(5), entropies(5);
    for (std::size_t x = 0; x < 5; ++x) {
      rewards[x] = res.per_context[x].points[i].expected_reward;
      entropies[x] = res.per_context[x].points[i].entropy;
    }
    CHECK(std::abs(res.aggregate[i].mean_reward -
                   compensated_dot(ctxs.weights.values(), rewards)) <= 1e-12);
    CHECK(std::abs(res.aggregate[i].mean_entropy -
                   compensated_dot(ctxs.weights.values(), entropies)) <= 1e-12);
  }
}

TEST_CASE("shared seeds give identical runs for identical configs") {
  ContextSet ctxs = gen_binary_contexts(4, 6, 7);
  ContextualConfig cfg;
  cfg.group_size = 8;
  cfg.delta_v = -0.1;
  cfg.eta = 0.3;
  cfg.total_steps = 3000;
  cfg.update_interval = 250;
  cfg.record_every = 250;
  Rng rng_a = Rng::stream(7, 0);
  Rng rng_b = Rng::stream(7, 0);
  ContextualRunResult a = run_contextual(ctxs, cfg, rng_a);
  ContextualRunResult b = run_contextual(ctxs, cfg, rng_b);
  REQUIRE(a.aggregate.size() == b.aggregate.size());
  for (std::size_t i = 0; i < a.aggregate.size(); ++i) {
    CHECK(a.aggregate[i].mean_reward == b.aggregate[i].mean_reward);
    CHECK(a.aggregate[i].mean_entropy == b.aggregate[i].mean_entropy);
  }
  CHECK(a.vhat_residual_mean == b.vhat_residual_mean);
}

TEST_CASE("offset sweeps share the trajectory prefix before advantages differ") {
  // With constant rewards the empirical baseline absorbs the reward exactly,
  // so the zero-offset run never moves while a nonzero offset does.
  ContextSet ctxs = two_arm_set({1.0, 1.0}, {1.0, 1.0});
  ContextualConfig cfg;
  cfg.group_size = 4;
  cfg.eta = 0.5;
  cfg.total_steps = 100;
  cfg.update_interval = 25;
  cfg.record_every = 100;

  cfg.delta_v = 0.0;
  ContextualState frozen = ContextualState::init(ctxs, cfg.delta_v);
  Rng rng_a = Rng::stream(9, 0);
  ContextualStepInfo first_a = contextual_step(frozen, ctxs, cfg, rng_a);

  cfg.delta_v = -0.3;
  ContextualState moving = ContextualState::init(ctxs, cfg.delta_v);
  Rng rng_b = Rng::stream(9, 0);
  ContextualStepInfo first_b = contextual_step(moving, ctxs, cfg, rng_b);

  // same draw sequence: same context visited, same empirical baseline
  CHECK(first_a.context == first_b.context);
  CHECK(first_a.vhat == first_b.vhat);
  // advantages differ by the offset alone: one state moved, one did not
  CHECK(frozen.logits[first_a.context][0] == 0.0);
  CHECK(moving.logits[first_b.context][0] != 0.0);
}

TEST_CASE("single-context sets reduce to an ordinary delayed bandit run") {
  std::vector<BanditContext> one;
  one.push_back({RewardModel{{1.0, -1.0, 1.0, -1.0}}, LogitPolicy::zeros(4)});
  ContextSet ctxs{std::move(one), SimplexPolicy::uniform(1)};
  ContextualConfig cfg;
  cfg.group_size = 8;
  cfg.delta_v = -0.1;
  cfg.eta = 0.2;
  cfg.total_steps = 4000;
  cfg.update_interval = 250;
  cfg.record_every = 500;
  Rng rng = Rng::stream(3, 0);
  ContextualRunResult res = run_contextual(ctxs, cfg, rng);
  REQUIRE(res.per_context.size() == 1);
  // aggregate equals the one context everywhere
  for (std::size_t i = 0; i < res.aggregate.size(); ++i) {
    CHECK(res.aggregate[i].mean_reward == res.per_context[0].points[i].expected_reward);
  }
  // learning happened: reward improved from the uniform start
  CHECK(res.aggregate.back().mean_reward > res.aggregate.front().mean_reward);
}

TEST_CASE("group size one freezes learning under a pure empirical baseline") {
  // with G = 1 the advantage r - vhat is identically zero when delta_v = 0
  std::vector<BanditContext> one;
  one.push_back({RewardModel{{1.0, -1.0}}, LogitPolicy::zeros(2)});
  ContextSet ctxs{std::move(one), SimplexPolicy::uniform(1)};
  ContextualConfig cfg;
  cfg.group_size = 1;
  cfg.delta_v = 0.0;
  cfg.eta = 0.5;
  cfg.total_steps = 200;
  cfg.update_interval = 50;
  cfg.record_every = 200;
  ContextualState st = ContextualState::init(ctxs, cfg.delta_v);
  Rng rng(5);
  for (int s = 0; s < 200; ++s) contextual_step(st, ctxs, cfg, rng);
  CHECK(st.logits[0][0] == 0.0);
  CHECK(st.logits[0][1] == 0.0);
}

TEST_CASE("context sets validate their shape") {
  std::vector<BanditContext> bad;
  bad.push_back({RewardModel{{1.0}}, LogitPolicy::zeros(1)});
  ContextSet one_arm{std::move(bad), SimplexPolicy::uniform(1)};
  CHECK_THROWS_AS(one_arm.validate(), InvalidInputError);

  ContextualConfig cfg;
  cfg.group_size = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidInputError);
}

TEST_CASE("empirical baseline residuals are tracked") {
  ContextSet ctxs = gen_binary_contexts(3, 5, 11);
  ContextualConfig cfg;
  cfg.group_size = 8;
  cfg.delta_v = 0.0;
  cfg.eta = 0.1;
  cfg.total_steps = 1000;
  cfg.update_interval = 250;
  cfg.record_every = 500;
  Rng rng = Rng::stream(11, 0);
  ContextualRunResult res = run_contextual(ctxs, cfg, rng);
  CHECK(res.vhat_residual_count == 1000);
  // residual of a mean of 8 draws from rewards in [-1, 1]: std below 1
  CHECK(std::abs(res.vhat_residual_mean) < 0.5);
  CHECK(res.vhat_residual_std > 0.0);
  CHECK(res.vhat_residual_std < 1.0);
}
