#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "opg/core.hpp"
#include "opg/numeric.hpp"
#include "opg/rng.hpp"

using namespace opg;

TEST_CASE("softmax of equal logits is uniform") {
  SimplexPolicy p = softmax(LogitPolicy({0.0, 0.0, 0.0}));
  for (std::size_t y = 0; y < 3; ++y) CHECK(p[y] == doctest::Approx(1.0 / 3).epsilon(1e-15));
}

TEST_CASE("softmax matches the analytic two-arm value") {
  SimplexPolicy p = softmax(LogitPolicy({std::log(2.0), 0.0}));
  CHECK(p[0] == doctest::Approx(2.0 / 3).epsilon(1e-15));
  CHECK(p[1] == doctest::Approx(1.0 / 3).epsilon(1e-15));
}

TEST_CASE("softmax shifts by the max logit and survives huge values") {
  SimplexPolicy p = softmax(LogitPolicy({1000.0, 0.0}));
  CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p[1] >= 0.0);
  CHECK(p[1] < 1e-300);
}

TEST_CASE("softmax is invariant under constant logit shifts") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_double() * 20);
    std::vector<double> l(n), shifted(n);
    const double c = rng.uniform(-30.0, 30.0);
    for (int y = 0; y < n; ++y) {
      l[y] = rng.uniform(-5.0, 5.0);
      shifted[y] = l[y] + c;
    }
    SimplexPolicy p = softmax(LogitPolicy(l));
    SimplexPolicy q = softmax(LogitPolicy(shifted));
    for (int y = 0; y < n; ++y) CHECK(std::abs(p[y] - q[y]) <= 1e-15);
  }
}

TEST_CASE("non-finite logits are rejected") {
  CHECK_THROWS_AS(LogitPolicy({0.0, std::nan("")}), InvalidInputError);
  CHECK_THROWS_AS(LogitPolicy({0.0, std::numeric_limits<double>::infinity()}),
                  InvalidInputError);
}

TEST_CASE("expected_reward basics") {
  CHECK(expected_reward(SimplexPolicy({1.0, 0.0}), RewardModel({2.0, 0.0})) == 2.0);
  CHECK(expected_reward(SimplexPolicy::uniform(3), RewardModel({9.0, 3.0, -6.0})) ==
        doctest::Approx(2.0).epsilon(1e-15));
  CHECK(expected_reward(SimplexPolicy({0.5, 0.5}), RewardModel({2.0, 0.0})) == 1.0);
  CHECK_THROWS_AS(expected_reward(SimplexPolicy({0.5, 0.5}), RewardModel({1.0, 2.0, 3.0})),
                  InvalidInputError);
}

TEST_CASE("expected_reward is linear in the policy") {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_double() * 10);
    std::vector<double> wp(n), wq(n), r(n);
    for (int y = 0; y < n; ++y) {
      wp[y] = rng.next_double() + 0.01;
      wq[y] = rng.next_double() + 0.01;
      r[y] = rng.uniform(-3.0, 3.0);
    }
    SimplexPolicy p = SimplexPolicy::normalized(wp);
    SimplexPolicy q = SimplexPolicy::normalized(wq);
    RewardModel rm(r);
    const double alpha = rng.next_double();
    std::vector<double> mix(n);
    for (int y = 0; y < n; ++y) mix[y] = alpha * p[y] + (1 - alpha) * q[y];
    const double lhs = expected_reward(SimplexPolicy::normalized(mix), rm);
    const double rhs = alpha * expected_reward(p, rm) + (1 - alpha) * expected_reward(q, rm);
    CHECK(std::abs(lhs - rhs) <= 1e-12);
  }
}

TEST_CASE("entropy basics and bounds") {
  CHECK(entropy(SimplexPolicy({1.0, 0.0, 0.0})) == 0.0);
  CHECK(entropy(SimplexPolicy::uniform(7)) == doctest::Approx(std::log(7.0)).epsilon(1e-14));
  CHECK(entropy(SimplexPolicy({0.5, 0.5})) == doctest::Approx(std::log(2.0)).epsilon(1e-15));

  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_double() * 20);
    std::vector<double> w(n);
    for (double& x : w) x = rng.next_double();
    const double h = entropy(SimplexPolicy::normalized(w));
    CHECK(h >= 0.0);
    CHECK(h <= std::log(static_cast<double>(n)) + 1e-12);
  }
}

TEST_CASE("support thresholds") {
  CHECK(support(SimplexPolicy({0.5, 0.5, 0.0}), 1e-9) == std::vector<std::size_t>{0, 1});
  CHECK(support(SimplexPolicy({1.0 - 1e-12, 1e-12}), 1e-9) == std::vector<std::size_t>{0});
  CHECK(support(SimplexPolicy({0.4, 0.3, 0.3}), 1e-9) == std::vector<std::size_t>{0, 1, 2});
  CHECK_THROWS_AS(support(SimplexPolicy({0.5, 0.5}), 0.0), InvalidInputError);
}

TEST_CASE("advantage profile of the three-arm reference instance") {
  AdvantageProfile adv = advantage_profile(SimplexPolicy::uniform(3),
                                           RewardModel({9.0, 3.0, -6.0}), 0.0);
  CHECK(adv.a[0] == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(adv.a[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(adv.a[2] == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(adv.b == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("advantage profile of the two-arm instance") {
  AdvantageProfile adv =
      advantage_profile(SimplexPolicy({0.5, 0.5}), RewardModel({2.0, 0.0}), 0.0);
  CHECK(adv.a[0] == 1.0);
  CHECK(adv.a[1] == 0.0);
  CHECK(adv.b == 1.0);
}

TEST_CASE("advantage profile vanishes when rewards equal the baseline") {
  AdvantageProfile adv =
      advantage_profile(SimplexPolicy({0.3, 0.7}), RewardModel({1.5, 1.5}), 1.5);
  CHECK(adv.a[0] == 0.0);
  CHECK(adv.a[1] == 0.0);
  CHECK(adv.b == 0.0);
}

TEST_CASE("advantage profile requires full support") {
  CHECK_THROWS_AS(
      advantage_profile(SimplexPolicy({1.0, 0.0}), RewardModel({1.0, 2.0}), 0.0),
      PreconditionError);
}

TEST_CASE("advantage sums match b on random instances") {
  Rng rng(19);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_double() * 40);
    std::vector<double> w(n), r(n);
    for (int y = 0; y < n; ++y) {
      w[y] = rng.next_double() + 0.02;
      r[y] = rng.uniform(-2.0, 2.0);
    }
    AdvantageProfile adv = advantage_profile(SimplexPolicy::normalized(w), RewardModel(r),
                                             rng.uniform(-1.0, 1.0));
    CHECK(std::abs(compensated_sum(adv.a) - adv.b) <= 1e-12);
  }
}

TEST_CASE("regime classification") {
  SimplexPolicy mu = SimplexPolicy::uniform(3);
  CHECK(classify_regime(mu, RewardModel({9, 3, -6}), 0.0).tag == RegimeTag::BelowCritical);

  RewardModel r2({1.0, 0.9, 0.0});
  const Regime above = classify_regime(mu, r2, 0.7);
  CHECK(above.tag == RegimeTag::AboveCritical);
  CHECK(above.v_mu == doctest::Approx(19.0 / 30).epsilon(1e-15));

  const double v_mu = expected_reward(mu, r2);
  CHECK(classify_regime(mu, r2, v_mu).tag == RegimeTag::AtCritical);
  CHECK_THROWS_AS(classify_regime(mu, r2, 0.0, -1.0), InvalidInputError);
}

TEST_CASE("rng streams are reproducible and separated") {
  Rng a = Rng::stream(12345, 0);
  Rng b = Rng::stream(12345, 0);
  Rng c = Rng::stream(12345, 1);
  bool all_equal_ab = true, any_equal_ac = false;
  for (int i = 0; i < 64; ++i) {
    const std::uint64_t xa = a.next_u64();
    if (xa != b.next_u64()) all_equal_ab = false;
    if (xa == c.next_u64()) any_equal_ac = true;
  }
  CHECK(all_equal_ab);
  CHECK(!any_equal_ac);

  Rng d(9);
  for (int i = 0; i < 1000; ++i) {
    const double u = d.next_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("inverse-cdf sampling respects zero-mass arms") {
  SimplexPolicy p({0.0, 1.0, 0.0});
  Rng rng(4);
  for (int i = 0; i < 200; ++i) CHECK(rng.sample(p) == 1);
}

TEST_CASE("simplex validation") {
  CHECK_THROWS_AS(SimplexPolicy({0.5, 0.6}), InvalidInputError);
  CHECK_THROWS_AS(SimplexPolicy({-0.1, 1.1}), InvalidInputError);
  CHECK_THROWS_AS(SimplexPolicy(std::vector<double>{}), InvalidInputError);
  CHECK_THROWS_AS(RewardModel(std::vector<double>{}), InvalidInputError);
  // normalized() clips negatives and rescales
  SimplexPolicy p = SimplexPolicy::normalized({2.0, -1.0, 2.0});
  CHECK(p[0] == 0.5);
  CHECK(p[1] == 0.0);
  CHECK(p[2] == 0.5);
}
