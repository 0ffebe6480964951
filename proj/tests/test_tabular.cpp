#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "support/dp_oracle.hpp"
#include "vdfp/tabular.hpp"

using namespace vdfp;

namespace {

// Deterministic 2-state chain: action always advances s -> 1 - s.
TabularMDP flip_chain(int horizon, double r0 = 1.0, double r1 = 1.0) {
  TabularMDP m;
  m.n_states = 2;
  m.n_actions = 1;
  m.horizon = horizon;
  m.transition = {0, 1, 1, 0};  // [s][a=0][s']
  m.reward = {r0, r1};
  m.initial = {1.0, 0.0};
  return m;
}

TabularPolicy single_action_policy(int n_states) {
  TabularPolicy p;
  p.n_states = n_states;
  p.n_actions = 1;
  p.probs.assign(n_states, 1.0);
  return p;
}

}  // namespace

TEST_CASE("enumeration") {
  SECTION("a deterministic MDP and policy give one trajectory of probability 1") {
    TabularMDP m = flip_chain(3);
    auto trajs = enumerate_trajectories(m, single_action_policy(2), 0, 0);
    REQUIRE(trajs.size() == 1);
    CHECK(trajs[0].prob == 1.0);
    CHECK(trajs[0].states == std::vector<int>{0, 1, 0, 1});
  }
  SECTION("probabilities always sum to one") {
    Rng rng(1);
    for (int trial = 0; trial < 50; ++trial) {
      TabularMDP m = random_tabular_mdp(rng, rng.uniform_int(2, 4), rng.uniform_int(2, 3),
                                        rng.uniform_int(1, 3));
      TabularPolicy pol = random_tabular_policy(rng, m.n_states, m.n_actions);
      auto trajs = enumerate_trajectories(m, pol, 0, 0);
      double sum = 0.0;
      for (const auto& t : trajs) sum += t.prob;
      CHECK(sum == Catch::Approx(1.0).margin(1e-10));
    }
  }
  SECTION("a symmetric two-state chain splits evenly") {
    TabularMDP m = flip_chain(1);
    m.transition = {0.5, 0.5, 0.5, 0.5};
    auto trajs = enumerate_trajectories(m, single_action_policy(2), 0, 0);
    REQUIRE(trajs.size() == 2);
    CHECK(trajs[0].prob == Catch::Approx(0.5));
    CHECK(trajs[1].prob == Catch::Approx(0.5));
  }
  SECTION("oversized enumerations are rejected") {
    Rng rng(2);
    TabularMDP m = random_tabular_mdp(rng, 5, 3, 4);
    TabularPolicy pol = random_tabular_policy(rng, 5, 3);
    CHECK_THROWS_AS(enumerate_trajectories(m, pol, 0, 0, /*budget=*/1000), std::runtime_error);
  }
  SECTION("invalid transition rows are rejected") {
    TabularMDP m = flip_chain(1);
    m.transition[0] = 0.4;  // row no longer sums to 1
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  }
}

TEST_CASE("exact q") {
  SECTION("horizon zero is the immediate reward") {
    TabularMDP m = flip_chain(0, 2.5, -1.0);
    CHECK(exact_q(m, single_action_policy(2), 0.9, 0, 0) == Catch::Approx(2.5));
  }
  SECTION("deterministic chain with unit rewards and gamma 0.5") {
    TabularMDP m = flip_chain(1);  // rewards 1 at t=0 and t=1
    CHECK(exact_q(m, single_action_policy(2), 0.5, 0, 0) == Catch::Approx(1.5));
  }
  SECTION("matches backward-induction dynamic programming on 100 random MDPs") {
    Rng rng(3);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      int ns = rng.uniform_int(2, 4), na = rng.uniform_int(2, 3), T = rng.uniform_int(1, 3);
      TabularMDP m = random_tabular_mdp(rng, ns, na, T);
      TabularPolicy pol = random_tabular_policy(rng, ns, na);
      int s0 = rng.uniform_int(0, ns - 1), a0 = rng.uniform_int(0, na - 1);
      double q1 = exact_q(m, pol, 0.9, s0, a0);
      double q2 = vdfp::testing::backward_induction_q(m, pol, 0.9, s0, a0);
      worst = std::max(worst, std::abs(q1 - q2));
    }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("exact p") {
  TabularMDP m = flip_chain(2, 1.0, 3.0);
  auto pol = single_action_policy(2);

  SECTION("deterministic MDP: P equals f of the unique trajectory") {
    auto f = discounted_reward_features(m, 0.5);
    auto trajs = enumerate_trajectories(m, pol, 0, 0);
    auto p = exact_p(m, pol, f, 0, 0);
    CHECK(p == f(trajs[0]));
  }
  SECTION("a constant f passes through") {
    TrajFeatureFn f = [](const WeightedTrajectory&) { return std::vector<double>{4.0, -2.0}; };
    auto p = exact_p(m, pol, f, 0, 0);
    CHECK(p == std::vector<double>{4.0, -2.0});
  }
  SECTION("two equiprobable outcomes average to the midpoint") {
    TabularMDP half = flip_chain(1, 0.0, 0.0);
    half.transition = {0.5, 0.5, 0.5, 0.5};
    TrajFeatureFn f = [](const WeightedTrajectory& tau) {
      return std::vector<double>{static_cast<double>(tau.states[1])};
    };
    auto p = exact_p(half, pol, f, 0, 0);
    CHECK(p[0] == Catch::Approx(0.5));
  }
}

TEST_CASE("lemma 1 oracle") {
  const double gamma = 0.9;

  SECTION("an affine head consistent with the return is exact on random MDPs") {
    Rng rng(4);
    double worst_gap = 0.0, worst_q = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      int ns = rng.uniform_int(2, 4), na = rng.uniform_int(2, 3), T = rng.uniform_int(1, 3);
      TabularMDP m = random_tabular_mdp(rng, ns, na, T);
      TabularPolicy pol = random_tabular_policy(rng, ns, na);
      int s0 = rng.uniform_int(0, ns - 1), a0 = rng.uniform_int(0, na - 1);
      auto res = check_lemma1(m, pol, discounted_reward_features(m, gamma), summation_return(),
                              gamma, s0, a0);
      worst_gap = std::max(worst_gap, std::abs(res.gap));
      worst_q = std::max(worst_q, std::abs(res.q - res.exact_return_q));
    }
    CHECK(worst_gap < 1e-10);
    CHECK(worst_q < 1e-10);  // U(f(tau)) reproduces the discounted return
  }

  SECTION("a convex relu head never overshoots the expectation") {
    Rng rng(5);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      int ns = rng.uniform_int(2, 4), na = rng.uniform_int(2, 3), T = rng.uniform_int(1, 3);
      TabularMDP m = random_tabular_mdp(rng, ns, na, T);
      TabularPolicy pol = random_tabular_policy(rng, ns, na);
      int s0 = rng.uniform_int(0, ns - 1), a0 = rng.uniform_int(0, na - 1);
      const int dim = T + 1, hidden = 5;
      std::vector<double> w1(hidden * dim), b1(hidden), w2(hidden);
      for (auto& v : w1) v = rng.uniform(-1, 1);
      for (auto& v : b1) v = rng.uniform(-0.5, 0.5);
      for (auto& v : w2) v = rng.uniform(0.0, 1.0);  // nonnegative: keeps U convex
      ReturnFn convex = [=](std::span<const double> x) {
        double out = 0.0;
        for (int j = 0; j < hidden; ++j) {
          double pre = b1[j];
          for (int i = 0; i < dim; ++i) pre += w1[j * dim + i] * x[i];
          out += w2[j] * std::max(0.0, pre);
        }
        return out;
      };
      auto res = check_lemma1(m, pol, discounted_reward_features(m, gamma), convex, gamma, s0, a0);
      worst = std::max(worst, -res.gap);
    }
    CHECK(worst < 1e-10);
  }

  SECTION("point-mass futures have zero gap for any head") {
    TabularMDP m = flip_chain(3, 0.7, -1.2);
    auto pol = single_action_policy(2);
    ReturnFn arbitrary = [](std::span<const double> x) {
      double out = 1.0;
      for (double v : x) out += v * v * v + std::sin(v);
      return out;
    };
    auto res = check_lemma1(m, pol, discounted_reward_features(m, gamma), arbitrary, gamma, 0, 0);
    CHECK(res.gap == Catch::Approx(0.0).margin(1e-12));
  }

  SECTION("the Jensen gap grows with outcome spread") {
    // One action; from state 0 the chain jumps to reward +s or -s equally:
    // with U(x) = (sum x)^2 the gap is the variance, monotone in s.
    auto make = [](double spread) {
      TabularMDP m;
      m.n_states = 3;
      m.n_actions = 1;
      m.horizon = 1;
      m.transition = {0.0, 0.5, 0.5,   // from 0
                      0.0, 1.0, 0.0,   // from 1 (self)
                      0.0, 0.0, 1.0};  // from 2 (self)
      m.reward = {0.0, spread, -spread};
      m.initial = {1, 0, 0};
      return m;
    };
    ReturnFn square_sum = [](std::span<const double> x) {
      double s = 0.0;
      for (double v : x) s += v;
      return s * s;
    };
    auto pol = single_action_policy(3);
    double prev = -1.0;
    for (double spread : {0.0, 0.5, 1.0, 2.0}) {
      TabularMDP m = make(spread);
      auto res =
          check_lemma1(m, pol, discounted_reward_features(m, gamma), square_sum, gamma, 0, 0);
      if (spread == 0.0) CHECK(res.gap == Catch::Approx(0.0).margin(1e-12));
      CHECK(res.gap >= prev);
      prev = res.gap;
    }
    CHECK(prev > 0.0);
  }
}
