#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <memory>
#include <numeric>

#include "vdfp/env.hpp"

using namespace vdfp;

namespace {

// Replays a fixed reward stream; used to pin down wrapper arithmetic.
class ScriptedEnv : public Env {
 public:
  explicit ScriptedEnv(std::vector<double> rewards) : rewards_(std::move(rewards)) {
    spec_.state_dim = 1;
    spec_.action_dim = 1;
    spec_.horizon = static_cast<int>(rewards_.size());
    spec_.action_low = {-1.0};
    spec_.action_high = {1.0};
  }
  const EnvSpec& spec() const override { return spec_; }
  std::vector<double> reset(std::uint64_t) override {
    t_ = 0;
    return {0.0};
  }
  StepResult step(std::span<const double>) override {
    if (t_ >= spec_.horizon) throw std::runtime_error("scripted env finished");
    double r = rewards_[t_++];
    return {{static_cast<double>(t_)}, r, t_ >= spec_.horizon};
  }

 private:
  EnvSpec spec_;
  std::vector<double> rewards_;
  int t_ = 0;
};

std::vector<double> roll_rewards(Env& env) {
  std::vector<double> out;
  env.reset(0);
  bool done = false;
  std::vector<double> a(env.spec().action_dim, 0.0);
  while (!done) {
    StepResult r = env.step(a);
    out.push_back(r.reward);
    done = r.done;
  }
  return out;
}

}  // namespace

TEST_CASE("reset is seed-deterministic and seed-sensitive") {
  PointMass2D env;
  CHECK(env.reset(7) == env.reset(7));
  CHECK(env.reset(7) != env.reset(8));

  Pendulum pend;
  auto s = pend.reset(3);
  CHECK(s[0] * s[0] + s[1] * s[1] == Catch::Approx(1.0));
  CHECK(pend.reset(3) == pend.reset(3));
}

TEST_CASE("point mass rewards follow the closed form") {
  PointMass2D env;
  env.reset(5);
  // Move to a known state by resetting and inspecting the first step.
  auto s = env.reset(11);
  double px = s[0], py = s[1];
  std::vector<double> a = {0.25, -0.5};
  StepResult r = env.step(a);
  double expected = -std::sqrt(px * px + py * py) - 0.01 * (a[0] * a[0] + a[1] * a[1]);
  CHECK(r.reward == Catch::Approx(expected));
}

TEST_CASE("pendulum reward is zero at the upright fixed point") {
  Pendulum env;
  env.reset(0);
  // The reward is -(th^2 + 0.1 w^2 + 0.001 u^2) of the pre-step state; force
  // the internal state through the wrap helper instead of poking internals.
  CHECK(Pendulum::wrap(0.0) == 0.0);
  CHECK(Pendulum::wrap(2.0 * 3.14159265358979323846) == Catch::Approx(0.0).margin(1e-12));
  CHECK(Pendulum::wrap(3.14159265358979323846) == Catch::Approx(3.14159265358979323846));

  // Scripted check of the closed form via a fresh env whose reset happened to
  // start near upright is flaky; instead verify the formula on the first step.
  auto s = env.reset(12);
  double th = std::atan2(s[1], s[0]);
  double w = s[2];
  StepResult r = env.step(std::vector<double>{0.5});
  CHECK(r.reward == Catch::Approx(-(th * th + 0.1 * w * w + 0.001 * 0.25)));
}

TEST_CASE("episodes terminate exactly at the horizon and reject further steps") {
  PointMass2D env;
  env.reset(1);
  std::vector<double> a = {0.0, 0.0};
  StepResult r;
  for (int t = 0; t < env.spec().horizon; ++t) {
    r = env.step(a);
    CHECK(r.done == (t + 1 == env.spec().horizon));
  }
  CHECK_THROWS(env.step(a));
}

TEST_CASE("actions are clipped to bounds before dynamics") {
  PointMass2D e1, e2;
  e1.reset(4);
  e2.reset(4);
  auto r1 = e1.step(std::vector<double>{5.0, -5.0});
  auto r2 = e2.step(std::vector<double>{1.0, -1.0});
  CHECK(r1.next_state == r2.next_state);
  CHECK(r1.reward == r2.reward);
}

TEST_CASE("sparse delay wrapper") {
  SECTION("d=1 is the identity reward stream") {
    DelaySparse w(std::make_unique<ScriptedEnv>(std::vector<double>{1, 2, 3, 4}), 1);
    CHECK(roll_rewards(w) == std::vector<double>{1, 2, 3, 4});
  }
  SECTION("d=2 accumulates and flushes on schedule") {
    DelaySparse w(std::make_unique<ScriptedEnv>(std::vector<double>{1, 2, 3, 4}), 2);
    CHECK(roll_rewards(w) == std::vector<double>{0, 3, 0, 7});
  }
  SECTION("episode end compensates a partial window") {
    DelaySparse w(std::make_unique<ScriptedEnv>(std::vector<double>{1, 2, 3}), 2);
    CHECK(roll_rewards(w) == std::vector<double>{0, 3, 3});
  }
  SECTION("d < 1 is rejected") {
    CHECK_THROWS_AS(DelaySparse(std::make_unique<PointMass2D>(), 0), std::invalid_argument);
  }
}

TEST_CASE("shift delay wrapper") {
  SECTION("each reward arrives d steps late, remainder at the end") {
    DelayShift w(std::make_unique<ScriptedEnv>(std::vector<double>{1, 2, 3, 4}), 2);
    CHECK(roll_rewards(w) == std::vector<double>{0, 0, 1, 9});
  }
  SECTION("d >= T defers everything to the final step") {
    DelayShift w(std::make_unique<ScriptedEnv>(std::vector<double>{1, 2, 3}), 5);
    CHECK(roll_rewards(w) == std::vector<double>{0, 0, 6});
  }
  SECTION("single-step episode pays out immediately") {
    DelayShift w(std::make_unique<ScriptedEnv>(std::vector<double>{5}), 1);
    CHECK(roll_rewards(w) == std::vector<double>{5});
  }
  SECTION("d < 1 is rejected") {
    CHECK_THROWS_AS(DelayShift(std::make_unique<PointMass2D>(), 0), std::invalid_argument);
  }
}

TEST_CASE("wrappers conserve episode reward and never touch states") {
  Rng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    int len = rng.uniform_int(1, 40);
    std::vector<double> rewards(len);
    for (double& r : rewards) r = rng.uniform(-2.0, 2.0);
    double base_sum = std::accumulate(rewards.begin(), rewards.end(), 0.0);
    for (int d : {1, 2, 3, 7, len, 2 * len}) {
      for (int mode = 0; mode < 2; ++mode) {
        std::unique_ptr<Env> w;
        if (mode == 0)
          w = std::make_unique<DelaySparse>(std::make_unique<ScriptedEnv>(rewards), d);
        else
          w = std::make_unique<DelayShift>(std::make_unique<ScriptedEnv>(rewards), d);
        auto emitted = roll_rewards(*w);
        REQUIRE(emitted.size() == rewards.size());
        double wrapped_sum = std::accumulate(emitted.begin(), emitted.end(), 0.0);
        CHECK(std::abs(wrapped_sum - base_sum) <=
              1e-12 * std::max(1.0, std::abs(base_sum)));
      }
    }
  }
}

TEST_CASE("wrapper state passthrough and reset clears pending rewards") {
  DelayShift w(std::make_unique<ScriptedEnv>(std::vector<double>{1, 2, 3, 4}), 3);
  w.reset(0);
  auto r = w.step(std::vector<double>{0.0});
  CHECK(r.next_state == std::vector<double>{1.0});
  CHECK(r.reward == 0.0);
  // Re-reset mid-episode: the withheld reward must not leak into the new one.
  w.reset(0);
  auto stream = roll_rewards(w);
  CHECK(stream == std::vector<double>{0, 0, 0, 10});
}

TEST_CASE("environment factory") {
  CHECK(make_env("pointmass")->spec().state_dim == 4);
  CHECK(make_env("pendulum")->spec().horizon == 200);
  CHECK_THROWS_AS(make_env("mujoco"), std::invalid_argument);
  CHECK_THROWS_AS(wrap_delay(make_env("pointmass"), "weird", 1), std::invalid_argument);
}
