#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vdfp/rng.hpp"

namespace vdfp {

struct EnvSpec {
  int state_dim = 0;
  int action_dim = 0;
  int horizon = 0;
  std::vector<double> action_low, action_high;
};

struct StepResult {
  std::vector<double> next_state;
  double reward = 0.0;
  bool done = false;
};

// Finite-horizon continuous-control MDP. Dynamics are deterministic given
// (state, action); all stochasticity lives in reset. done is true exactly at
// step `horizon`, and stepping a finished episode is an error.
class Env {
 public:
  virtual ~Env() = default;
  virtual const EnvSpec& spec() const = 0;
  virtual std::vector<double> reset(std::uint64_t seed) = 0;
  virtual StepResult step(std::span<const double> action) = 0;
};

namespace detail {
inline std::vector<double> clip_action(std::span<const double> a, const EnvSpec& s) {
  if (static_cast<int>(a.size()) != s.action_dim)
    throw std::invalid_argument("step: action dim " + std::to_string(a.size()) +
                                " does not match env dim " + std::to_string(s.action_dim));
  std::vector<double> out(a.begin(), a.end());
  for (int i = 0; i < s.action_dim; ++i)
    out[i] = std::min(std::max(out[i], s.action_low[i]), s.action_high[i]);
  return out;
}
}  // namespace detail

// Damped point mass on the plane pushing toward a goal at the origin.
// state (px, py, vx, vy); action = 2-D force in [-1,1]^2.
// v <- 0.95 v + a dt;  p <- p + v dt;  r = -|p| - 0.01 |a|^2.
class PointMass2D : public Env {
 public:
  PointMass2D() {
    spec_.state_dim = 4;
    spec_.action_dim = 2;
    spec_.horizon = 64;
    spec_.action_low = {-1.0, -1.0};
    spec_.action_high = {1.0, 1.0};
  }

  const EnvSpec& spec() const override { return spec_; }

  std::vector<double> reset(std::uint64_t seed) override {
    Rng rng(seed);
    px_ = rng.uniform(-1.0, 1.0);
    py_ = rng.uniform(-1.0, 1.0);
    vx_ = vy_ = 0.0;
    t_ = 0;
    return state();
  }

  StepResult step(std::span<const double> action) override {
    if (t_ >= spec_.horizon) throw std::runtime_error("PointMass2D: step on finished episode");
    auto a = detail::clip_action(action, spec_);
    double r = -std::sqrt(px_ * px_ + py_ * py_) - 0.01 * (a[0] * a[0] + a[1] * a[1]);
    vx_ = 0.95 * vx_ + a[0] * kDt;
    vy_ = 0.95 * vy_ + a[1] * kDt;
    px_ += vx_ * kDt;
    py_ += vy_ * kDt;
    ++t_;
    return {state(), r, t_ >= spec_.horizon};
  }

 private:
  static constexpr double kDt = 0.05;
  std::vector<double> state() const { return {px_, py_, vx_, vy_}; }
  EnvSpec spec_;
  double px_ = 0, py_ = 0, vx_ = 0, vy_ = 0;
  int t_ = 0;
};

// Torque-limited pendulum swing-up with the usual physics.
// state (cos th, sin th, thdot); torque in [-2,2];
// r = -(th^2 + 0.1 thdot^2 + 0.001 a^2) with th wrapped to (-pi, pi].
class Pendulum : public Env {
 public:
  Pendulum() {
    spec_.state_dim = 3;
    spec_.action_dim = 1;
    spec_.horizon = 200;
    spec_.action_low = {-2.0};
    spec_.action_high = {2.0};
  }

  const EnvSpec& spec() const override { return spec_; }

  std::vector<double> reset(std::uint64_t seed) override {
    Rng rng(seed);
    th_ = rng.uniform(-kPi, kPi);
    thdot_ = rng.uniform(-1.0, 1.0);
    t_ = 0;
    return state();
  }

  StepResult step(std::span<const double> action) override {
    if (t_ >= spec_.horizon) throw std::runtime_error("Pendulum: step on finished episode");
    auto a = detail::clip_action(action, spec_);
    double u = a[0];
    double th = wrap(th_);
    double r = -(th * th + 0.1 * thdot_ * thdot_ + 0.001 * u * u);
    double acc = 3.0 * kG / (2.0 * kL) * std::sin(th_) + 3.0 / (kM * kL * kL) * u;
    thdot_ = std::clamp(thdot_ + acc * kDt, -kMaxSpeed, kMaxSpeed);
    th_ += thdot_ * kDt;
    ++t_;
    return {state(), r, t_ >= spec_.horizon};
  }

  // Wraps an angle to (-pi, pi].
  static double wrap(double th) {
    double a = std::fmod(th + kPi, 2.0 * kPi);
    if (a <= 0.0) a += 2.0 * kPi;
    return a - kPi;
  }

 private:
  static constexpr double kPi = 3.14159265358979323846;
  static constexpr double kG = 10.0, kM = 1.0, kL = 1.0, kDt = 0.05, kMaxSpeed = 8.0;
  std::vector<double> state() const { return {std::cos(th_), std::sin(th_), thdot_}; }
  EnvSpec spec_;
  double th_ = 0, thdot_ = 0;
  int t_ = 0;
};

// Delay setting 1: withhold rewards and deliver the accumulated sum every d
// steps and at the end of the episode.
class DelaySparse : public Env {
 public:
  DelaySparse(std::unique_ptr<Env> base, int d) : base_(std::move(base)), d_(d) {
    if (d < 1) throw std::invalid_argument("DelaySparse: d must be >= 1");
  }

  const EnvSpec& spec() const override { return base_->spec(); }

  std::vector<double> reset(std::uint64_t seed) override {
    acc_ = 0.0;
    t_ = 0;
    return base_->reset(seed);
  }

  StepResult step(std::span<const double> action) override {
    StepResult r = base_->step(action);
    ++t_;
    acc_ += r.reward;
    if (t_ % d_ == 0 || r.done) {
      r.reward = acc_;
      acc_ = 0.0;
    } else {
      r.reward = 0.0;
    }
    return r;
  }

 private:
  std::unique_ptr<Env> base_;
  int d_;
  double acc_ = 0.0;
  int t_ = 0;
};

// Delay setting 2: emit each reward d steps late; whatever is still pending
// is paid out on the final step.
class DelayShift : public Env {
 public:
  DelayShift(std::unique_ptr<Env> base, int d) : base_(std::move(base)), d_(d) {
    if (d < 1) throw std::invalid_argument("DelayShift: d must be >= 1");
  }

  const EnvSpec& spec() const override { return base_->spec(); }

  std::vector<double> reset(std::uint64_t seed) override {
    pending_.clear();
    return base_->reset(seed);
  }

  StepResult step(std::span<const double> action) override {
    StepResult r = base_->step(action);
    pending_.push_back(r.reward);
    double out = 0.0;
    if (static_cast<int>(pending_.size()) > d_) {
      out = pending_.front();
      pending_.pop_front();
    }
    if (r.done) {
      for (double v : pending_) out += v;
      pending_.clear();
    }
    r.reward = out;
    return r;
  }

 private:
  std::unique_ptr<Env> base_;
  int d_;
  std::deque<double> pending_;
};

inline std::unique_ptr<Env> make_env(std::string_view name) {
  if (name == "pointmass") return std::make_unique<PointMass2D>();
  if (name == "pendulum") return std::make_unique<Pendulum>();
  throw std::invalid_argument("unknown env '" + std::string(name) + "'");
}

// delay_mode: "none" | "sparse" | "shift"
inline std::unique_ptr<Env> wrap_delay(std::unique_ptr<Env> base, std::string_view mode, int d) {
  if (mode == "none") return base;
  if (mode == "sparse") return std::make_unique<DelaySparse>(std::move(base), d);
  if (mode == "shift") return std::make_unique<DelayShift>(std::move(base), d);
  throw std::invalid_argument("unknown delay mode '" + std::string(mode) + "'");
}

}  // namespace vdfp
