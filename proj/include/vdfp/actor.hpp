#pragma once

#include <algorithm>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "vdfp/params.hpp"
#include "vdfp/return_model.hpp"
#include "vdfp/tape.hpp"

namespace vdfp {

// Deterministic policy: two ReLU layers, tanh output rescaled into the action
// box, so actions are inside bounds by construction.
struct PolicyModel {
  int state_dim = 0;
  int action_dim = 0;
  std::vector<double> low, high;
  int h1 = 200, h2 = 100;
  std::string prefix = "pi";

  void init_params(ParamStore& ps, Rng& rng) const {
    add_linear(ps, prefix + ".l1", state_dim, h1, rng);
    add_linear(ps, prefix + ".l2", h1, h2, rng);
    add_linear(ps, prefix + ".out", h2, action_dim, rng);
  }

  // states: [N, state_dim] -> actions [N, action_dim] within bounds.
  ValueId build(LeafCache& p, ValueId states) const {
    Tape& t = *p.tape;
    ValueId a = t.relu(p.linear(states, prefix + ".l1"));
    ValueId b = t.relu(p.linear(a, prefix + ".l2"));
    ValueId raw = t.tanh(p.linear(b, prefix + ".out"));
    Array center = Array::zeros({action_dim});
    Array half = Array::zeros({action_dim});
    for (int i = 0; i < action_dim; ++i) {
      center.data[i] = 0.5 * (low[i] + high[i]);
      half.data[i] = 0.5 * (high[i] - low[i]);
    }
    return t.add(t.mul(raw, t.constant(std::move(half))), t.constant(std::move(center)));
  }

  std::vector<double> act(const ParamStore& ps, std::span<const double> state) const {
    Tape t;
    LeafCache p(t, ps);
    Array s({1, state_dim}, std::vector<double>(state.begin(), state.end()));
    const Array& out = t.value(build(p, t.constant(std::move(s))));
    return out.data;
  }

  // Gaussian exploration noise, clipped back into the action box.
  std::vector<double> explore(std::span<const double> action, double noise_std, Rng& rng) const {
    std::vector<double> out(action.begin(), action.end());
    for (int i = 0; i < action_dim; ++i) {
      out[i] += noise_std > 0.0 ? rng.normal(0.0, noise_std) : 0.0;
      out[i] = std::min(std::max(out[i], low[i]), high[i]);
    }
    return out;
  }
};

// Builds the predicted future representation for a [N, cond_dim] condition
// batch on the update tape (VAE decoder with clipped noise, or the MLP).
using DynamicsBuilder = std::function<ValueId(LeafCache& dyn_params, ValueId cond)>;

// One ascent step on the composite objective mean U(P(s, pi(s))): gradients
// flow through the frozen dynamics model and return head into the policy
// parameters, and only the policy store is updated.
inline void vdfp_actor_update(const PolicyModel& pi, ParamStore& actor_ps, AdamState& opt,
                              const ParamStore& dyn_ps, const DynamicsBuilder& dynamics,
                              const ReturnModel& ret, const ParamStore& ret_ps,
                              const Array& states /* [N, state_dim] */) {
  Tape t;
  LeafCache actor_leaves(t, actor_ps);
  LeafCache dyn_leaves(t, dyn_ps);
  LeafCache ret_leaves(t, ret_ps);
  ValueId s = t.constant(states);
  ValueId a = pi.build(actor_leaves, s);
  ValueId cond = t.concat({s, a}, 1);
  ValueId m = dynamics(dyn_leaves, cond);
  ValueId objective = t.mean(ret.predict(ret_leaves, m));
  GradMap grads = t.backward(t.scale(objective, -1.0));  // ascend
  adam_step(actor_ps, grads, opt);
}

}  // namespace vdfp
