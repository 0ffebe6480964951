#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "vdfp/actor.hpp"
#include "vdfp/env.hpp"
#include "vdfp/params.hpp"
#include "vdfp/replay.hpp"
#include "vdfp/tape.hpp"

namespace vdfp {

// Q-network with the action joined at the second layer.
struct CriticModel {
  int state_dim = 0;
  int action_dim = 0;
  int h1 = 200, h2 = 100;
  std::string prefix = "q";

  void init_params(ParamStore& ps, Rng& rng) const {
    add_linear(ps, prefix + ".l1", state_dim, h1, rng);
    add_linear(ps, prefix + ".l2", h1 + action_dim, h2, rng);
    add_linear(ps, prefix + ".out", h2, 1, rng);
  }

  // states [N, s], actions [N, a] -> q [N, 1].
  ValueId build(LeafCache& p, ValueId states, ValueId actions) const {
    Tape& t = *p.tape;
    ValueId a = t.relu(p.linear(states, prefix + ".l1"));
    ValueId joined = t.concat({a, actions}, 1);
    ValueId b = t.relu(p.linear(joined, prefix + ".l2"));
    return p.linear(b, prefix + ".out");
  }

  double q_value(const ParamStore& ps, std::span<const double> s, std::span<const double> a) const {
    Tape t;
    LeafCache p(t, ps);
    Array sm({1, state_dim}, std::vector<double>(s.begin(), s.end()));
    Array am({1, action_dim}, std::vector<double>(a.begin(), a.end()));
    return t.value(build(p, t.constant(std::move(sm)), t.constant(std::move(am)))).data[0];
  }
};

struct Transition {
  std::vector<double> state, action;
  double reward = 0.0;
  std::vector<double> next_state;  // unused when done
  bool done = false;
};

// Transitions recovered from stored episodes: a 2-step slice yields
// (s, a, r, s'); a 1-step slice can only start at the episode's final step,
// which is the terminal transition.
inline std::vector<Transition> sample_transitions(const ReplayBuffer& buf, int n, Rng& rng) {
  std::vector<Transition> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    TrajectorySlice s = buf.sample_slice(2, rng);
    Transition tr;
    tr.state.assign(s.state(0).begin(), s.state(0).end());
    tr.action.assign(s.action(0).begin(), s.action(0).end());
    tr.reward = s.rewards[0];
    if (s.length() == 2) {
      tr.next_state.assign(s.state(1).begin(), s.state(1).end());
    } else {
      tr.done = true;
    }
    out.push_back(std::move(tr));
  }
  return out;
}

// r + gamma * Q_target(s', pi_target(s')) when the episode continues, r alone
// on the terminal step.
inline double td_target(const CriticModel& critic, const PolicyModel& pi,
                        const ParamStore& critic_target, const ParamStore& actor_target, double r,
                        std::span<const double> next_state, double gamma, bool done) {
  if (done) return r;
  Tape t;
  LeafCache qp(t, critic_target);
  LeafCache ap(t, actor_target);
  Array s({1, pi.state_dim}, std::vector<double>(next_state.begin(), next_state.end()));
  ValueId sv = t.constant(std::move(s));
  ValueId a = pi.build(ap, sv);
  return r + gamma * t.value(critic.build(qp, sv, a)).data[0];
}

inline void soft_update(ParamStore& target, const ParamStore& online, double rho) {
  for (const auto& name : online.order) {
    Array& tgt = target.at(name);
    const Array& src = online.at(name);
    for (std::int64_t i = 0; i < tgt.size(); ++i)
      tgt.data[i] = (1.0 - rho) * tgt.data[i] + rho * src.data[i];
  }
}

// Plain DDPG: MSE critic regression to the TD target, deterministic policy
// ascent on Q(s, pi(s)), soft target tracking. The comparison algorithm for
// the delayed-reward runs.
struct DdpgAgent {
  PolicyModel pi;
  CriticModel critic;
  double gamma = 0.99;
  double tau = 1e-3;

  ParamStore actor, critic_ps, actor_target, critic_target;
  AdamState actor_opt;
  AdamState critic_opt;

  DdpgAgent(const EnvSpec& spec, double gamma_, double lr_actor, double lr_critic, Rng& rng)
      : gamma(gamma_), actor_opt(lr_actor), critic_opt(lr_critic) {
    pi = PolicyModel{spec.state_dim, spec.action_dim, spec.action_low, spec.action_high};
    critic = CriticModel{spec.state_dim, spec.action_dim};
    pi.init_params(actor, rng);
    critic.init_params(critic_ps, rng);
    actor_target = actor;
    critic_target = critic_ps;
  }

  void update(const std::vector<Transition>& batch) {
    int n = static_cast<int>(batch.size());
    if (n == 0) throw std::invalid_argument("ddpg update: empty batch");
    Array states = Array::zeros({n, pi.state_dim});
    Array actions = Array::zeros({n, pi.action_dim});
    Array targets = Array::zeros({n, 1});
    for (int i = 0; i < n; ++i) {
      std::copy(batch[i].state.begin(), batch[i].state.end(),
                states.data.begin() + static_cast<std::size_t>(i) * pi.state_dim);
      std::copy(batch[i].action.begin(), batch[i].action.end(),
                actions.data.begin() + static_cast<std::size_t>(i) * pi.action_dim);
      targets.data[i] = td_target(critic, pi, critic_target, actor_target, batch[i].reward,
                                  batch[i].next_state, gamma, batch[i].done);
    }

    {  // critic regression
      Tape t;
      LeafCache qp(t, critic_ps);
      ValueId q = critic.build(qp, t.constant(states), t.constant(actions));
      ValueId loss = t.mean(t.square(t.sub(q, t.constant(targets))));
      adam_step(critic_ps, t.backward(loss), critic_opt);
    }
    {  // policy ascent through the frozen critic
      Tape t;
      LeafCache ap(t, actor);
      LeafCache qp(t, critic_ps);
      ValueId sv = t.constant(states);
      ValueId a = pi.build(ap, sv);
      ValueId objective = t.mean(critic.build(qp, sv, a));
      adam_step(actor, t.backward(t.scale(objective, -1.0)), actor_opt);
    }
    soft_update(actor_target, actor, tau);
    soft_update(critic_target, critic_ps, tau);
  }
};

}  // namespace vdfp
