#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "vdfp/rng.hpp"

namespace vdfp {

// Small finite MDP amenable to exhaustive trajectory enumeration. A
// trajectory here is T+1 state-action pairs (t = 0..T).
struct TabularMDP {
  int n_states = 0;
  int n_actions = 0;
  int horizon = 0;                 // T
  std::vector<double> transition;  // [s][a][s'] row-major
  std::vector<double> reward;      // [s][a]
  std::vector<double> initial;     // rho0 over states

  double p(int s, int a, int s2) const {
    return transition[(static_cast<std::size_t>(s) * n_actions + a) * n_states + s2];
  }
  double r(int s, int a) const { return reward[static_cast<std::size_t>(s) * n_actions + a]; }

  void validate() const {
    if (n_states < 1 || n_actions < 1 || horizon < 0)
      throw std::invalid_argument("TabularMDP: bad sizes");
    for (int s = 0; s < n_states; ++s)
      for (int a = 0; a < n_actions; ++a) {
        double sum = 0.0;
        for (int s2 = 0; s2 < n_states; ++s2) sum += p(s, a, s2);
        if (std::abs(sum - 1.0) > 1e-12)
          throw std::invalid_argument("TabularMDP: transition row (" + std::to_string(s) + "," +
                                      std::to_string(a) + ") sums to " + std::to_string(sum));
      }
  }
};

struct TabularPolicy {
  int n_states = 0;
  int n_actions = 0;
  std::vector<double> probs;  // [s][a]

  double p(int s, int a) const { return probs[static_cast<std::size_t>(s) * n_actions + a]; }
};

struct WeightedTrajectory {
  std::vector<int> states, actions;  // length T+1 each
  double prob = 0.0;
};

// All trajectories starting from the forced (s0, a0), with exact
// probabilities under (MDP transitions, policy). Zero-probability branches
// are dropped; the remaining probabilities sum to 1.
inline std::vector<WeightedTrajectory> enumerate_trajectories(const TabularMDP& mdp,
                                                              const TabularPolicy& pol, int s0,
                                                              int a0,
                                                              std::int64_t budget = 200000) {
  mdp.validate();
  double count = std::pow(static_cast<double>(mdp.n_states) * mdp.n_actions,
                          static_cast<double>(mdp.horizon));
  if (count > static_cast<double>(budget))
    throw std::runtime_error("enumerate_trajectories: " + std::to_string(count) +
                             " branches exceed budget " + std::to_string(budget));

  std::vector<WeightedTrajectory> out;
  WeightedTrajectory cur;
  cur.states = {s0};
  cur.actions = {a0};
  cur.prob = 1.0;

  std::function<void(int)> recurse = [&](int t) {
    if (t == mdp.horizon) {
      out.push_back(cur);
      return;
    }
    int s = cur.states.back(), a = cur.actions.back();
    for (int s2 = 0; s2 < mdp.n_states; ++s2) {
      double pt = mdp.p(s, a, s2);
      if (pt == 0.0) continue;
      for (int a2 = 0; a2 < mdp.n_actions; ++a2) {
        double pa = pol.p(s2, a2);
        if (pa == 0.0) continue;
        cur.states.push_back(s2);
        cur.actions.push_back(a2);
        double saved = cur.prob;
        cur.prob *= pt * pa;
        recurse(t + 1);
        cur.prob = saved;
        cur.states.pop_back();
        cur.actions.pop_back();
      }
    }
  };
  recurse(0);
  return out;
}

inline double trajectory_return(const TabularMDP& mdp, const WeightedTrajectory& tau,
                                double gamma) {
  double g = 1.0, sum = 0.0;
  for (std::size_t t = 0; t < tau.states.size(); ++t) {
    sum += g * mdp.r(tau.states[t], tau.actions[t]);
    g *= gamma;
  }
  return sum;
}

// Q(s, a) by exhaustion: probability-weighted discounted return over every
// trajectory.
inline double exact_q(const TabularMDP& mdp, const TabularPolicy& pol, double gamma, int s,
                      int a) {
  double q = 0.0;
  for (const auto& tau : enumerate_trajectories(mdp, pol, s, a))
    q += tau.prob * trajectory_return(mdp, tau, gamma);
  return q;
}

using TrajFeatureFn = std::function<std::vector<double>(const WeightedTrajectory&)>;
using ReturnFn = std::function<double(std::span<const double>)>;

// Expected representation of the future trajectory under the policy:
// probability-weighted mean of f over all trajectories from (s, a).
inline std::vector<double> exact_p(const TabularMDP& mdp, const TabularPolicy& pol,
                                   const TrajFeatureFn& f, int s, int a) {
  auto trajs = enumerate_trajectories(mdp, pol, s, a);
  std::vector<double> mean;
  for (const auto& tau : trajs) {
    std::vector<double> v = f(tau);
    if (mean.empty()) mean.assign(v.size(), 0.0);
    if (v.size() != mean.size()) throw std::invalid_argument("exact_p: f output dim varies");
    for (std::size_t i = 0; i < v.size(); ++i) mean[i] += tau.prob * v[i];
  }
  return mean;
}

struct Lemma1Result {
  // Expectation of U(f(tau)) over the trajectory distribution. Whenever U o f
  // reproduces the discounted trajectory return, this IS the Q-function; for
  // a general convex U it is the left side of the Jensen bound.
  double q = 0.0;
  double u_of_p = 0.0;  // U applied to the expected representation
  double gap = 0.0;     // q - u_of_p; >= 0 for convex U, 0 for affine U
  double exact_return_q = 0.0;  // plain discounted-return Q, for cross-checks
};

inline Lemma1Result check_lemma1(const TabularMDP& mdp, const TabularPolicy& pol,
                                 const TrajFeatureFn& f, const ReturnFn& U, double gamma, int s,
                                 int a) {
  auto trajs = enumerate_trajectories(mdp, pol, s, a);
  Lemma1Result res;
  std::vector<double> mean;
  for (const auto& tau : trajs) {
    std::vector<double> v = f(tau);
    if (mean.empty()) mean.assign(v.size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) mean[i] += tau.prob * v[i];
    res.q += tau.prob * U(v);
    res.exact_return_q += tau.prob * trajectory_return(mdp, tau, gamma);
  }
  res.u_of_p = U(mean);
  res.gap = res.q - res.u_of_p;
  return res;
}

// Feature map consistent with the trajectory return: component t is
// gamma^t r(s_t, a_t), so that summation weights reproduce the return.
inline TrajFeatureFn discounted_reward_features(const TabularMDP& mdp, double gamma) {
  return [&mdp, gamma](const WeightedTrajectory& tau) {
    std::vector<double> v(tau.states.size());
    double g = 1.0;
    for (std::size_t t = 0; t < v.size(); ++t) {
      v[t] = g * mdp.r(tau.states[t], tau.actions[t]);
      g *= gamma;
    }
    return v;
  };
}

// The summation head paired with discounted_reward_features.
inline ReturnFn summation_return() {
  return [](std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  };
}

// Random dense MDP/policy generators for oracle sweeps.
inline TabularMDP random_tabular_mdp(Rng& rng, int n_states, int n_actions, int horizon) {
  TabularMDP m;
  m.n_states = n_states;
  m.n_actions = n_actions;
  m.horizon = horizon;
  m.transition.resize(static_cast<std::size_t>(n_states) * n_actions * n_states);
  m.reward.resize(static_cast<std::size_t>(n_states) * n_actions);
  m.initial.resize(n_states);
  for (int s = 0; s < n_states; ++s)
    for (int a = 0; a < n_actions; ++a) {
      double sum = 0.0;
      std::vector<double> row(n_states);
      for (int s2 = 0; s2 < n_states; ++s2) {
        row[s2] = rng.uniform(0.05, 1.0);
        sum += row[s2];
      }
      for (int s2 = 0; s2 < n_states; ++s2)
        m.transition[(static_cast<std::size_t>(s) * n_actions + a) * n_states + s2] =
            row[s2] / sum;
      m.reward[static_cast<std::size_t>(s) * n_actions + a] = rng.uniform(-1.0, 1.0);
    }
  double isum = 0.0;
  for (double& v : m.initial) {
    v = rng.uniform(0.05, 1.0);
    isum += v;
  }
  for (double& v : m.initial) v /= isum;
  return m;
}

inline TabularPolicy random_tabular_policy(Rng& rng, int n_states, int n_actions) {
  TabularPolicy p;
  p.n_states = n_states;
  p.n_actions = n_actions;
  p.probs.resize(static_cast<std::size_t>(n_states) * n_actions);
  for (int s = 0; s < n_states; ++s) {
    double sum = 0.0;
    for (int a = 0; a < n_actions; ++a) {
      double v = rng.uniform(0.05, 1.0);
      p.probs[static_cast<std::size_t>(s) * n_actions + a] = v;
      sum += v;
    }
    for (int a = 0; a < n_actions; ++a) p.probs[static_cast<std::size_t>(s) * n_actions + a] /= sum;
  }
  return p;
}

}  // namespace vdfp
