#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <stdexcept>
#include <vector>

#include "vdfp/rng.hpp"

namespace vdfp {

// One finished episode, stored flat and immutable. states/actions hold
// length * dim doubles in row-major step order.
struct Episode {
  int state_dim = 0;
  int action_dim = 0;
  std::vector<double> states, actions, rewards;

  int length() const { return static_cast<int>(rewards.size()); }

  void push(std::span<const double> s, std::span<const double> a, double r) {
    if (state_dim == 0) {
      state_dim = static_cast<int>(s.size());
      action_dim = static_cast<int>(a.size());
    }
    states.insert(states.end(), s.begin(), s.end());
    actions.insert(actions.end(), a.begin(), a.end());
    rewards.push_back(r);
  }

  std::span<const double> state(int t) const {
    return {states.data() + static_cast<std::size_t>(t) * state_dim,
            static_cast<std::size_t>(state_dim)};
  }
  std::span<const double> action(int t) const {
    return {actions.data() + static_cast<std::size_t>(t) * action_dim,
            static_cast<std::size_t>(action_dim)};
  }
};

// Contiguous (state, action, reward) piece of one episode, copied out so it
// stays valid independently of buffer eviction.
struct TrajectorySlice {
  std::int64_t episode_id = -1;
  int start = 0;
  int state_dim = 0, action_dim = 0;
  std::vector<double> states, actions, rewards;

  int length() const { return static_cast<int>(rewards.size()); }

  std::span<const double> state(int t) const {
    return {states.data() + static_cast<std::size_t>(t) * state_dim,
            static_cast<std::size_t>(state_dim)};
  }
  std::span<const double> action(int t) const {
    return {actions.data() + static_cast<std::size_t>(t) * action_dim,
            static_cast<std::size_t>(action_dim)};
  }
};

// Episode-oriented replay store. Capacity is counted in steps; when full, the
// oldest episodes are evicted whole, so a stored slice can never straddle an
// eviction boundary.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::int64_t capacity_steps) : capacity_(capacity_steps) {
    if (capacity_steps < 1) throw std::invalid_argument("ReplayBuffer: capacity must be >= 1");
  }

  void store_episode(Episode ep) {
    if (ep.length() == 0) throw std::invalid_argument("store_episode: empty episode");
    if (ep.length() > capacity_)
      throw std::invalid_argument("store_episode: episode of " + std::to_string(ep.length()) +
                                  " steps exceeds capacity " + std::to_string(capacity_));
    steps_ += ep.length();
    episodes_.push_back(std::move(ep));
    ids_.push_back(next_id_++);
    while (steps_ > capacity_) {
      steps_ -= episodes_.front().length();
      episodes_.pop_front();
      ids_.pop_front();
    }
  }

  bool empty() const { return episodes_.empty(); }
  std::int64_t size_steps() const { return steps_; }
  int num_episodes() const { return static_cast<int>(episodes_.size()); }
  const Episode& episode(int i) const { return episodes_[i]; }

  // Uniform episode, then uniform start index within it; the slice is
  // truncated at max_len steps or at the episode end, whichever comes first.
  TrajectorySlice sample_slice(int max_len, Rng& rng) const {
    if (episodes_.empty()) throw std::runtime_error("sample_slice: empty buffer");
    if (max_len < 1) throw std::invalid_argument("sample_slice: max_len must be >= 1");
    int e = rng.uniform_int(0, static_cast<int>(episodes_.size()) - 1);
    const Episode& ep = episodes_[e];
    int start = rng.uniform_int(0, ep.length() - 1);
    int len = std::min(max_len, ep.length() - start);
    TrajectorySlice s;
    s.episode_id = ids_[e];
    s.start = start;
    s.state_dim = ep.state_dim;
    s.action_dim = ep.action_dim;
    s.states.assign(ep.states.begin() + static_cast<std::size_t>(start) * ep.state_dim,
                    ep.states.begin() + static_cast<std::size_t>(start + len) * ep.state_dim);
    s.actions.assign(ep.actions.begin() + static_cast<std::size_t>(start) * ep.action_dim,
                     ep.actions.begin() + static_cast<std::size_t>(start + len) * ep.action_dim);
    s.rewards.assign(ep.rewards.begin() + start, ep.rewards.begin() + start + len);
    return s;
  }

  std::vector<TrajectorySlice> sample_slices(int n, int max_len, Rng& rng) const {
    std::vector<TrajectorySlice> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back(sample_slice(max_len, rng));
    return out;
  }

 private:
  std::int64_t capacity_;
  std::int64_t steps_ = 0;
  std::int64_t next_id_ = 0;
  std::deque<Episode> episodes_;
  std::deque<std::int64_t> ids_;
};

}  // namespace vdfp
