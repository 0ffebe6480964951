#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "vdfp/params.hpp"
#include "vdfp/replay.hpp"
#include "vdfp/representation.hpp"

namespace vdfp {

enum class ReturnHeadMode { kLinear, kRelu };

// Trajectory return head U: representation -> discounted return. The linear
// mode is a single affine map; the relu mode inserts one 50-unit ReLU layer
// in front of it.
struct ReturnModel {
  ReturnHeadMode mode = ReturnHeadMode::kLinear;
  int repr_dim = 100;
  int hidden = 50;

  void init_params(ParamStore& ps, Rng& rng) const {
    if (mode == ReturnHeadMode::kRelu) {
      add_linear(ps, "ret.hidden", repr_dim, hidden, rng);
      add_linear(ps, "ret.head", hidden, 1, rng);
    } else {
      add_linear(ps, "ret.head", repr_dim, 1, rng);
    }
  }

  // m: [N, repr_dim] -> [N, 1].
  ValueId predict(LeafCache& p, ValueId m) const {
    const Array& mv = p.tape->value(m);
    if (mv.rank() != 2 || mv.shape[1] != repr_dim)
      throw std::invalid_argument("ReturnModel: representation shape " + shape_str(mv.shape) +
                                  " does not match dim " + std::to_string(repr_dim));
    if (mode == ReturnHeadMode::kRelu) return p.linear(p.tape->relu(p.linear(m, "ret.hidden")), "ret.head");
    return p.linear(m, "ret.head");
  }

  double predict_return(const ParamStore& ps, std::span<const double> m) const {
    if (static_cast<int>(m.size()) != repr_dim)
      throw std::invalid_argument("predict_return: got dim " + std::to_string(m.size()) +
                                  ", expected " + std::to_string(repr_dim));
    Tape t;
    LeafCache p(t, ps);
    ValueId mv = t.constant(Array({1, repr_dim}, std::vector<double>(m.begin(), m.end())));
    return t.value(predict(p, mv)).data[0];
  }
};

// Mean squared error between U(f(tau)) and the discounted return of each
// slice; representation and head parameters train jointly through this loss.
inline ValueId return_loss(LeafCache& p, const ReprModel& repr, const ReturnModel& ret,
                           std::span<const TrajectorySlice> batch, double gamma) {
  if (batch.empty()) throw std::invalid_argument("return_loss: empty batch");
  Tape& t = *p.tape;
  ValueId m = repr.build_batch(p, batch);
  ValueId u = ret.predict(p, m);
  Array targets = Array::zeros({static_cast<int>(batch.size()), 1});
  for (std::size_t i = 0; i < batch.size(); ++i)
    targets.data[i] = discounted_return(batch[i].rewards, gamma);
  ValueId diff = t.sub(u, t.constant(std::move(targets)));
  return t.scale(t.sum(t.square(diff)), 1.0 / static_cast<double>(batch.size()));
}

// `steps` Adam updates of the joint representation + return loss on batches
// sampled from the buffer. Dropout is active here and only here.
inline void train_return(const ReprModel& repr, const ReturnModel& ret, ParamStore& ps,
                         AdamState& opt, const ReplayBuffer& buffer, int batch_size, int max_len,
                         int steps, double gamma, Rng& rng) {
  for (int k = 0; k < steps; ++k) {
    auto batch = buffer.sample_slices(batch_size, max_len, rng);
    Tape t(/*train_mode=*/true, &rng);
    LeafCache p(t, ps);
    ValueId loss = return_loss(p, repr, ret, batch, gamma);
    adam_step(ps, t.backward(loss), opt);
  }
}

}  // namespace vdfp
