#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "vdfp/array.hpp"
#include "vdfp/rng.hpp"
#include "vdfp/tape.hpp"

namespace vdfp {

// Named flat collection of learnable arrays. Registration order is kept so
// that optimizer sweeps are deterministic.
struct ParamStore {
  std::vector<std::string> order;
  std::unordered_map<std::string, Array> values;

  Array& add(const std::string& name, Array a) {
    auto [it, fresh] = values.emplace(name, std::move(a));
    if (!fresh) throw std::invalid_argument("param '" + name + "' already registered");
    order.push_back(name);
    return it->second;
  }

  bool has(const std::string& name) const { return values.count(name) != 0; }

  const Array& at(const std::string& name) const {
    auto it = values.find(name);
    if (it == values.end()) throw std::invalid_argument("unknown param '" + name + "'");
    return it->second;
  }

  Array& at(const std::string& name) {
    auto it = values.find(name);
    if (it == values.end()) throw std::invalid_argument("unknown param '" + name + "'");
    return it->second;
  }

  std::int64_t total_size() const {
    std::int64_t n = 0;
    for (const auto& name : order) n += values.at(name).size();
    return n;
  }

  bool operator==(const ParamStore& o) const {
    if (order != o.order) return false;
    for (const auto& name : order) {
      const Array& a = values.at(name);
      const Array& b = o.values.at(name);
      if (a.shape != b.shape || a.data != b.data) return false;
    }
    return true;
  }
};

// Adam with bias correction. One state per store; accumulators are created
// lazily, keyed by parameter name.
struct AdamState {
  double lr;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step = 0;
  std::unordered_map<std::string, Array> m, v;

  explicit AdamState(double lr_) : lr(lr_) {}
};

// One Adam update over every parameter in the store. Parameters without an
// entry in grads receive a zero gradient (they were not on the tape).
inline void adam_step(ParamStore& params, const GradMap& grads, AdamState& st) {
  ++st.step;
  const double bc1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.step));
  const double bc2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.step));
  for (const auto& name : params.order) {
    Array& p = params.values.at(name);
    auto git = grads.find(name);
    const Array* g = git == grads.end() ? nullptr : &git->second;
    if (g && g->shape != p.shape)
      throw std::invalid_argument("adam_step: gradient shape " + shape_str(g->shape) +
                                  " does not match param '" + name + "' " + shape_str(p.shape));
    Array& m = st.m.try_emplace(name, Array::zeros(p.shape)).first->second;
    Array& v = st.v.try_emplace(name, Array::zeros(p.shape)).first->second;
    for (std::int64_t i = 0; i < p.size(); ++i) {
      double gi = g ? g->data[i] : 0.0;
      if (!std::isfinite(gi))
        throw std::runtime_error("adam_step: non-finite gradient in '" + name + "'");
      m.data[i] = st.beta1 * m.data[i] + (1.0 - st.beta1) * gi;
      v.data[i] = st.beta2 * v.data[i] + (1.0 - st.beta2) * gi * gi;
      double mhat = m.data[i] / bc1;
      double vhat = v.data[i] / bc2;
      p.data[i] -= st.lr * mhat / (std::sqrt(vhat) + st.eps);
    }
  }
}

// Fan-in scaled uniform init in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
inline Array uniform_init(std::vector<int> shape, int fan_in, Rng& rng) {
  double b = 1.0 / std::sqrt(static_cast<double>(fan_in));
  Array a = Array::zeros(std::move(shape));
  for (double& x : a.data) x = rng.uniform(-b, b);
  return a;
}

// Registers "<prefix>.w" [in, out] and "<prefix>.b" [out] (bias zero).
inline void add_linear(ParamStore& s, const std::string& prefix, int in, int out, Rng& rng) {
  s.add(prefix + ".w", uniform_init({in, out}, in, rng));
  s.add(prefix + ".b", Array::zeros({out}));
}

// y = x W + b for a [N, in] batch.
inline ValueId linear(Tape& t, ValueId x, ValueId w, ValueId b) {
  return t.add(t.matmul(x, w), b);
}

// Convenience: register the store's arrays as tape leaves and build x W + b.
struct LeafCache {
  Tape* tape;
  const ParamStore* store;
  std::unordered_map<std::string, ValueId> ids;

  LeafCache(Tape& t, const ParamStore& s) : tape(&t), store(&s) {}

  ValueId operator()(const std::string& name) {
    auto it = ids.find(name);
    if (it != ids.end()) return it->second;
    ValueId id = tape->leaf(name, store->at(name));
    ids.emplace(name, id);
    return id;
  }

  ValueId linear(ValueId x, const std::string& prefix) {
    return vdfp::linear(*tape, x, (*this)(prefix + ".w"), (*this)(prefix + ".b"));
  }
};

}  // namespace vdfp
