#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "vdfp/array.hpp"
#include "vdfp/rng.hpp"

namespace vdfp {

using ValueId = int;
using GradMap = std::unordered_map<std::string, Array>;

namespace detail {
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;
using MutMap = Eigen::Map<RowMat>;

inline ConstMap as_mat(const Array& a, int r, int c) { return ConstMap(a.data.data(), r, c); }
inline MutMap as_mat(Array& a, int r, int c) { return MutMap(a.data.data(), r, c); }
}  // namespace detail

// Reverse-mode tape over whole arrays. Each op records its inputs and enough
// saved state to replay the chain rule; construction order is topological, so
// the backward pass is a single reverse sweep visiting each node once.
//
// A tape is single-threaded and lives for one forward/backward cycle.
class Tape {
 public:
  explicit Tape(bool train_mode = false, Rng* rng = nullptr) : train_(train_mode), rng_(rng) {}

  bool train_mode() const { return train_; }

  // ---- graph construction -------------------------------------------------

  // Constant input: participates in forward only, receives no gradient.
  ValueId constant(Array a) { return push(Op::kConstant, {}, std::move(a)); }

  // Named differentiable leaf (a parameter or an input we want gradients for).
  // Names must be unique within one tape.
  ValueId leaf(const std::string& name, const Array& a) {
    if (leaf_ids_.count(name))
      throw std::invalid_argument("tape: duplicate leaf '" + name + "'");
    ValueId id = push(Op::kLeaf, {}, a);
    nodes_[id].leaf_name = name;
    leaf_ids_.emplace(name, id);
    return id;
  }

  ValueId matmul(ValueId a, ValueId b) {
    const Array& A = val(a);
    const Array& B = val(b);
    if (A.rank() != 2 || B.rank() != 2 || A.shape[1] != B.shape[0])
      shape_error("matmul", A, B);
    Array out = Array::zeros({A.shape[0], B.shape[1]});
    detail::as_mat(out, A.shape[0], B.shape[1]).noalias() =
        detail::as_mat(A, A.shape[0], A.shape[1]) * detail::as_mat(B, B.shape[0], B.shape[1]);
    return push(Op::kMatMul, {a, b}, std::move(out));
  }

  // Elementwise add; also broadcasts a rank-1 bias of length n over the rows
  // of a rank-2 [m, n] left operand.
  ValueId add(ValueId a, ValueId b) { return add_like(Op::kAdd, "add", a, b); }
  ValueId sub(ValueId a, ValueId b) { return add_like(Op::kSub, "sub", a, b); }

  // Elementwise multiply with the same broadcast rule as add.
  ValueId mul(ValueId a, ValueId b) { return add_like(Op::kMul, "mul", a, b); }

  ValueId scale(ValueId a, double c) {
    Array out = val(a);
    for (double& v : out.data) v *= c;
    ValueId id = push(Op::kScale, {a}, std::move(out));
    nodes_[id].c0 = c;
    return id;
  }

  ValueId relu(ValueId a) {
    return unary(Op::kRelu, a, [](double x) { return x > 0.0 ? x : 0.0; });
  }
  ValueId sigmoid(ValueId a) {
    return unary(Op::kSigmoid, a, [](double x) { return 1.0 / (1.0 + std::exp(-x)); });
  }
  ValueId tanh(ValueId a) {
    return unary(Op::kTanh, a, [](double x) { return std::tanh(x); });
  }
  ValueId exp(ValueId a) {
    return unary(Op::kExp, a, [](double x) { return std::exp(x); });
  }
  ValueId log(ValueId a) {
    return unary(Op::kLog, a, [](double x) { return std::log(x); });
  }
  ValueId square(ValueId a) {
    return unary(Op::kSquare, a, [](double x) { return x * x; });
  }

  // Values outside [lo, hi] are clamped; their gradient is blocked.
  ValueId clip(ValueId a, double lo, double hi) {
    Array out = val(a);
    for (double& v : out.data) v = std::min(std::max(v, lo), hi);
    ValueId id = push(Op::kClip, {a}, std::move(out));
    nodes_[id].c0 = lo;
    nodes_[id].c1 = hi;
    return id;
  }

  ValueId sum(ValueId a) {
    double s = 0.0;
    for (double v : val(a).data) s += v;
    return push(Op::kSum, {a}, Array::scalar(s));
  }

  ValueId mean(ValueId a) {
    double s = 0.0;
    for (double v : val(a).data) s += v;
    return push(Op::kMean, {a}, Array::scalar(s / static_cast<double>(val(a).size())));
  }

  // Max over axis 0 of a [p, n] matrix -> [n]. The argmax row per column is
  // recorded; ties break toward the lowest row so gradient routing is
  // reproducible. The backward pass sends the gradient only to the argmax.
  ValueId max_over_axis0(ValueId a) {
    const Array& A = val(a);
    if (A.rank() != 2) throw std::invalid_argument("max_over_axis0: need rank-2, got " + shape_str(A.shape));
    int p = A.shape[0], n = A.shape[1];
    Array out = Array::zeros({n});
    std::vector<int> arg(n, 0);
    for (int j = 0; j < n; ++j) {
      double best = A(0, j);
      int bi = 0;
      for (int i = 1; i < p; ++i)
        if (A(i, j) > best) {
          best = A(i, j);
          bi = i;
        }
      out.data[j] = best;
      arg[j] = bi;
    }
    ValueId id = push(Op::kMaxAxis0, {a}, std::move(out));
    nodes_[id].aux = std::move(arg);
    return id;
  }

  // Concatenate along axis 0 (rank-1 vectors end to end, or rank-2 row
  // stacking) or axis 1 (rank-2 column join).
  ValueId concat(std::span<const ValueId> parts, int axis) {
    if (parts.empty()) throw std::invalid_argument("concat: empty input list");
    const Array& first = val(parts[0]);
    Array out;
    std::vector<int> offsets;
    if (axis == 0 && first.rank() == 1) {
      int total = 0;
      for (ValueId p : parts) {
        if (val(p).rank() != 1) shape_error("concat", first, val(p));
        offsets.push_back(total);
        total += val(p).shape[0];
      }
      out = Array::zeros({total});
      for (std::size_t k = 0; k < parts.size(); ++k)
        std::copy(val(parts[k]).data.begin(), val(parts[k]).data.end(),
                  out.data.begin() + offsets[k]);
    } else if (axis == 0 && first.rank() == 2) {
      int total = 0, cols = first.shape[1];
      for (ValueId p : parts) {
        if (val(p).rank() != 2 || val(p).shape[1] != cols) shape_error("concat", first, val(p));
        offsets.push_back(total);
        total += val(p).shape[0];
      }
      out = Array::zeros({total, cols});
      for (std::size_t k = 0; k < parts.size(); ++k)
        std::copy(val(parts[k]).data.begin(), val(parts[k]).data.end(),
                  out.data.begin() + static_cast<std::size_t>(offsets[k]) * cols);
    } else if (axis == 1 && first.rank() == 2) {
      int rows = first.shape[0], total = 0;
      for (ValueId p : parts) {
        if (val(p).rank() != 2 || val(p).shape[0] != rows) shape_error("concat", first, val(p));
        offsets.push_back(total);
        total += val(p).shape[1];
      }
      out = Array::zeros({rows, total});
      for (std::size_t k = 0; k < parts.size(); ++k) {
        const Array& part = val(parts[k]);
        for (int i = 0; i < rows; ++i)
          std::copy(part.data.begin() + static_cast<std::size_t>(i) * part.shape[1],
                    part.data.begin() + static_cast<std::size_t>(i + 1) * part.shape[1],
                    out.data.begin() + static_cast<std::size_t>(i) * total + offsets[k]);
      }
    } else {
      throw std::invalid_argument("concat: unsupported axis/rank combination");
    }
    std::vector<ValueId> in(parts.begin(), parts.end());
    ValueId id = push(Op::kConcat, std::move(in), std::move(out));
    nodes_[id].aux = std::move(offsets);
    nodes_[id].c0 = axis;
    return id;
  }

  ValueId concat(std::initializer_list<ValueId> parts, int axis) {
    return concat(std::span<const ValueId>(parts.begin(), parts.size()), axis);
  }

  // Rows [r0, r1) of a rank-2 value, or elements [r0, r1) of a rank-1 value.
  ValueId slice_rows(ValueId a, int r0, int r1) {
    const Array& A = val(a);
    int n = A.rank() == 1 ? A.shape[0] : A.shape[0];
    if (A.rank() > 2 || r0 < 0 || r1 <= r0 || r1 > n)
      throw std::invalid_argument("slice_rows: bad range [" + std::to_string(r0) + "," +
                                  std::to_string(r1) + ") for shape " + shape_str(A.shape));
    Array out;
    if (A.rank() == 1) {
      out = Array::zeros({r1 - r0});
      std::copy(A.data.begin() + r0, A.data.begin() + r1, out.data.begin());
    } else {
      int c = A.shape[1];
      out = Array::zeros({r1 - r0, c});
      std::copy(A.data.begin() + static_cast<std::size_t>(r0) * c,
                A.data.begin() + static_cast<std::size_t>(r1) * c, out.data.begin());
    }
    ValueId id = push(Op::kSliceRows, {a}, std::move(out));
    nodes_[id].aux = {r0, r1};
    return id;
  }

  ValueId reshape(ValueId a, std::vector<int> shape) {
    const Array& A = val(a);
    if (Array::numel(shape) != A.size())
      throw std::invalid_argument("reshape: cannot view " + shape_str(A.shape) + " as " +
                                  shape_str(shape));
    Array out(std::move(shape), A.data);
    return push(Op::kReshape, {a}, std::move(out));
  }

  // Inverted dropout: in train mode kept entries are scaled by 1/(1-p) and
  // the mask is recorded for the backward pass; in eval mode this is the
  // identity and consumes no randomness.
  ValueId dropout(ValueId a, double p) {
    if (p < 0.0 || p >= 1.0) throw std::invalid_argument("dropout: p out of [0,1)");
    if (!train_ || p == 0.0) return a;
    if (!rng_) throw std::invalid_argument("dropout: train-mode tape has no rng");
    const Array& A = val(a);
    Array out = A;
    std::vector<double> mask(A.data.size());
    double keep = 1.0 - p;
    for (std::size_t i = 0; i < mask.size(); ++i) {
      mask[i] = rng_->uniform(0.0, 1.0) < keep ? 1.0 / keep : 0.0;
      out.data[i] *= mask[i];
    }
    ValueId id = push(Op::kDropout, {a}, std::move(out));
    nodes_[id].mask = std::move(mask);
    return id;
  }

  // 1-D convolution over the time axis. x is a [L, F] feature matrix of which
  // the first valid_rows rows are real data; w is a filter bank [nf, h, F];
  // b is [nf]. Output is the [valid_rows - h + 1, nf] pre-activation map over
  // windows that lie fully inside the valid region.
  ValueId conv1d(ValueId x, ValueId w, ValueId b, int valid_rows) {
    const Array& X = val(x);
    const Array& W = val(w);
    const Array& B = val(b);
    if (X.rank() != 2 || W.rank() != 3 || W.shape[2] != X.shape[1]) shape_error("conv1d", X, W);
    if (B.rank() != 1 || B.shape[0] != W.shape[0]) shape_error("conv1d", W, B);
    int h = W.shape[1], f = W.shape[2], nf = W.shape[0];
    if (valid_rows < h || valid_rows > X.shape[0])
      throw std::invalid_argument("conv1d: valid_rows " + std::to_string(valid_rows) +
                                  " incompatible with height " + std::to_string(h) +
                                  " and input " + shape_str(X.shape));
    int pos = valid_rows - h + 1;
    detail::RowMat patches = im2col(X, valid_rows, h, f);
    Array out = Array::zeros({pos, nf});
    detail::as_mat(out, pos, nf).noalias() =
        patches * detail::as_mat(W, nf, h * f).transpose();
    for (int i = 0; i < pos; ++i)
      for (int j = 0; j < nf; ++j) out(i, j) += B.data[j];
    ValueId id = push(Op::kConv1d, {x, w, b}, std::move(out));
    nodes_[id].aux = {valid_rows, h, f, nf};
    return id;
  }

  const Array& value(ValueId id) const { return nodes_[check(id)].value; }

  std::size_t num_nodes() const { return nodes_.size(); }

  // ---- backward -----------------------------------------------------------

  // Reverse sweep from a scalar root. Returns the gradient for every leaf
  // reachable from the root; leaves not on the path simply have no entry
  // (callers treat missing entries as zero).
  GradMap backward(ValueId root) const {
    const Array& r = val(root);
    if (r.size() != 1)
      throw std::invalid_argument("backward: root must be scalar, got shape " + shape_str(r.shape));
    std::vector<Array> adj(nodes_.size());
    adj[root] = Array::full(r.shape, 1.0);
    for (int id = root; id >= 0; --id) {
      if (adj[id].data.empty()) continue;  // not reachable from the root
      accumulate_inputs(id, adj);
    }
    GradMap grads;
    for (const auto& [name, id] : leaf_ids_)
      if (id <= root && !adj[id].data.empty()) grads.emplace(name, std::move(adj[id]));
    return grads;
  }

 private:
  enum class Op {
    kConstant,
    kLeaf,
    kMatMul,
    kAdd,
    kSub,
    kMul,
    kScale,
    kRelu,
    kSigmoid,
    kTanh,
    kExp,
    kLog,
    kSquare,
    kClip,
    kSum,
    kMean,
    kMaxAxis0,
    kConcat,
    kSliceRows,
    kReshape,
    kDropout,
    kConv1d,
  };

  struct Node {
    Op op;
    std::vector<ValueId> inputs;
    Array value;
    double c0 = 0.0, c1 = 0.0;
    std::vector<int> aux;
    std::vector<double> mask;
    std::string leaf_name;
  };

  ValueId push(Op op, std::vector<ValueId> inputs, Array value) {
    nodes_.push_back(Node{op, std::move(inputs), std::move(value)});
    return static_cast<ValueId>(nodes_.size() - 1);
  }

  ValueId check(ValueId id) const {
    if (id < 0 || id >= static_cast<ValueId>(nodes_.size()))
      throw std::invalid_argument("tape: bad value id " + std::to_string(id));
    return id;
  }

  const Array& val(ValueId id) const { return nodes_[check(id)].value; }

  [[noreturn]] static void shape_error(const char* op, const Array& a, const Array& b) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " + shape_str(a.shape) +
                                " vs " + shape_str(b.shape));
  }

  static bool row_broadcast(const Array& a, const Array& b) {
    return a.rank() == 2 && b.rank() == 1 && b.shape[0] == a.shape[1];
  }

  ValueId add_like(Op op, const char* name, ValueId a, ValueId b) {
    const Array& A = val(a);
    const Array& B = val(b);
    Array out;
    if (A.same_shape(B)) {
      out = A;
      if (op == Op::kAdd)
        for (std::int64_t i = 0; i < A.size(); ++i) out.data[i] += B.data[i];
      else if (op == Op::kSub)
        for (std::int64_t i = 0; i < A.size(); ++i) out.data[i] -= B.data[i];
      else
        for (std::int64_t i = 0; i < A.size(); ++i) out.data[i] *= B.data[i];
    } else if (row_broadcast(A, B)) {
      out = A;
      int m = A.shape[0], n = A.shape[1];
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
          double& v = out.data[static_cast<std::size_t>(i) * n + j];
          if (op == Op::kAdd)
            v += B.data[j];
          else if (op == Op::kSub)
            v -= B.data[j];
          else
            v *= B.data[j];
        }
    } else {
      shape_error(name, A, B);
    }
    return push(op, {a, b}, std::move(out));
  }

  template <class F>
  ValueId unary(Op op, ValueId a, F&& f) {
    Array out = val(a);
    for (double& v : out.data) v = f(v);
    return push(op, {a}, std::move(out));
  }

  static detail::RowMat im2col(const Array& x, int valid_rows, int h, int f) {
    int pos = valid_rows - h + 1;
    detail::RowMat m(pos, h * f);
    for (int i = 0; i < pos; ++i)
      for (int r = 0; r < h; ++r)
        for (int c = 0; c < f; ++c) m(i, r * f + c) = x(i + r, c);
    return m;
  }

  Array& grad_buf(std::vector<Array>& adj, ValueId id) const {
    if (adj[id].data.empty()) adj[id] = Array::zeros(nodes_[id].value.shape);
    return adj[id];
  }

  void accumulate_inputs(ValueId id, std::vector<Array>& adj) const {
    const Node& n = nodes_[id];
    const Array& g = adj[id];
    switch (n.op) {
      case Op::kConstant:
      case Op::kLeaf:
        return;
      case Op::kMatMul: {
        const Array& A = val(n.inputs[0]);
        const Array& B = val(n.inputs[1]);
        int m = A.shape[0], k = A.shape[1], c = B.shape[1];
        auto G = detail::as_mat(g, m, c);
        detail::as_mat(grad_buf(adj, n.inputs[0]), m, k).noalias() +=
            G * detail::as_mat(B, k, c).transpose();
        detail::as_mat(grad_buf(adj, n.inputs[1]), k, c).noalias() +=
            detail::as_mat(A, m, k).transpose() * G;
        return;
      }
      case Op::kAdd:
      case Op::kSub:
      case Op::kMul: {
        const Array& A = val(n.inputs[0]);
        const Array& B = val(n.inputs[1]);
        Array& da = grad_buf(adj, n.inputs[0]);
        Array& db = grad_buf(adj, n.inputs[1]);
        double sign = n.op == Op::kSub ? -1.0 : 1.0;
        if (A.same_shape(B)) {
          for (std::int64_t i = 0; i < g.size(); ++i) {
            if (n.op == Op::kMul) {
              da.data[i] += g.data[i] * B.data[i];
              db.data[i] += g.data[i] * A.data[i];
            } else {
              da.data[i] += g.data[i];
              db.data[i] += sign * g.data[i];
            }
          }
        } else {  // row broadcast of B over A
          int m = A.shape[0], c = A.shape[1];
          for (int i = 0; i < m; ++i)
            for (int j = 0; j < c; ++j) {
              double gv = g.data[static_cast<std::size_t>(i) * c + j];
              if (n.op == Op::kMul) {
                da.data[static_cast<std::size_t>(i) * c + j] += gv * B.data[j];
                db.data[j] += gv * A.data[static_cast<std::size_t>(i) * c + j];
              } else {
                da.data[static_cast<std::size_t>(i) * c + j] += gv;
                db.data[j] += sign * gv;
              }
            }
        }
        return;
      }
      case Op::kScale: {
        Array& da = grad_buf(adj, n.inputs[0]);
        for (std::int64_t i = 0; i < g.size(); ++i) da.data[i] += n.c0 * g.data[i];
        return;
      }
      case Op::kRelu: {
        const Array& A = val(n.inputs[0]);
        Array& da = grad_buf(adj, n.inputs[0]);
        for (std::int64_t i = 0; i < g.size(); ++i)
          if (A.data[i] > 0.0) da.data[i] += g.data[i];
        return;
      }
      case Op::kSigmoid: {
        Array& da = grad_buf(adj, n.inputs[0]);
        for (std::int64_t i = 0; i < g.size(); ++i) {
          double s = n.value.data[i];
          da.data[i] += g.data[i] * s * (1.0 - s);
        }
        return;
      }
      case Op::kTanh: {
        Array& da = grad_buf(adj, n.inputs[0]);
        for (std::int64_t i = 0; i < g.size(); ++i) {
          double t = n.value.data[i];
          da.data[i] += g.data[i] * (1.0 - t * t);
        }
        return;
      }
      case Op::kExp: {
        Array& da = grad_buf(adj, n.inputs[0]);
        for (std::int64_t i = 0; i < g.size(); ++i) da.data[i] += g.data[i] * n.value.data[i];
        return;
      }
      case Op::kLog: {
        const Array& A = val(n.inputs[0]);
        Array& da = grad_buf(adj, n.inputs[0]);
        for (std::int64_t i = 0; i < g.size(); ++i) da.data[i] += g.data[i] / A.data[i];
        return;
      }
      case Op::kSquare: {
        const Array& A = val(n.inputs[0]);
        Array& da = grad_buf(adj, n.inputs[0]);
        for (std::int64_t i = 0; i < g.size(); ++i) da.data[i] += g.data[i] * 2.0 * A.data[i];
        return;
      }
      case Op::kClip: {
        const Array& A = val(n.inputs[0]);
        Array& da = grad_buf(adj, n.inputs[0]);
        for (std::int64_t i = 0; i < g.size(); ++i)
          if (A.data[i] >= n.c0 && A.data[i] <= n.c1) da.data[i] += g.data[i];
        return;
      }
      case Op::kSum: {
        Array& da = grad_buf(adj, n.inputs[0]);
        for (double& v : da.data) v += g.data[0];
        return;
      }
      case Op::kMean: {
        Array& da = grad_buf(adj, n.inputs[0]);
        double s = g.data[0] / static_cast<double>(da.size());
        for (double& v : da.data) v += s;
        return;
      }
      case Op::kMaxAxis0: {
        const Array& A = val(n.inputs[0]);
        Array& da = grad_buf(adj, n.inputs[0]);
        int cols = A.shape[1];
        for (int j = 0; j < cols; ++j)
          da.data[static_cast<std::size_t>(n.aux[j]) * cols + j] += g.data[j];
        return;
      }
      case Op::kConcat: {
        int axis = static_cast<int>(n.c0);
        if (axis == 0) {
          int cols = n.value.rank() == 2 ? n.value.shape[1] : 1;
          for (std::size_t k = 0; k < n.inputs.size(); ++k) {
            Array& di = grad_buf(adj, n.inputs[k]);
            std::size_t off = static_cast<std::size_t>(n.aux[k]) * cols;
            for (std::int64_t i = 0; i < di.size(); ++i) di.data[i] += g.data[off + i];
          }
        } else {
          int rows = n.value.shape[0], total = n.value.shape[1];
          for (std::size_t k = 0; k < n.inputs.size(); ++k) {
            Array& di = grad_buf(adj, n.inputs[k]);
            int c = di.shape[1];
            for (int i = 0; i < rows; ++i)
              for (int j = 0; j < c; ++j)
                di.data[static_cast<std::size_t>(i) * c + j] +=
                    g.data[static_cast<std::size_t>(i) * total + n.aux[k] + j];
          }
        }
        return;
      }
      case Op::kSliceRows: {
        const Array& A = val(n.inputs[0]);
        Array& da = grad_buf(adj, n.inputs[0]);
        int cols = A.rank() == 2 ? A.shape[1] : 1;
        std::size_t off = static_cast<std::size_t>(n.aux[0]) * cols;
        for (std::int64_t i = 0; i < g.size(); ++i) da.data[off + i] += g.data[i];
        return;
      }
      case Op::kReshape: {
        Array& da = grad_buf(adj, n.inputs[0]);
        for (std::int64_t i = 0; i < g.size(); ++i) da.data[i] += g.data[i];
        return;
      }
      case Op::kDropout: {
        Array& da = grad_buf(adj, n.inputs[0]);
        for (std::int64_t i = 0; i < g.size(); ++i) da.data[i] += g.data[i] * n.mask[i];
        return;
      }
      case Op::kConv1d: {
        const Array& X = val(n.inputs[0]);
        const Array& W = val(n.inputs[1]);
        int valid = n.aux[0], h = n.aux[1], f = n.aux[2], nf = n.aux[3];
        int pos = valid - h + 1;
        auto G = detail::as_mat(g, pos, nf);
        auto Wm = detail::as_mat(W, nf, h * f);
        detail::RowMat patches = im2col(X, valid, h, f);
        detail::as_mat(grad_buf(adj, n.inputs[1]), nf, h * f).noalias() +=
            G.transpose() * patches;
        Array& db = grad_buf(adj, n.inputs[2]);
        for (int i = 0; i < pos; ++i)
          for (int j = 0; j < nf; ++j) db.data[j] += G(i, j);
        detail::RowMat dpatch = G * Wm;  // [pos, h*f]
        Array& dx = grad_buf(adj, n.inputs[0]);
        int cols = X.shape[1];
        for (int i = 0; i < pos; ++i)
          for (int r = 0; r < h; ++r)
            for (int c = 0; c < f; ++c)
              dx.data[static_cast<std::size_t>(i + r) * cols + c] += dpatch(i, r * f + c);
        return;
      }
    }
  }

  std::vector<Node> nodes_;
  std::unordered_map<std::string, ValueId> leaf_ids_;
  bool train_;
  Rng* rng_;
};

}  // namespace vdfp
