#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vdfp/params.hpp"
#include "vdfp/replay.hpp"
#include "vdfp/tape.hpp"

namespace vdfp {

// Sum of gamma^(t'-t) r_t' over a reward slice.
inline double discounted_return(std::span<const double> rewards, double gamma) {
  if (rewards.empty()) throw std::invalid_argument("discounted_return: empty rewards");
  double g = 1.0, sum = 0.0;
  for (double r : rewards) {
    sum += g * r;
    g *= gamma;
  }
  return sum;
}

struct ReprConfig {
  int feat_dim = 0;       // state_dim + action_dim
  int padded_len = 64;    // rows of the feature matrix fed to the conv stack
  int max_traj_len = 64;  // raw slice length; > padded_len enables aggregation
  int repr_dim = 100;
  double dropout_p = 0.2;
  std::vector<int> filter_heights{1, 2, 4, 8, 16, 32, 64};
  std::vector<int> filter_counts{20, 20, 10, 10, 5, 5, 5};

  int conv_feat_dim() const {
    int n = 0;
    for (int c : filter_counts) n += c;
    return n;
  }

  bool aggregated() const { return max_traj_len > padded_len; }

  // Consecutive raw rows folded into one aggregated row.
  int group() const { return max_traj_len / padded_len; }

  void validate() const {
    if (feat_dim < 1 || padded_len < 1 || repr_dim < 1 || max_traj_len < 1)
      throw std::invalid_argument("ReprConfig: dims must be positive");
    if (filter_heights.size() != filter_counts.size())
      throw std::invalid_argument("ReprConfig: filter spec size mismatch");
    if (max_traj_len > padded_len && max_traj_len % padded_len != 0)
      throw std::invalid_argument(
          "ReprConfig: an aggregated max_traj_len must be a multiple of padded_len");
    for (int h : filter_heights)
      if (h < 1 || h > padded_len)
        throw std::invalid_argument("ReprConfig: filter height out of range");
  }
};

// Zero-padded per-step feature matrix. Row t is (s_t ++ a_t); rows at and
// beyond valid_len are zero.
struct FeatureMatrix {
  Array rows;  // [padded_len, feat_dim]
  int valid_len = 0;
};

// Direct featurization (no aggregation); slice length must fit padded_len.
inline FeatureMatrix featurize(const TrajectorySlice& slice, const ReprConfig& cfg) {
  int len = slice.length();
  if (len == 0) throw std::invalid_argument("featurize: empty slice");
  if (len > cfg.padded_len)
    throw std::invalid_argument("featurize: slice of " + std::to_string(len) +
                                " steps exceeds padded length " + std::to_string(cfg.padded_len));
  if (slice.state_dim + slice.action_dim != cfg.feat_dim)
    throw std::invalid_argument("featurize: slice dims do not match feat_dim");
  FeatureMatrix fm{Array::zeros({cfg.padded_len, cfg.feat_dim}), len};
  for (int t = 0; t < len; ++t) {
    auto s = slice.state(t);
    auto a = slice.action(t);
    double* row = fm.rows.data.data() + static_cast<std::size_t>(t) * cfg.feat_dim;
    std::copy(s.begin(), s.end(), row);
    std::copy(a.begin(), a.end(), row + slice.state_dim);
  }
  return fm;
}

// Raw per-step features grouped for the aggregation layer: one row per group
// of cfg.group() consecutive steps, each row a flat (group * feat_dim) block,
// zero-padded inside a partial trailing group.
inline FeatureMatrix grouped_features(const TrajectorySlice& slice, const ReprConfig& cfg) {
  int len = slice.length();
  if (len == 0) throw std::invalid_argument("grouped_features: empty slice");
  if (len > cfg.max_traj_len)
    throw std::invalid_argument("grouped_features: slice exceeds max_traj_len");
  int g = cfg.group();
  int groups = (len + g - 1) / g;
  FeatureMatrix fm{Array::zeros({cfg.padded_len, g * cfg.feat_dim}), groups};
  for (int t = 0; t < len; ++t) {
    auto s = slice.state(t);
    auto a = slice.action(t);
    double* row = fm.rows.data.data() +
                  static_cast<std::size_t>(t / g) * (g * cfg.feat_dim) + (t % g) * cfg.feat_dim;
    std::copy(s.begin(), s.end(), row);
    std::copy(a.begin(), a.end(), row + slice.state_dim);
  }
  return fm;
}

// Convolutional trajectory encoder: per-height 1-D convolutions with
// max-over-time pooling, a highway join, dropout, and a final linear map to
// the representation vector. With max_traj_len > padded_len a shared
// fully-connected ReLU layer first folds each group of consecutive steps
// into one row.
struct ReprModel {
  ReprConfig cfg;

  explicit ReprModel(ReprConfig c) : cfg(std::move(c)) { cfg.validate(); }

  void init_params(ParamStore& ps, Rng& rng) const {
    if (cfg.aggregated())
      add_linear(ps, "repr.agg", cfg.group() * cfg.feat_dim, cfg.feat_dim, rng);
    for (std::size_t i = 0; i < cfg.filter_heights.size(); ++i) {
      int h = cfg.filter_heights[i], nf = cfg.filter_counts[i];
      ps.add(conv_name(h) + ".w", uniform_init({nf, h, cfg.feat_dim}, h * cfg.feat_dim, rng));
      ps.add(conv_name(h) + ".b", Array::zeros({nf}));
    }
    int n = cfg.conv_feat_dim();
    add_linear(ps, "repr.highway", n, n, rng);
    add_linear(ps, "repr.out", n, cfg.repr_dim, rng);
  }

  // Pooled conv features for one slice -> [1, conv_feat_dim].
  ValueId build_conv_features(LeafCache& p, const TrajectorySlice& slice) const {
    Tape& t = *p.tape;
    ValueId x;
    int valid;
    if (cfg.aggregated()) {
      FeatureMatrix grouped = grouped_features(slice, cfg);
      valid = grouped.valid_len;
      ValueId raw = t.constant(std::move(grouped.rows));
      x = t.relu(p.linear(raw, "repr.agg"));
    } else {
      FeatureMatrix fm = featurize(slice, cfg);
      valid = fm.valid_len;
      x = t.constant(std::move(fm.rows));
    }
    return pooled_from(p, x, valid);
  }

  // Same pipeline over an externally built feature matrix (already at conv
  // feature width, i.e. post-aggregation when aggregation applies).
  ValueId build_conv_features_from(LeafCache& p, const FeatureMatrix& fm) const {
    Tape& t = *p.tape;
    return pooled_from(p, t.constant(fm.rows), fm.valid_len);
  }

  // Shared tail: highway join, dropout, output map. c is [N, conv_feat_dim].
  ValueId build_tail(LeafCache& p, ValueId c) const {
    Tape& t = *p.tape;
    ValueId pre = p.linear(c, "repr.highway");
    ValueId gate = t.sigmoid(pre);
    ValueId ones = t.constant(Array::full(t.value(gate).shape, 1.0));
    ValueId joint = t.add(t.mul(gate, t.relu(pre)), t.mul(t.sub(ones, gate), t.relu(c)));
    ValueId dropped = t.dropout(joint, cfg.dropout_p);
    return p.linear(dropped, "repr.out");
  }

  // Batch of slices -> [N, repr_dim].
  ValueId build_batch(LeafCache& p, std::span<const TrajectorySlice> batch) const {
    if (batch.empty()) throw std::invalid_argument("ReprModel: empty batch");
    Tape& t = *p.tape;
    std::vector<ValueId> rows;
    rows.reserve(batch.size());
    for (const TrajectorySlice& s : batch) rows.push_back(build_conv_features(p, s));
    ValueId c = rows.size() == 1 ? rows[0] : t.concat(rows, 0);
    return build_tail(p, c);
  }

  // Plain forward for one slice (fresh tape). Used wherever the
  // representation is a regression target or a frozen input.
  Array represent(const ParamStore& ps, const TrajectorySlice& slice, bool train_mode = false,
                  Rng* rng = nullptr) const {
    Tape t(train_mode, rng);
    LeafCache p(t, ps);
    ValueId m = build_batch(p, std::span<const TrajectorySlice>(&slice, 1));
    Array out = t.value(m);
    out.shape = {cfg.repr_dim};
    return out;
  }

  static std::string conv_name(int height) { return "repr.conv_h" + std::to_string(height); }

 private:
  ValueId pooled_from(LeafCache& p, ValueId x, int valid) const {
    Tape& t = *p.tape;
    std::vector<ValueId> feats;
    feats.reserve(cfg.filter_heights.size());
    for (std::size_t i = 0; i < cfg.filter_heights.size(); ++i) {
      int h = cfg.filter_heights[i], nf = cfg.filter_counts[i];
      if (valid < h) {
        // Filter taller than the slice: contributes a zero pooled feature.
        feats.push_back(t.constant(Array::zeros({nf})));
        continue;
      }
      ValueId map = t.conv1d(x, p(conv_name(h) + ".w"), p(conv_name(h) + ".b"), valid);
      feats.push_back(t.max_over_axis0(t.relu(map)));
    }
    return t.reshape(t.concat(feats, 0), {1, cfg.conv_feat_dim()});
  }
};

}  // namespace vdfp
