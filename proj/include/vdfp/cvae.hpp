#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "vdfp/params.hpp"
#include "vdfp/tape.hpp"

namespace vdfp {

// Closed-form KL(N(mean, diag stddev^2) || N(0, I)).
inline double kl_to_standard_normal(std::span<const double> mean, std::span<const double> stddev) {
  if (mean.size() != stddev.size())
    throw std::invalid_argument("kl_to_standard_normal: dimension mismatch");
  double kl = 0.0;
  for (std::size_t i = 0; i < mean.size(); ++i) {
    if (!(stddev[i] > 0.0)) throw std::invalid_argument("kl_to_standard_normal: stddev must be > 0");
    kl += 0.5 * (mean[i] * mean[i] + stddev[i] * stddev[i] - 1.0 - 2.0 * std::log(stddev[i]));
  }
  return kl;
}

enum class CondMode { kPairwise, kConcat };

struct CvaeConfig {
  int repr_dim = 100;
  int cond_dim = 0;  // state_dim + action_dim
  int z_dim = 50;
  int enc_hidden = 400;
  int enc_mid = 200;
  int dec_hidden = 200;
  int dec_mid = 400;
  CondMode mode = CondMode::kPairwise;
  double logstd_clip = 10.0;  // log sigma clamped to +/- this

  void validate() const {
    if (repr_dim < 1 || cond_dim < 1 || z_dim < 1)
      throw std::invalid_argument("CvaeConfig: dims must be positive");
  }
};

// Conditional VAE over trajectory representations: encoder
// q(z | m, s, a) and decoder p(m | z, s, a). In pairwise mode the condition
// stream gates the main stream via sigmoid(cond) * relu(main); in concat
// mode the condition is concatenated to the main input instead.
struct Cvae {
  CvaeConfig cfg;

  explicit Cvae(CvaeConfig c) : cfg(c) { cfg.validate(); }

  void init_params(ParamStore& ps, Rng& rng) const {
    if (cfg.mode == CondMode::kPairwise) {
      add_linear(ps, "vae.enc.main", cfg.repr_dim, cfg.enc_hidden, rng);
      add_linear(ps, "vae.enc.cond", cfg.cond_dim, cfg.enc_hidden, rng);
      add_linear(ps, "vae.dec.latent", cfg.z_dim, cfg.dec_hidden, rng);
      add_linear(ps, "vae.dec.cond", cfg.cond_dim, cfg.dec_hidden, rng);
    } else {
      add_linear(ps, "vae.enc.main", cfg.repr_dim + cfg.cond_dim, cfg.enc_hidden, rng);
      add_linear(ps, "vae.dec.latent", cfg.z_dim + cfg.cond_dim, cfg.dec_hidden, rng);
    }
    add_linear(ps, "vae.enc.h", cfg.enc_hidden, cfg.enc_mid, rng);
    add_linear(ps, "vae.enc.mean", cfg.enc_mid, cfg.z_dim, rng);
    add_linear(ps, "vae.enc.logstd", cfg.enc_mid, cfg.z_dim, rng);
    add_linear(ps, "vae.dec.h", cfg.dec_hidden, cfg.dec_mid, rng);
    add_linear(ps, "vae.dec.out", cfg.dec_mid, cfg.repr_dim, rng);
  }

  struct Latent {
    ValueId mean, log_std, std_dev;  // each [N, z_dim]
  };

  // m: [N, repr_dim], cond: [N, cond_dim].
  Latent encode(LeafCache& p, ValueId m, ValueId cond) const {
    Tape& t = *p.tape;
    ValueId gated;
    if (cfg.mode == CondMode::kPairwise) {
      ValueId main = p.linear(m, "vae.enc.main");
      ValueId cpath = p.linear(cond, "vae.enc.cond");
      gated = t.mul(t.sigmoid(cpath), t.relu(main));
    } else {
      gated = t.relu(p.linear(t.concat({m, cond}, 1), "vae.enc.main"));
    }
    ValueId h = t.relu(p.linear(gated, "vae.enc.h"));
    ValueId mean = p.linear(h, "vae.enc.mean");
    ValueId log_std = t.clip(p.linear(h, "vae.enc.logstd"), -cfg.logstd_clip, cfg.logstd_clip);
    return {mean, log_std, t.exp(log_std)};
  }

  // z = mean + std * noise; the noise is a constant, so gradients flow to the
  // distribution parameters only.
  ValueId reparameterize(Tape& t, const Latent& lat, ValueId noise) const {
    return t.add(lat.mean, t.mul(lat.std_dev, noise));
  }

  // z: [N, z_dim], cond: [N, cond_dim] -> reconstruction [N, repr_dim].
  ValueId decode(LeafCache& p, ValueId z, ValueId cond) const {
    Tape& t = *p.tape;
    ValueId gated;
    if (cfg.mode == CondMode::kPairwise) {
      ValueId latent = p.linear(z, "vae.dec.latent");
      ValueId cpath = p.linear(cond, "vae.dec.cond");
      gated = t.mul(t.sigmoid(cpath), t.relu(latent));
    } else {
      gated = t.relu(p.linear(t.concat({z, cond}, 1), "vae.dec.latent"));
    }
    ValueId h = t.relu(p.linear(gated, "vae.dec.h"));
    return p.linear(h, "vae.dec.out");
  }

  // Summed KL to the standard normal over a [N, z_dim] latent batch.
  ValueId kl(Tape& t, const Latent& lat) const {
    ValueId var = t.square(lat.std_dev);
    ValueId ones = t.constant(Array::full(t.value(var).shape, 1.0));
    ValueId inner = t.sub(t.sub(t.add(t.square(lat.mean), var), ones), t.scale(lat.log_std, 2.0));
    return t.scale(t.sum(inner), 0.5);
  }

  // Mean over the batch of |m - m~|^2 + beta * KL. m enters as a constant
  // target: the representation model receives no gradient from this loss.
  ValueId loss(LeafCache& p, const Array& m_targets, const Array& cond, const Array& noise,
               double beta) const {
    if (beta < 0.0) throw std::invalid_argument("vae loss: beta must be >= 0");
    Tape& t = *p.tape;
    int n = m_targets.shape[0];
    ValueId m = t.constant(m_targets);
    ValueId cnd = t.constant(cond);
    Latent lat = encode(p, m, cnd);
    ValueId z = reparameterize(t, lat, t.constant(noise));
    ValueId recon = decode(p, z, cnd);
    ValueId rec_err = t.sum(t.square(t.sub(m, recon)));
    ValueId total = t.add(rec_err, t.scale(kl(t, lat), beta));
    return t.scale(total, 1.0 / static_cast<double>(n));
  }

  // Generation with clipped prior noise: z ~ Clip(N(0, I), -c, c), decoded
  // under the (state, action) condition. c = 0 is exact and deterministic;
  // c = inf disables clipping.
  Array predict(const ParamStore& ps, std::span<const double> state,
                std::span<const double> action, double c, Rng* rng) const {
    if (c < 0.0) throw std::invalid_argument("predict: clip value must be >= 0");
    Array noise = Array::zeros({1, cfg.z_dim});
    if (c > 0.0) {
      if (!rng) throw std::invalid_argument("predict: c > 0 needs an rng");
      for (double& v : noise.data) {
        v = rng->normal();
        if (std::isfinite(c)) v = std::min(std::max(v, -c), c);
      }
    }
    Tape t;
    LeafCache p(t, ps);
    ValueId out = decode(p, t.constant(std::move(noise)), t.constant(make_cond(state, action)));
    Array m = t.value(out);
    m.shape = {cfg.repr_dim};
    return m;
  }

  Array make_cond(std::span<const double> state, std::span<const double> action) const {
    if (static_cast<int>(state.size() + action.size()) != cfg.cond_dim)
      throw std::invalid_argument("make_cond: state+action dims do not match cond_dim");
    Array c = Array::zeros({1, cfg.cond_dim});
    std::copy(state.begin(), state.end(), c.data.begin());
    std::copy(action.begin(), action.end(), c.data.begin() + state.size());
    return c;
  }
};

// Deterministic MLP alternative to the VAE dynamics model: condition in,
// expected representation out, trained with mean squared error.
struct MlpDynamics {
  int cond_dim = 0;
  int repr_dim = 100;
  int h1 = 200, h2 = 100;

  void init_params(ParamStore& ps, Rng& rng) const {
    add_linear(ps, "mlp.l1", cond_dim, h1, rng);
    add_linear(ps, "mlp.l2", h1, h2, rng);
    add_linear(ps, "mlp.out", h2, repr_dim, rng);
  }

  // cond: [N, cond_dim] -> [N, repr_dim].
  ValueId build(LeafCache& p, ValueId cond) const {
    Tape& t = *p.tape;
    ValueId a = t.relu(p.linear(cond, "mlp.l1"));
    ValueId b = t.relu(p.linear(a, "mlp.l2"));
    return p.linear(b, "mlp.out");
  }

  ValueId loss(LeafCache& p, const Array& m_targets, const Array& cond) const {
    Tape& t = *p.tape;
    ValueId out = build(p, t.constant(cond));
    ValueId err = t.sum(t.square(t.sub(t.constant(m_targets), out)));
    return t.scale(err, 1.0 / static_cast<double>(m_targets.shape[0]));
  }

  Array predict(const ParamStore& ps, std::span<const double> state,
                std::span<const double> action) const {
    Array cond = Array::zeros({1, cond_dim});
    std::copy(state.begin(), state.end(), cond.data.begin());
    std::copy(action.begin(), action.end(), cond.data.begin() + state.size());
    Tape t;
    LeafCache p(t, ps);
    Array m = t.value(build(p, t.constant(std::move(cond))));
    m.shape = {repr_dim};
    return m;
  }
};

}  // namespace vdfp
