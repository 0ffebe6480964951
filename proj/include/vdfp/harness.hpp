#pragma once

#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vdfp/actor.hpp"
#include "vdfp/config.hpp"
#include "vdfp/cvae.hpp"
#include "vdfp/ddpg.hpp"
#include "vdfp/env.hpp"
#include "vdfp/replay.hpp"
#include "vdfp/representation.hpp"
#include "vdfp/return_model.hpp"
#include "vdfp/snapshot.hpp"

namespace vdfp {

// Element i is the mean of the last min(i+1, window) values.
inline std::vector<double> smooth(const std::vector<double>& values, int window) {
  if (window < 1) throw std::invalid_argument("smooth: window must be >= 1");
  std::vector<double> out(values.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    acc += values[i];
    if (i >= static_cast<std::size_t>(window)) acc -= values[i - window];
    out[i] = acc / static_cast<double>(std::min<std::size_t>(i + 1, window));
  }
  return out;
}

// Mean undiscounted return of the deterministic policy (no exploration noise,
// no dropout) over n episodes with per-episode seeds derived from `seed`.
// Repeated calls with the same arguments give identical results.
inline double evaluate_policy(const PolicyModel& pi, const ParamStore& ps, Env& env,
                              int n_episodes, std::uint64_t seed) {
  if (n_episodes < 1) throw std::invalid_argument("evaluate_policy: need >= 1 episode");
  Rng rng(seed);
  double total = 0.0;
  for (int e = 0; e < n_episodes; ++e) {
    std::vector<double> s = env.reset(rng.next_seed());
    bool done = false;
    while (!done) {
      StepResult r = env.step(pi.act(ps, s));
      total += r.reward;
      s = std::move(r.next_state);
      done = r.done;
    }
  }
  return total / n_episodes;
}

struct EpisodeRow {
  long episode = 0;
  long total_steps = 0;
  double train_return = 0.0;
  double eval_return = 0.0;
  double smoothed_return = 0.0;
};

struct TrainResult {
  std::vector<EpisodeRow> rows;
  std::map<std::string, ParamStore> final_params;
};

namespace detail {

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

class CsvLog {
 public:
  explicit CsvLog(const std::string& path) : out_(path) {
    if (!out_) throw std::runtime_error("cannot open CSV output '" + path + "'");
    out_ << "episode,total_steps,train_return,eval_return,smoothed_return\n";
    out_.flush();
  }

  void append(const EpisodeRow& r) {
    out_ << r.episode << ',' << r.total_steps << ',' << fmt_double(r.train_return) << ','
         << fmt_double(r.eval_return) << ',' << fmt_double(r.smoothed_return) << '\n';
    out_.flush();
  }

 private:
  std::ofstream out_;
};

// Shared per-episode bookkeeping: the smoothed column is the evaluation
// return smoothed over the most recent 100 episodes.
class EpisodeLogger {
 public:
  EpisodeLogger(const std::string& csv_path) : csv_(csv_path) {}

  void log(std::vector<EpisodeRow>& rows, long steps, double train_return, double latest_eval) {
    window_.push_back(latest_eval);
    if (window_.size() > 100) window_.pop_front();
    double sm = 0.0;
    for (double v : window_) sm += v;
    sm /= static_cast<double>(window_.size());
    EpisodeRow row{static_cast<long>(rows.size()) + 1, steps, train_return, latest_eval, sm};
    rows.push_back(row);
    csv_.append(row);
  }

 private:
  CsvLog csv_;
  std::deque<double> window_;
};

}  // namespace detail

// Runs one experiment end to end and writes the per-episode CSV log
// incrementally. Fully deterministic in (config, seed).
inline TrainResult run_training(const RunConfig& cfg, const std::string& csv_path,
                                const std::string& snapshot_path = {}) {
  cfg.validate();
  Rng rng(cfg.seed);
  std::unique_ptr<Env> env = wrap_delay(make_env(cfg.env), cfg.delay_mode, cfg.delay_steps);
  std::unique_ptr<Env> eval_env = make_env(cfg.env);  // evaluation is delay-free
  const EnvSpec spec = env->spec();
  const int cond_dim = spec.state_dim + spec.action_dim;

  // Evaluation consumes its own seed stream so it cannot disturb training.
  long eval_count = 0;
  ReplayBuffer buffer(cfg.buffer_capacity);

  TrainResult result;
  detail::EpisodeLogger logger(csv_path);

  if (cfg.algo == "ddpg") {
    DdpgAgent agent(spec, cfg.gamma, cfg.resolved_lr_actor(), cfg.lr_critic, rng);
    double latest_eval = evaluate_policy(agent.pi, agent.actor, *eval_env, cfg.eval_episodes,
                                         mix_seed(cfg.seed, eval_count++));
    long gstep = 0;
    while (gstep < cfg.total_steps) {
      std::vector<double> s = env->reset(rng.next_seed());
      Episode ep;
      double ep_ret = 0.0;
      bool done = false;
      while (!done && gstep < cfg.total_steps) {
        std::vector<double> a;
        if (gstep < cfg.collect_steps) {
          a.resize(spec.action_dim);  // warm-up: uniform random actions
          for (int i = 0; i < spec.action_dim; ++i)
            a[i] = rng.uniform(spec.action_low[i], spec.action_high[i]);
        } else {
          a = agent.pi.explore(agent.pi.act(agent.actor, s), cfg.explore_noise, rng);
        }
        StepResult r = env->step(a);
        ep.push(s, a, r.reward);
        ep_ret += r.reward;
        s = std::move(r.next_state);
        done = r.done;
        ++gstep;
        if (gstep > cfg.collect_steps && buffer.size_steps() >= cfg.batch)
          agent.update(sample_transitions(buffer, cfg.batch, rng));
        if (gstep % cfg.eval_every == 0)
          latest_eval = evaluate_policy(agent.pi, agent.actor, *eval_env, cfg.eval_episodes,
                                        mix_seed(cfg.seed, eval_count++));
      }
      if (done) {
        buffer.store_episode(std::move(ep));
        logger.log(result.rows, gstep, ep_ret, latest_eval);
      }
    }
    result.final_params.emplace("actor", agent.actor);
    result.final_params.emplace("critic", agent.critic_ps);
    result.final_params.emplace("actor_target", agent.actor_target);
    result.final_params.emplace("critic_target", agent.critic_target);
    if (!snapshot_path.empty())
      save_snapshot(snapshot_path,
                    {{"actor", &agent.actor}, {"critic", &agent.critic_ps}},
                    {{"env", cfg.env},
                     {"algo", cfg.algo},
                     {"state_dim", std::to_string(spec.state_dim)},
                     {"action_dim", std::to_string(spec.action_dim)}});
    return result;
  }

  // ---- VDFP ----------------------------------------------------------------
  ReprConfig rc;
  rc.feat_dim = cond_dim;
  rc.padded_len = 64;  // the conv stack always sees 64 rows; longer slices aggregate
  rc.max_traj_len = cfg.max_traj_len;
  rc.repr_dim = cfg.repr_dim;
  ReprModel repr(rc);
  ReturnModel ret{cfg.return_head == "relu" ? ReturnHeadMode::kRelu : ReturnHeadMode::kLinear,
                  cfg.repr_dim};
  PolicyModel pi{spec.state_dim, spec.action_dim, spec.action_low, spec.action_high};

  CvaeConfig vc;
  vc.repr_dim = cfg.repr_dim;
  vc.cond_dim = cond_dim;
  vc.z_dim = cfg.z_dim;
  vc.mode = cfg.operator_mode == "concat" ? CondMode::kConcat : CondMode::kPairwise;
  Cvae vae(vc);
  MlpDynamics mlp{cond_dim, cfg.repr_dim};
  const bool use_vae = cfg.dynamics == "vae";

  ParamStore actor_ps, ret_ps, dyn_ps;
  pi.init_params(actor_ps, rng);
  repr.init_params(ret_ps, rng);
  ret.init_params(ret_ps, rng);
  if (use_vae)
    vae.init_params(dyn_ps, rng);
  else
    mlp.init_params(dyn_ps, rng);

  AdamState actor_opt(cfg.resolved_lr_actor());
  AdamState ret_opt(cfg.lr_return);
  AdamState dyn_opt(cfg.lr_vae);

  // Frozen-representation targets for the dynamics model, with conditions
  // taken from each slice's first state-action pair.
  auto dynamics_batch = [&](const std::vector<TrajectorySlice>& batch, Array& m_out,
                            Array& cond_out) {
    int n = static_cast<int>(batch.size());
    m_out = Array::zeros({n, cfg.repr_dim});
    cond_out = Array::zeros({n, cond_dim});
    for (int i = 0; i < n; ++i) {
      Array m = repr.represent(ret_ps, batch[i]);
      std::copy(m.data.begin(), m.data.end(),
                m_out.data.begin() + static_cast<std::size_t>(i) * cfg.repr_dim);
      auto s0 = batch[i].state(0);
      auto a0 = batch[i].action(0);
      double* row = cond_out.data.data() + static_cast<std::size_t>(i) * cond_dim;
      std::copy(s0.begin(), s0.end(), row);
      std::copy(a0.begin(), a0.end(), row + spec.state_dim);
    }
  };

  auto update_dynamics = [&](const std::vector<TrajectorySlice>& batch) {
    Array m_targets, cond;
    dynamics_batch(batch, m_targets, cond);
    Tape t(/*train_mode=*/true, &rng);
    LeafCache p(t, dyn_ps);
    ValueId loss;
    if (use_vae) {
      Array noise = Array::zeros({m_targets.shape[0], cfg.z_dim});
      for (double& v : noise.data) v = rng.normal();
      loss = vae.loss(p, m_targets, cond, noise, cfg.beta);
    } else {
      loss = mlp.loss(p, m_targets, cond);
    }
    adam_step(dyn_ps, t.backward(loss), dyn_opt);
  };

  auto update_actor = [&](const std::vector<TrajectorySlice>& batch) {
    int n = static_cast<int>(batch.size());
    Array states = Array::zeros({n, spec.state_dim});
    for (int i = 0; i < n; ++i) {
      auto s0 = batch[i].state(0);
      std::copy(s0.begin(), s0.end(),
                states.data.begin() + static_cast<std::size_t>(i) * spec.state_dim);
    }
    DynamicsBuilder dyn;
    if (use_vae) {
      Array noise = Array::zeros({n, cfg.z_dim});
      if (cfg.clip_c > 0.0)
        for (double& v : noise.data) {
          v = rng.normal();
          if (std::isfinite(cfg.clip_c)) v = std::min(std::max(v, -cfg.clip_c), cfg.clip_c);
        }
      dyn = [&vae, noise](LeafCache& p, ValueId cond) {
        return vae.decode(p, p.tape->constant(noise), cond);
      };
    } else {
      dyn = [&mlp](LeafCache& p, ValueId cond) { return mlp.build(p, cond); };
    }
    vdfp_actor_update(pi, actor_ps, actor_opt, dyn_ps, dyn, ret, ret_ps, states);
  };

  double latest_eval = evaluate_policy(pi, actor_ps, *eval_env, cfg.eval_episodes,
                                       mix_seed(cfg.seed, eval_count++));
  long gstep = 0;
  while (gstep < cfg.total_steps) {
    std::vector<double> s = env->reset(rng.next_seed());
    Episode ep;
    double ep_ret = 0.0;
    bool done = false;
    while (!done && gstep < cfg.total_steps) {
      std::vector<double> a = pi.explore(pi.act(actor_ps, s), cfg.explore_noise, rng);
      StepResult r = env->step(a);
      ep.push(s, a, r.reward);
      ep_ret += r.reward;
      s = std::move(r.next_state);
      done = r.done;
      ++gstep;

      if (gstep > cfg.collect_steps && !buffer.empty()) {
        const bool pretraining = gstep <= cfg.collect_steps + cfg.pretrain_steps;
        auto batch = buffer.sample_slices(cfg.batch, cfg.max_traj_len, rng);
        update_dynamics(batch);
        if (pretraining) {
          if (gstep % cfg.return_train_every_pretrain == 0)
            train_return(repr, ret, ret_ps, ret_opt, buffer, cfg.batch, cfg.max_traj_len, 1,
                         cfg.gamma, rng);
        } else {
          if (gstep % cfg.return_train_every == 0)
            train_return(repr, ret, ret_ps, ret_opt, buffer, cfg.batch, cfg.max_traj_len, 1,
                         cfg.gamma, rng);
          update_actor(batch);
        }
      }
      if (gstep % cfg.eval_every == 0)
        latest_eval = evaluate_policy(pi, actor_ps, *eval_env, cfg.eval_episodes,
                                      mix_seed(cfg.seed, eval_count++));
    }
    if (done) {
      buffer.store_episode(std::move(ep));
      logger.log(result.rows, gstep, ep_ret, latest_eval);
    }
  }

  result.final_params.emplace("actor", actor_ps);
  result.final_params.emplace("ret", ret_ps);
  result.final_params.emplace(use_vae ? "vae" : "mlp", dyn_ps);
  if (!snapshot_path.empty())
    save_snapshot(snapshot_path,
                  {{"actor", &actor_ps},
                   {"ret", &ret_ps},
                   {use_vae ? "vae" : "mlp", &dyn_ps}},
                  {{"env", cfg.env},
                   {"algo", cfg.algo},
                   {"state_dim", std::to_string(spec.state_dim)},
                   {"action_dim", std::to_string(spec.action_dim)}});
  return result;
}

}  // namespace vdfp
