// Command-line front end: `train` runs one experiment and logs a CSV,
// `eval` replays a saved policy, `verify` sweeps the exact tabular oracles.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "vdfp/vdfp.hpp"

namespace {

int run_train(const std::string& config_path, const vdfp::RunConfig& overrides,
              const std::vector<std::string>& set_keys, const std::string& out_csv,
              const std::string& save_policy) {
  vdfp::RunConfig cfg;
  if (!config_path.empty()) vdfp::load_config_file(cfg, config_path);
  // CLI flags win over file values; only explicitly given flags are applied.
  for (const auto& key : set_keys) {
    if (key == "env") cfg.env = overrides.env;
    else if (key == "algo") cfg.algo = overrides.algo;
    else if (key == "delay_mode") cfg.delay_mode = overrides.delay_mode;
    else if (key == "delay_steps") cfg.delay_steps = overrides.delay_steps;
    else if (key == "seed") cfg.seed = overrides.seed;
    else if (key == "total_steps") cfg.total_steps = overrides.total_steps;
  }
  cfg.validate();
  std::printf("training %s on %s (delay %s/%d), seed %llu, %ld steps -> %s\n", cfg.algo.c_str(),
              cfg.env.c_str(), cfg.delay_mode.c_str(), cfg.delay_steps,
              static_cast<unsigned long long>(cfg.seed), cfg.total_steps, out_csv.c_str());
  vdfp::TrainResult result = vdfp::run_training(cfg, out_csv, save_policy);
  if (!result.rows.empty()) {
    const auto& last = result.rows.back();
    std::printf("done: %ld episodes, final eval %.4f, smoothed %.4f\n", last.episode,
                last.eval_return, last.smoothed_return);
  }
  return 0;
}

int run_eval(const std::string& policy_path, const std::string& env_name, int episodes,
             std::uint64_t seed) {
  vdfp::Snapshot snap = vdfp::load_snapshot(policy_path);
  auto it = snap.stores.find("actor");
  if (it == snap.stores.end()) throw std::runtime_error("snapshot has no actor store");
  std::string env = env_name.empty() ? snap.meta.at("env") : env_name;
  auto e = vdfp::make_env(env);
  vdfp::PolicyModel pi{e->spec().state_dim, e->spec().action_dim, e->spec().action_low,
                       e->spec().action_high};
  double mean = vdfp::evaluate_policy(pi, it->second, *e, episodes, seed);
  std::printf("%s: mean return %.6f over %d episodes\n", env.c_str(), mean, episodes);
  return 0;
}

struct CheckRow {
  std::string name;
  bool pass;
  std::string detail;
};

// Exhaustive oracle sweep over random small MDPs.
int run_verify(int trials, std::uint64_t seed) {
  using namespace vdfp;
  Rng rng(seed);
  std::vector<CheckRow> rows;
  const double gamma = 0.9;

  double worst_prob = 0.0, worst_eq = 0.0, worst_convex = 0.0, worst_det = 0.0;
  for (int k = 0; k < trials; ++k) {
    int ns = rng.uniform_int(2, 4), na = rng.uniform_int(2, 3), T = rng.uniform_int(1, 3);
    TabularMDP mdp = random_tabular_mdp(rng, ns, na, T);
    TabularPolicy pol = random_tabular_policy(rng, ns, na);
    int s0 = rng.uniform_int(0, ns - 1), a0 = rng.uniform_int(0, na - 1);

    auto trajs = enumerate_trajectories(mdp, pol, s0, a0);
    double psum = 0.0;
    for (const auto& t : trajs) psum += t.prob;
    worst_prob = std::max(worst_prob, std::abs(psum - 1.0));

    // Affine head consistent with the discounted return: exact equality.
    auto f = discounted_reward_features(mdp, gamma);
    Lemma1Result eq = check_lemma1(mdp, pol, f, summation_return(), gamma, s0, a0);
    worst_eq = std::max({worst_eq, std::abs(eq.gap), std::abs(eq.q - eq.exact_return_q)});

    // Convex head (ReLU units with nonnegative output weights): gap >= 0.
    int hidden = 4;
    std::vector<double> w1(static_cast<std::size_t>(hidden) * (T + 1)), b1(hidden), w2(hidden);
    for (auto& v : w1) v = rng.uniform(-1.0, 1.0);
    for (auto& v : b1) v = rng.uniform(-0.5, 0.5);
    for (auto& v : w2) v = rng.uniform(0.0, 1.0);
    ReturnFn convex = [=](std::span<const double> x) {
      double out = 0.0;
      for (int j = 0; j < hidden; ++j) {
        double pre = b1[j];
        for (std::size_t i = 0; i < x.size(); ++i) pre += w1[j * x.size() + i] * x[i];
        out += w2[j] * std::max(0.0, pre);
      }
      return out;
    };
    Lemma1Result conv = check_lemma1(mdp, pol, f, convex, gamma, s0, a0);
    worst_convex = std::max(worst_convex, -conv.gap);

    // Deterministic MDP + deterministic policy: point-mass expectation, so
    // the gap is zero for any head.
    TabularMDP det = mdp;
    for (int s = 0; s < ns; ++s)
      for (int a = 0; a < na; ++a) {
        int tgt = (s + a) % ns;
        for (int s2 = 0; s2 < ns; ++s2)
          det.transition[(static_cast<std::size_t>(s) * na + a) * ns + s2] = s2 == tgt ? 1.0 : 0.0;
      }
    TabularPolicy detpol = pol;
    for (int s = 0; s < ns; ++s)
      for (int a = 0; a < na; ++a)
        detpol.probs[static_cast<std::size_t>(s) * na + a] = a == s % na ? 1.0 : 0.0;
    auto fd = discounted_reward_features(det, gamma);
    Lemma1Result dg = check_lemma1(det, detpol, fd, convex, gamma, s0, a0);
    worst_det = std::max(worst_det, std::abs(dg.gap));
  }

  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return std::string(buf);
  };
  rows.push_back({"trajectory probabilities sum to 1", worst_prob < 1e-10,
                  "max |sum-1| = " + fmt(worst_prob)});
  rows.push_back({"affine return head: Q == U(P)", worst_eq < 1e-10,
                  "max |gap| = " + fmt(worst_eq)});
  rows.push_back({"convex return head: Q >= U(P)", worst_convex < 1e-10,
                  "max violation = " + fmt(worst_convex)});
  rows.push_back({"deterministic MDP: gap == 0 for any head", worst_det < 1e-10,
                  "max |gap| = " + fmt(worst_det)});

  // Closed-form diagonal-Gaussian KL against a Monte Carlo log-ratio estimate.
  double worst_kl = 0.0;
  for (int k = 0; k < 10; ++k) {
    int dim = rng.uniform_int(1, 6);
    std::vector<double> mu(dim), sigma(dim);
    for (auto& v : mu) v = rng.uniform(-1.0, 1.0);
    for (auto& v : sigma) v = rng.uniform(0.7, 1.5);
    double closed = kl_to_standard_normal(mu, sigma);
    double mc = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      double lr = 0.0;
      for (int j = 0; j < dim; ++j) {
        double x = mu[j] + sigma[j] * rng.normal();
        double zq = (x - mu[j]) / sigma[j];
        lr += -0.5 * zq * zq - std::log(sigma[j]) + 0.5 * x * x;
      }
      mc += lr;
    }
    mc /= n;
    worst_kl = std::max(worst_kl, std::abs(closed - mc));
  }
  rows.push_back({"closed-form KL vs Monte Carlo", worst_kl < 2e-2,
                  "max |closed-mc| = " + fmt(worst_kl)});

  bool all_pass = true;
  std::printf("%-45s %-6s %s\n", "check", "result", "detail");
  for (const auto& r : rows) {
    std::printf("%-45s %-6s %s\n", r.name.c_str(), r.pass ? "PASS" : "FAIL", r.detail.c_str());
    all_pass = all_pass && r.pass;
  }
  std::printf("%d/%zu checks passed over %d trials\n",
              static_cast<int>(std::count_if(rows.begin(), rows.end(),
                                             [](const CheckRow& r) { return r.pass; })),
              rows.size(), trials);
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"value-decomposed actor-critic lab"};
  app.require_subcommand(1);

  auto* train = app.add_subcommand("train", "run one training experiment");
  vdfp::RunConfig flags;
  std::string config_path, out_csv = "run.csv", save_policy;
  train->add_option("--env", flags.env, "environment name (pointmass|pendulum)");
  train->add_option("--algo", flags.algo, "algorithm (vdfp|ddpg)");
  train->add_option("--delay-mode", flags.delay_mode, "reward delay (none|sparse|shift)");
  train->add_option("--delay-steps", flags.delay_steps, "delay step count d");
  train->add_option("--seed", flags.seed, "run seed");
  train->add_option("--steps", flags.total_steps, "total environment steps");
  train->add_option("--config", config_path, "key=value config file");
  train->add_option("--out", out_csv, "CSV log path");
  train->add_option("--save-policy", save_policy, "write a parameter snapshot here");

  auto* eval = app.add_subcommand("eval", "evaluate a saved policy");
  std::string policy_path, eval_env;
  int eval_episodes = 10;
  std::uint64_t eval_seed = 0;
  eval->add_option("--policy", policy_path, "parameter snapshot")->required();
  eval->add_option("--env", eval_env, "environment name (default: from snapshot)");
  eval->add_option("--episodes", eval_episodes, "number of evaluation episodes");
  eval->add_option("--seed", eval_seed, "evaluation seed");

  auto* verify = app.add_subcommand("verify", "run the exact oracle suite");
  int trials = 100;
  std::uint64_t verify_seed = 12345;
  verify->add_option("--trials", trials, "number of random MDPs");
  verify->add_option("--seed", verify_seed, "sweep seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      std::vector<std::string> set_keys;
      for (const char* k : {"env", "algo", "delay_steps", "seed"}) {
        std::string flag = std::string("--") + k;
        for (auto& c : flag)
          if (c == '_') c = '-';
        if (train->count(flag)) set_keys.push_back(k);
      }
      if (train->count("--delay-mode")) set_keys.push_back("delay_mode");
      if (train->count("--steps")) set_keys.push_back("total_steps");
      return run_train(config_path, flags, set_keys, out_csv, save_policy);
    }
    if (*eval) return run_eval(policy_path, eval_env, eval_episodes, eval_seed);
    if (*verify) return run_verify(trials, verify_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
