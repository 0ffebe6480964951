#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace vdfp {

// Flat run configuration. File format is one key=value per line, keys named
// exactly like the fields, '#' comments allowed; command-line flags override
// file values.
struct RunConfig {
  std::string env = "pointmass";
  std::string algo = "vdfp";  // vdfp | ddpg
  std::string delay_mode = "none";  // none | sparse | shift
  int delay_steps = 1;
  std::uint64_t seed = 0;
  long total_steps = 100000;
  int max_traj_len = 64;
  int repr_dim = 100;
  int z_dim = 50;
  double beta = 1000.0;
  double clip_c = 0.2;
  double gamma = 0.99;
  int batch = 64;
  long buffer_capacity = 100000;
  double lr_actor = -1.0;  // unset: 2.5e-4 for vdfp, 1e-4 for ddpg
  double lr_vae = 1e-3;
  double lr_return = 5e-4;
  double lr_critic = 1e-3;
  long collect_steps = 2000;
  long pretrain_steps = 5000;
  int return_train_every_pretrain = 10;
  int return_train_every = 50;
  long eval_every = 2000;
  int eval_episodes = 5;
  double explore_noise = 0.1;
  std::string dynamics = "vae";         // vae | mlp
  std::string operator_mode = "pairwise";  // pairwise | concat  (key: operator)
  std::string return_head = "linear";   // linear | relu

  double resolved_lr_actor() const {
    if (lr_actor > 0.0) return lr_actor;
    return algo == "ddpg" ? 1e-4 : 2.5e-4;
  }

  void set(const std::string& key, const std::string& value) {
    auto as_long = [&] { return std::stol(value); };
    auto as_int = [&] { return std::stoi(value); };
    auto as_double = [&] { return std::stod(value); };
    if (key == "env") env = value;
    else if (key == "algo") algo = value;
    else if (key == "delay_mode") delay_mode = value;
    else if (key == "delay_steps") delay_steps = as_int();
    else if (key == "seed") seed = std::stoull(value);
    else if (key == "total_steps") total_steps = as_long();
    else if (key == "max_traj_len") max_traj_len = as_int();
    else if (key == "repr_dim") repr_dim = as_int();
    else if (key == "z_dim") z_dim = as_int();
    else if (key == "beta") beta = as_double();
    else if (key == "clip_c") clip_c = as_double();
    else if (key == "gamma") gamma = as_double();
    else if (key == "batch") batch = as_int();
    else if (key == "buffer_capacity") buffer_capacity = as_long();
    else if (key == "lr_actor") lr_actor = as_double();
    else if (key == "lr_vae") lr_vae = as_double();
    else if (key == "lr_return") lr_return = as_double();
    else if (key == "lr_critic") lr_critic = as_double();
    else if (key == "collect_steps") collect_steps = as_long();
    else if (key == "pretrain_steps") pretrain_steps = as_long();
    else if (key == "return_train_every_pretrain") return_train_every_pretrain = as_int();
    else if (key == "return_train_every") return_train_every = as_int();
    else if (key == "eval_every") eval_every = as_long();
    else if (key == "eval_episodes") eval_episodes = as_int();
    else if (key == "explore_noise") explore_noise = as_double();
    else if (key == "dynamics") dynamics = value;
    else if (key == "operator") operator_mode = value;
    else if (key == "return_head") return_head = value;
    else throw std::invalid_argument("unknown config key '" + key + "'");
  }

  void validate() const {
    auto expect = [](bool ok, const std::string& msg) {
      if (!ok) throw std::invalid_argument("config: " + msg);
    };
    expect(env == "pointmass" || env == "pendulum", "env must be pointmass|pendulum");
    expect(algo == "vdfp" || algo == "ddpg", "algo must be vdfp|ddpg");
    expect(delay_mode == "none" || delay_mode == "sparse" || delay_mode == "shift",
           "delay_mode must be none|sparse|shift");
    expect(delay_mode == "none" || delay_steps >= 1, "delay_steps must be >= 1");
    expect(total_steps >= 1, "total_steps must be >= 1");
    expect(max_traj_len >= 1, "max_traj_len must be >= 1");
    expect(max_traj_len <= 64 || max_traj_len % 64 == 0,
           "max_traj_len above 64 must be a multiple of 64");
    expect(repr_dim >= 1 && z_dim >= 1, "dims must be positive");
    expect(beta >= 0.0, "beta must be >= 0");
    expect(clip_c >= 0.0, "clip_c must be >= 0 (inf allowed)");
    expect(gamma >= 0.0 && gamma <= 1.0, "gamma must be in [0,1]");
    expect(batch >= 1, "batch must be >= 1");
    expect(buffer_capacity >= 1, "buffer_capacity must be >= 1");
    expect(lr_vae > 0 && lr_return > 0 && lr_critic > 0, "learning rates must be positive");
    expect(collect_steps >= 0 && pretrain_steps >= 0, "phase lengths must be >= 0");
    expect(return_train_every_pretrain >= 1 && return_train_every >= 1,
           "train-every intervals must be >= 1");
    expect(eval_every >= 1, "eval_every must be >= 1");
    expect(eval_episodes >= 1, "eval_episodes must be >= 1");
    expect(explore_noise >= 0.0, "explore_noise must be >= 0");
    expect(dynamics == "vae" || dynamics == "mlp", "dynamics must be vae|mlp");
    expect(operator_mode == "pairwise" || operator_mode == "concat",
           "operator must be pairwise|concat");
    expect(return_head == "linear" || return_head == "relu", "return_head must be linear|relu");
  }
};

inline void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key=value");
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t");
      auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

}  // namespace vdfp
