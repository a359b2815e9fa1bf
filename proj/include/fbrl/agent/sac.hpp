#pragma once

#include <vector>

#include "fbrl/core/adam.hpp"
#include "fbrl/core/checkpoint.hpp"
#include "fbrl/core/mlp.hpp"
#include "fbrl/core/rng.hpp"
#include "fbrl/core/vec.hpp"

namespace fbrl {

struct SacConfig {
  double discount = 0.99;
  double polyak_tau = 0.01;
  double lr = 1e-4;
  int batch_size = 64;
  double entropy_coef = 0.05;
  bool auto_entropy = false;
  double target_entropy_scale = 0.5;  // target H = scale * ln(num_actions)
  double entropy_lr = 3e-4;
  int update_to_data = 1;
  int start_steps = 500;  // uniform-random warmup actions (applied by the caller)
  std::vector<int> hidden = {64, 64};

  void validate() const;
};

struct SacBatchItem {
  const Vec* obs = nullptr;
  int action = 0;
  double reward = 0.0;
  const Vec* next_obs = nullptr;
  bool terminal = false;
};

struct SacUpdateStats {
  double critic1_loss = 0.0;
  double critic2_loss = 0.0;
  double actor_loss = 0.0;
  double entropy = 0.0;
  double mean_q = 0.0;
  double mean_target = 0.0;
  double entropy_coef = 0.0;
};

// Discrete-action soft actor-critic: categorical policy, twin critics with
// polyak-averaged targets, expectation-form soft Bellman backup.
class SacAgent {
 public:
  SacAgent(int obs_dim, int num_actions, const SacConfig& cfg, Rng& init_rng);

  /// Greedy argmax (lowest index wins ties) or a softmax sample.
  int act(const Vec& obs, bool greedy, Rng& rng) const;
  Vec policy_probs(const Vec& obs) const;

  /// One gradient step on critics and actor from the given batch, then a
  /// polyak target sync. Rewards are consumed exactly as passed in.
  SacUpdateStats update(const std::vector<SacBatchItem>& batch);

  /// target <- tau * online + (1 - tau) * target.
  void target_sync(double tau);

  const SacConfig& config() const { return cfg_; }
  double entropy_coef() const { return entropy_coef_; }
  int num_actions() const { return num_actions_; }

  void save_into(Checkpoint& ck, const std::string& prefix) const;
  void load_from(const Checkpoint& ck, const std::string& prefix);

  const Mlp& actor() const { return actor_; }
  const Mlp& critic1() const { return critic1_; }
  const Mlp& critic2() const { return critic2_; }

 private:
  SacConfig cfg_;
  int num_actions_;
  Mlp actor_, critic1_, critic2_, target1_, target2_;
  AdamState opt_actor_, opt_critic1_, opt_critic2_;
  double entropy_coef_;
  double log_entropy_coef_;
  double target_entropy_;
};

/// Numerically stable softmax of a logits vector.
Vec softmax(const Vec& logits);

}  // namespace fbrl
