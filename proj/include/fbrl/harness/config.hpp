#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fbrl/agent/sac.hpp"
#include "fbrl/align/align.hpp"
#include "fbrl/env/gripper_world.hpp"
#include "fbrl/keyframe/keyframe.hpp"
#include "fbrl/reward/reward.hpp"

namespace fbrl {

enum class Variant {
  full,
  no_keyframes,
  freeform_feedback,
  fixed_rho,
  drop_deltas_keep_rho,
  no_goal_delta,
  no_fb_delta,
  sparse_only,
};

std::string_view to_string(Variant v);
std::optional<Variant> parse_variant(std::string_view s);
std::vector<Variant> all_variants();

// Pipeline switches implied by a variant. Each variant flips exactly one
// switch relative to `full` (sparse_only flips the master switch).
struct VariantFlags {
  bool uniform_weights = false;  // no_keyframes: w_hat = 1 everywhere
  bool freeform = false;         // freeform_feedback: prose + hash-only encoding
  bool fixed_rho = false;        // rho pinned at rho_max, schedule bypassed
  bool zero_deltas = false;      // drop_deltas_keep_rho: r_tilde = 0
  bool no_goal_delta = false;
  bool no_fb_delta = false;
  bool shaping_off = false;      // sparse_only: raw task reward, no alignment
};

VariantFlags flags_for(Variant v);

/// Reward-path switches for the given variant.
ShapingToggles toggles_for(const VariantFlags& f);

enum class FeedbackMode { structured, freeform };

struct ExperimentConfig {
  std::string task = "push";
  GoalMode goal_mode = GoalMode::fixed;
  long long total_steps = 50000;
  std::vector<uint64_t> seeds = {1, 2, 3, 4, 5};
  Variant variant = Variant::full;
  std::string out_dir = "runs";
  FeedbackMode feedback_mode = FeedbackMode::structured;

  long long eval_every = 2500;
  int eval_episodes = 20;
  long long checkpoint_every = 5000;  // 0 disables intermediate checkpoints

  bool frozen_shaping = false;          // use collection-time rewards in updates
  bool keyframes_from_feedback = false; // gate on the reflection's frame list

  size_t replay_capacity = 20000;
  size_t embed_capacity = 20000;
  int align_batch = 64;
  int feedback_dim = 64;
  int shared_dim = 32;
  int instr_dim = 32;
  std::vector<int> projector_hidden = {64, 64};

  KeyframeConfig keyframe;
  AlignConfig align;
  RewardConfig reward;
  SacConfig agent;
  EnvConfig env;

  /// Returns human-readable problems; empty when the config is usable.
  std::vector<std::string> validate() const;

  /// Strict parse: unknown keys and type mismatches are reported, defaults
  /// fill whatever the text omits. Throws ConfigError listing all problems.
  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_file(const std::string& path);
  std::string to_json_text() const;
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(std::vector<std::string> problems);
  std::vector<std::string> problems;
};

}  // namespace fbrl
