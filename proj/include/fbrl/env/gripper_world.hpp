#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fbrl/core/rng.hpp"
#include "fbrl/core/vec.hpp"
#include "fbrl/feedback/taxonomy.hpp"

namespace fbrl {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline double length(Vec2 v) { return std::sqrt(v.x * v.x + v.y * v.y); }
inline double distance(Vec2 a, Vec2 b) { return length(a - b); }

enum class GoalMode { fixed, random };

// Discrete action set: 8 compass moves, then grasp/release/push.
enum class Action {
  move_e = 0,
  move_ne = 1,
  move_n = 2,
  move_nw = 3,
  move_w = 4,
  move_sw = 5,
  move_s = 6,
  move_se = 7,
  grasp = 8,
  release = 9,
  push = 10,
};
inline constexpr int kNumActions = 11;

struct TaskSpec {
  std::string id;
  std::string instruction;
  GoalMode goal_mode = GoalMode::fixed;
  int episode_cap = 64;
  bool movable_target = false;          // held target follows the gripper
  std::optional<Vec2> required_dir;     // grasp approach direction constraint
  double force_threshold = 0.0;         // 0 = no force mechanic
};

/// Built-in tasks: "push" (carry the block to the goal), "drawer" (latch the
/// handle, accumulate pull force), "press" (latch the button from above, one
/// press). Throws on unknown id.
TaskSpec task_by_id(const std::string& id, GoalMode mode);
std::vector<std::string> builtin_task_ids();

struct EnvConfig {
  double move_step = 0.10;
  double grasp_radius = 0.15;
  double contact_radius = 0.10;
  double goal_radius = 0.15;
  double align_cos = 0.5;   // min cosine with required_dir for a legal grasp
  double noise_sigma = 0.02;
  int obs_dim = 32;
};

// Held object: none, the task target, or the distractor.
enum class Held { none, target, distractor };

struct WorldState {
  Vec2 gripper, target, distractor, goal;
  bool closed = false;
  Held held = Held::none;
  double force = 0.0;
  int step = 0;
};

struct StepResult {
  WorldState next;
  double r_task = -0.01;  // +1 on success, else a small step cost
  bool done = false;
  bool success = false;
  std::vector<std::string> annotations;
};

// Full rollout record used for diagnosis and trace logging.
struct EpisodeRecord {
  std::vector<WorldState> states;             // T entries
  std::vector<int> actions;                   // T-1
  std::vector<double> r_task;                 // T-1
  std::vector<std::vector<std::string>> annotations;  // T-1, one list per step
  bool success = false;
};

struct Diagnosis {
  ErrorCode code = ErrorCode::drift_from_goal;
  std::vector<ErrorCode> secondary;
  std::vector<int> decisive_steps;
};

class GripperEnv {
 public:
  GripperEnv(TaskSpec task, EnvConfig cfg, uint64_t seed);

  /// Deterministic initial layout for (seed, episode_index).
  const WorldState& reset(uint64_t episode_index);
  StepResult step(Action a);
  const WorldState& state() const { return state_; }
  const TaskSpec& task() const { return task_; }
  const EnvConfig& config() const { return cfg_; }

  /// Noisy observation features of a state (consumes the noise stream).
  Vec observe(const WorldState& s);
  /// Noise-free features.
  Vec observe_clean(const WorldState& s) const;

  /// Canonical success state for the current layout.
  WorldState goal_state() const;
  /// observe_clean(goal_state()).
  Vec goal_embedding() const;

  bool success_predicate(const WorldState& s) const;

 private:
  TaskSpec task_;
  EnvConfig cfg_;
  uint64_t seed_;
  WorldState state_;
  Rng noise_rng_;
};

/// Task-conditioned instruction features: a unit vector seeded by the task id
/// with a task one-hot appended. Stable across runs and env seeds.
Vec instruction_features(const TaskSpec& task, int dim = 32);

/// Ground-truth failure classification with decisive step indices.
/// Priority: success, wrong_object, bad_approach_direction, failed_grasp,
/// insufficient_force, drift_from_goal (also the fallback); rules that match
/// below the primary become secondary factors.
Diagnosis diagnose(const EpisodeRecord& ep, const TaskSpec& task);

}  // namespace fbrl
