#include "fbrl/env/gripper_world.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fbrl {

namespace {

constexpr double kTwoPi = 6.283185307179586;
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kProgressScale = 5.0;
// Per-step time penalty. Kept small relative to the success payout so that
// intermediate reward structure, when present, is visible in the value scale.
constexpr double kStepCost = 0.01;

Vec2 clamp_ws(Vec2 p) { return {clamp(p.x, 0.0, 1.0), clamp(p.y, 0.0, 1.0)}; }

const Vec2 kMoveDirs[8] = {
    {1.0, 0.0},  {M_SQRT1_2, M_SQRT1_2},   {0.0, 1.0},  {-M_SQRT1_2, M_SQRT1_2},
    {-1.0, 0.0}, {-M_SQRT1_2, -M_SQRT1_2}, {0.0, -1.0}, {M_SQRT1_2, -M_SQRT1_2},
};

bool has_annotation(const EpisodeRecord& ep, const char* tag, int* first_step = nullptr) {
  for (size_t t = 0; t < ep.annotations.size(); ++t)
    for (const auto& a : ep.annotations[t])
      if (a == tag) {
        if (first_step) *first_step = static_cast<int>(t);
        return true;
      }
  return false;
}

}  // namespace

TaskSpec task_by_id(const std::string& id, GoalMode mode) {
  TaskSpec t;
  t.id = id;
  t.goal_mode = mode;
  if (id == "push") {
    t.instruction = "Carry the block to the goal marker.";
    t.movable_target = true;
  } else if (id == "drawer") {
    t.instruction = "Grip the drawer handle and pull until the drawer opens.";
    t.force_threshold = 3.0;
  } else if (id == "press") {
    t.instruction = "Press the button from directly above.";
    t.required_dir = Vec2{0.0, -1.0};  // target must lie below the gripper
    t.force_threshold = 1.0;
  } else {
    throw std::invalid_argument("task_by_id: unknown task \"" + id + "\"");
  }
  return t;
}

std::vector<std::string> builtin_task_ids() { return {"push", "drawer", "press"}; }

GripperEnv::GripperEnv(TaskSpec task, EnvConfig cfg, uint64_t seed)
    : task_(std::move(task)), cfg_(cfg), seed_(seed), noise_rng_(seed) {
  if (cfg_.obs_dim != 32)
    throw std::invalid_argument("GripperEnv: feature map is 32-dim; got obs_dim " +
                                std::to_string(cfg_.obs_dim));
  if (task_.episode_cap < 1) throw std::invalid_argument("GripperEnv: episode_cap must be >= 1");
  reset(0);
}

const WorldState& GripperEnv::reset(uint64_t episode_index) {
  WorldState s;
  s.gripper = {0.15, 0.15};
  s.target = {0.60, 0.45};
  s.distractor = {0.25, 0.75};
  s.goal = {0.85, 0.80};

  if (task_.goal_mode == GoalMode::random) {
    Rng layout = Rng(seed_).substream("layout").substream(episode_index);
    if (task_.movable_target) {
      s.goal = {layout.uniform(0.70, 0.90), layout.uniform(0.60, 0.85)};
    } else {
      // Immovable-target tasks: the interaction point itself moves.
      s.target = {layout.uniform(0.50, 0.80), layout.uniform(0.30, 0.60)};
    }
  }
  if (!task_.movable_target) s.goal = s.target;  // success happens at the fixture

  state_ = s;
  noise_rng_ = Rng(seed_).substream("noise").substream(episode_index);
  return state_;
}

bool GripperEnv::success_predicate(const WorldState& s) const {
  if (task_.force_threshold > 0.0) return s.force >= task_.force_threshold;
  return distance(s.target, s.goal) <= cfg_.goal_radius;
}

StepResult GripperEnv::step(Action a) {
  StepResult out;
  WorldState s = state_;
  const int ai = static_cast<int>(a);
  if (ai < 0 || ai >= kNumActions) throw std::invalid_argument("GripperEnv::step: bad action");

  if (ai < 8) {
    const bool anchored = s.held == Held::target && !task_.movable_target;
    if (anchored) {
      out.annotations.push_back("held_in_place");
    } else {
      const Vec2 dir = kMoveDirs[ai];
      const Vec2 before = s.gripper;
      s.gripper = clamp_ws({s.gripper.x + cfg_.move_step * dir.x,
                            s.gripper.y + cfg_.move_step * dir.y});
      const Vec2 delta = s.gripper - before;
      if (s.held == Held::target && task_.movable_target)
        s.target = clamp_ws({s.target.x + delta.x, s.target.y + delta.y});
      else if (s.held == Held::distractor)
        s.distractor = clamp_ws({s.distractor.x + delta.x, s.distractor.y + delta.y});
    }
  } else if (a == Action::grasp) {
    if (s.held != Held::none) {
      out.annotations.push_back("grasp_noop");
    } else {
      const double dt = distance(s.gripper, s.target);
      const double dd = distance(s.gripper, s.distractor);
      if (dt <= cfg_.grasp_radius) {
        bool aligned = true;
        if (task_.required_dir) {
          const Vec2 to_target = s.target - s.gripper;
          const double len = length(to_target);
          aligned = len > 1e-9 &&
                    (to_target.x * task_.required_dir->x + to_target.y * task_.required_dir->y) /
                            len >=
                        cfg_.align_cos;
        }
        if (aligned) {
          s.held = Held::target;
          s.closed = true;
          out.annotations.push_back("grasp_target");
        } else {
          out.annotations.push_back("bad_direction_attempt");
        }
      } else if (dd <= cfg_.grasp_radius) {
        s.held = Held::distractor;
        s.closed = true;
        out.annotations.push_back("grasp_distractor");
      } else {
        out.annotations.push_back("failed_grasp_attempt");
      }
    }
  } else if (a == Action::release) {
    if (s.held != Held::none) {
      s.held = Held::none;
      s.closed = false;
      out.annotations.push_back("release");
    } else {
      out.annotations.push_back("release_noop");
    }
  } else {  // push
    if (s.held == Held::target && task_.force_threshold > 0.0) {
      s.force += 1.0;
      out.annotations.push_back("push_force");
    } else if (s.held == Held::target) {
      out.annotations.push_back("push_no_effect");
    } else {
      out.annotations.push_back("push_no_latch");
    }
  }

  if (distance(s.gripper, s.target) <= cfg_.contact_radius)
    out.annotations.push_back("contact_target");
  if (distance(s.gripper, s.distractor) <= cfg_.contact_radius)
    out.annotations.push_back("contact_distractor");

  s.step = state_.step + 1;
  out.success = success_predicate(s);
  out.r_task = out.success ? 1.0 : -kStepCost;
  out.done = out.success || s.step >= task_.episode_cap;
  out.next = s;
  state_ = s;
  return out;
}

Vec GripperEnv::observe_clean(const WorldState& s) const {
  Vec f(32, 0.0);
  f[0] = s.gripper.x;
  f[1] = s.gripper.y;
  f[2] = s.target.x;
  f[3] = s.target.y;
  f[4] = s.distractor.x;
  f[5] = s.distractor.y;
  f[6] = s.goal.x;
  f[7] = s.goal.y;
  f[8] = distance(s.gripper, s.target);
  f[9] = distance(s.gripper, s.distractor);
  f[10] = distance(s.gripper, s.goal);
  f[11] = distance(s.target, s.goal);
  f[12] = s.closed ? 1.0 : 0.0;
  f[13] = s.held == Held::target ? 2.0 : 0.0;
  f[14] = s.held == Held::distractor ? 1.0 : 0.0;
  f[15] = std::min(s.force / std::max(task_.force_threshold, 1.0), 1.0);
  f[16] = s.target.x - s.gripper.x;
  f[17] = s.target.y - s.gripper.y;
  f[18] = s.goal.x - s.gripper.x;
  f[19] = s.goal.y - s.gripper.y;
  f[20] = s.goal.x - s.target.x;
  f[21] = s.goal.y - s.target.y;
  if (task_.required_dir) {
    const Vec2 to_target = s.target - s.gripper;
    const double len = length(to_target);
    if (len > 1e-9)
      f[22] = (to_target.x * task_.required_dir->x + to_target.y * task_.required_dir->y) / len;
  }
  f[23] = 0.5 * std::sin(kTwoPi * s.gripper.x);
  f[24] = 0.5 * std::cos(kTwoPi * s.gripper.x);
  f[25] = 0.5 * std::sin(kTwoPi * s.gripper.y);
  f[26] = 0.5 * std::cos(kTwoPi * s.gripper.y);
  // Stage-progress phase features: constant-norm encodings whose direction
  // rotates with task progress, so embedding similarity tracks milestones.
  const double reach = std::clamp(1.0 - distance(s.gripper, s.target) / kSqrt2, 0.0, 1.0);
  const double deliver =
      task_.force_threshold > 0.0
          ? std::min(s.force / task_.force_threshold, 1.0)
          : std::clamp(1.0 - distance(s.target, s.goal) / kSqrt2, 0.0, 1.0);
  const double kHalfPi = 1.5707963267948966;
  f[27] = kProgressScale * std::sin(kHalfPi * reach);
  f[28] = kProgressScale * std::cos(kHalfPi * reach);
  f[29] = kProgressScale * std::sin(kHalfPi * deliver);
  f[30] = kProgressScale * std::cos(kHalfPi * deliver);
  f[31] = 1.0;
  return f;
}

Vec GripperEnv::observe(const WorldState& s) {
  Vec f = observe_clean(s);
  if (cfg_.noise_sigma > 0.0)
    for (auto& x : f) x += cfg_.noise_sigma * noise_rng_.normal();
  return f;
}

WorldState GripperEnv::goal_state() const {
  WorldState s = state_;
  s.closed = true;
  s.held = Held::target;
  if (task_.movable_target) {
    s.gripper = s.goal;
    s.target = s.goal;
  } else {
    s.gripper = s.target;
    s.force = task_.force_threshold;
  }
  s.step = 0;
  return s;
}

Vec GripperEnv::goal_embedding() const { return observe_clean(goal_state()); }

Vec instruction_features(const TaskSpec& task, int dim) {
  const auto ids = builtin_task_ids();
  const int n_tasks = static_cast<int>(ids.size());
  if (dim <= n_tasks)
    throw std::invalid_argument("instruction_features: dim must exceed task count");
  Rng rng(splitmix64(fnv1a64("instruction.features.v1") ^ fnv1a64(task.id)));
  Vec f = rng.unit_vec(dim - n_tasks);
  f.resize(static_cast<size_t>(dim), 0.0);
  for (int i = 0; i < n_tasks; ++i)
    if (ids[static_cast<size_t>(i)] == task.id) f[static_cast<size_t>(dim - n_tasks + i)] = 1.0;
  return f;
}

Diagnosis diagnose(const EpisodeRecord& ep, const TaskSpec& task) {
  const int n_states = static_cast<int>(ep.states.size());
  if (n_states < 2) throw std::invalid_argument("diagnose: episode too short");
  const int n_steps = n_states - 1;
  if (static_cast<int>(ep.annotations.size()) != n_steps ||
      static_cast<int>(ep.actions.size()) != n_steps)
    throw std::invalid_argument("diagnose: inconsistent record lengths");

  int first_contact_target = -1, first_contact_distractor = -1;
  int first_bad_dir = -1, first_failed = -1, first_latch = -1;
  has_annotation(ep, "contact_target", &first_contact_target);
  has_annotation(ep, "contact_distractor", &first_contact_distractor);
  has_annotation(ep, "bad_direction_attempt", &first_bad_dir);
  has_annotation(ep, "failed_grasp_attempt", &first_failed);
  has_annotation(ep, "grasp_target", &first_latch);

  Diagnosis d;
  if (ep.success) {
    d.code = ErrorCode::good_grasp;
    if (first_latch >= 0) d.decisive_steps.push_back(first_latch);
    d.decisive_steps.push_back(n_steps - 1);
  } else {
    struct Match {
      ErrorCode code;
      std::vector<int> steps;
    };
    std::vector<Match> matches;

    const bool distractor_first =
        first_contact_distractor >= 0 &&
        (first_contact_target < 0 || first_contact_distractor < first_contact_target);
    if (distractor_first)
      matches.push_back({ErrorCode::wrong_object, {first_contact_distractor}});
    if (first_bad_dir >= 0)
      matches.push_back({ErrorCode::bad_approach_direction, {first_bad_dir}});
    if (first_failed >= 0 && first_latch < 0)
      matches.push_back({ErrorCode::failed_grasp, {first_failed}});
    if (task.force_threshold > 0.0 && first_latch >= 0 &&
        ep.states.back().force < task.force_threshold)
      matches.push_back({ErrorCode::insufficient_force, {first_latch, n_steps - 1}});

    // Drift: gripper-goal distance non-decreasing and growing over the final
    // third, with no object contact at all.
    const bool no_contact = first_contact_target < 0 && first_contact_distractor < 0;
    if (no_contact) {
      const int window = std::max(2, n_states / 3);
      const int onset = n_states - window;
      bool monotone = true;
      for (int i = onset; i + 1 < n_states; ++i) {
        const double d0 = distance(ep.states[static_cast<size_t>(i)].gripper,
                                   ep.states[static_cast<size_t>(i)].goal);
        const double d1 = distance(ep.states[static_cast<size_t>(i) + 1].gripper,
                                   ep.states[static_cast<size_t>(i) + 1].goal);
        if (d1 < d0 - 1e-12) {
          monotone = false;
          break;
        }
      }
      const double d_first = distance(ep.states[static_cast<size_t>(onset)].gripper,
                                      ep.states[static_cast<size_t>(onset)].goal);
      const double d_last = distance(ep.states.back().gripper, ep.states.back().goal);
      if (monotone && d_last > d_first)
        matches.push_back({ErrorCode::drift_from_goal, {std::min(onset, n_steps - 1)}});
    }

    if (matches.empty())
      matches.push_back({ErrorCode::drift_from_goal, {n_steps - 1}});  // catch-all

    d.code = matches.front().code;
    d.decisive_steps = matches.front().steps;
    for (size_t i = 1; i < matches.size(); ++i) d.secondary.push_back(matches[i].code);
  }

  std::sort(d.decisive_steps.begin(), d.decisive_steps.end());
  d.decisive_steps.erase(std::unique(d.decisive_steps.begin(), d.decisive_steps.end()),
                         d.decisive_steps.end());
  return d;
}

}  // namespace fbrl
