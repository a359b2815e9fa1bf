#include "fbrl/feedback/reflect.hpp"

#include <array>
#include <sstream>

#include "fbrl/core/rng.hpp"

namespace fbrl {

namespace {

constexpr double kSuccessConfidence = 0.9;
constexpr double kFailureConfidence = 0.85;

std::string explanation_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::wrong_object:
      return "The gripper made first contact with the distractor instead of the target object.";
    case ErrorCode::bad_approach_direction:
      return "The gripper attempted the grasp from a disallowed direction and slid off.";
    case ErrorCode::failed_grasp:
      return "The gripper attempted to close near the object but never latched onto it.";
    case ErrorCode::insufficient_force:
      return "The gripper latched onto the object but did not apply enough force to move it.";
    case ErrorCode::drift_from_goal:
      return "The gripper drifted away from the goal without making useful contact.";
    case ErrorCode::good_grasp:
      return "The gripper grasped the target securely and completed the task.";
  }
  return "";
}

std::string fix_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::wrong_object:
      return "Move toward the target object and avoid the distractor before closing the gripper.";
    case ErrorCode::bad_approach_direction:
      return "Approach the object from the required direction before attempting the grasp.";
    case ErrorCode::failed_grasp:
      return "Close the gripper only when within grasp range of the target.";
    case ErrorCode::insufficient_force:
      return "Keep pushing while aligned until enough force has accumulated.";
    case ErrorCode::drift_from_goal:
      return "Head toward the goal position instead of wandering away from it.";
    case ErrorCode::good_grasp:
      return "(n/a)";
  }
  return "(n/a)";
}

std::string summary_for(const EpisodeSynopsis& ep) {
  std::ostringstream s;
  if (ep.success) {
    s << "The agent completed the task " << ep.task << " with a secure grasp.";
  } else {
    s << "The agent failed the task " << ep.task << ": " << describe(ep.code);
  }
  return s.str();
}

}  // namespace

std::string mock_vlm_reflect(const EpisodeSynopsis& ep, ReflectMode mode, uint64_t seed) {
  if (mode == ReflectMode::structured) {
    Feedback fb;
    fb.task = ep.task;
    fb.success = ep.success;
    fb.primary_code = ep.success ? ErrorCode::good_grasp : ep.code;
    fb.primary_explanation = explanation_for(fb.primary_code);
    if (!ep.success) fb.secondary_factors = ep.secondary;
    fb.key_frame_indices = ep.decisive_steps;
    fb.suggested_fix = ep.success ? "(n/a)" : fix_for(fb.primary_code);
    fb.confidence = ep.success ? kSuccessConfidence : kFailureConfidence;
    fb.summary = summary_for(ep);
    return serialize_feedback(fb);
  }

  // Freeform prose: same diagnostic content, looser shape, seeded word choice.
  static const std::array<const char*, 3> openers = {
      "Watching the rollout,", "Over this episode,", "In this attempt,"};
  static const std::array<const char*, 3> verbs = {"looks like", "seems that", "appears that"};
  Rng rng(splitmix64(seed ^ fnv1a64(ep.task)));
  std::ostringstream s;
  s << openers[static_cast<size_t>(rng.uniform_int(static_cast<int>(openers.size())))] << " it "
    << verbs[static_cast<size_t>(rng.uniform_int(static_cast<int>(verbs.size())))] << " ";
  if (ep.success) {
    s << "the gripper handled " << ep.task << " cleanly. " << explanation_for(ErrorCode::good_grasp);
  } else {
    s << "the attempt at " << ep.task << " went wrong. " << explanation_for(ep.code) << " "
      << fix_for(ep.code);
    for (ErrorCode c : ep.secondary) s << " Also: " << describe(c);
  }
  if (!ep.decisive_steps.empty()) {
    s << " Decisive moments around step";
    if (ep.decisive_steps.size() > 1) s << "s";
    for (int k : ep.decisive_steps) s << " " << k;
    s << ".";
  }
  return s.str();
}

ReflectOutcome reflect_validated(
    const EpisodeSynopsis& ep, uint64_t seed, const ReflectConfig& cfg,
    const std::function<std::string(const std::string&, int attempt)>& corrupt) {
  ReflectOutcome out;
  const int budget = cfg.retry_budget < 1 ? 1 : cfg.retry_budget;
  for (int attempt = 0; attempt < budget; ++attempt) {
    ++out.attempts;
    std::string raw = mock_vlm_reflect(ep, ReflectMode::structured, seed + static_cast<uint64_t>(attempt));
    if (corrupt) raw = corrupt(raw, attempt);
    out.raw = raw;
    out.validation = validate_feedback(raw, ep.episode_len > 0
                                               ? std::optional<int>(ep.episode_len)
                                               : std::nullopt);
    if (out.validation.ok()) return out;
  }
  out.exhausted = true;
  return out;
}

}  // namespace fbrl
