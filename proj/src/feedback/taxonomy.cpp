#include "fbrl/feedback/taxonomy.hpp"

namespace fbrl {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::wrong_object: return "wrong_object";
    case ErrorCode::bad_approach_direction: return "bad_approach_direction";
    case ErrorCode::failed_grasp: return "failed_grasp";
    case ErrorCode::insufficient_force: return "insufficient_force";
    case ErrorCode::drift_from_goal: return "drift_from_goal";
    case ErrorCode::good_grasp: return "good_grasp";
  }
  return "unknown";
}

std::optional<ErrorCode> parse_error_code(std::string_view s) {
  if (s == "wrong_object") return ErrorCode::wrong_object;
  if (s == "bad_approach_direction") return ErrorCode::bad_approach_direction;
  if (s == "failed_grasp") return ErrorCode::failed_grasp;
  if (s == "insufficient_force") return ErrorCode::insufficient_force;
  if (s == "drift_from_goal") return ErrorCode::drift_from_goal;
  if (s == "good_grasp") return ErrorCode::good_grasp;
  return std::nullopt;
}

std::string_view describe(ErrorCode code) {
  switch (code) {
    case ErrorCode::wrong_object:
      return "Interacted with the wrong object.";
    case ErrorCode::bad_approach_direction:
      return "Approached object from a wrong angle/direction.";
    case ErrorCode::failed_grasp:
      return "Contact without a stable grasp; slipped or never closed gripper appropriately.";
    case ErrorCode::insufficient_force:
      return "Touched correct object but did not exert proper motion/force.";
    case ErrorCode::drift_from_goal:
      return "Trajectories drifted away from the goal, no course correction.";
    case ErrorCode::good_grasp:
      return "Stable grasp and goal-achieving motion.";
  }
  return "";
}

}  // namespace fbrl
