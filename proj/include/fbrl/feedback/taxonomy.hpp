#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace fbrl {

// Closed set of episode diagnosis codes. The five failure modes plus the
// success code; wire strings are the snake_case names below.
enum class ErrorCode {
  wrong_object,
  bad_approach_direction,
  failed_grasp,
  insufficient_force,
  drift_from_goal,
  good_grasp,  // success
};

inline constexpr int kNumErrorCodes = 6;
inline constexpr int kNumFailureCodes = 5;

std::string_view to_string(ErrorCode code);
std::optional<ErrorCode> parse_error_code(std::string_view s);

/// Short human-readable description of each code.
std::string_view describe(ErrorCode code);

inline bool is_failure_code(ErrorCode code) { return code != ErrorCode::good_grasp; }

}  // namespace fbrl
