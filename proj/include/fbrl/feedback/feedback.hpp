#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fbrl/feedback/taxonomy.hpp"

namespace fbrl {

// One episode's structured reflection. Mirrors the JSON wire schema:
//   task, outcome, primary_error{code, explanation}, secondary_factors,
//   key_frame_indices, suggested_fix, confidence, summary.
struct Feedback {
  std::string task;
  bool success = false;
  ErrorCode primary_code = ErrorCode::drift_from_goal;
  std::string primary_explanation;
  std::vector<ErrorCode> secondary_factors;
  std::vector<int> key_frame_indices;
  std::string suggested_fix = "(n/a)";
  double confidence = 0.0;
  std::string summary;
};

struct FieldError {
  std::string field;    // offending field name, e.g. "confidence"
  std::string message;  // what was wrong
};

struct ValidationResult {
  std::optional<Feedback> feedback;  // set iff errors is empty
  std::vector<FieldError> errors;

  bool ok() const { return errors.empty(); }
};

/// Parses and validates raw JSON text against the feedback schema.
/// Unknown fields are rejected. When `episode_len` is given,
/// key_frame_indices must fall in [0, episode_len).
ValidationResult validate_feedback(const std::string& raw,
                                   std::optional<int> episode_len = std::nullopt);

/// Serializes in schema field order. validate_feedback(serialize(fb)) round-trips.
std::string serialize_feedback(const Feedback& fb);

}  // namespace fbrl
