#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fbrl/feedback/feedback.hpp"
#include "fbrl/feedback/taxonomy.hpp"

namespace fbrl {

enum class ReflectMode { structured, freeform };

// Minimal episode digest supplied to the reflection oracle: the environment's
// ground-truth diagnosis plus episode bookkeeping. The harness builds one of
// these from the env trace so this module stays environment-agnostic.
struct EpisodeSynopsis {
  std::string task;
  bool success = false;
  ErrorCode code = ErrorCode::drift_from_goal;
  std::vector<ErrorCode> secondary;
  std::vector<int> decisive_steps;
  int episode_len = 0;
};

struct ReflectConfig {
  int frame_subsample = 8;  // frames a real VLM prompt would sample; unused by the oracle
  int history_len = 0;      // prior-attempt context length; pass-through only
  int retry_budget = 3;
};

/// Deterministic stand-in for the VLM reflection call. Structured mode emits
/// schema-valid JSON mirroring the ground-truth diagnosis; freeform mode emits
/// templated prose with seeded lexical variation. Same inputs -> same bytes.
std::string mock_vlm_reflect(const EpisodeSynopsis& ep, ReflectMode mode, uint64_t seed);

struct ReflectOutcome {
  ValidationResult validation;  // structured mode result (parsed Feedback on success)
  std::string raw;              // last raw oracle output
  int attempts = 0;
  bool exhausted = false;  // retry budget spent without a valid response
};

/// Structured reflection with schema validation and retries. `corrupt` (when
/// set) mutates the raw JSON per attempt — used by fault-injection tests; the
/// oracle itself never emits invalid output.
ReflectOutcome reflect_validated(
    const EpisodeSynopsis& ep, uint64_t seed, const ReflectConfig& cfg = {},
    const std::function<std::string(const std::string&, int attempt)>& corrupt = nullptr);

}  // namespace fbrl
