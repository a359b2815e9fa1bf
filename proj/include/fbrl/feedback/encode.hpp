#pragma once

#include <string>

#include "fbrl/core/vec.hpp"
#include "fbrl/feedback/feedback.hpp"

namespace fbrl {

// Fixed slot layout of the structured encoding, in order:
//   [0..1]   outcome one-hot (success, failure)
//   [2..7]   primary code one-hot
//   [8..13]  secondary factors multi-hot
//   [14]     confidence
//   [15..D)  signed-hash bag-of-tokens of explanation + summary + suggested_fix,
//            L2-normalized when nonzero
inline constexpr int kFeedbackFixedSlots = 15;
inline constexpr int kFeedbackDimDefault = 64;

/// Deterministic featurization of a structured Feedback into D dims.
/// Throws when D < kFeedbackFixedSlots.
Vec encode_feedback(const Feedback& fb, int dim = kFeedbackDimDefault);

/// Hash-only featurization of free-form prose into all D dims (unit norm).
/// Throws on empty text / empty token set.
Vec encode_freeform(const std::string& text, int dim = kFeedbackDimDefault);

}  // namespace fbrl
