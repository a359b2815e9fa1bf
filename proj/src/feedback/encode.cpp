#include "fbrl/feedback/encode.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

#include "fbrl/core/rng.hpp"

namespace fbrl {

namespace {

// Fixed hashing salt so encodings are stable across runs and seeds.
const uint64_t kHashSalt = fnv1a64("feedback.token.hash.v1");

// Lowercased alphanumeric tokens; everything else separates.
void hash_tokens_into(const std::string& text, Vec& out, size_t offset, size_t width) {
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    const uint64_t h = splitmix64(kHashSalt ^ fnv1a64(token));
    const size_t slot = offset + static_cast<size_t>(h % width);
    const double sign = ((h >> 32) & 1u) ? 1.0 : -1.0;
    out[slot] += sign;
    token.clear();
  };
  for (char ch : text) {
    const unsigned char c = static_cast<unsigned char>(ch);
    if (std::isalnum(c))
      token.push_back(static_cast<char>(std::tolower(c)));
    else
      flush();
  }
  flush();
}

// L2-normalize out[offset..offset+width); no-op when the block is all zero.
bool normalize_block(Vec& out, size_t offset, size_t width) {
  double ss = 0.0;
  for (size_t i = 0; i < width; ++i) ss += out[offset + i] * out[offset + i];
  if (ss <= 0.0) return false;
  const double inv = 1.0 / std::sqrt(ss);
  for (size_t i = 0; i < width; ++i) out[offset + i] *= inv;
  return true;
}

}  // namespace

Vec encode_feedback(const Feedback& fb, int dim) {
  if (dim < kFeedbackFixedSlots)
    throw std::invalid_argument("encode_feedback: dim " + std::to_string(dim) +
                                " below fixed slot width " +
                                std::to_string(kFeedbackFixedSlots));
  Vec f(static_cast<size_t>(dim), 0.0);
  f[fb.success ? 0 : 1] = 1.0;
  f[2 + static_cast<size_t>(fb.primary_code)] = 1.0;
  for (ErrorCode c : fb.secondary_factors) f[8 + static_cast<size_t>(c)] = 1.0;
  f[14] = fb.confidence;
  const size_t width = static_cast<size_t>(dim - kFeedbackFixedSlots);
  if (width > 0) {
    hash_tokens_into(fb.primary_explanation, f, kFeedbackFixedSlots, width);
    hash_tokens_into(fb.summary, f, kFeedbackFixedSlots, width);
    hash_tokens_into(fb.suggested_fix, f, kFeedbackFixedSlots, width);
    normalize_block(f, kFeedbackFixedSlots, width);
  }
  check_finite(f, "encode_feedback");
  return f;
}

Vec encode_freeform(const std::string& text, int dim) {
  if (dim < 1) throw std::invalid_argument("encode_freeform: dim must be positive");
  if (text.empty()) throw std::invalid_argument("encode_freeform: empty text");
  Vec f(static_cast<size_t>(dim), 0.0);
  hash_tokens_into(text, f, 0, static_cast<size_t>(dim));
  if (!normalize_block(f, 0, static_cast<size_t>(dim)))
    throw std::invalid_argument("encode_freeform: no tokens in text");
  check_finite(f, "encode_freeform");
  return f;
}

}  // namespace fbrl
