#pragma once

#include <vector>

#include "fbrl/core/vec.hpp"

namespace fbrl {

// Per-step trace of goal proximity and its first/second differences, plus the
// combined saliency score used to rank candidate keyframes.
struct SaliencyTrace {
  Vec s;  // goal cosine per step, in [-1, 1]
  Vec v;  // first difference, v[0] = 0
  Vec a;  // second difference, a[0] = 0
  Vec p;  // saliency score per step
};

struct KeyframeWeights {
  std::vector<int> frames;  // sorted, always contains 0 and T-1
  Vec w;                    // floored triangular-kernel weights
  Vec w_hat;                // w normalized to unit mean
};

struct KeyframeConfig {
  double omega_s = 0.5;
  double omega_v = 0.3;
  double omega_a = 0.2;
  int max_keyframes = 5;  // interior picks; endpoints are free
  int gap = 3;
  int halfwidth = 2;  // triangular kernel half-width h
  double floor = 0.1; // weight floor beta
};

/// Cosine of each embedding against the goal embedding.
Vec goal_similarity_trace(const std::vector<Vec>& embeddings, const Vec& goal);

/// v/a differences and p = w_s*[z(s)]_+ + w_v*z(|v|) + w_a*z(|a|) with
/// per-episode z-normalization (population std + eps guard).
SaliencyTrace saliency(const Vec& s, double omega_s, double omega_v, double omega_a);

/// Greedy selection of up to M interior frames by descending saliency
/// (ties -> lower index), skipping candidates with nonpositive score or
/// within `gap` of an already picked interior frame. Endpoints 0 and T-1
/// are always included and never count toward M or the spacing rule.
std::vector<int> select_keyframes(const Vec& p, int max_keyframes, int gap);

/// Triangular credit kernel around the keyframes: w~_t = max_k (1-|t-k|/(h+1))_+,
/// w_t = beta + (1-beta)*w~_t, and w_hat = w / mean(w).
KeyframeWeights step_weights(const std::vector<int>& frames, int episode_len, int halfwidth,
                             double floor);

/// Full pipeline: trace -> saliency -> selection -> weights.
KeyframeWeights compute_keyframes(const std::vector<Vec>& embeddings, const Vec& goal,
                                  const KeyframeConfig& cfg);

}  // namespace fbrl
