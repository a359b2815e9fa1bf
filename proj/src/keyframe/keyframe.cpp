#include "fbrl/keyframe/keyframe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fbrl {

namespace {

// z-score with population std and an epsilon guard on the denominator.
Vec zscore(const Vec& x) {
  const double m = mean(x);
  double var = 0.0;
  for (double v : x) var += (v - m) * (v - m);
  var /= static_cast<double>(x.size());
  const double sd = std::sqrt(var);
  Vec out(x.size());
  for (size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - m) / (sd + kNormEps);
  return out;
}

}  // namespace

Vec goal_similarity_trace(const std::vector<Vec>& embeddings, const Vec& goal) {
  if (embeddings.empty()) throw std::invalid_argument("goal_similarity_trace: empty episode");
  Vec s(embeddings.size());
  for (size_t t = 0; t < embeddings.size(); ++t) s[t] = cosine(embeddings[t], goal);
  return s;
}

SaliencyTrace saliency(const Vec& s, double omega_s, double omega_v, double omega_a) {
  if (s.size() < 2) throw std::invalid_argument("saliency: need at least 2 steps");
  if (omega_s < 0.0 || omega_v < 0.0 || omega_a < 0.0 ||
      std::abs(omega_s + omega_v + omega_a - 1.0) > 1e-9)
    throw std::invalid_argument("saliency: weights must be nonnegative and sum to 1");

  const size_t n = s.size();
  SaliencyTrace tr;
  tr.s = s;
  tr.v.assign(n, 0.0);
  tr.a.assign(n, 0.0);
  for (size_t t = 1; t < n; ++t) tr.v[t] = s[t] - s[t - 1];
  for (size_t t = 1; t < n; ++t) tr.a[t] = tr.v[t] - tr.v[t - 1];

  Vec av(n), aa(n);
  for (size_t t = 0; t < n; ++t) {
    av[t] = std::abs(tr.v[t]);
    aa[t] = std::abs(tr.a[t]);
  }
  const Vec zs = zscore(s);
  const Vec zv = zscore(av);
  const Vec za = zscore(aa);
  tr.p.assign(n, 0.0);
  for (size_t t = 0; t < n; ++t)
    tr.p[t] = omega_s * std::max(zs[t], 0.0) + omega_v * zv[t] + omega_a * za[t];
  check_finite(tr.p, "saliency");
  return tr;
}

std::vector<int> select_keyframes(const Vec& p, int max_keyframes, int gap) {
  if (p.empty()) throw std::invalid_argument("select_keyframes: empty saliency");
  if (max_keyframes < 0) throw std::invalid_argument("select_keyframes: negative M");
  if (gap < 1) throw std::invalid_argument("select_keyframes: gap must be >= 1");
  const int tlen = static_cast<int>(p.size());

  // Interior candidates with positive score, ranked by (-p, index).
  std::vector<int> order;
  for (int t = 1; t < tlen - 1; ++t)
    if (p[static_cast<size_t>(t)] > 0.0) order.push_back(t);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double pa = p[static_cast<size_t>(a)], pb = p[static_cast<size_t>(b)];
    if (pa != pb) return pa > pb;
    return a < b;
  });

  std::vector<int> picked;
  for (int t : order) {
    if (static_cast<int>(picked.size()) >= max_keyframes) break;
    bool clashes = false;
    for (int k : picked)
      if (std::abs(t - k) < gap) {
        clashes = true;
        break;
      }
    if (!clashes) picked.push_back(t);
  }

  picked.push_back(0);
  if (tlen > 1) picked.push_back(tlen - 1);
  std::sort(picked.begin(), picked.end());
  picked.erase(std::unique(picked.begin(), picked.end()), picked.end());
  return picked;
}

KeyframeWeights step_weights(const std::vector<int>& frames, int episode_len, int halfwidth,
                             double floor) {
  if (frames.empty()) throw std::invalid_argument("step_weights: empty keyframe set");
  if (episode_len < 1) throw std::invalid_argument("step_weights: empty episode");
  if (halfwidth < 0) throw std::invalid_argument("step_weights: negative halfwidth");
  if (floor < 0.0 || floor >= 1.0) throw std::invalid_argument("step_weights: floor must be in [0,1)");
  for (int k : frames)
    if (k < 0 || k >= episode_len)
      throw std::invalid_argument("step_weights: keyframe index out of range");

  KeyframeWeights kw;
  kw.frames = frames;
  std::sort(kw.frames.begin(), kw.frames.end());
  kw.w.assign(static_cast<size_t>(episode_len), 0.0);
  const double denom = static_cast<double>(halfwidth + 1);
  for (int t = 0; t < episode_len; ++t) {
    double tri = 0.0;
    for (int k : kw.frames)
      tri = std::max(tri, 1.0 - std::abs(t - k) / denom);
    kw.w[static_cast<size_t>(t)] = floor + (1.0 - floor) * tri;
  }
  const double m = mean(kw.w);
  kw.w_hat.resize(kw.w.size());
  for (size_t i = 0; i < kw.w.size(); ++i) kw.w_hat[i] = kw.w[i] / m;
  return kw;
}

KeyframeWeights compute_keyframes(const std::vector<Vec>& embeddings, const Vec& goal,
                                  const KeyframeConfig& cfg) {
  const Vec s = goal_similarity_trace(embeddings, goal);
  if (s.size() == 1) {
    // Degenerate one-step episode: lone frame carries all credit.
    return step_weights({0}, 1, cfg.halfwidth, cfg.floor);
  }
  const SaliencyTrace tr = saliency(s, cfg.omega_s, cfg.omega_v, cfg.omega_a);
  const std::vector<int> frames = select_keyframes(tr.p, cfg.max_keyframes, cfg.gap);
  return step_weights(frames, static_cast<int>(s.size()), cfg.halfwidth, cfg.floor);
}

}  // namespace fbrl
