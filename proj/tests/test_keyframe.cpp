#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "fbrl/core/rng.hpp"
#include "fbrl/core/vec.hpp"
#include "fbrl/keyframe/keyframe.hpp"

using namespace fbrl;

namespace {

// Independent z-score used to cross-check the saliency composition.
Vec zscore_oracle(const Vec& x) {
  double m = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  double var = 0.0;
  for (double v : x) var += (v - m) * (v - m);
  const double sd = std::sqrt(var / static_cast<double>(x.size()));
  Vec out(x.size());
  for (size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - m) / (sd + 1e-8);
  return out;
}

// Independent greedy selection: repeatedly scan every interior candidate with
// positive score that is not within `gap` of a previous pick and take the one
// with the highest score (lowest index on ties), until M picks or exhaustion.
std::vector<int> select_oracle(const Vec& p, int max_keyframes, int gap) {
  const int n = static_cast<int>(p.size());
  std::vector<int> picks;
  while (static_cast<int>(picks.size()) < max_keyframes) {
    int best = -1;
    for (int t = 1; t < n - 1; ++t) {
      if (p[static_cast<size_t>(t)] <= 0.0) continue;
      bool near = false;
      for (int k : picks)
        if (std::abs(t - k) < gap) near = true;
      if (near) continue;
      if (best == -1 || p[static_cast<size_t>(t)] > p[static_cast<size_t>(best)]) best = t;
    }
    if (best == -1) break;
    picks.push_back(best);
  }
  picks.push_back(0);
  if (n > 1) picks.push_back(n - 1);
  std::sort(picks.begin(), picks.end());
  picks.erase(std::unique(picks.begin(), picks.end()), picks.end());
  return picks;
}

}  // namespace

TEST_SUITE("keyframe") {

TEST_CASE("goal similarity trace is the per-step cosine against the goal") {
  const Vec goal = {1.0, 0.0};
  const std::vector<Vec> traj = {{1.0, 0.0}, {0.0, 2.0}, {-3.0, 0.0}, {1.0, 1.0}};
  const Vec s = goal_similarity_trace(traj, goal);
  REQUIRE(s.size() == 4);
  CHECK(s[0] == doctest::Approx(1.0));
  CHECK(s[1] == doctest::Approx(0.0));
  CHECK(s[2] == doctest::Approx(-1.0));
  CHECK(s[3] == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK_THROWS_AS(goal_similarity_trace({}, goal), std::invalid_argument);
}

TEST_CASE("first and second differences anchor at zero") {
  const Vec s = {0.1, 0.4, 0.2, 0.9};
  const SaliencyTrace tr = saliency(s, 0.5, 0.3, 0.2);
  REQUIRE(tr.v.size() == 4);
  REQUIRE(tr.a.size() == 4);
  CHECK(tr.v[0] == 0.0);
  CHECK(tr.a[0] == 0.0);
  CHECK(tr.v[1] == doctest::Approx(0.3));
  CHECK(tr.v[2] == doctest::Approx(-0.2));
  CHECK(tr.v[3] == doctest::Approx(0.7));
  CHECK(tr.a[1] == doctest::Approx(0.3));   // v[1] - v[0]
  CHECK(tr.a[2] == doctest::Approx(-0.5));  // v[2] - v[1]
  CHECK(tr.a[3] == doctest::Approx(0.9));
}

TEST_CASE("constant trace has zero saliency everywhere") {
  const Vec s(6, 0.37);
  const SaliencyTrace tr = saliency(s, 0.5, 0.3, 0.2);
  for (double p : tr.p) CHECK(p == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("saliency matches an independent z-score recomputation") {
  const Vec s = {-0.2, 0.05, 0.1, 0.6, 0.55, 0.9, 0.4, 0.95};
  const double ws = 0.4, wv = 0.35, wa = 0.25;
  const SaliencyTrace tr = saliency(s, ws, wv, wa);

  Vec v(s.size(), 0.0), a(s.size(), 0.0);
  for (size_t t = 1; t < s.size(); ++t) v[t] = s[t] - s[t - 1];
  for (size_t t = 1; t < s.size(); ++t) a[t] = v[t] - v[t - 1];
  Vec av(s.size()), aa(s.size());
  for (size_t t = 0; t < s.size(); ++t) {
    av[t] = std::abs(v[t]);
    aa[t] = std::abs(a[t]);
  }
  const Vec zs = zscore_oracle(s), zv = zscore_oracle(av), za = zscore_oracle(aa);
  for (size_t t = 0; t < s.size(); ++t) {
    const double want = ws * std::max(zs[t], 0.0) + wv * zv[t] + wa * za[t];
    CHECK(tr.p[t] == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("a lone jump in an otherwise flat trace dominates the saliency") {
  Vec s(12, 0.1);
  for (size_t t = 7; t < s.size(); ++t) s[t] = 0.8;  // step change at t = 7
  const SaliencyTrace tr = saliency(s, 1.0 / 3, 1.0 / 3, 1.0 / 3);
  size_t argmax = 0;
  for (size_t t = 1; t < tr.p.size(); ++t)
    if (tr.p[t] > tr.p[argmax]) argmax = t;
  CHECK(argmax == 7);
}

TEST_CASE("saliency rejects short traces and bad weight mixes") {
  CHECK_THROWS_AS(saliency({0.5}, 0.5, 0.3, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(saliency({0.1, 0.2}, 0.5, 0.3, 0.3), std::invalid_argument);
  CHECK_THROWS_AS(saliency({0.1, 0.2}, 1.2, -0.1, -0.1), std::invalid_argument);
  CHECK_NOTHROW(saliency({0.1, 0.2}, 1.0, 0.0, 0.0));
}

TEST_CASE("selection picks by score with spacing and always keeps the endpoints") {
  const Vec p = {0.0, 0.0, 5.0, 0.0, 0.0, 4.0, 0.0};
  const std::vector<int> got = select_keyframes(p, 2, 2);
  CHECK(got == std::vector<int>{0, 2, 5, 6});
}

TEST_CASE("selection edge behaviors") {
  // Nonpositive scores are never picked; endpoints survive regardless.
  CHECK(select_keyframes({-1.0, -2.0, -3.0, -4.0}, 3, 1) == std::vector<int>{0, 3});
  // M = 0 keeps endpoints only.
  CHECK(select_keyframes({0.0, 9.0, 9.0, 0.0}, 0, 1) == std::vector<int>{0, 3});
  // Ties resolve toward the earlier step.
  CHECK(select_keyframes({0.0, 3.0, 0.0, 3.0, 0.0}, 1, 1) == std::vector<int>{0, 1, 4});
  // Spacing suppresses a close runner-up but admits a farther one.
  CHECK(select_keyframes({0.0, 0.0, 5.0, 4.0, 0.0, 3.0, 0.0}, 3, 2) ==
        std::vector<int>{0, 2, 5, 6});
  // The high-score interior pick can sit right next to an endpoint.
  CHECK(select_keyframes({0.0, 7.0, 0.0, 0.0}, 1, 3) == std::vector<int>{0, 1, 3});
  // Degenerate one-step trace.
  CHECK(select_keyframes({2.0}, 2, 1) == std::vector<int>{0});
  CHECK_THROWS_AS(select_keyframes({}, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(select_keyframes({0.0, 1.0}, -1, 1), std::invalid_argument);
  CHECK_THROWS_AS(select_keyframes({0.0, 1.0}, 1, 0), std::invalid_argument);
}

TEST_CASE("selection agrees with an independent rescan oracle on random scores") {
  Rng rng(20240915);
  int nonempty_interior = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const int n = 2 + rng.uniform_int(18);
    Vec p(static_cast<size_t>(n));
    // Quantized scores force frequent exact ties.
    for (double& x : p) x = 0.25 * (rng.uniform_int(13) - 4);
    const int M = rng.uniform_int(6);
    const int gap = 1 + rng.uniform_int(4);
    const std::vector<int> got = select_keyframes(p, M, gap);
    const std::vector<int> want = select_oracle(p, M, gap);
    REQUIRE(got == want);
    CHECK(std::is_sorted(got.begin(), got.end()));
    CHECK(got.front() == 0);
    CHECK(got.back() == n - 1);
    if (static_cast<int>(got.size()) > 2) ++nonempty_interior;
  }
  CHECK(nonempty_interior > 100);  // the trials genuinely exercise interior picks
}

TEST_CASE("triangular kernel weights match the hand-computed profile") {
  const KeyframeWeights kw = step_weights({3}, 7, 1, 0.1);
  const Vec want_w = {0.1, 0.1, 0.55, 1.0, 0.55, 0.1, 0.1};
  REQUIRE(kw.w.size() == want_w.size());
  for (size_t t = 0; t < want_w.size(); ++t)
    CHECK(kw.w[t] == doctest::Approx(want_w[t]).epsilon(1e-12));
  // mean(w) = 2.5/7, so the keyframe step normalizes to exactly 2.8.
  CHECK(kw.w_hat[3] == doctest::Approx(2.8).epsilon(1e-12));
}

TEST_CASE("normalized weights have unit mean and peak on keyframes") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + rng.uniform_int(30);
    std::vector<int> frames = {rng.uniform_int(n)};
    if (n > 1 && rng.uniform() < 0.7) frames.push_back(rng.uniform_int(n));
    const int h = rng.uniform_int(4);
    const double beta = 0.4 * rng.uniform();
    const KeyframeWeights kw = step_weights(frames, n, h, beta);

    double m = 0.0;
    for (double w : kw.w_hat) m += w;
    m /= static_cast<double>(n);
    CHECK(std::abs(m - 1.0) < 1e-9);

    for (int k : frames) CHECK(kw.w[static_cast<size_t>(k)] == doctest::Approx(1.0));
    for (double w : kw.w) {
      CHECK(w >= beta - 1e-12);
      CHECK(w <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("steps far from every keyframe sit exactly on the floor") {
  const KeyframeWeights kw = step_weights({0}, 10, 2, 0.25);
  for (size_t t = 3; t < 10; ++t) CHECK(kw.w[t] == doctest::Approx(0.25));
  // Zero halfwidth gives a one-step spike.
  const KeyframeWeights spike = step_weights({4}, 9, 0, 0.0);
  for (size_t t = 0; t < 9; ++t) CHECK(spike.w[t] == doctest::Approx(t == 4 ? 1.0 : 0.0));
}

TEST_CASE("kernel weighting rejects malformed inputs") {
  CHECK_THROWS_AS(step_weights({}, 5, 1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(step_weights({0}, 0, 1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(step_weights({0}, 5, -1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(step_weights({0}, 5, 1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(step_weights({0}, 5, 1, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(step_weights({5}, 5, 1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(step_weights({-1}, 5, 1, 0.1), std::invalid_argument);
}

TEST_CASE("full credit pipeline composes trace, selection, and weighting") {
  Rng rng(42);
  const Vec goal = rng.unit_vec(8);
  std::vector<Vec> traj;
  for (int t = 0; t < 14; ++t) traj.push_back(rng.unit_vec(8));

  KeyframeConfig cfg;
  cfg.omega_s = 0.5;
  cfg.omega_v = 0.3;
  cfg.omega_a = 0.2;
  cfg.max_keyframes = 3;
  cfg.gap = 2;
  cfg.halfwidth = 2;
  cfg.floor = 0.1;
  const KeyframeWeights got = compute_keyframes(traj, goal, cfg);

  const Vec s = goal_similarity_trace(traj, goal);
  const SaliencyTrace tr = saliency(s, cfg.omega_s, cfg.omega_v, cfg.omega_a);
  const std::vector<int> frames = select_keyframes(tr.p, cfg.max_keyframes, cfg.gap);
  const KeyframeWeights want = step_weights(frames, 14, cfg.halfwidth, cfg.floor);

  CHECK(got.frames == want.frames);
  REQUIRE(got.w_hat.size() == want.w_hat.size());
  for (size_t t = 0; t < got.w_hat.size(); ++t) CHECK(got.w_hat[t] == want.w_hat[t]);
}

TEST_CASE("one-step episodes collapse to the lone frame") {
  const KeyframeWeights kw = compute_keyframes({{1.0, 0.0}}, {1.0, 0.0}, {});
  CHECK(kw.frames == std::vector<int>{0});
  REQUIRE(kw.w_hat.size() == 1);
  CHECK(kw.w_hat[0] == doctest::Approx(1.0));
}

}  // TEST_SUITE
