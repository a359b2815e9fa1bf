#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fbrl/core/rng.hpp"
#include "fbrl/core/vec.hpp"
#include "fbrl/reward/reward.hpp"

using namespace fbrl;

namespace {

// Unit vector with a given cosine against e0, staying in the e0/e1 plane.
Vec unit_with_cos(double c) {
  return {c, std::sqrt(std::max(0.0, 1.0 - c * c))};
}

RewardConfig plain_config() {
  RewardConfig cfg;
  cfg.envelope_enabled = false;
  cfg.magnitude_normalizer = false;
  return cfg;
}

}  // namespace

TEST_SUITE("reward") {

TEST_CASE("goal potential saturates at tanh(1) on a perfect state") {
  const Vec e0 = {1.0, 0.0};
  const Vec e1 = {0.0, 1.0};
  // Aligned with both the instruction and goal embeddings at tau = 0.5:
  // each cosine maps to (1+1)/2 - 1/2 = 1/2, so each term is tanh(1).
  CHECK(goal_potential(e0, e0, e0, 0.5) == doctest::Approx(0.7615941559557649).epsilon(1e-9));
  // Orthogonal to both: the centered similarity is zero on each term.
  CHECK(goal_potential(e1, e0, e0, 0.5) == doctest::Approx(0.0));
  // Aligned with one, orthogonal to the other: half the saturated value.
  CHECK(goal_potential(e0, e0, e1, 0.5) == doctest::Approx(0.3807970779778824).epsilon(1e-9));
  // Anti-aligned with both: odd symmetry.
  const Vec neg = {-1.0, 0.0};
  CHECK(goal_potential(neg, e0, e0, 0.5) == doctest::Approx(-0.7615941559557649).epsilon(1e-9));
}

TEST_CASE("potential deltas follow the discounted difference through tanh") {
  CHECK(goal_delta(0.2, 0.6, 0.95, 0.5) == doctest::Approx(0.6291451614140354).epsilon(1e-9));
  CHECK(goal_delta(0.4, 0.4, 1.0, 0.5) == doctest::Approx(0.0));
  // tanh is odd: swapping the direction of travel flips the sign.
  CHECK(goal_delta(0.6, 0.2, 1.0, 0.5) == doctest::Approx(-goal_delta(0.2, 0.6, 1.0, 0.5)));
}

TEST_CASE("feedback delta scales the shaped step by its keyframe weight") {
  const Vec z_f = {1.0, 0.0};
  const Vec z_t = {0.0, 1.0};                 // psi = 0
  const Vec z_next = unit_with_cos(0.25);     // psi' = 0.25
  // w_hat * tanh((1.0 * 0.25 - 0) / 0.5) with w_hat = 2.8.
  CHECK(feedback_delta(z_t, z_next, z_f, 2.8, 1.0, 0.5) ==
        doctest::Approx(1.293928040328027).epsilon(1e-9));
  // Zero weight kills the term regardless of the motion.
  CHECK(feedback_delta(z_t, z_next, z_f, 0.0, 1.0, 0.5) == doctest::Approx(0.0));
  // A stationary pair contributes nothing at gamma = 1.
  CHECK(feedback_delta(z_next, z_next, z_f, 2.8, 1.0, 0.5) == doctest::Approx(0.0));
}

TEST_CASE("fusion weight tracks instruction-feedback agreement exactly") {
  const double alpha_base = 0.5, alpha_min = 0.20, alpha_max = 0.95;
  const Vec z_y = {1.0, 0.0};
  const double r_goal = 0.6, r_fb = 0.2;

  // Perfect agreement: a = 1, alpha = 0.50.
  FuseResult fr = fuse(r_goal, r_fb, z_y, z_y, alpha_base, alpha_min, alpha_max);
  CHECK(fr.alpha == doctest::Approx(0.50).epsilon(1e-12));
  CHECK(fr.r_tilde == doctest::Approx(0.5 * 0.6 + 0.5 * 0.2).epsilon(1e-12));

  // Orthogonal: a = 1/2, alpha = 0.25.
  fr = fuse(r_goal, r_fb, z_y, Vec{0.0, 1.0}, alpha_base, alpha_min, alpha_max);
  CHECK(fr.alpha == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(fr.r_tilde == doctest::Approx(0.75 * 0.6 + 0.25 * 0.2).epsilon(1e-12));

  // Opposed: a = 0, the floor at 0.20 catches it.
  fr = fuse(r_goal, r_fb, z_y, Vec{-1.0, 0.0}, alpha_base, alpha_min, alpha_max);
  CHECK(fr.alpha == doctest::Approx(0.20).epsilon(1e-12));
  CHECK(fr.r_tilde == doctest::Approx(0.8 * 0.6 + 0.2 * 0.2).epsilon(1e-12));

  // The ceiling binds when the base weight is large.
  fr = fuse(r_goal, r_fb, z_y, z_y, 2.0, alpha_min, alpha_max);
  CHECK(fr.alpha == doctest::Approx(0.95).epsilon(1e-12));
}

TEST_CASE("progress estimate takes the better of success memory and recent motion") {
  // 3 of 4 deltas positive, squared: 0.5625 beats the EMA.
  CHECK(progress(0.1, {0.5, -0.2, 0.3, 0.1}, 2.0) == doctest::Approx(0.5625).epsilon(1e-12));
  // Half positive, squared: 0.25.
  CHECK(progress(0.1, {0.5, -0.2}, 2.0) == doctest::Approx(0.25).epsilon(1e-12));
  // A strong success EMA dominates weak recent motion.
  CHECK(progress(0.9, {-0.5, -0.2}, 2.0) == doctest::Approx(0.9));
  // Empty batch falls back to the EMA alone.
  CHECK(progress(0.3, {}, 2.0) == doctest::Approx(0.3));
  // Zero deltas do not count as positive.
  CHECK(progress(0.0, {0.0, 0.0}, 2.0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(progress(-0.1, {0.1}, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(progress(1.1, {0.1}, 2.0), std::invalid_argument);
}

TEST_CASE("shaping coefficient schedule interpolates and stays monotone") {
  const double lo = 0.025, hi = 0.25;
  CHECK(rho_schedule(0.0, lo, hi) == doctest::Approx(hi));
  CHECK(rho_schedule(1.0, lo, hi) == doctest::Approx(lo));
  CHECK(rho_schedule(0.5, lo, hi) == doctest::Approx(0.1375).epsilon(1e-12));
  double prev = rho_schedule(0.0, lo, hi);
  for (int i = 1; i <= 100; ++i) {
    const double cur = rho_schedule(i / 100.0, lo, hi);
    CHECK(cur < prev);
    prev = cur;
  }
  CHECK_THROWS_AS(rho_schedule(-0.01, lo, hi), std::invalid_argument);
  CHECK_THROWS_AS(rho_schedule(1.01, lo, hi), std::invalid_argument);
}

TEST_CASE("envelope ramps up over warmup and anneals back to zero") {
  RewardConfig cfg;
  cfg.envelope_enabled = true;
  cfg.warmup_steps = 100;
  cfg.anneal_end_step = 300;
  CHECK(shaping_envelope(0, cfg) == doctest::Approx(0.0));
  CHECK(shaping_envelope(50, cfg) == doctest::Approx(0.5));
  CHECK(shaping_envelope(100, cfg) == doctest::Approx(1.0));
  CHECK(shaping_envelope(200, cfg) == doctest::Approx(0.5));
  CHECK(shaping_envelope(300, cfg) == doctest::Approx(0.0));
  CHECK(shaping_envelope(100000, cfg) == doctest::Approx(0.0));

  cfg.warmup_steps = 0;
  CHECK(shaping_envelope(0, cfg) == doctest::Approx(0.0));
  CHECK(shaping_envelope(150, cfg) == doctest::Approx(0.5));
  CHECK(shaping_envelope(300, cfg) == doctest::Approx(0.0));

  cfg.envelope_enabled = false;
  CHECK(shaping_envelope(0, cfg) == doctest::Approx(1.0));
  CHECK(shaping_envelope(1000000, cfg) == doctest::Approx(1.0));
}

TEST_CASE("shaped reward adds the clipped bonus only on failure steps") {
  // -1 + 0.4 * 0.5 under a unit clip.
  CHECK(shaped_reward(-1.0, 0.5, 0.4, 1.0, 1.0) == doctest::Approx(-0.8).epsilon(1e-12));
  // Oversized bonus saturates at the clip.
  CHECK(shaped_reward(-1.0, 10.0, 1.0, 1.0, 0.25) == doctest::Approx(-0.75).epsilon(1e-12));
  CHECK(shaped_reward(-1.0, -10.0, 1.0, 1.0, 0.25) == doctest::Approx(-1.25).epsilon(1e-12));
  // Masked steps pass the task reward through untouched.
  CHECK(shaped_reward(1.0, 10.0, 1.0, 0.0, 0.25) == doctest::Approx(1.0));
}

TEST_CASE("success memory is an exponential moving average") {
  ShapingState st;
  st.s_bar = 0.5;
  st.update_success(true, 0.1);
  CHECK(st.s_bar == doctest::Approx(0.9 * 0.5 + 0.1).epsilon(1e-12));
  st.update_success(false, 0.1);
  CHECK(st.s_bar == doctest::Approx(0.9 * (0.9 * 0.5 + 0.1)).epsilon(1e-12));
}

TEST_CASE("a stationary trajectory earns exactly the task rewards at gamma one") {
  RewardConfig cfg = plain_config();
  cfg.gamma_shape = 1.0;
  ShapingState st;
  const Vec z = unit_with_cos(0.3);
  const std::vector<Vec> traj(5, z);
  const Vec z_y = {1.0, 0.0};
  const Vec z_g = unit_with_cos(0.7);
  const Vec z_f = unit_with_cos(-0.2);
  const Vec w_hat(5, 1.0);
  const Vec r_task = {-0.01, -0.01, -0.01, 1.0};

  const ShapedRewardTrace tr =
      episode_shaping(traj, z_y, z_g, z_f, w_hat, r_task, 0.25, true, cfg, st);
  for (size_t t = 0; t < 4; ++t) {
    CHECK(tr.r_goal[t] == doctest::Approx(0.0));
    CHECK(tr.r_fb[t] == doctest::Approx(0.0));
    CHECK(tr.r_tilde[t] == doctest::Approx(0.0));
    CHECK(tr.r[t] == doctest::Approx(r_task[t]));
  }
}

TEST_CASE("success steps pass through unshaped when masking is on") {
  RewardConfig cfg = plain_config();
  cfg.shape_only_on_fail = true;
  ShapingState st;
  Rng rng(5);
  std::vector<Vec> traj;
  for (int t = 0; t < 6; ++t) traj.push_back(rng.unit_vec(4));
  const Vec z_y = rng.unit_vec(4), z_g = rng.unit_vec(4), z_f = rng.unit_vec(4);
  const Vec w_hat(6, 1.0);
  const Vec r_task = {-0.01, -0.01, 1.0, -0.01, 1.0};

  const ShapedRewardTrace tr =
      episode_shaping(traj, z_y, z_g, z_f, w_hat, r_task, 0.25, true, cfg, st);
  for (size_t t = 0; t < 5; ++t) {
    if (r_task[t] > 0.0) {
      CHECK(tr.m[t] == 0.0);
      CHECK(tr.rho_hat[t] == 0.0);
      CHECK(tr.r[t] == doctest::Approx(r_task[t]));  // exactly the task reward
    } else {
      CHECK(tr.m[t] == 1.0);
      CHECK(tr.rho_hat[t] == doctest::Approx(0.25));
    }
  }

  // With masking off, every step is shaped.
  RewardConfig open = cfg;
  open.shape_only_on_fail = false;
  ShapingState st2;
  const ShapedRewardTrace tr2 =
      episode_shaping(traj, z_y, z_g, z_f, w_hat, r_task, 0.25, true, open, st2);
  for (size_t t = 0; t < 5; ++t) CHECK(tr2.m[t] == 1.0);
}

TEST_CASE("episode shaping composes the scalar pieces verbatim") {
  RewardConfig cfg = plain_config();
  cfg.tau_goal = 0.4;
  cfg.tau_f = 0.3;
  cfg.gamma_shape = 0.97;
  cfg.alpha_base = 0.6;
  cfg.alpha_min = 0.1;
  cfg.alpha_max = 0.9;
  cfg.per_step_clip = 0.5;
  ShapingState st;
  st.s_bar = 0.2;

  Rng rng(99);
  const int T = 7;
  std::vector<Vec> traj;
  for (int t = 0; t < T; ++t) traj.push_back(rng.unit_vec(5));
  const Vec z_y = rng.unit_vec(5), z_g = rng.unit_vec(5), z_f = rng.unit_vec(5);
  Vec w_hat(T);
  for (double& w : w_hat) w = 0.2 + 2.0 * rng.uniform();
  Vec r_task(T - 1, -0.01);
  r_task.back() = 1.0;
  const double rho_t = 0.15;

  const ShapedRewardTrace tr =
      episode_shaping(traj, z_y, z_g, z_f, w_hat, r_task, rho_t, false, cfg, st);

  double last_alpha = 0.0;
  for (int t = 0; t < T; ++t) {
    CHECK(tr.phi[static_cast<size_t>(t)] ==
          doctest::Approx(goal_potential(traj[static_cast<size_t>(t)], z_y, z_g, cfg.tau_goal)));
    CHECK(tr.psi[static_cast<size_t>(t)] ==
          doctest::Approx(dot(traj[static_cast<size_t>(t)], z_f)));
  }
  for (int t = 0; t < T - 1; ++t) {
    const size_t k = static_cast<size_t>(t);
    const double rg = goal_delta(tr.phi[k], tr.phi[k + 1], cfg.gamma_shape, cfg.tau_goal);
    const double rf = feedback_delta(traj[k], traj[k + 1], z_f, w_hat[k], cfg.gamma_shape,
                                     cfg.tau_f);
    CHECK(tr.r_goal[k] == doctest::Approx(rg).epsilon(1e-12));
    CHECK(tr.r_fb[k] == doctest::Approx(rf).epsilon(1e-12));
    const FuseResult fr = fuse(rg, rf, z_y, z_f, cfg.alpha_base, cfg.alpha_min, cfg.alpha_max);
    CHECK(tr.r_tilde[k] == doctest::Approx(fr.r_tilde).epsilon(1e-12));
    const double m = r_task[k] < 0.0 ? 1.0 : 0.0;
    CHECK(tr.m[k] == m);
    CHECK(tr.r[k] ==
          doctest::Approx(shaped_reward(r_task[k], fr.r_tilde, rho_t, m, cfg.per_step_clip))
              .epsilon(1e-12));
    last_alpha = fr.alpha;
  }
  CHECK(tr.alpha == doctest::Approx(last_alpha));
  CHECK(tr.rho == rho_t);
  // The failure episode decays the success EMA.
  CHECK(st.s_bar == doctest::Approx((1.0 - cfg.success_ema_beta) * 0.2).epsilon(1e-12));
}

TEST_CASE("episode shaping rejects mismatched trace lengths") {
  RewardConfig cfg = plain_config();
  ShapingState st;
  const Vec z = {1.0, 0.0};
  const std::vector<Vec> traj = {z, z, z};
  CHECK_THROWS_AS(episode_shaping({z}, z, z, z, {1.0}, {}, 0.1, false, cfg, st),
                  std::invalid_argument);
  CHECK_THROWS_AS(episode_shaping(traj, z, z, z, {1.0, 1.0}, {-0.01, -0.01}, 0.1, false, cfg, st),
                  std::invalid_argument);
  CHECK_THROWS_AS(episode_shaping(traj, z, z, z, {1.0, 1.0, 1.0}, {-0.01}, 0.1, false, cfg, st),
                  std::invalid_argument);
}

TEST_CASE("toggles silence their half of the shaping signal") {
  RewardConfig cfg = plain_config();
  ShapingState st;
  Rng rng(7);
  std::vector<Vec> traj;
  for (int t = 0; t < 4; ++t) traj.push_back(rng.unit_vec(3));
  const Vec z_y = rng.unit_vec(3), z_g = rng.unit_vec(3), z_f = rng.unit_vec(3);
  const Vec w_hat(4, 1.0);
  const Vec r_task(3, -0.01);

  ShapingToggles no_goal;
  no_goal.use_goal_delta = false;
  ShapedRewardTrace tr =
      episode_shaping(traj, z_y, z_g, z_f, w_hat, r_task, 0.2, false, cfg, st, no_goal);
  for (double v : tr.r_goal) CHECK(v == 0.0);
  bool any_fb = false;
  for (double v : tr.r_fb) any_fb = any_fb || v != 0.0;
  CHECK(any_fb);

  ShapingToggles no_fb;
  no_fb.use_fb_delta = false;
  tr = episode_shaping(traj, z_y, z_g, z_f, w_hat, r_task, 0.2, false, cfg, st, no_fb);
  for (double v : tr.r_fb) CHECK(v == 0.0);

  ShapingToggles zeroed;
  zeroed.zero_deltas = true;
  tr = episode_shaping(traj, z_y, z_g, z_f, w_hat, r_task, 0.2, false, cfg, st, zeroed);
  for (size_t t = 0; t < 3; ++t) {
    CHECK(tr.r_tilde[t] == 0.0);
    CHECK(tr.r[t] == doctest::Approx(r_task[t]));
  }
  CHECK(tr.alpha > 0.0);  // the mixing weight is still measured
}

TEST_CASE("batch shaping reproduces a manual recomputation") {
  RewardConfig cfg = plain_config();
  cfg.envelope_enabled = true;
  cfg.warmup_steps = 100;
  cfg.anneal_end_step = 300;
  ShapingState st;
  st.s_bar = 0.1;

  Rng rng(17);
  std::vector<ShapeInput> batch;
  for (int i = 0; i < 6; ++i) {
    ShapeInput b;
    b.z_t = rng.unit_vec(4);
    b.z_next = rng.unit_vec(4);
    b.z_f = rng.unit_vec(4);
    b.z_y = rng.unit_vec(4);
    b.z_g = rng.unit_vec(4);
    b.w_hat = 0.5 + rng.uniform();
    b.r_task = i == 5 ? 1.0 : -0.01;
    batch.push_back(b);
  }

  const BatchShapeResult out = batch_shaping(batch, 200, cfg, st);

  Vec deltas(6), fused(6);
  for (size_t i = 0; i < 6; ++i) {
    const auto& b = batch[i];
    const double p0 = goal_potential(b.z_t, b.z_y, b.z_g, cfg.tau_goal);
    const double p1 = goal_potential(b.z_next, b.z_y, b.z_g, cfg.tau_goal);
    deltas[i] = goal_delta(p0, p1, cfg.gamma_shape, cfg.tau_goal);
    const double rf =
        feedback_delta(b.z_t, b.z_next, b.z_f, b.w_hat, cfg.gamma_shape, cfg.tau_f);
    fused[i] = fuse(deltas[i], rf, b.z_y, b.z_f, cfg.alpha_base, cfg.alpha_min,
                    cfg.alpha_max)
                   .r_tilde;
  }
  const double P = progress(0.1, deltas, cfg.progress_power);
  CHECK(out.P == doctest::Approx(P).epsilon(1e-12));
  CHECK(out.rho == doctest::Approx(rho_schedule(P, cfg.rho_min, cfg.rho_max)).epsilon(1e-12));
  CHECK(out.envelope == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(out.mag_scale == 1.0);
  for (size_t i = 0; i < 6; ++i) {
    CHECK(out.r_tilde[i] == doctest::Approx(fused[i]).epsilon(1e-12));
    const double m = batch[i].r_task < 0.0 ? 1.0 : 0.0;
    const double want =
        shaped_reward(batch[i].r_task, fused[i], out.rho * out.envelope, m, cfg.per_step_clip);
    CHECK(out.rewards[i] == doctest::Approx(want).epsilon(1e-12));
  }

  CHECK_THROWS_AS(batch_shaping({}, 0, cfg, st), std::invalid_argument);
}

TEST_CASE("fixed-coefficient mode bypasses the schedule") {
  RewardConfig cfg = plain_config();
  ShapingState st;
  st.s_bar = 0.95;  // would drive the scheduled value to its minimum
  Rng rng(23);
  std::vector<ShapeInput> batch;
  for (int i = 0; i < 3; ++i) {
    ShapeInput b;
    b.z_t = rng.unit_vec(3);
    b.z_next = rng.unit_vec(3);
    b.z_f = rng.unit_vec(3);
    b.z_y = rng.unit_vec(3);
    b.z_g = rng.unit_vec(3);
    batch.push_back(b);
  }
  ShapingToggles fixed;
  fixed.adaptive_rho = false;
  const BatchShapeResult out = batch_shaping(batch, 0, cfg, st, fixed);
  CHECK(out.rho == doctest::Approx(cfg.rho_max));

  const BatchShapeResult adaptive = batch_shaping(batch, 0, cfg, st);
  CHECK(adaptive.rho < cfg.rho_max);
}

TEST_CASE("magnitude normalizer tracks the fused signal with an EMA") {
  RewardConfig cfg = plain_config();
  cfg.magnitude_normalizer = true;
  cfg.target_ratio = 0.2;
  cfg.scale_floor = 0.1;
  cfg.scale_cap = 10.0;
  cfg.scale_ema_beta = 0.25;
  ShapingState st;

  Rng rng(31);
  std::vector<ShapeInput> batch;
  for (int i = 0; i < 4; ++i) {
    ShapeInput b;
    b.z_t = rng.unit_vec(3);
    b.z_next = rng.unit_vec(3);
    b.z_f = rng.unit_vec(3);
    b.z_y = rng.unit_vec(3);
    b.z_g = rng.unit_vec(3);
    batch.push_back(b);
  }

  const BatchShapeResult first = batch_shaping(batch, 0, cfg, st);
  double mag = 0.0;
  for (double v : first.r_tilde) mag += std::abs(v);
  mag /= 4.0;
  CHECK(st.mag_ema_init);
  CHECK(st.mag_ema == doctest::Approx(mag).epsilon(1e-12));  // first batch seeds the EMA
  const double want_scale = clamp(0.2 / (mag + 1e-8), 0.1, 10.0);
  CHECK(first.mag_scale == doctest::Approx(want_scale).epsilon(1e-9));

  // Second batch blends into the EMA instead of overwriting it.
  const double ema0 = st.mag_ema;
  const BatchShapeResult second = batch_shaping(batch, 0, cfg, st);
  CHECK(st.mag_ema == doctest::Approx(0.75 * ema0 + 0.25 * mag).epsilon(1e-12));
  CHECK(second.mag_scale == doctest::Approx(clamp(0.2 / (st.mag_ema + 1e-8), 0.1, 10.0)));

  // The scale multiplies the fused value inside the final reward.
  const double m0 = batch[0].r_task < 0.0 ? 1.0 : 0.0;
  const double want = shaped_reward(batch[0].r_task, second.r_tilde[0] * second.mag_scale,
                                    second.rho * second.envelope, m0, cfg.per_step_clip);
  CHECK(second.rewards[0] == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("reward config accepts shaping coefficients above one") {
  RewardConfig cfg;
  cfg.rho_max = 1.2;  // deliberately above the per-step task magnitude
  cfg.rho_min = 0.05;
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("reward config rejects inconsistent settings") {
  const RewardConfig good;
  auto broken = [&](auto&& fn) {
    RewardConfig c = good;
    fn(c);
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  };
  broken([](RewardConfig& c) { c.tau_goal = 0.0; });
  broken([](RewardConfig& c) { c.tau_f = -0.5; });
  broken([](RewardConfig& c) { c.gamma_shape = 0.0; });
  broken([](RewardConfig& c) { c.gamma_shape = 1.01; });
  broken([](RewardConfig& c) { c.rho_min = 0.0; });
  broken([](RewardConfig& c) { c.rho_min = c.rho_max; });
  broken([](RewardConfig& c) { c.alpha_min = -0.1; });
  broken([](RewardConfig& c) { c.alpha_min = 0.8; c.alpha_max = 0.5; });
  broken([](RewardConfig& c) { c.alpha_max = 1.5; });
  broken([](RewardConfig& c) { c.success_ema_beta = 0.0; });
  broken([](RewardConfig& c) { c.progress_power = 0.0; });
  broken([](RewardConfig& c) { c.per_step_clip = 0.0; });
  broken([](RewardConfig& c) { c.warmup_steps = 500; c.anneal_end_step = 400; });
  broken([](RewardConfig& c) { c.magnitude_normalizer = true; c.target_ratio = 0.0; });
  broken([](RewardConfig& c) { c.magnitude_normalizer = true; c.scale_floor = -1.0; });
  broken([](RewardConfig& c) {
    c.magnitude_normalizer = true;
    c.scale_floor = 2.0;
    c.scale_cap = 1.0;
  });
  broken([](RewardConfig& c) { c.magnitude_normalizer = true; c.scale_ema_beta = 0.0; });
}

}  // TEST_SUITE
