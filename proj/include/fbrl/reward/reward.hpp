#pragma once

#include <vector>

#include "fbrl/core/vec.hpp"

namespace fbrl {

struct RewardConfig {
  double tau_goal = 0.5;
  double tau_f = 0.5;
  double gamma_shape = 0.99;
  double alpha_base = 0.5;
  double alpha_min = 0.20;
  double alpha_max = 0.95;
  double rho_min = 0.025;
  double rho_max = 0.25;
  double success_ema_beta = 0.01;
  double progress_power = 2.0;
  double per_step_clip = 1.0;
  bool shape_only_on_fail = true;

  // Multiplicative envelope on rho: 0 -> 1 linearly over [0, warmup_steps],
  // then 1 -> 0 linearly over [warmup_steps, anneal_end_step], 0 after.
  bool envelope_enabled = true;
  long long warmup_steps = 500;
  long long anneal_end_step = 30000;

  // Optional magnitude normalizer: rescales r_tilde so an EMA of its
  // magnitude tracks target_ratio of the task-reward magnitude (which is 1).
  bool magnitude_normalizer = false;
  double target_ratio = 0.20;
  double scale_floor = 0.1;
  double scale_cap = 10.0;
  double scale_ema_beta = 0.1;

  void validate() const;
};

// Mutable cross-episode shaping state, single-owner.
struct ShapingState {
  double s_bar = 0.0;    // episodic success EMA
  double mag_ema = 0.0;  // EMA of |r_tilde| for the optional normalizer
  bool mag_ema_init = false;

  void update_success(bool success, double beta);
};

// Per-episode shaping record; states are 0..T-1, reward steps 0..T-2.
struct ShapedRewardTrace {
  Vec phi;      // T goal potentials
  Vec psi;      // T feedback potentials
  Vec r_goal;   // T-1
  Vec r_fb;     // T-1
  double alpha = 0.0;
  Vec r_tilde;  // T-1
  Vec m;        // T-1 failure masks
  double rho = 0.0;
  Vec rho_hat;  // T-1, m_t * rho
  Vec r;        // T-1 final rewards
};

/// phi = 1/2 [tanh(((<z,z_y>+1)/2 - 1/2)/tau) + tanh(((<z,z_g>+1)/2 - 1/2)/tau)].
double goal_potential(const Vec& z_t, const Vec& z_y, const Vec& z_g, double tau_goal);

/// tanh((gamma*phi_next - phi) / tau_goal).
double goal_delta(double phi_t, double phi_next, double gamma_shape, double tau_goal);

/// w_hat_t * tanh((gamma*psi_next - psi) / tau_f), psi = <z, z_f>.
double feedback_delta(const Vec& z_t, const Vec& z_next, const Vec& z_f, double w_hat_t,
                      double gamma_shape, double tau_f);

struct FuseResult {
  double r_tilde = 0.0;
  double alpha = 0.0;
};

/// Confidence-aware mixture: a = (1+<z_y,z_f>)/2, alpha = clip(alpha_base*a),
/// r_tilde = (1-alpha)*r_goal + alpha*r_fb.
FuseResult fuse(double r_goal, double r_fb, const Vec& z_y, const Vec& z_f, double alpha_base,
                double alpha_min, double alpha_max);

/// P = max(s_bar, (fraction of positive goal deltas)^power); empty batch -> s_bar.
double progress(double s_bar, const Vec& batch_goal_deltas, double progress_power);

/// rho = rho_min + (rho_max - rho_min) * (1 - P).
double rho_schedule(double P, double rho_min, double rho_max);

/// Warmup/anneal envelope factor in [0, 1] for the given env step.
double shaping_envelope(long long step, const RewardConfig& cfg);

/// r = r_task + clip(rho_hat * r_tilde, +-per_step_clip), rho_hat = m * rho.
double shaped_reward(double r_task, double r_tilde, double rho_t, double m_t,
                     double per_step_clip);

/// Ablation switches for the shaping path (all on = full pipeline).
struct ShapingToggles {
  bool use_goal_delta = true;
  bool use_fb_delta = true;
  bool adaptive_rho = true;  // off -> constant rho_max, schedule bypassed
  bool zero_deltas = false;  // keep the schedule, feed r_tilde = 0
};

/// Full per-episode composition over T projected states. w_hat has one weight
/// per state; r_task one value per step. rho_t is the already-scheduled
/// (and enveloped) coefficient. Updates state.s_bar at episode end.
ShapedRewardTrace episode_shaping(const std::vector<Vec>& z_traj, const Vec& z_y,
                                  const Vec& z_g, const Vec& z_f, const Vec& w_hat,
                                  const Vec& r_task, double rho_t, bool episode_success,
                                  const RewardConfig& cfg, ShapingState& state,
                                  const ShapingToggles& toggles = {});

// One replay transition's inputs to batch-time shaping.
struct ShapeInput {
  Vec z_t;
  Vec z_next;
  Vec z_f;
  Vec z_y;
  Vec z_g;
  double w_hat = 1.0;
  double r_task = -1.0;
};

struct BatchShapeResult {
  Vec rewards;    // final per-transition rewards
  Vec r_tilde;    // fused deltas before clipping
  double P = 0.0;
  double rho = 0.0;       // scheduled rho before envelope/mask
  double envelope = 1.0;
  double mag_scale = 1.0; // normalizer factor applied (1 when disabled)
};

/// Recomputes shaped rewards for a sampled batch under the current projector
/// embeddings; P uses this batch's goal deltas. Advances the magnitude EMA
/// when the normalizer is enabled.
BatchShapeResult batch_shaping(const std::vector<ShapeInput>& batch, long long env_step,
                               const RewardConfig& cfg, ShapingState& state,
                               const ShapingToggles& toggles = {});

}  // namespace fbrl
