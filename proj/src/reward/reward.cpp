#include "fbrl/reward/reward.hpp"

#include <cmath>
#include <stdexcept>

namespace fbrl {

void RewardConfig::validate() const {
  if (!(tau_goal > 0.0) || !(tau_f > 0.0))
    throw std::invalid_argument("RewardConfig: temperatures must be positive");
  if (!(gamma_shape > 0.0) || gamma_shape > 1.0)
    throw std::invalid_argument("RewardConfig: gamma_shape must lie in (0, 1]");
  if (!(rho_min > 0.0) || !(rho_min < rho_max) || !std::isfinite(rho_max))
    throw std::invalid_argument("RewardConfig: need 0 < rho_min < rho_max");
  if (alpha_min < 0.0 || alpha_min > alpha_max || alpha_max > 1.0)
    throw std::invalid_argument("RewardConfig: need 0 <= alpha_min <= alpha_max <= 1");
  if (success_ema_beta <= 0.0 || success_ema_beta > 1.0)
    throw std::invalid_argument("RewardConfig: success_ema_beta must lie in (0, 1]");
  if (progress_power <= 0.0)
    throw std::invalid_argument("RewardConfig: progress_power must be positive");
  if (per_step_clip <= 0.0)
    throw std::invalid_argument("RewardConfig: per_step_clip must be positive");
  if (warmup_steps < 0 || anneal_end_step < warmup_steps)
    throw std::invalid_argument("RewardConfig: need 0 <= warmup_steps <= anneal_end_step");
  if (magnitude_normalizer) {
    if (target_ratio <= 0.0 || scale_floor <= 0.0 || scale_cap < scale_floor ||
        scale_ema_beta <= 0.0 || scale_ema_beta > 1.0)
      throw std::invalid_argument("RewardConfig: bad magnitude-normalizer settings");
  }
}

void ShapingState::update_success(bool success, double beta) {
  s_bar = (1.0 - beta) * s_bar + beta * (success ? 1.0 : 0.0);
}

double goal_potential(const Vec& z_t, const Vec& z_y, const Vec& z_g, double tau_goal) {
  const double ay = 0.5 * (dot(z_t, z_y) + 1.0) - 0.5;
  const double ag = 0.5 * (dot(z_t, z_g) + 1.0) - 0.5;
  return 0.5 * (std::tanh(ay / tau_goal) + std::tanh(ag / tau_goal));
}

double goal_delta(double phi_t, double phi_next, double gamma_shape, double tau_goal) {
  return std::tanh((gamma_shape * phi_next - phi_t) / tau_goal);
}

double feedback_delta(const Vec& z_t, const Vec& z_next, const Vec& z_f, double w_hat_t,
                      double gamma_shape, double tau_f) {
  const double psi_t = dot(z_t, z_f);
  const double psi_next = dot(z_next, z_f);
  return w_hat_t * std::tanh((gamma_shape * psi_next - psi_t) / tau_f);
}

FuseResult fuse(double r_goal, double r_fb, const Vec& z_y, const Vec& z_f, double alpha_base,
                double alpha_min, double alpha_max) {
  const double a = 0.5 * (1.0 + dot(z_y, z_f));
  FuseResult out;
  out.alpha = clamp(alpha_base * a, alpha_min, alpha_max);
  out.r_tilde = (1.0 - out.alpha) * r_goal + out.alpha * r_fb;
  return out;
}

double progress(double s_bar, const Vec& batch_goal_deltas, double progress_power) {
  if (s_bar < 0.0 || s_bar > 1.0) throw std::invalid_argument("progress: s_bar outside [0,1]");
  if (batch_goal_deltas.empty()) return s_bar;
  double frac = 0.0;
  for (double d : batch_goal_deltas)
    if (d > 0.0) frac += 1.0;
  frac /= static_cast<double>(batch_goal_deltas.size());
  return std::max(s_bar, std::pow(frac, progress_power));
}

double rho_schedule(double P, double rho_min, double rho_max) {
  if (P < 0.0 || P > 1.0) throw std::invalid_argument("rho_schedule: P outside [0,1]");
  return rho_min + (rho_max - rho_min) * (1.0 - P);
}

double shaping_envelope(long long step, const RewardConfig& cfg) {
  if (!cfg.envelope_enabled) return 1.0;
  if (step <= 0) return 0.0;
  if (cfg.warmup_steps == 0) {
    // No ramp-in: straight to full strength, then anneal.
    if (step >= cfg.anneal_end_step) return 0.0;
    if (cfg.anneal_end_step == 0) return 0.0;
    return 1.0 - static_cast<double>(step) / static_cast<double>(cfg.anneal_end_step);
  }
  if (step < cfg.warmup_steps)
    return static_cast<double>(step) / static_cast<double>(cfg.warmup_steps);
  if (step >= cfg.anneal_end_step) return 0.0;
  const double span = static_cast<double>(cfg.anneal_end_step - cfg.warmup_steps);
  if (span <= 0.0) return 0.0;
  return 1.0 - static_cast<double>(step - cfg.warmup_steps) / span;
}

double shaped_reward(double r_task, double r_tilde, double rho_t, double m_t,
                     double per_step_clip) {
  const double rho_hat = m_t * rho_t;
  return r_task + clamp(rho_hat * r_tilde, -per_step_clip, per_step_clip);
}

namespace {

double mask_for(double r_task, bool shape_only_on_fail) {
  if (!shape_only_on_fail) return 1.0;
  return r_task < 0.0 ? 1.0 : 0.0;
}

}  // namespace

ShapedRewardTrace episode_shaping(const std::vector<Vec>& z_traj, const Vec& z_y,
                                  const Vec& z_g, const Vec& z_f, const Vec& w_hat,
                                  const Vec& r_task, double rho_t, bool episode_success,
                                  const RewardConfig& cfg, ShapingState& state,
                                  const ShapingToggles& toggles) {
  const size_t T = z_traj.size();
  if (T < 2) throw std::invalid_argument("episode_shaping: need at least 2 states");
  if (w_hat.size() != T) throw std::invalid_argument("episode_shaping: w_hat length mismatch");
  if (r_task.size() != T - 1)
    throw std::invalid_argument("episode_shaping: r_task length mismatch");

  ShapedRewardTrace tr;
  tr.phi.resize(T);
  tr.psi.resize(T);
  for (size_t t = 0; t < T; ++t) {
    tr.phi[t] = goal_potential(z_traj[t], z_y, z_g, cfg.tau_goal);
    tr.psi[t] = dot(z_traj[t], z_f);
  }
  tr.rho = rho_t;
  const size_t S = T - 1;
  tr.r_goal.resize(S);
  tr.r_fb.resize(S);
  tr.r_tilde.resize(S);
  tr.m.resize(S);
  tr.rho_hat.resize(S);
  tr.r.resize(S);
  for (size_t t = 0; t < S; ++t) {
    tr.r_goal[t] = toggles.use_goal_delta
                       ? goal_delta(tr.phi[t], tr.phi[t + 1], cfg.gamma_shape, cfg.tau_goal)
                       : 0.0;
    tr.r_fb[t] = toggles.use_fb_delta
                     ? feedback_delta(z_traj[t], z_traj[t + 1], z_f, w_hat[t],
                                      cfg.gamma_shape, cfg.tau_f)
                     : 0.0;
    const FuseResult fr = fuse(tr.r_goal[t], tr.r_fb[t], z_y, z_f, cfg.alpha_base,
                               cfg.alpha_min, cfg.alpha_max);
    tr.alpha = fr.alpha;
    tr.r_tilde[t] = toggles.zero_deltas ? 0.0 : fr.r_tilde;
    tr.m[t] = mask_for(r_task[t], cfg.shape_only_on_fail);
    tr.rho_hat[t] = tr.m[t] * rho_t;
    tr.r[t] = shaped_reward(r_task[t], tr.r_tilde[t], rho_t, tr.m[t], cfg.per_step_clip);
  }
  state.update_success(episode_success, cfg.success_ema_beta);
  return tr;
}

BatchShapeResult batch_shaping(const std::vector<ShapeInput>& batch, long long env_step,
                               const RewardConfig& cfg, ShapingState& state,
                               const ShapingToggles& toggles) {
  BatchShapeResult out;
  if (batch.empty()) throw std::invalid_argument("batch_shaping: empty batch");

  const size_t n = batch.size();
  Vec goal_deltas(n), fb_deltas(n), fused(n), alphas(n);
  for (size_t i = 0; i < n; ++i) {
    const auto& b = batch[i];
    double rg = 0.0;
    if (toggles.use_goal_delta) {
      const double phi_t = goal_potential(b.z_t, b.z_y, b.z_g, cfg.tau_goal);
      const double phi_n = goal_potential(b.z_next, b.z_y, b.z_g, cfg.tau_goal);
      rg = goal_delta(phi_t, phi_n, cfg.gamma_shape, cfg.tau_goal);
    }
    double rf = 0.0;
    if (toggles.use_fb_delta)
      rf = feedback_delta(b.z_t, b.z_next, b.z_f, b.w_hat, cfg.gamma_shape, cfg.tau_f);
    goal_deltas[i] = rg;
    fb_deltas[i] = rf;
    const FuseResult fr =
        fuse(rg, rf, b.z_y, b.z_f, cfg.alpha_base, cfg.alpha_min, cfg.alpha_max);
    fused[i] = toggles.zero_deltas ? 0.0 : fr.r_tilde;
    alphas[i] = fr.alpha;
  }

  out.P = progress(state.s_bar, goal_deltas, cfg.progress_power);
  out.rho = toggles.adaptive_rho ? rho_schedule(out.P, cfg.rho_min, cfg.rho_max) : cfg.rho_max;
  out.envelope = shaping_envelope(env_step, cfg);

  out.mag_scale = 1.0;
  if (cfg.magnitude_normalizer) {
    double mag = 0.0;
    for (double v : fused) mag += std::abs(v);
    mag /= static_cast<double>(n);
    if (!state.mag_ema_init) {
      state.mag_ema = mag;
      state.mag_ema_init = true;
    } else {
      state.mag_ema =
          (1.0 - cfg.scale_ema_beta) * state.mag_ema + cfg.scale_ema_beta * mag;
    }
    out.mag_scale =
        clamp(cfg.target_ratio / (state.mag_ema + kNormEps), cfg.scale_floor, cfg.scale_cap);
  }

  const double rho_eff = out.rho * out.envelope;
  out.r_tilde = fused;
  out.rewards.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const double m = mask_for(batch[i].r_task, cfg.shape_only_on_fail);
    out.rewards[i] = shaped_reward(batch[i].r_task, fused[i] * out.mag_scale, rho_eff, m,
                                   cfg.per_step_clip);
  }
  return out;
}

}  // namespace fbrl
