#include "fbrl/agent/sac.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fbrl {

Vec softmax(const Vec& logits) {
  if (logits.empty()) throw std::invalid_argument("softmax: empty logits");
  double m = logits[0];
  for (double l : logits) m = std::max(m, l);
  Vec p(logits.size());
  double s = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(logits[i] - m);
    s += p[i];
  }
  for (auto& x : p) x /= s;
  return p;
}

void SacConfig::validate() const {
  if (!(discount > 0.0) || discount >= 1.0)
    throw std::invalid_argument("SacConfig: discount must lie in (0, 1)");
  if (!(polyak_tau > 0.0) || polyak_tau > 1.0)
    throw std::invalid_argument("SacConfig: polyak_tau must lie in (0, 1]");
  if (lr < 0.0) throw std::invalid_argument("SacConfig: lr must be nonnegative");
  if (batch_size < 1) throw std::invalid_argument("SacConfig: batch_size must be positive");
  if (entropy_coef < 0.0) throw std::invalid_argument("SacConfig: entropy_coef must be >= 0");
  if (update_to_data < 0) throw std::invalid_argument("SacConfig: update_to_data must be >= 0");
  if (start_steps < 0) throw std::invalid_argument("SacConfig: start_steps must be >= 0");
}

SacAgent::SacAgent(int obs_dim, int num_actions, const SacConfig& cfg, Rng& init_rng)
    : cfg_(cfg),
      num_actions_(num_actions),
      opt_actor_(AdamConfig{cfg.lr, 0.9, 0.999, 1e-8}),
      opt_critic1_(AdamConfig{cfg.lr, 0.9, 0.999, 1e-8}),
      opt_critic2_(AdamConfig{cfg.lr, 0.9, 0.999, 1e-8}) {
  cfg_.validate();
  if (num_actions_ < 1) throw std::invalid_argument("SacAgent: need at least one action");
  const MlpShape shape{obs_dim, cfg_.hidden, num_actions_};
  Rng r_actor = init_rng.substream("sac.actor");
  Rng r_c1 = init_rng.substream("sac.critic1");
  Rng r_c2 = init_rng.substream("sac.critic2");
  actor_ = Mlp::orthogonal(shape, r_actor);
  critic1_ = Mlp::orthogonal(shape, r_c1);
  critic2_ = Mlp::orthogonal(shape, r_c2);
  target1_ = critic1_;
  target2_ = critic2_;
  entropy_coef_ = cfg_.entropy_coef;
  log_entropy_coef_ = std::log(std::max(entropy_coef_, 1e-8));
  target_entropy_ = cfg_.target_entropy_scale * std::log(static_cast<double>(num_actions_));
}

int SacAgent::act(const Vec& obs, bool greedy, Rng& rng) const {
  const Vec logits = actor_.forward(obs);
  if (greedy) {
    int best = 0;
    for (int a = 1; a < num_actions_; ++a)
      if (logits[static_cast<size_t>(a)] > logits[static_cast<size_t>(best)]) best = a;
    return best;
  }
  const Vec p = softmax(logits);
  double u = rng.uniform();
  for (int a = 0; a < num_actions_; ++a) {
    u -= p[static_cast<size_t>(a)];
    if (u < 0.0) return a;
  }
  return num_actions_ - 1;
}

Vec SacAgent::policy_probs(const Vec& obs) const { return softmax(actor_.forward(obs)); }

SacUpdateStats SacAgent::update(const std::vector<SacBatchItem>& batch) {
  if (batch.empty()) throw std::invalid_argument("SacAgent::update: empty batch");
  const double bsz = static_cast<double>(batch.size());
  SacUpdateStats st;
  st.entropy_coef = entropy_coef_;

  // --- critic targets --------------------------------------------------- //
  Vec targets(batch.size());
  for (size_t i = 0; i < batch.size(); ++i) {
    const auto& it = batch[i];
    double v_next = 0.0;
    if (!it.terminal) {
      const Vec logits = actor_.forward(*it.next_obs);
      const Vec p = softmax(logits);
      const Vec q1 = target1_.forward(*it.next_obs);
      const Vec q2 = target2_.forward(*it.next_obs);
      for (int a = 0; a < num_actions_; ++a) {
        const size_t ai = static_cast<size_t>(a);
        const double logp = std::log(std::max(p[ai], 1e-12));
        v_next += p[ai] * (std::min(q1[ai], q2[ai]) - entropy_coef_ * logp);
      }
    }
    targets[i] = it.reward + cfg_.discount * (it.terminal ? 0.0 : 1.0) * v_next;
    st.mean_target += targets[i] / bsz;
  }

  // --- critic updates --------------------------------------------------- //
  MlpGrads g1 = critic1_.zero_grads();
  MlpGrads g2 = critic2_.zero_grads();
  std::vector<Mlp::Trace> tr1(batch.size()), tr2(batch.size());
  std::vector<Vec> q1_out(batch.size()), q2_out(batch.size());
  for (size_t i = 0; i < batch.size(); ++i) {
    const auto& it = batch[i];
    q1_out[i] = critic1_.forward(*it.obs, tr1[i]);
    q2_out[i] = critic2_.forward(*it.obs, tr2[i]);
    const size_t a = static_cast<size_t>(it.action);
    const double e1 = q1_out[i][a] - targets[i];
    const double e2 = q2_out[i][a] - targets[i];
    st.critic1_loss += e1 * e1 / bsz;
    st.critic2_loss += e2 * e2 / bsz;
    Vec up1(static_cast<size_t>(num_actions_), 0.0);
    Vec up2(static_cast<size_t>(num_actions_), 0.0);
    up1[a] = 2.0 * e1 / bsz;
    up2[a] = 2.0 * e2 / bsz;
    critic1_.backward(tr1[i], up1, g1);
    critic2_.backward(tr2[i], up2, g2);
  }
  opt_critic1_.step(critic1_, g1);
  opt_critic2_.step(critic2_, g2);

  // --- actor update ----------------------------------------------------- //
  MlpGrads ga = actor_.zero_grads();
  double entropy_sum = 0.0;
  for (size_t i = 0; i < batch.size(); ++i) {
    const auto& it = batch[i];
    Mlp::Trace tra;
    const Vec logits = actor_.forward(*it.obs, tra);
    const Vec p = softmax(logits);
    // Fresh critic values (post-update), gradient-stopped.
    const Vec q1 = critic1_.forward(*it.obs);
    const Vec q2 = critic2_.forward(*it.obs);
    double j_s = 0.0;
    Vec cost(static_cast<size_t>(num_actions_));
    for (int a = 0; a < num_actions_; ++a) {
      const size_t ai = static_cast<size_t>(a);
      const double logp = std::log(std::max(p[ai], 1e-12));
      cost[ai] = entropy_coef_ * logp - std::min(q1[ai], q2[ai]);
      j_s += p[ai] * cost[ai];
      entropy_sum -= p[ai] * logp;
      st.mean_q += p[ai] * std::min(q1[ai], q2[ai]) / bsz;
    }
    st.actor_loss += j_s / bsz;
    Vec up(static_cast<size_t>(num_actions_));
    for (int a = 0; a < num_actions_; ++a) {
      const size_t ai = static_cast<size_t>(a);
      up[ai] = p[ai] * (cost[ai] - j_s) / bsz;
    }
    actor_.backward(tra, up, ga);
  }
  opt_actor_.step(actor_, ga);
  st.entropy = entropy_sum / bsz;

  if (cfg_.auto_entropy) {
    // Raise the coefficient when entropy is below target, lower it when above.
    log_entropy_coef_ -= cfg_.entropy_lr * (st.entropy - target_entropy_);
    entropy_coef_ = std::exp(log_entropy_coef_);
  }

  target_sync(cfg_.polyak_tau);
  return st;
}

void SacAgent::target_sync(double tau) {
  polyak_update(target1_, critic1_, tau);
  polyak_update(target2_, critic2_, tau);
}

void SacAgent::save_into(Checkpoint& ck, const std::string& prefix) const {
  ck.put_mlp(prefix + ".actor", actor_);
  ck.put_mlp(prefix + ".critic1", critic1_);
  ck.put_mlp(prefix + ".critic2", critic2_);
  ck.put_mlp(prefix + ".target1", target1_);
  ck.put_mlp(prefix + ".target2", target2_);
}

void SacAgent::load_from(const Checkpoint& ck, const std::string& prefix) {
  ck.load_mlp(prefix + ".actor", actor_);
  ck.load_mlp(prefix + ".critic1", critic1_);
  ck.load_mlp(prefix + ".critic2", critic2_);
  ck.load_mlp(prefix + ".target1", target1_);
  ck.load_mlp(prefix + ".target2", target2_);
}

}  // namespace fbrl
