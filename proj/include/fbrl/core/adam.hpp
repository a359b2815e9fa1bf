#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fbrl/core/mlp.hpp"
#include "fbrl/core/vec.hpp"

namespace fbrl {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// First/second moment buffers for one flat parameter tensor.
struct AdamMoments {
  Vec m;
  Vec v;
};

/// One Adam step on a flat tensor. `step` is the 1-based update count used
/// for bias correction and must be shared across tensors of the same model.
inline void adam_update(Vec& params, const Vec& grads, AdamMoments& mom,
                        const AdamConfig& cfg, long long step) {
  if (params.size() != grads.size())
    throw std::invalid_argument("adam_update: param/grad size mismatch");
  if (mom.m.size() != params.size()) {
    mom.m.assign(params.size(), 0.0);
    mom.v.assign(params.size(), 0.0);
  }
  if (step < 1) throw std::invalid_argument("adam_update: step must be >= 1");
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
  for (size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    mom.m[i] = cfg.beta1 * mom.m[i] + (1.0 - cfg.beta1) * g;
    mom.v[i] = cfg.beta2 * mom.v[i] + (1.0 - cfg.beta2) * g * g;
    const double mhat = mom.m[i] / bc1;
    const double vhat = mom.v[i] / bc2;
    params[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
}

// Adam state for a whole Mlp: one moment pair per tensor, shared step counter.
class AdamState {
 public:
  explicit AdamState(const AdamConfig& cfg = {}) : cfg_(cfg) {}

  const AdamConfig& config() const { return cfg_; }
  long long step_count() const { return step_; }

  /// Applies accumulated grads to the net's parameters (one optimizer step).
  void step(Mlp& net, const MlpGrads& grads) {
    ++step_;
    if (moments_.empty()) {
      net.for_each_tensor([&](const Vec& t) { moments_.push_back({Vec(t.size(), 0.0), Vec(t.size(), 0.0)}); });
    }
    size_t idx = 0;
    int layer = 0;
    bool is_bias = false;
    net.for_each_tensor([&](Vec& t) {
      const Vec& g = is_bias ? grads.b[static_cast<size_t>(layer)]
                             : grads.w[static_cast<size_t>(layer)].data;
      adam_update(t, g, moments_[idx], cfg_, step_);
      ++idx;
      if (is_bias) ++layer;
      is_bias = !is_bias;
    });
  }

 private:
  AdamConfig cfg_;
  long long step_ = 0;
  std::vector<AdamMoments> moments_;
};

}  // namespace fbrl
