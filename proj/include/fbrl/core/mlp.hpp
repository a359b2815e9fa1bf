#pragma once

#include <vector>

#include "fbrl/core/rng.hpp"
#include "fbrl/core/vec.hpp"

namespace fbrl {

struct MlpShape {
  int in = 0;
  std::vector<int> hidden;  // may be empty (single linear layer)
  int out = 0;
};

struct MlpGrads {
  std::vector<Matrix> w;
  std::vector<Vec> b;

  void zero();
  void add_scaled(const MlpGrads& other, double scale);
};

// Small dense feed-forward net: tanh hidden layers, linear output.
// Gradients are hand-rolled reverse mode over this fixed topology.
class Mlp {
 public:
  Mlp() = default;  // empty net; assign before use
  explicit Mlp(const MlpShape& shape);

  /// Orthogonal weight init (Gaussian + Gram-Schmidt), zero biases.
  static Mlp orthogonal(const MlpShape& shape, Rng& rng, double gain = 1.0);

  int input_dim() const { return shape_.in; }
  int output_dim() const { return shape_.out; }
  int num_layers() const { return static_cast<int>(weights_.size()); }

  Matrix& weight(int layer) { return weights_[layer]; }
  const Matrix& weight(int layer) const { return weights_[layer]; }
  Vec& bias(int layer) { return biases_[layer]; }
  const Vec& bias(int layer) const { return biases_[layer]; }

  Vec forward(const Vec& input) const;

  // Forward pass bookkeeping needed by backward().
  struct Trace {
    Vec input;
    std::vector<Vec> pre;  // pre-activation per layer
    std::vector<Vec> act;  // post-activation per layer (last = output)
  };
  Vec forward(const Vec& input, Trace& trace) const;

  /// Accumulates parameter gradients for one (input, upstream) pair and
  /// returns the gradient w.r.t. the input.
  Vec backward(const Trace& trace, const Vec& upstream, MlpGrads& accum) const;

  MlpGrads zero_grads() const;
  size_t param_count() const;

  // Flat parameter views, layer by layer (weights then bias per layer).
  // Used by the optimizer, target-network sync and checkpointing.
  template <typename Fn>
  void for_each_tensor(Fn&& fn) {
    for (int l = 0; l < num_layers(); ++l) {
      fn(weights_[l].data);
      fn(biases_[l]);
    }
  }
  template <typename Fn>
  void for_each_tensor(Fn&& fn) const {
    for (int l = 0; l < num_layers(); ++l) {
      fn(weights_[l].data);
      fn(biases_[l]);
    }
  }

  const MlpShape& shape() const { return shape_; }

 private:
  MlpShape shape_;
  std::vector<Matrix> weights_;
  std::vector<Vec> biases_;
};

/// Polyak update: target <- tau * online + (1 - tau) * target.
void polyak_update(Mlp& target, const Mlp& online, double tau);

Matrix orthogonal_matrix(int rows, int cols, Rng& rng, double gain = 1.0);

}  // namespace fbrl
