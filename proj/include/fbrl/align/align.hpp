#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fbrl/core/adam.hpp"
#include "fbrl/core/mlp.hpp"
#include "fbrl/core/vec.hpp"

namespace fbrl {

struct AlignConfig {
  double tau_bce = 0.07;
  double tau_nce = 0.07;
  double lambda_bce = 1.0;
  double lambda_nce = 1.0;
  double lambda_align = 0.02;
  double lambda_uni = 1e-3;
  double label_smoothing = 0.05;
  long long contrastive_start_step = 1250;
  double lr = 1e-4;

  void validate() const;
};

// One weighted image/feedback pair in unit-embedding space.
struct AlignRow {
  Vec z_img;  // unit image embedding
  Vec z_fb;   // unit feedback embedding
  int label = 0;  // per-step success label y in {0,1}
  double u = 1.0; // step weight; renormalize_u() makes the batch mean 1
};

struct AlignBatch {
  std::vector<AlignRow> rows;

  size_t size() const { return rows.size(); }
  /// Rescales u to mean 1 across the batch (no-op on empty).
  void renormalize_u();
};

/// u_t = w_hat_t * (1 + s_t)/2, renormalized to mean 1. Errors when the raw
/// product is all zero.
Vec weights_u(const Vec& w_hat, const Vec& s);

// Per-row embedding gradients matching an AlignBatch.
struct AlignGrads {
  std::vector<Vec> d_img;
  std::vector<Vec> d_fb;

  static AlignGrads zeros_like(const AlignBatch& batch);
  void add_scaled(const AlignGrads& other, double scale);
};

struct LossResult {
  double value = 0.0;
  AlignGrads grads;
};

/// Weighted calibration loss: mean_u BCE(sigmoid(<z_img, z_fb>/tau), y).
LossResult bce_loss(const AlignBatch& batch, double tau_bce);

/// Weighted InfoNCE over success rows; every batch image is a negative.
/// Zero success rows -> zero loss and gradients.
LossResult nce_loss(const AlignBatch& batch, double tau_nce);

/// lambda_bce * bce + lambda_nce * nce.
LossResult align_loss(const AlignBatch& batch, const AlignConfig& cfg);

struct SymLossResult {
  double value = 0.0;
  AlignGrads grads;
  double ce_fi = 0.0;
  double ce_if = 0.0;
  double align_term = 0.0;
  double uni_term = 0.0;
  bool uniformity_omitted = false;  // pooled set had < 2 embeddings
};

/// Symmetric refinement: 1/2 (CE_fi + CE_if) with label smoothing and
/// u-weighted rows, + lambda_align * mean ||z_img - z_fb||^2
/// + lambda_uni * log mean_{a != b} exp(-2 ||z_a - z_b||^2), the expectation
/// pooled over all distinct unordered pairs of batch images and feedback.
SymLossResult sym_loss(const AlignBatch& batch, const AlignConfig& cfg);

/// mean psi over y=1 minus mean psi over y=0; unset when a class is missing.
std::optional<double> discrimination_gap(const AlignBatch& batch);

// Raw (pre-projection) training rows as stored in the embed buffer.
struct AlignSampleRow {
  Vec x;      // observation embedding (projector input)
  Vec f;      // feedback vector (projector input)
  int label = 0;
  double u = 1.0;
};

// The three projector heads. `version` increments on every parameter update
// and keys any cached projected embeddings.
struct Projectors {
  Mlp image;
  Mlp text;
  Mlp feedback;
  long long version = 0;

  static Projectors init(int obs_dim, int instr_dim, int fb_dim, int shared_dim,
                         const std::vector<int>& hidden, Rng& rng);

  /// normalize(net(x)) convenience wrappers.
  Vec embed_image(const Vec& x) const;
  Vec embed_text(const Vec& x) const;
  Vec embed_feedback(const Vec& f) const;
};

struct AlignUpdateMetrics {
  double l_bce = 0.0;
  double l_nce = 0.0;
  std::optional<double> l_sym;  // unset before contrastive_start_step
  std::optional<double> gap;
  bool skipped_empty = false;
};

// Owns the projector optimizer state; one update() = one gradient step on the
// combined calibration/InfoNCE loss, plus one on the symmetric loss once the
// step counter passes contrastive_start_step. Only the image and feedback
// heads receive gradients (nothing in these losses touches the text head).
class AlignTrainer {
 public:
  AlignTrainer(Projectors projectors, const AlignConfig& cfg);

  AlignUpdateMetrics update(const std::vector<AlignSampleRow>& sample, long long env_step);

  const Projectors& projectors() const { return projectors_; }
  Projectors& projectors() { return projectors_; }
  const AlignConfig& config() const { return cfg_; }

 private:
  Projectors projectors_;
  AlignConfig cfg_;
  AdamState opt_image_;
  AdamState opt_feedback_;
};

}  // namespace fbrl
