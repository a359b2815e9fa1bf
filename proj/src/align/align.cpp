#include "fbrl/align/align.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace fbrl {

namespace {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) { return std::log1p(std::exp(-std::abs(x))) + std::max(x, 0.0); }

void axpy(Vec& y, double a, const Vec& x) {
  for (size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

// Stable log-sum-exp over a logits row; also fills p with the softmax.
double log_sum_exp(const Vec& logits, Vec& p) {
  double m = logits[0];
  for (double l : logits) m = std::max(m, l);
  double s = 0.0;
  for (double l : logits) s += std::exp(l - m);
  const double lse = m + std::log(s);
  p.resize(logits.size());
  for (size_t j = 0; j < logits.size(); ++j) p[j] = std::exp(logits[j] - lse);
  return lse;
}

}  // namespace

void AlignConfig::validate() const {
  if (!(tau_bce > 0.0) || !(tau_nce > 0.0))
    throw std::invalid_argument("AlignConfig: temperatures must be positive");
  if (lambda_bce < 0.0 || lambda_nce < 0.0 || lambda_align < 0.0 || lambda_uni < 0.0)
    throw std::invalid_argument("AlignConfig: lambdas must be nonnegative");
  if (label_smoothing < 0.0 || label_smoothing >= 0.5)
    throw std::invalid_argument("AlignConfig: label_smoothing must lie in [0, 0.5)");
  if (contrastive_start_step < 0)
    throw std::invalid_argument("AlignConfig: contrastive_start_step must be nonnegative");
  if (lr < 0.0) throw std::invalid_argument("AlignConfig: lr must be nonnegative");
}

void AlignBatch::renormalize_u() {
  if (rows.empty()) return;
  double s = 0.0;
  for (const auto& r : rows) s += r.u;
  if (!(s > 0.0)) throw std::invalid_argument("AlignBatch: weights sum to zero");
  const double scale = static_cast<double>(rows.size()) / s;
  for (auto& r : rows) r.u *= scale;
}

Vec weights_u(const Vec& w_hat, const Vec& s) {
  if (w_hat.size() != s.size()) throw std::invalid_argument("weights_u: length mismatch");
  if (w_hat.empty()) throw std::invalid_argument("weights_u: empty input");
  Vec u(w_hat.size());
  double sum = 0.0;
  for (size_t t = 0; t < u.size(); ++t) {
    u[t] = w_hat[t] * 0.5 * (1.0 + s[t]);
    if (u[t] < 0.0) throw std::invalid_argument("weights_u: negative weight product");
    sum += u[t];
  }
  if (!(sum > 0.0)) throw std::invalid_argument("weights_u: all-zero weight product");
  const double scale = static_cast<double>(u.size()) / sum;
  for (auto& x : u) x *= scale;
  return u;
}

AlignGrads AlignGrads::zeros_like(const AlignBatch& batch) {
  AlignGrads g;
  g.d_img.reserve(batch.size());
  g.d_fb.reserve(batch.size());
  for (const auto& r : batch.rows) {
    g.d_img.emplace_back(r.z_img.size(), 0.0);
    g.d_fb.emplace_back(r.z_fb.size(), 0.0);
  }
  return g;
}

void AlignGrads::add_scaled(const AlignGrads& other, double scale) {
  for (size_t i = 0; i < d_img.size(); ++i) {
    axpy(d_img[i], scale, other.d_img[i]);
    axpy(d_fb[i], scale, other.d_fb[i]);
  }
}

LossResult bce_loss(const AlignBatch& batch, double tau_bce) {
  if (batch.rows.empty()) throw std::invalid_argument("bce_loss: empty batch");
  if (!(tau_bce > 0.0)) throw std::invalid_argument("bce_loss: tau must be positive");
  double usum = 0.0;
  for (const auto& r : batch.rows) usum += r.u;
  if (!(usum > 0.0)) throw std::invalid_argument("bce_loss: weights sum to zero");

  LossResult res;
  res.grads = AlignGrads::zeros_like(batch);
  for (size_t i = 0; i < batch.rows.size(); ++i) {
    const auto& r = batch.rows[i];
    const double psi = dot(r.z_img, r.z_fb);
    const double logit = psi / tau_bce;
    const double y = static_cast<double>(r.label);
    res.value += (r.u / usum) * (softplus(logit) - y * logit);
    const double dpsi = (r.u / usum) * (sigmoid(logit) - y) / tau_bce;
    axpy(res.grads.d_img[i], dpsi, r.z_fb);
    axpy(res.grads.d_fb[i], dpsi, r.z_img);
  }
  check_finite(res.value, "bce_loss");
  return res;
}

LossResult nce_loss(const AlignBatch& batch, double tau_nce) {
  if (!(tau_nce > 0.0)) throw std::invalid_argument("nce_loss: tau must be positive");
  LossResult res;
  res.grads = AlignGrads::zeros_like(batch);

  std::vector<size_t> succ;
  double usum = 0.0;
  for (size_t i = 0; i < batch.rows.size(); ++i)
    if (batch.rows[i].label == 1) {
      succ.push_back(i);
      usum += batch.rows[i].u;
    }
  if (succ.empty() || !(usum > 0.0)) return res;  // no successes yet: no signal

  const size_t n = batch.rows.size();
  Vec logits(n), p;
  for (size_t i : succ) {
    const auto& fb = batch.rows[i].z_fb;
    for (size_t j = 0; j < n; ++j) logits[j] = dot(fb, batch.rows[j].z_img) / tau_nce;
    const double lse = log_sum_exp(logits, p);
    const double a = batch.rows[i].u / usum;
    res.value += a * (lse - logits[i]);
    for (size_t j = 0; j < n; ++j) {
      const double coef = a * (p[j] - (j == i ? 1.0 : 0.0)) / tau_nce;
      axpy(res.grads.d_fb[i], coef, batch.rows[j].z_img);
      axpy(res.grads.d_img[j], coef, fb);
    }
  }
  check_finite(res.value, "nce_loss");
  return res;
}

LossResult align_loss(const AlignBatch& batch, const AlignConfig& cfg) {
  LossResult bce = bce_loss(batch, cfg.tau_bce);
  LossResult nce = nce_loss(batch, cfg.tau_nce);
  LossResult res;
  res.value = cfg.lambda_bce * bce.value + cfg.lambda_nce * nce.value;
  res.grads = AlignGrads::zeros_like(batch);
  res.grads.add_scaled(bce.grads, cfg.lambda_bce);
  res.grads.add_scaled(nce.grads, cfg.lambda_nce);
  return res;
}

SymLossResult sym_loss(const AlignBatch& batch, const AlignConfig& cfg) {
  const size_t n = batch.rows.size();
  if (n == 0) throw std::invalid_argument("sym_loss: empty batch");
  double usum = 0.0;
  for (const auto& r : batch.rows) usum += r.u;
  if (!(usum > 0.0)) throw std::invalid_argument("sym_loss: weights sum to zero");

  SymLossResult res;
  res.grads = AlignGrads::zeros_like(batch);
  const double eps = cfg.label_smoothing;
  const double off = eps / static_cast<double>(n);

  // Smoothed cross-entropy in one direction; fb_rows picks which side indexes
  // the softmax rows. Gradients are scaled by 1/2 for the symmetric average.
  auto ce_direction = [&](bool fb_rows) {
    double total = 0.0;
    Vec logits(n), p;
    for (size_t i = 0; i < n; ++i) {
      const Vec& row_vec = fb_rows ? batch.rows[i].z_fb : batch.rows[i].z_img;
      for (size_t j = 0; j < n; ++j) {
        const Vec& col_vec = fb_rows ? batch.rows[j].z_img : batch.rows[j].z_fb;
        logits[j] = dot(row_vec, col_vec) / cfg.tau_nce;
      }
      const double lse = log_sum_exp(logits, p);
      const double a = batch.rows[i].u / usum;
      double ce = lse;
      for (size_t j = 0; j < n; ++j) {
        const double q = off + (j == i ? 1.0 - eps : 0.0);
        ce -= q * logits[j];
      }
      total += a * ce;
      for (size_t j = 0; j < n; ++j) {
        const double q = off + (j == i ? 1.0 - eps : 0.0);
        const double coef = 0.5 * a * (p[j] - q) / cfg.tau_nce;
        const Vec& col_vec = fb_rows ? batch.rows[j].z_img : batch.rows[j].z_fb;
        Vec& d_row = fb_rows ? res.grads.d_fb[i] : res.grads.d_img[i];
        Vec& d_col = fb_rows ? res.grads.d_img[j] : res.grads.d_fb[j];
        axpy(d_row, coef, col_vec);
        axpy(d_col, coef, row_vec);
      }
    }
    return total;
  };
  res.ce_fi = ce_direction(true);
  res.ce_if = ce_direction(false);

  // Pairwise alignment: mean squared distance between matched pairs.
  for (size_t i = 0; i < n; ++i) {
    const auto& r = batch.rows[i];
    double d2 = 0.0;
    for (size_t k = 0; k < r.z_img.size(); ++k) {
      const double d = r.z_img[k] - r.z_fb[k];
      d2 += d * d;
    }
    res.align_term += d2 / static_cast<double>(n);
    const double c = cfg.lambda_align * 2.0 / static_cast<double>(n);
    for (size_t k = 0; k < r.z_img.size(); ++k) {
      const double d = r.z_img[k] - r.z_fb[k];
      res.grads.d_img[i][k] += c * d;
      res.grads.d_fb[i][k] -= c * d;
    }
  }
  res.align_term *= cfg.lambda_align;

  // Uniformity over the pooled set (images then feedback, 2n embeddings).
  const size_t pool = 2 * n;
  if (pool < 2) {
    res.uniformity_omitted = true;
  } else {
    auto at = [&](size_t a) -> const Vec& {
      return a < n ? batch.rows[a].z_img : batch.rows[a - n].z_fb;
    };
    const double npairs = 0.5 * static_cast<double>(pool) * static_cast<double>(pool - 1);
    double esum = 0.0;
    std::vector<std::vector<double>> w(pool, std::vector<double>(pool, 0.0));
    for (size_t a = 0; a < pool; ++a)
      for (size_t b = a + 1; b < pool; ++b) {
        double d2 = 0.0;
        const Vec& za = at(a);
        const Vec& zb = at(b);
        for (size_t k = 0; k < za.size(); ++k) {
          const double d = za[k] - zb[k];
          d2 += d * d;
        }
        w[a][b] = w[b][a] = std::exp(-2.0 * d2);
        esum += w[a][b];
      }
    const double emean = esum / npairs;
    res.uni_term = cfg.lambda_uni * std::log(emean);
    const double scale = cfg.lambda_uni / esum;  // d log(mean)/dw share
    for (size_t a = 0; a < pool; ++a) {
      Vec& d_a = a < n ? res.grads.d_img[a] : res.grads.d_fb[a - n];
      const Vec& za = at(a);
      for (size_t b = 0; b < pool; ++b) {
        if (b == a) continue;
        const Vec& zb = at(b);
        const double c = scale * w[a][b] * -4.0;
        for (size_t k = 0; k < za.size(); ++k) d_a[k] += c * (za[k] - zb[k]);
      }
    }
  }

  res.value = 0.5 * (res.ce_fi + res.ce_if) + res.align_term + res.uni_term;
  check_finite(res.value, "sym_loss");
  return res;
}

std::optional<double> discrimination_gap(const AlignBatch& batch) {
  double pos = 0.0, neg = 0.0;
  int npos = 0, nneg = 0;
  for (const auto& r : batch.rows) {
    const double psi = dot(r.z_img, r.z_fb);
    if (r.label == 1) {
      pos += psi;
      ++npos;
    } else {
      neg += psi;
      ++nneg;
    }
  }
  if (npos == 0 || nneg == 0) return std::nullopt;
  return pos / npos - neg / nneg;
}

Projectors Projectors::init(int obs_dim, int instr_dim, int fb_dim, int shared_dim,
                            const std::vector<int>& hidden, Rng& rng) {
  Projectors p;
  Rng r_img = rng.substream("projector.image");
  Rng r_txt = rng.substream("projector.text");
  Rng r_fb = rng.substream("projector.feedback");
  p.image = Mlp::orthogonal({obs_dim, hidden, shared_dim}, r_img);
  p.text = Mlp::orthogonal({instr_dim, hidden, shared_dim}, r_txt);
  p.feedback = Mlp::orthogonal({fb_dim, hidden, shared_dim}, r_fb);
  return p;
}

Vec Projectors::embed_image(const Vec& x) const { return unit_normalize(image.forward(x)); }
Vec Projectors::embed_text(const Vec& x) const { return unit_normalize(text.forward(x)); }
Vec Projectors::embed_feedback(const Vec& f) const {
  return unit_normalize(feedback.forward(f));
}

AlignTrainer::AlignTrainer(Projectors projectors, const AlignConfig& cfg)
    : projectors_(std::move(projectors)),
      cfg_(cfg),
      opt_image_(AdamConfig{cfg.lr, 0.9, 0.999, 1e-8}),
      opt_feedback_(AdamConfig{cfg.lr, 0.9, 0.999, 1e-8}) {
  cfg_.validate();
}

namespace {

// Forward pass bookkeeping for one projected sample.
struct Projected {
  std::vector<Mlp::Trace> tr_img, tr_fb;
  std::vector<Vec> raw_img, raw_fb;
  AlignBatch batch;
};

Projected project_sample(const Projectors& p, const std::vector<AlignSampleRow>& sample) {
  Projected out;
  out.tr_img.resize(sample.size());
  out.tr_fb.resize(sample.size());
  out.raw_img.resize(sample.size());
  out.raw_fb.resize(sample.size());
  out.batch.rows.resize(sample.size());
  for (size_t i = 0; i < sample.size(); ++i) {
    out.raw_img[i] = p.image.forward(sample[i].x, out.tr_img[i]);
    out.raw_fb[i] = p.feedback.forward(sample[i].f, out.tr_fb[i]);
    auto& row = out.batch.rows[i];
    row.z_img = unit_normalize(out.raw_img[i]);
    row.z_fb = unit_normalize(out.raw_fb[i]);
    row.label = sample[i].label;
    row.u = sample[i].u;
  }
  out.batch.renormalize_u();
  return out;
}

// Chain unit-space gradients back through normalization and both MLPs, then
// take one Adam step per head.
void apply_step(Projectors& p, AdamState& opt_img, AdamState& opt_fb, const Projected& fwd,
                const AlignGrads& grads) {
  MlpGrads g_img = p.image.zero_grads();
  MlpGrads g_fb = p.feedback.zero_grads();
  for (size_t i = 0; i < fwd.batch.rows.size(); ++i) {
    const Vec up_img = unit_normalize_backward(fwd.raw_img[i], fwd.batch.rows[i].z_img,
                                               grads.d_img[i]);
    const Vec up_fb =
        unit_normalize_backward(fwd.raw_fb[i], fwd.batch.rows[i].z_fb, grads.d_fb[i]);
    p.image.backward(fwd.tr_img[i], up_img, g_img);
    p.feedback.backward(fwd.tr_fb[i], up_fb, g_fb);
  }
  opt_img.step(p.image, g_img);
  opt_fb.step(p.feedback, g_fb);
  ++p.version;
}

}  // namespace

AlignUpdateMetrics AlignTrainer::update(const std::vector<AlignSampleRow>& sample,
                                        long long env_step) {
  AlignUpdateMetrics m;
  if (sample.empty()) {
    m.skipped_empty = true;
    return m;
  }

  Projected fwd = project_sample(projectors_, sample);
  m.gap = discrimination_gap(fwd.batch);

  LossResult bce = bce_loss(fwd.batch, cfg_.tau_bce);
  LossResult nce = nce_loss(fwd.batch, cfg_.tau_nce);
  m.l_bce = bce.value;
  m.l_nce = nce.value;
  AlignGrads combined = AlignGrads::zeros_like(fwd.batch);
  combined.add_scaled(bce.grads, cfg_.lambda_bce);
  combined.add_scaled(nce.grads, cfg_.lambda_nce);
  apply_step(projectors_, opt_image_, opt_feedback_, fwd, combined);

  if (env_step >= cfg_.contrastive_start_step) {
    Projected fwd2 = project_sample(projectors_, sample);
    SymLossResult sym = sym_loss(fwd2.batch, cfg_);
    m.l_sym = sym.value;
    apply_step(projectors_, opt_image_, opt_feedback_, fwd2, sym.grads);
  }
  return m;
}

}  // namespace fbrl
