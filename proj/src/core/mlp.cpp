#include "fbrl/core/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace fbrl {

void MlpGrads::zero() {
  for (auto& m : w) std::fill(m.data.begin(), m.data.end(), 0.0);
  for (auto& v : b) std::fill(v.begin(), v.end(), 0.0);
}

void MlpGrads::add_scaled(const MlpGrads& other, double scale) {
  for (size_t l = 0; l < w.size(); ++l) {
    for (size_t i = 0; i < w[l].data.size(); ++i) w[l].data[i] += scale * other.w[l].data[i];
    for (size_t i = 0; i < b[l].size(); ++i) b[l][i] += scale * other.b[l][i];
  }
}

namespace {

std::vector<int> layer_dims(const MlpShape& shape) {
  if (shape.in <= 0 || shape.out <= 0)
    throw std::invalid_argument("Mlp: input and output dims must be positive");
  for (int h : shape.hidden)
    if (h <= 0) throw std::invalid_argument("Mlp: hidden dims must be positive");
  std::vector<int> dims;
  dims.push_back(shape.in);
  dims.insert(dims.end(), shape.hidden.begin(), shape.hidden.end());
  dims.push_back(shape.out);
  return dims;
}

}  // namespace

Mlp::Mlp(const MlpShape& shape) : shape_(shape) {
  const auto dims = layer_dims(shape);
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    weights_.emplace_back(dims[l + 1], dims[l]);
    biases_.emplace_back(static_cast<size_t>(dims[l + 1]), 0.0);
  }
}

Matrix orthogonal_matrix(int rows, int cols, Rng& rng, double gain) {
  // Orthonormalize along the longer side so rows (or columns) stay independent.
  const bool wide = cols > rows;
  const int n = wide ? cols : rows;
  const int k = wide ? rows : cols;
  // n x k Gaussian, Gram-Schmidt over the k columns.
  std::vector<Vec> basis;
  basis.reserve(static_cast<size_t>(k));
  for (int j = 0; j < k; ++j) {
    Vec v = rng.normal_vec(n);
    for (const Vec& u : basis) {
      const double p = dot(v, u);
      for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] -= p * u[static_cast<size_t>(i)];
    }
    const double nv = norm(v);
    if (!(nv > 1e-12)) throw std::runtime_error("orthogonal_matrix: degenerate sample");
    for (auto& x : v) x /= nv;
    basis.push_back(std::move(v));
  }
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      m.at(r, c) = gain * (wide ? basis[static_cast<size_t>(r)][static_cast<size_t>(c)]
                                : basis[static_cast<size_t>(c)][static_cast<size_t>(r)]);
  return m;
}

Mlp Mlp::orthogonal(const MlpShape& shape, Rng& rng, double gain) {
  Mlp net(shape);
  for (auto& w : net.weights_) w = orthogonal_matrix(w.rows, w.cols, rng, gain);
  return net;
}

Vec Mlp::forward(const Vec& input) const {
  Trace tr;
  return forward(input, tr);
}

Vec Mlp::forward(const Vec& input, Trace& trace) const {
  if (static_cast<int>(input.size()) != shape_.in)
    throw std::invalid_argument("Mlp::forward: input dim " + std::to_string(input.size()) +
                                " does not match net input dim " + std::to_string(shape_.in));
  trace.input = input;
  trace.pre.clear();
  trace.act.clear();
  const Vec* cur = &input;
  const int n = num_layers();
  for (int l = 0; l < n; ++l) {
    Vec pre;
    matvec(weights_[l], *cur, pre);
    for (size_t i = 0; i < pre.size(); ++i) pre[i] += biases_[l][i];
    Vec act = pre;
    if (l + 1 < n)
      for (auto& x : act) x = std::tanh(x);
    trace.pre.push_back(std::move(pre));
    trace.act.push_back(std::move(act));
    cur = &trace.act.back();
  }
  check_finite(*cur, "Mlp::forward output");
  return *cur;
}

Vec Mlp::backward(const Trace& trace, const Vec& upstream, MlpGrads& accum) const {
  const int n = num_layers();
  if (static_cast<int>(trace.act.size()) != n)
    throw std::invalid_argument("Mlp::backward: trace does not match net depth");
  if (static_cast<int>(upstream.size()) != shape_.out)
    throw std::invalid_argument("Mlp::backward: upstream dim mismatch");

  Vec g = upstream;  // gradient w.r.t. layer output
  for (int l = n - 1; l >= 0; --l) {
    if (l + 1 < n) {
      // through tanh: act = tanh(pre), d = 1 - act^2
      for (size_t i = 0; i < g.size(); ++i) {
        const double a = trace.act[static_cast<size_t>(l)][i];
        g[i] *= 1.0 - a * a;
      }
    }
    const Vec& below = (l == 0) ? trace.input : trace.act[static_cast<size_t>(l) - 1];
    Matrix& dw = accum.w[static_cast<size_t>(l)];
    Vec& db = accum.b[static_cast<size_t>(l)];
    for (int r = 0; r < dw.rows; ++r) {
      const double gr = g[static_cast<size_t>(r)];
      db[static_cast<size_t>(r)] += gr;
      double* row = dw.data.data() + static_cast<size_t>(r) * dw.cols;
      for (int c = 0; c < dw.cols; ++c) row[c] += gr * below[static_cast<size_t>(c)];
    }
    if (l > 0) {
      const Matrix& w = weights_[static_cast<size_t>(l)];
      Vec g_below(static_cast<size_t>(w.cols), 0.0);
      for (int r = 0; r < w.rows; ++r) {
        const double gr = g[static_cast<size_t>(r)];
        const double* row = w.data.data() + static_cast<size_t>(r) * w.cols;
        for (int c = 0; c < w.cols; ++c) g_below[static_cast<size_t>(c)] += gr * row[c];
      }
      g = std::move(g_below);
    } else {
      const Matrix& w = weights_[0];
      Vec g_in(static_cast<size_t>(w.cols), 0.0);
      for (int r = 0; r < w.rows; ++r) {
        const double gr = g[static_cast<size_t>(r)];
        const double* row = w.data.data() + static_cast<size_t>(r) * w.cols;
        for (int c = 0; c < w.cols; ++c) g_in[static_cast<size_t>(c)] += gr * row[c];
      }
      return g_in;
    }
  }
  return {};
}

MlpGrads Mlp::zero_grads() const {
  MlpGrads g;
  for (const auto& w : weights_) g.w.emplace_back(w.rows, w.cols);
  for (const auto& b : biases_) g.b.emplace_back(b.size(), 0.0);
  return g;
}

size_t Mlp::param_count() const {
  size_t n = 0;
  for (const auto& w : weights_) n += w.data.size();
  for (const auto& b : biases_) n += b.size();
  return n;
}

void polyak_update(Mlp& target, const Mlp& online, double tau) {
  if (!(tau > 0.0) || tau > 1.0)
    throw std::invalid_argument("polyak_update: tau must be in (0, 1]");
  for (int l = 0; l < target.num_layers(); ++l) {
    auto& tw = target.weight(l).data;
    const auto& ow = online.weight(l).data;
    for (size_t i = 0; i < tw.size(); ++i) tw[i] = tau * ow[i] + (1.0 - tau) * tw[i];
    auto& tb = target.bias(l);
    const auto& ob = online.bias(l);
    for (size_t i = 0; i < tb.size(); ++i) tb[i] = tau * ob[i] + (1.0 - tau) * tb[i];
  }
}

}  // namespace fbrl
