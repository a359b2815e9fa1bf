#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fbrl {

using Vec = std::vector<double>;

inline constexpr double kNormEps = 1e-8;

// Row-major dense matrix.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {
    if (r <= 0 || c <= 0) throw std::invalid_argument("Matrix: dimensions must be positive");
  }

  double& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }
};

inline double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("dot: size mismatch (" + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Vec& v) { return std::sqrt(dot(v, v)); }

/// Rescales v to unit length. Throws if the norm is at or below eps.
inline Vec unit_normalize(const Vec& v, double eps = kNormEps) {
  const double n = norm(v);
  if (!(n > eps))
    throw std::invalid_argument("unit_normalize: norm " + std::to_string(n) +
                                " below epsilon " + std::to_string(eps));
  Vec out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = v[i] / n;
  return out;
}

/// Pulls a gradient w.r.t. the unit vector back to the raw (pre-normalization) vector.
inline Vec unit_normalize_backward(const Vec& raw, const Vec& unit, const Vec& g_unit) {
  const double n = norm(raw);
  const double proj = dot(g_unit, unit);
  Vec out(raw.size());
  for (size_t i = 0; i < raw.size(); ++i) out[i] = (g_unit[i] - proj * unit[i]) / n;
  return out;
}

inline double cosine(const Vec& a, const Vec& b, double eps = kNormEps) {
  const double na = norm(a);
  const double nb = norm(b);
  if (!(na > eps) || !(nb > eps))
    throw std::invalid_argument("cosine: zero-norm input");
  return dot(a, b) / (na * nb);
}

// out = W x
inline void matvec(const Matrix& w, const Vec& x, Vec& out) {
  if (static_cast<int>(x.size()) != w.cols)
    throw std::invalid_argument("matvec: input dim " + std::to_string(x.size()) +
                                " does not match matrix cols " + std::to_string(w.cols));
  out.assign(static_cast<size_t>(w.rows), 0.0);
  const double* wd = w.data.data();
  for (int r = 0; r < w.rows; ++r) {
    double s = 0.0;
    const double* row = wd + static_cast<size_t>(r) * w.cols;
    for (int c = 0; c < w.cols; ++c) s += row[c] * x[c];
    out[static_cast<size_t>(r)] = s;
  }
}

inline bool all_finite(const Vec& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

inline void check_finite(const Vec& v, const char* what) {
  if (!all_finite(v)) throw std::runtime_error(std::string(what) + ": non-finite value");
}

inline void check_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw std::runtime_error(std::string(what) + ": non-finite value");
}

inline double mean(const Vec& v) {
  if (v.empty()) throw std::invalid_argument("mean: empty vector");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double clamp(double x, double lo, double hi) { return x < lo ? lo : (x > hi ? hi : x); }

}  // namespace fbrl
