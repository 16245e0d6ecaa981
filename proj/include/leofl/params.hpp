#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace leofl {

// Flat parameter vector shared by the server, clients and strategies.
using ModelParams = std::vector<double>;

inline void check_same_dim(const ModelParams& a, const ModelParams& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("model parameter dimension mismatch");
}

inline ModelParams zeros_like(const ModelParams& a) {
  return ModelParams(a.size(), 0.0);
}

// y += s * x
inline void add_scaled_in_place(ModelParams& y, const ModelParams& x, double s) {
  check_same_dim(y, x);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += s * x[i];
}

inline double l2_norm(const ModelParams& a) {
  double sq = 0.0;
  for (double v : a) sq += v * v;
  return std::sqrt(sq);
}

inline double l2_distance(const ModelParams& a, const ModelParams& b) {
  check_same_dim(a, b);
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sq += d * d;
  }
  return std::sqrt(sq);
}

inline double max_abs_diff(const ModelParams& a, const ModelParams& b) {
  check_same_dim(a, b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

inline bool all_finite(const ModelParams& a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace leofl
