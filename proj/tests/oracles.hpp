#pragma once

// Deliberately naive reference implementations. Nothing here calls into the
// library's numerical code; they exist to be obviously correct, not fast.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "kmm/kernels.hpp"
#include "kmm/types.hpp"

namespace oracle {

inline kmm::Matrix random_matrix(int rows, int cols, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  kmm::Matrix M(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) M(i, j) = u(rng);
  return M;
}

inline kmm::Matrix normal_matrix(int rows, int cols, std::uint64_t seed, double mean = 0.0, double sd = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(mean, sd);
  kmm::Matrix M(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) M(i, j) = nd(rng);
  return M;
}

inline kmm::Vector random_simplex(int m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> raw(m);
  double total = 0.0;
  for (auto& v : raw) total += (v = ex(rng));
  kmm::Vector w(m);
  for (int i = 0; i < m; ++i) w(i) = raw[i] / total;
  // Push the rounding residue into the last entry so the sum is 1 to ~1e-16.
  double s = 0.0;
  for (int i = 0; i + 1 < m; ++i) s += w(i);
  w(m - 1) = 1.0 - s;
  return w;
}

inline double kernel(const kmm::KernelSpec& k, const kmm::Matrix& A, int i, const kmm::Matrix& B, int j) {
  double dot = 0.0, sq = 0.0;
  for (int t = 0; t < A.cols(); ++t) {
    dot += A(i, t) * B(j, t);
    const double d = A(i, t) - B(j, t);
    sq += d * d;
  }
  switch (k.kind) {
    case kmm::KernelKind::Linear: return dot;
    case kmm::KernelKind::Gaussian: return std::exp(-sq / (2.0 * k.sigma * k.sigma));
    case kmm::KernelKind::Imq: return 1.0 / std::sqrt(k.c * k.c + sq);
  }
  return 0.0;
}

inline double mmd2(const kmm::KernelSpec& k, const kmm::Matrix& X, const kmm::Matrix& Y) {
  const double m = static_cast<double>(X.rows()), n = static_cast<double>(Y.rows());
  double xx = 0.0, yy = 0.0, xy = 0.0;
  for (int i = 0; i < X.rows(); ++i)
    for (int j = 0; j < X.rows(); ++j) xx += kernel(k, X, i, X, j);
  for (int i = 0; i < Y.rows(); ++i)
    for (int j = 0; j < Y.rows(); ++j) yy += kernel(k, Y, i, Y, j);
  for (int i = 0; i < X.rows(); ++i)
    for (int j = 0; j < Y.rows(); ++j) xy += kernel(k, X, i, Y, j);
  return xx / (m * m) + yy / (n * n) - 2.0 * xy / (m * n);
}

inline double mmd2_weighted(const kmm::KernelSpec& k, const kmm::Matrix& X, const kmm::Vector& w,
                            const kmm::Matrix& Y) {
  const double n = static_cast<double>(Y.rows());
  double xx = 0.0, yy = 0.0, xy = 0.0;
  for (int i = 0; i < X.rows(); ++i)
    for (int j = 0; j < X.rows(); ++j) xx += w(i) * w(j) * kernel(k, X, i, X, j);
  for (int i = 0; i < Y.rows(); ++i)
    for (int j = 0; j < Y.rows(); ++j) yy += kernel(k, Y, i, Y, j);
  for (int i = 0; i < X.rows(); ++i)
    for (int j = 0; j < Y.rows(); ++j) xy += w(i) * kernel(k, X, i, Y, j);
  return xx + yy / (n * n) - 2.0 * xy / n;
}

inline double median_pairwise(const kmm::Matrix& P) {
  std::vector<double> d;
  for (int i = 0; i < P.rows(); ++i)
    for (int j = i + 1; j < P.rows(); ++j) {
      double sq = 0.0;
      for (int t = 0; t < P.cols(); ++t) sq += (P(i, t) - P(j, t)) * (P(i, t) - P(j, t));
      d.push_back(std::sqrt(sq));
    }
  std::sort(d.begin(), d.end());
  return d[(d.size() - 1) / 2];
}

// Central differences of a scalar function of a matrix, entry by entry.
inline kmm::Matrix numeric_gradient(const std::function<double(const kmm::Matrix&)>& f, kmm::Matrix Z,
                                    double h) {
  kmm::Matrix G(Z.rows(), Z.cols());
  for (int i = 0; i < Z.rows(); ++i)
    for (int j = 0; j < Z.cols(); ++j) {
      const double z0 = Z(i, j);
      Z(i, j) = z0 + h;
      const double up = f(Z);
      Z(i, j) = z0 - h;
      const double down = f(Z);
      Z(i, j) = z0;
      G(i, j) = (up - down) / (2.0 * h);
    }
  return G;
}

inline double rel_error(const kmm::Matrix& a, const kmm::Matrix& b) {
  double diff = 0.0, scale = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      diff = std::max(diff, std::abs(a(i, j) - b(i, j)));
      scale = std::max({scale, std::abs(a(i, j)), std::abs(b(i, j))});
    }
  return scale == 0.0 ? diff : diff / scale;
}

}  // namespace oracle
