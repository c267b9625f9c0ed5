#pragma once

#include <string_view>

#include "kmm/types.hpp"

// =============================================================================
// Positive-definite kernels on R^d.
//
//   Linear    k(x, y) = x^T y
//   Gaussian  k(x, y) = exp(-||x - y||^2 / (2 sigma^2))
//   IMQ       k(x, y) = (c^2 + ||x - y||^2)^(-1/2)
//
// Gaussian and IMQ are characteristic; Linear only matches first moments.
// =============================================================================

namespace kmm {

enum class KernelKind { Linear, Gaussian, Imq };

std::string_view to_string(KernelKind kind);
KernelKind kernel_kind_from_string(std::string_view name);

struct KernelSpec {
  KernelKind kind = KernelKind::Imq;
  double sigma = 1.0;  // Gaussian bandwidth
  double c = 10.0;     // IMQ offset

  static KernelSpec linear() { return {KernelKind::Linear, 1.0, 10.0}; }
  static KernelSpec gaussian(double sigma) { return {KernelKind::Gaussian, sigma, 10.0}; }
  static KernelSpec imq(double c) { return {KernelKind::Imq, 1.0, c}; }

  /// Throws InvalidArgument when the parameter used by `kind` is not a
  /// positive finite number.
  void validate() const;

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

double kernel_eval(const KernelSpec& spec, VectorRef x, VectorRef y);

/// values(i, j) = k(A_i, B_j). Each entry is one independent kernel_eval.
Matrix gram(const KernelSpec& spec, MatrixRef A, MatrixRef B);

/// Gradient of k(a, b) with respect to its second argument b.
Vector kernel_grad_second_arg(const KernelSpec& spec, VectorRef a, VectorRef b);

/// Adds `scale * grad_b k(a, b)` into `out` without allocating.
void accumulate_kernel_grad(const KernelSpec& spec, VectorRef a, VectorRef b, double scale,
                            Eigen::Ref<Vector> out);

/// Lower median of all pairwise Euclidean distances over distinct index pairs.
double median_heuristic(MatrixRef points);

}  // namespace kmm
