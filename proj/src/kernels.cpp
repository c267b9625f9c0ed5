#include "kmm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "kmm/error.hpp"

namespace kmm {

std::string_view to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::Linear: return "linear";
    case KernelKind::Gaussian: return "gaussian";
    case KernelKind::Imq: return "imq";
  }
  return "unknown";
}

KernelKind kernel_kind_from_string(std::string_view name) {
  if (name == "linear") return KernelKind::Linear;
  if (name == "gaussian") return KernelKind::Gaussian;
  if (name == "imq") return KernelKind::Imq;
  throw InvalidArgument("unknown kernel kind '" + std::string(name) + "'");
}

void KernelSpec::validate() const {
  switch (kind) {
    case KernelKind::Linear:
      return;
    case KernelKind::Gaussian:
      detail::require(std::isfinite(sigma) && sigma > 0.0,
                      "gaussian kernel requires sigma > 0, got " + std::to_string(sigma));
      return;
    case KernelKind::Imq:
      detail::require(std::isfinite(c) && c > 0.0,
                      "imq kernel requires c > 0, got " + std::to_string(c));
      return;
  }
  throw InvalidArgument("unknown kernel kind");
}

namespace {

void check_dims(Eigen::Index a, Eigen::Index b) {
  if (a != b) {
    throw InvalidArgument("kernel dimension mismatch: " + std::to_string(a) + " vs " +
                          std::to_string(b));
  }
}

// Shared by kernel_eval and gram so both produce bit-identical entries.
inline double eval_unchecked(const KernelSpec& spec, const VectorRef& x, const VectorRef& y) {
  switch (spec.kind) {
    case KernelKind::Linear:
      return x.dot(y);
    case KernelKind::Gaussian: {
      const double r2 = (x - y).squaredNorm();
      return std::exp(-r2 / (2.0 * spec.sigma * spec.sigma));
    }
    case KernelKind::Imq: {
      const double r2 = (x - y).squaredNorm();
      return 1.0 / std::sqrt(spec.c * spec.c + r2);
    }
  }
  return 0.0;
}

}  // namespace

double kernel_eval(const KernelSpec& spec, VectorRef x, VectorRef y) {
  spec.validate();
  check_dims(x.size(), y.size());
  return eval_unchecked(spec, x, y);
}

Matrix gram(const KernelSpec& spec, MatrixRef A, MatrixRef B) {
  spec.validate();
  check_dims(A.cols(), B.cols());
  Matrix out(A.rows(), B.rows());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < B.rows(); ++j) {
      out(i, j) = eval_unchecked(spec, A.row(i), B.row(j));
    }
  }
  return out;
}

void accumulate_kernel_grad(const KernelSpec& spec, VectorRef a, VectorRef b, double scale,
                            Eigen::Ref<Vector> out) {
  switch (spec.kind) {
    case KernelKind::Linear:
      out.noalias() += scale * a;
      return;
    case KernelKind::Gaussian: {
      const double s2 = spec.sigma * spec.sigma;
      const double r2 = (a - b).squaredNorm();
      const double k = std::exp(-r2 / (2.0 * s2));
      out.noalias() += (scale * k / s2) * (a - b);
      return;
    }
    case KernelKind::Imq: {
      const double q = spec.c * spec.c + (a - b).squaredNorm();
      out.noalias() += (scale / (q * std::sqrt(q))) * (a - b);
      return;
    }
  }
}

Vector kernel_grad_second_arg(const KernelSpec& spec, VectorRef a, VectorRef b) {
  spec.validate();
  check_dims(a.size(), b.size());
  Vector g = Vector::Zero(a.size());
  accumulate_kernel_grad(spec, a, b, 1.0, g);
  return g;
}

double median_heuristic(MatrixRef points) {
  const Eigen::Index s = points.rows();
  if (s < 2) throw InvalidArgument("median heuristic needs at least 2 points");
  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(s * (s - 1) / 2));
  for (Eigen::Index i = 0; i < s; ++i) {
    for (Eigen::Index j = i + 1; j < s; ++j) {
      dists.push_back((points.row(i) - points.row(j)).norm());
    }
  }
  const auto mid = dists.begin() + static_cast<std::ptrdiff_t>((dists.size() - 1) / 2);
  std::nth_element(dists.begin(), mid, dists.end());
  if (!(*mid > 0.0)) {
    throw InvalidArgument("median heuristic is zero: points are (mostly) identical");
  }
  return *mid;
}

}  // namespace kmm
