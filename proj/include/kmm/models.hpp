#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "kmm/types.hpp"

// =============================================================================
// Differentiable generators g: R^{d_z} -> R^d and feature extractors
// E: R^d -> R^{d_e}. Each exposes a forward map and a vector-Jacobian product
// so that gradients of the matching objective can be pulled back to latents.
//
// These are small, dependency-free stand-ins for pretrained networks:
//   Identity  g(z) = z                 (matching directly in data space)
//   Affine    g(z) = W z + b
//   Mlp       tanh hidden layers, sigmoid output in (0, 1)
//   Ring      g(z) = (cos(pi z), sin(pi z)), a curved 1-D output manifold
// =============================================================================

namespace kmm {

enum class Prior { UniformBox, StandardNormal };

enum class GeneratorKind { Identity, Affine, Mlp, Ring };

enum class ExtractorKind { Identity, ColorMaxPool, RandomProjectionTanh, Concat };

std::string_view to_string(Prior prior);
std::string_view to_string(GeneratorKind kind);
std::string_view to_string(ExtractorKind kind);
Prior prior_from_string(std::string_view name);
GeneratorKind generator_kind_from_string(std::string_view name);
ExtractorKind extractor_kind_from_string(std::string_view name);

/// Clamp radius matching the prior's support: 1 for the uniform box, 3.5 for
/// the standard normal (more than 99.9% of its mass lies in (-3.5, 3.5)).
double default_clamp_radius(Prior prior);

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::Identity;
  int latent_dim = 1;
  int output_dim = 1;
  Prior prior = Prior::UniformBox;
  // Affine: W (output_dim x latent_dim, row-major) followed by b.
  // Mlp: for each layer, W (out x in, row-major) followed by b.
  std::vector<double> parameters;
  // Mlp only: {latent_dim, hidden..., output_dim}.
  std::vector<int> layer_sizes;
  std::uint64_t seed = 0;

  static GeneratorSpec identity(int dim, Prior prior = Prior::UniformBox);
  static GeneratorSpec affine(int latent_dim, int output_dim, std::uint64_t seed,
                              Prior prior = Prior::UniformBox);
  static GeneratorSpec affine(int latent_dim, int output_dim, std::vector<double> parameters,
                              Prior prior = Prior::UniformBox);
  static GeneratorSpec mlp(std::vector<int> layer_sizes, std::uint64_t seed,
                           Prior prior = Prior::UniformBox);
  static GeneratorSpec ring();

  /// Number of parameters the kind and shape require.
  std::size_t expected_parameter_count() const;
  void validate() const;
};

struct ExtractorSpec {
  ExtractorKind kind = ExtractorKind::Identity;
  int input_dim = 1;
  int feature_dim = 1;
  // Image layout, channel-major. Required by ColorMaxPool; informational otherwise.
  int channels = 0;
  int height = 0;
  int width = 0;
  // RandomProjectionTanh: W (feature_dim x input_dim, row-major) followed by b.
  std::vector<double> parameters;
  std::uint64_t seed = 0;
  std::vector<ExtractorSpec> children;  // Concat only

  static ExtractorSpec identity(int dim);
  static ExtractorSpec color_max_pool(int height, int width);
  static ExtractorSpec random_projection_tanh(int input_dim, int feature_dim, std::uint64_t seed);
  static ExtractorSpec random_projection_tanh(int input_dim, int feature_dim,
                                              std::vector<double> parameters);
  static ExtractorSpec concat(std::vector<ExtractorSpec> children);

  std::size_t expected_parameter_count() const;
  void validate() const;
};

/// Single latent vector; the matrix overload applies it row-wise.
Vector generate_one(const GeneratorSpec& g, VectorRef z);
Matrix generator_forward(const GeneratorSpec& g, MatrixRef Z);

/// cotangent^T (dg/dz) evaluated at z.
Vector generator_vjp(const GeneratorSpec& g, VectorRef z, VectorRef cotangent);

Vector extractor_forward(const ExtractorSpec& e, VectorRef x);
/// Row-wise extractor_forward.
Matrix extract_features(const ExtractorSpec& e, MatrixRef X);

/// cotangent^T (dE/dx) evaluated at x. ColorMaxPool routes each entry to the
/// first (lowest-index) maximiser of its block.
Vector extractor_vjp(const ExtractorSpec& e, VectorRef x, VectorRef cotangent);

/// Smallest gap between a pooling block's maximum and its runner-up, over all
/// ColorMaxPool blocks reachable in `e`. +inf when `e` does no pooling.
double pooling_tie_margin(const ExtractorSpec& e, VectorRef x);

/// n seeded draws from the generator's prior, one latent per row.
Matrix sample_prior(const GeneratorSpec& g, int n, std::uint64_t seed);

}  // namespace kmm
