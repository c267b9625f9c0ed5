#include "kmm/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "kmm/error.hpp"

namespace kmm {

std::string_view to_string(Prior prior) {
  switch (prior) {
    case Prior::UniformBox: return "uniform_box";
    case Prior::StandardNormal: return "standard_normal";
  }
  return "unknown";
}

std::string_view to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::Identity: return "identity";
    case GeneratorKind::Affine: return "affine";
    case GeneratorKind::Mlp: return "mlp";
    case GeneratorKind::Ring: return "ring";
  }
  return "unknown";
}

std::string_view to_string(ExtractorKind kind) {
  switch (kind) {
    case ExtractorKind::Identity: return "identity";
    case ExtractorKind::ColorMaxPool: return "color_max_pool";
    case ExtractorKind::RandomProjectionTanh: return "random_projection_tanh";
    case ExtractorKind::Concat: return "concat";
  }
  return "unknown";
}

Prior prior_from_string(std::string_view name) {
  if (name == "uniform_box") return Prior::UniformBox;
  if (name == "standard_normal") return Prior::StandardNormal;
  throw InvalidArgument("unknown prior '" + std::string(name) + "'");
}

GeneratorKind generator_kind_from_string(std::string_view name) {
  if (name == "identity") return GeneratorKind::Identity;
  if (name == "affine") return GeneratorKind::Affine;
  if (name == "mlp") return GeneratorKind::Mlp;
  if (name == "ring") return GeneratorKind::Ring;
  throw InvalidArgument("unknown generator kind '" + std::string(name) + "'");
}

ExtractorKind extractor_kind_from_string(std::string_view name) {
  if (name == "identity") return ExtractorKind::Identity;
  if (name == "color_max_pool") return ExtractorKind::ColorMaxPool;
  if (name == "random_projection_tanh") return ExtractorKind::RandomProjectionTanh;
  if (name == "concat") return ExtractorKind::Concat;
  throw InvalidArgument("unknown extractor kind '" + std::string(name) + "'");
}

double default_clamp_radius(Prior prior) {
  return prior == Prior::StandardNormal ? 3.5 : 1.0;
}

namespace {

using RowMap = Eigen::Map<const Matrix>;
using VecMap = Eigen::Map<const Vector>;

// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] for a W (out x in) block then b.
void append_layer_init(std::vector<double>& params, int in, int out, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (int i = 0; i < out * in + out; ++i) params.push_back(dist(rng));
}

void check_size(Eigen::Index got, int want, const char* what) {
  if (got != want) {
    throw InvalidArgument(std::string(what) + " dimension mismatch: expected " +
                          std::to_string(want) + ", got " + std::to_string(got));
  }
}

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

// Forward pass through an MLP keeping every layer's activation.
std::vector<Vector> mlp_activations(const GeneratorSpec& g, VectorRef z) {
  std::vector<Vector> acts;
  acts.reserve(g.layer_sizes.size());
  acts.emplace_back(z);
  std::size_t offset = 0;
  const std::size_t layers = g.layer_sizes.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const int in = g.layer_sizes[l];
    const int out = g.layer_sizes[l + 1];
    RowMap W(g.parameters.data() + offset, out, in);
    VecMap b(g.parameters.data() + offset + static_cast<std::size_t>(out * in), out);
    offset += static_cast<std::size_t>(out * in + out);
    Vector pre = W * acts.back() + b;
    if (l + 1 == layers) {
      acts.emplace_back(pre.unaryExpr([](double t) { return sigmoid(t); }));
    } else {
      acts.emplace_back(pre.array().tanh().matrix());
    }
  }
  return acts;
}

}  // namespace

// -----------------------------------------------------------------------------
// GeneratorSpec
// -----------------------------------------------------------------------------

GeneratorSpec GeneratorSpec::identity(int dim, Prior prior) {
  GeneratorSpec g;
  g.kind = GeneratorKind::Identity;
  g.latent_dim = dim;
  g.output_dim = dim;
  g.prior = prior;
  g.validate();
  return g;
}

GeneratorSpec GeneratorSpec::affine(int latent_dim, int output_dim, std::uint64_t seed,
                                    Prior prior) {
  detail::require(latent_dim > 0 && output_dim > 0, "affine generator needs positive dims");
  std::mt19937_64 rng(seed);
  std::vector<double> params;
  append_layer_init(params, latent_dim, output_dim, rng);
  GeneratorSpec g = affine(latent_dim, output_dim, std::move(params), prior);
  g.seed = seed;
  return g;
}

GeneratorSpec GeneratorSpec::affine(int latent_dim, int output_dim, std::vector<double> parameters,
                                    Prior prior) {
  GeneratorSpec g;
  g.kind = GeneratorKind::Affine;
  g.latent_dim = latent_dim;
  g.output_dim = output_dim;
  g.prior = prior;
  g.parameters = std::move(parameters);
  g.validate();
  return g;
}

GeneratorSpec GeneratorSpec::mlp(std::vector<int> layer_sizes, std::uint64_t seed, Prior prior) {
  detail::require(layer_sizes.size() >= 2, "mlp generator needs at least input and output sizes");
  for (int s : layer_sizes) detail::require(s > 0, "mlp layer sizes must be positive");
  GeneratorSpec g;
  g.kind = GeneratorKind::Mlp;
  g.latent_dim = layer_sizes.front();
  g.output_dim = layer_sizes.back();
  g.prior = prior;
  g.seed = seed;
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    append_layer_init(g.parameters, layer_sizes[l], layer_sizes[l + 1], rng);
  }
  g.layer_sizes = std::move(layer_sizes);
  g.validate();
  return g;
}

GeneratorSpec GeneratorSpec::ring() {
  GeneratorSpec g;
  g.kind = GeneratorKind::Ring;
  g.latent_dim = 1;
  g.output_dim = 2;
  g.prior = Prior::UniformBox;
  return g;
}

std::size_t GeneratorSpec::expected_parameter_count() const {
  switch (kind) {
    case GeneratorKind::Identity:
    case GeneratorKind::Ring:
      return 0;
    case GeneratorKind::Affine:
      return static_cast<std::size_t>(output_dim) * static_cast<std::size_t>(latent_dim) +
             static_cast<std::size_t>(output_dim);
    case GeneratorKind::Mlp: {
      std::size_t count = 0;
      for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        const auto in = static_cast<std::size_t>(layer_sizes[l]);
        const auto out = static_cast<std::size_t>(layer_sizes[l + 1]);
        count += out * in + out;
      }
      return count;
    }
  }
  return 0;
}

void GeneratorSpec::validate() const {
  detail::require(latent_dim > 0 && output_dim > 0, "generator dims must be positive");
  switch (kind) {
    case GeneratorKind::Identity:
      detail::require(latent_dim == output_dim, "identity generator requires latent_dim == output_dim");
      break;
    case GeneratorKind::Ring:
      detail::require(latent_dim == 1 && output_dim == 2, "ring generator requires latent_dim 1, output_dim 2");
      break;
    case GeneratorKind::Affine:
      break;
    case GeneratorKind::Mlp:
      detail::require(layer_sizes.size() >= 2, "mlp generator needs layer_sizes");
      for (int s : layer_sizes) detail::require(s > 0, "mlp layer sizes must be positive");
      detail::require(layer_sizes.front() == latent_dim && layer_sizes.back() == output_dim,
                      "mlp layer_sizes must start at latent_dim and end at output_dim");
      break;
  }
  detail::require(parameters.size() == expected_parameter_count(),
                  std::string(to_string(kind)) + " generator expects " +
                      std::to_string(expected_parameter_count()) + " parameters, got " +
                      std::to_string(parameters.size()));
  for (double p : parameters) detail::require(std::isfinite(p), "generator parameters must be finite");
}

// -----------------------------------------------------------------------------
// ExtractorSpec
// -----------------------------------------------------------------------------

ExtractorSpec ExtractorSpec::identity(int dim) {
  ExtractorSpec e;
  e.kind = ExtractorKind::Identity;
  e.input_dim = dim;
  e.feature_dim = dim;
  e.validate();
  return e;
}

ExtractorSpec ExtractorSpec::color_max_pool(int height, int width) {
  ExtractorSpec e;
  e.kind = ExtractorKind::ColorMaxPool;
  e.channels = 3;
  e.height = height;
  e.width = width;
  e.input_dim = 3 * height * width;
  e.feature_dim = 12;
  e.validate();
  return e;
}

ExtractorSpec ExtractorSpec::random_projection_tanh(int input_dim, int feature_dim,
                                                    std::uint64_t seed) {
  detail::require(input_dim > 0 && feature_dim > 0, "random projection needs positive dims");
  std::mt19937_64 rng(seed);
  std::vector<double> params;
  append_layer_init(params, input_dim, feature_dim, rng);
  ExtractorSpec e = random_projection_tanh(input_dim, feature_dim, std::move(params));
  e.seed = seed;
  return e;
}

ExtractorSpec ExtractorSpec::random_projection_tanh(int input_dim, int feature_dim,
                                                    std::vector<double> parameters) {
  ExtractorSpec e;
  e.kind = ExtractorKind::RandomProjectionTanh;
  e.input_dim = input_dim;
  e.feature_dim = feature_dim;
  e.parameters = std::move(parameters);
  e.validate();
  return e;
}

ExtractorSpec ExtractorSpec::concat(std::vector<ExtractorSpec> children) {
  detail::require(!children.empty(), "concat extractor needs at least one child");
  ExtractorSpec e;
  e.kind = ExtractorKind::Concat;
  e.input_dim = children.front().input_dim;
  e.feature_dim = 0;
  for (const auto& c : children) e.feature_dim += c.feature_dim;
  e.children = std::move(children);
  e.validate();
  return e;
}

std::size_t ExtractorSpec::expected_parameter_count() const {
  if (kind != ExtractorKind::RandomProjectionTanh) return 0;
  return static_cast<std::size_t>(feature_dim) * static_cast<std::size_t>(input_dim) +
         static_cast<std::size_t>(feature_dim);
}

void ExtractorSpec::validate() const {
  detail::require(input_dim > 0 && feature_dim > 0, "extractor dims must be positive");
  switch (kind) {
    case ExtractorKind::Identity:
      detail::require(input_dim == feature_dim, "identity extractor requires feature_dim == input_dim");
      break;
    case ExtractorKind::ColorMaxPool:
      detail::require(channels == 3, "color_max_pool requires 3 channels");
      detail::require(height >= 2 && width >= 2 && height % 2 == 0 && width % 2 == 0,
                      "color_max_pool requires even height and width >= 2");
      detail::require(input_dim == 3 * height * width, "color_max_pool input_dim must be 3*height*width");
      detail::require(feature_dim == 12, "color_max_pool feature_dim is 12");
      break;
    case ExtractorKind::RandomProjectionTanh:
      break;
    case ExtractorKind::Concat: {
      detail::require(!children.empty(), "concat extractor needs at least one child");
      int total = 0;
      for (const auto& c : children) {
        c.validate();
        detail::require(c.input_dim == input_dim, "concat children must share input_dim");
        total += c.feature_dim;
      }
      detail::require(total == feature_dim, "concat feature_dim must equal the sum of its children");
      break;
    }
  }
  if (kind != ExtractorKind::Concat) {
    detail::require(children.empty(), "only concat extractors have children");
  }
  detail::require(parameters.size() == expected_parameter_count(),
                  std::string(to_string(kind)) + " extractor expects " +
                      std::to_string(expected_parameter_count()) + " parameters, got " +
                      std::to_string(parameters.size()));
  for (double p : parameters) detail::require(std::isfinite(p), "extractor parameters must be finite");
}

// -----------------------------------------------------------------------------
// Generators
// -----------------------------------------------------------------------------

Vector generate_one(const GeneratorSpec& g, VectorRef z) {
  check_size(z.size(), g.latent_dim, "generator latent");
  switch (g.kind) {
    case GeneratorKind::Identity:
      return z;
    case GeneratorKind::Affine: {
      RowMap W(g.parameters.data(), g.output_dim, g.latent_dim);
      VecMap b(g.parameters.data() + static_cast<std::size_t>(g.output_dim * g.latent_dim),
               g.output_dim);
      return W * z + b;
    }
    case GeneratorKind::Mlp:
      return mlp_activations(g, z).back();
    case GeneratorKind::Ring: {
      Vector y(2);
      y << std::cos(std::numbers::pi * z[0]), std::sin(std::numbers::pi * z[0]);
      return y;
    }
  }
  throw InvalidArgument("unknown generator kind");
}

Matrix generator_forward(const GeneratorSpec& g, MatrixRef Z) {
  check_size(Z.cols(), g.latent_dim, "generator latent");
  Matrix Y(Z.rows(), g.output_dim);
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    Y.row(i) = generate_one(g, Z.row(i)).transpose();
  }
  return Y;
}

Vector generator_vjp(const GeneratorSpec& g, VectorRef z, VectorRef cotangent) {
  check_size(z.size(), g.latent_dim, "generator latent");
  check_size(cotangent.size(), g.output_dim, "generator cotangent");
  switch (g.kind) {
    case GeneratorKind::Identity:
      return cotangent;
    case GeneratorKind::Affine: {
      RowMap W(g.parameters.data(), g.output_dim, g.latent_dim);
      return W.transpose() * cotangent;
    }
    case GeneratorKind::Mlp: {
      const std::vector<Vector> acts = mlp_activations(g, z);
      const std::size_t layers = g.layer_sizes.size() - 1;
      // Offsets of each layer's W block.
      std::vector<std::size_t> offsets(layers);
      std::size_t offset = 0;
      for (std::size_t l = 0; l < layers; ++l) {
        offsets[l] = offset;
        offset += static_cast<std::size_t>(g.layer_sizes[l + 1] * g.layer_sizes[l] + g.layer_sizes[l + 1]);
      }
      const Vector& out = acts.back();
      Vector delta = cotangent.array() * out.array() * (1.0 - out.array());
      for (std::size_t l = layers; l-- > 0;) {
        RowMap W(g.parameters.data() + offsets[l], g.layer_sizes[l + 1], g.layer_sizes[l]);
        Vector up = W.transpose() * delta;
        if (l == 0) return up;
        delta = up.array() * (1.0 - acts[l].array().square());
      }
      return delta;
    }
    case GeneratorKind::Ring: {
      const double t = std::numbers::pi * z[0];
      Vector grad(1);
      grad[0] = std::numbers::pi * (-cotangent[0] * std::sin(t) + cotangent[1] * std::cos(t));
      return grad;
    }
  }
  throw InvalidArgument("unknown generator kind");
}

Matrix sample_prior(const GeneratorSpec& g, int n, std::uint64_t seed) {
  detail::require(n >= 1, "sample_prior needs n >= 1");
  std::mt19937_64 rng(seed);
  Matrix Z(n, g.latent_dim);
  if (g.prior == Prior::UniformBox) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (Eigen::Index i = 0; i < Z.size(); ++i) Z.data()[i] = dist(rng);
  } else {
    std::normal_distribution<double> dist(0.0, 1.0);
    for (Eigen::Index i = 0; i < Z.size(); ++i) Z.data()[i] = dist(rng);
  }
  return Z;
}

// -----------------------------------------------------------------------------
// Extractors
// -----------------------------------------------------------------------------

namespace {

// Visits the 12 pooling blocks in output order (channel, block row, block col),
// passing the flat pixel indices of each block in row-major scan order.
template <typename F>
void for_each_pool_block(const ExtractorSpec& e, F&& visit) {
  const int bh = e.height / 2;
  const int bw = e.width / 2;
  std::vector<int> idx;
  idx.reserve(static_cast<std::size_t>(bh * bw));
  int out = 0;
  for (int c = 0; c < 3; ++c) {
    for (int br = 0; br < 2; ++br) {
      for (int bc = 0; bc < 2; ++bc) {
        idx.clear();
        for (int r = br * bh; r < (br + 1) * bh; ++r) {
          for (int col = bc * bw; col < (bc + 1) * bw; ++col) {
            idx.push_back(c * e.height * e.width + r * e.width + col);
          }
        }
        visit(out++, idx);
      }
    }
  }
}

int first_argmax(const VectorRef& x, const std::vector<int>& idx) {
  int best = idx.front();
  for (int i : idx) {
    if (x[i] > x[best]) best = i;
  }
  return best;
}

}  // namespace

Vector extractor_forward(const ExtractorSpec& e, VectorRef x) {
  check_size(x.size(), e.input_dim, "extractor input");
  switch (e.kind) {
    case ExtractorKind::Identity:
      return x;
    case ExtractorKind::ColorMaxPool: {
      Vector f(12);
      for_each_pool_block(e, [&](int o, const std::vector<int>& idx) { f[o] = x[first_argmax(x, idx)]; });
      return f;
    }
    case ExtractorKind::RandomProjectionTanh: {
      RowMap W(e.parameters.data(), e.feature_dim, e.input_dim);
      VecMap b(e.parameters.data() + static_cast<std::size_t>(e.feature_dim * e.input_dim), e.feature_dim);
      return (W * x + b).array().tanh().matrix();
    }
    case ExtractorKind::Concat: {
      Vector f(e.feature_dim);
      Eigen::Index at = 0;
      for (const auto& child : e.children) {
        f.segment(at, child.feature_dim) = extractor_forward(child, x);
        at += child.feature_dim;
      }
      return f;
    }
  }
  throw InvalidArgument("unknown extractor kind");
}

Matrix extract_features(const ExtractorSpec& e, MatrixRef X) {
  check_size(X.cols(), e.input_dim, "extractor input");
  Matrix F(X.rows(), e.feature_dim);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    F.row(i) = extractor_forward(e, X.row(i)).transpose();
  }
  return F;
}

Vector extractor_vjp(const ExtractorSpec& e, VectorRef x, VectorRef cotangent) {
  check_size(x.size(), e.input_dim, "extractor input");
  check_size(cotangent.size(), e.feature_dim, "extractor cotangent");
  switch (e.kind) {
    case ExtractorKind::Identity:
      return cotangent;
    case ExtractorKind::ColorMaxPool: {
      Vector g = Vector::Zero(e.input_dim);
      for_each_pool_block(e, [&](int o, const std::vector<int>& idx) { g[first_argmax(x, idx)] += cotangent[o]; });
      return g;
    }
    case ExtractorKind::RandomProjectionTanh: {
      RowMap W(e.parameters.data(), e.feature_dim, e.input_dim);
      VecMap b(e.parameters.data() + static_cast<std::size_t>(e.feature_dim * e.input_dim), e.feature_dim);
      const Vector t = (W * x + b).array().tanh().matrix();
      const Vector d = cotangent.array() * (1.0 - t.array().square());
      return W.transpose() * d;
    }
    case ExtractorKind::Concat: {
      Vector g = Vector::Zero(e.input_dim);
      Eigen::Index at = 0;
      for (const auto& child : e.children) {
        g += extractor_vjp(child, x, cotangent.segment(at, child.feature_dim));
        at += child.feature_dim;
      }
      return g;
    }
  }
  throw InvalidArgument("unknown extractor kind");
}

double pooling_tie_margin(const ExtractorSpec& e, VectorRef x) {
  check_size(x.size(), e.input_dim, "extractor input");
  double margin = std::numeric_limits<double>::infinity();
  if (e.kind == ExtractorKind::ColorMaxPool) {
    for_each_pool_block(e, [&](int, const std::vector<int>& idx) {
      const int best = first_argmax(x, idx);
      for (int i : idx) {
        if (i != best) margin = std::min(margin, x[best] - x[i]);
      }
    });
  } else if (e.kind == ExtractorKind::Concat) {
    for (const auto& child : e.children) margin = std::min(margin, pooling_tie_margin(child, x));
  }
  return margin;
}

}  // namespace kmm
