#include "kmm/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>

#include "json.hpp"
#include "kmm/error.hpp"
#include "kmm/io.hpp"
#include "kmm/mmd.hpp"

namespace kmm {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Match: return "match";
    case ExperimentKind::Herd: return "herd";
    case ExperimentKind::Compress: return "compress";
    case ExperimentKind::Grid: return "grid";
    case ExperimentKind::Curve: return "curve";
    case ExperimentKind::Bench: return "bench";
    case ExperimentKind::Gradcheck: return "gradcheck";
  }
  return "unknown";
}

ExperimentKind experiment_kind_from_string(std::string_view name) {
  for (auto k : {ExperimentKind::Match, ExperimentKind::Herd, ExperimentKind::Compress,
                 ExperimentKind::Grid, ExperimentKind::Curve, ExperimentKind::Bench,
                 ExperimentKind::Gradcheck}) {
    if (to_string(k) == name) return k;
  }
  throw InvalidArgument("unknown experiment kind '" + std::string(name) + "'");
}

SolverOptions RunConfig::solver_options() const {
  SolverOptions o;
  o.max_iters = optimizer.max_iters;
  o.adam = optimizer.adam;
  o.seed = seed;
  o.clamp_radius = optimizer.clamp;
  o.tol = optimizer.tol;
  o.patience = optimizer.patience;
  return o;
}

WeightedInput RunConfig::weighted_input() const {
  if (weights) {
    return WeightedInput(data, Eigen::Map<const Vector>(weights->data(), static_cast<Eigen::Index>(weights->size())));
  }
  return WeightedInput::uniform(data);
}

namespace {

// Reads keys from one JSON object and rejects any key it was never asked for.
class Fields {
 public:
  Fields(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) throw InvalidArgument(where_ + " must be a JSON object");
  }

  bool has(const char* key) {
    seen_.insert(key);
    return obj_.contains(key) && !obj_.at(key).is_null();
  }

  const json& raw(const char* key) {
    seen_.insert(key);
    return obj_.at(key);
  }

  template <typename T>
  std::optional<T> get(const char* key) {
    if (!has(key)) return std::nullopt;
    try {
      return obj_.at(key).get<T>();
    } catch (const json::exception&) {
      throw InvalidArgument(where_ + "." + key + " has the wrong type");
    }
  }

  template <typename T>
  T get_or(const char* key, T fallback) {
    return get<T>(key).value_or(std::move(fallback));
  }

  template <typename T>
  T require(const char* key) {
    auto v = get<T>(key);
    if (!v) throw InvalidArgument(where_ + "." + key + " is required");
    return *v;
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) throw InvalidArgument("unknown key '" + it.key() + "' in " + where_);
    }
  }

  const std::string& where() const { return where_; }

 private:
  const json& obj_;
  std::string where_;
  std::set<std::string> seen_;
};

fs::path resolve_path(const std::string& p, const fs::path& base) {
  fs::path path(p);
  if (path.is_relative()) path = base / path;
  return fs::absolute(path).lexically_normal();
}

// Inline array of numbers, or a path to a CSV whose values are read row-major.
std::vector<double> read_parameters(const json& node, const fs::path& base, const std::string& where) {
  if (node.is_array()) {
    try {
      return node.get<std::vector<double>>();
    } catch (const json::exception&) {
      throw InvalidArgument(where + ".parameters must be an array of numbers");
    }
  }
  if (node.is_string()) {
    const fs::path path = resolve_path(node.get<std::string>(), base);
    if (!fs::exists(path)) throw InvalidArgument(where + ".parameters: file '" + path.string() + "' does not exist");
    const Matrix m = load_points_csv(path);
    return std::vector<double>(m.data(), m.data() + m.size());
  }
  throw InvalidArgument(where + ".parameters must be an array or a CSV path");
}

struct ParsedGenerator {
  GeneratorSpec spec;
  bool explicit_params = false;
};

ParsedGenerator parse_generator(const json* node, std::optional<int> data_dim, const fs::path& base) {
  ParsedGenerator out;
  if (!node) {
    if (!data_dim) throw InvalidArgument("generator is required when there is no input data");
    out.spec = GeneratorSpec::identity(*data_dim);
    return out;
  }
  Fields f(*node, "generator");
  const auto kind = generator_kind_from_string(f.get_or<std::string>("kind", "identity"));
  const auto prior = prior_from_string(f.get_or<std::string>("prior", "uniform_box"));
  const auto seed = f.get_or<std::uint64_t>("seed", 0);
  auto latent = f.get<int>("latent_dim");
  auto output = f.get<int>("output_dim");
  auto layers = f.get<std::vector<int>>("layer_sizes");
  std::optional<std::vector<double>> params;
  if (f.has("parameters")) params = read_parameters(f.raw("parameters"), base, "generator");
  f.finish();

  if (!output) output = data_dim;
  switch (kind) {
    case GeneratorKind::Identity: {
      const auto dim = latent ? latent : output;
      if (!dim) throw InvalidArgument("generator.latent_dim is required without input data");
      out.spec = GeneratorSpec::identity(*dim, prior);
      if (output && *output != *dim) throw InvalidArgument("identity generator requires latent_dim == output_dim");
      break;
    }
    case GeneratorKind::Affine:
      if (!latent) throw InvalidArgument("generator.latent_dim is required for affine");
      if (!output) throw InvalidArgument("generator.output_dim is required without input data");
      out.spec = params ? GeneratorSpec::affine(*latent, *output, *params, prior)
                        : GeneratorSpec::affine(*latent, *output, seed, prior);
      out.spec.seed = seed;
      break;
    case GeneratorKind::Mlp:
      if (!layers) throw InvalidArgument("generator.layer_sizes is required for mlp");
      out.spec = GeneratorSpec::mlp(*layers, seed, prior);
      if (params) {
        out.spec.parameters = *params;
        out.spec.validate();
      }
      break;
    case GeneratorKind::Ring:
      out.spec = GeneratorSpec::ring();
      if (prior != Prior::UniformBox) throw InvalidArgument("ring generator uses the uniform_box prior");
      break;
  }
  if (latent && *latent != out.spec.latent_dim) throw InvalidArgument("generator.latent_dim disagrees with the generator kind");
  out.explicit_params = params.has_value() && kind != GeneratorKind::Identity && kind != GeneratorKind::Ring;
  if (params && !out.explicit_params && !params->empty()) {
    throw InvalidArgument(std::string(to_string(kind)) + " generator takes no parameters");
  }
  return out;
}

struct ParsedExtractor {
  ExtractorSpec spec;
  bool explicit_params = false;
};

ParsedExtractor parse_extractor(const json* node, int dim, const std::optional<ImageLayout>& layout,
                                const fs::path& base, const std::string& where) {
  ParsedExtractor out;
  if (!node) {
    out.spec = ExtractorSpec::identity(dim);
    return out;
  }
  Fields f(*node, where);
  const auto kind = extractor_kind_from_string(f.get_or<std::string>("kind", "identity"));
  const auto input_dim = f.get_or<int>("input_dim", dim);
  auto feature_dim = f.get<int>("feature_dim");
  auto channels = f.get<int>("channels");
  auto height = f.get<int>("height");
  auto width = f.get<int>("width");
  const auto seed = f.get_or<std::uint64_t>("seed", 0);
  std::optional<std::vector<double>> params;
  if (f.has("parameters")) params = read_parameters(f.raw("parameters"), base, where);
  std::vector<ParsedExtractor> children;
  if (f.has("children")) {
    const json& arr = f.raw("children");
    if (!arr.is_array()) throw InvalidArgument(where + ".children must be an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      children.push_back(parse_extractor(&arr[i], input_dim, layout, base, where + ".children[" + std::to_string(i) + "]"));
    }
  }
  f.finish();

  if (input_dim != dim) {
    throw InvalidArgument(where + ".input_dim " + std::to_string(input_dim) + " does not match data dimension " + std::to_string(dim));
  }
  if (kind != ExtractorKind::Concat && !children.empty()) throw InvalidArgument(where + ": only concat takes children");
  if (params && kind != ExtractorKind::RandomProjectionTanh) throw InvalidArgument(where + ": only random_projection_tanh takes parameters");

  switch (kind) {
    case ExtractorKind::Identity:
      out.spec = ExtractorSpec::identity(dim);
      break;
    case ExtractorKind::ColorMaxPool: {
      if (!height && layout) height = layout->height;
      if (!width && layout) width = layout->width;
      if (!height || !width) throw InvalidArgument(where + ": color_max_pool needs height and width");
      if (channels && *channels != 3) throw InvalidArgument(where + ": color_max_pool requires 3 channels");
      out.spec = ExtractorSpec::color_max_pool(*height, *width);
      if (out.spec.input_dim != dim) throw InvalidArgument(where + ": color_max_pool layout does not match data dimension");
      break;
    }
    case ExtractorKind::RandomProjectionTanh:
      if (!feature_dim) throw InvalidArgument(where + ".feature_dim is required for random_projection_tanh");
      out.spec = params ? ExtractorSpec::random_projection_tanh(dim, *feature_dim, *params)
                        : ExtractorSpec::random_projection_tanh(dim, *feature_dim, seed);
      out.spec.seed = seed;
      out.explicit_params = params.has_value();
      break;
    case ExtractorKind::Concat: {
      std::vector<ExtractorSpec> specs;
      for (auto& c : children) specs.push_back(std::move(c.spec));
      out.spec = ExtractorSpec::concat(std::move(specs));
      break;
    }
  }
  if (feature_dim && *feature_dim != out.spec.feature_dim) {
    throw InvalidArgument(where + ".feature_dim disagrees with the extractor kind");
  }
  if (kind != ExtractorKind::ColorMaxPool && layout) {
    out.spec.channels = layout->channels;
    out.spec.height = layout->height;
    out.spec.width = layout->width;
  }
  return out;
}

KernelSpec parse_kernel(const json* node, const std::optional<Matrix>& features) {
  if (!node) return KernelSpec{};
  Fields f(*node, "kernel");
  KernelSpec k;
  k.kind = kernel_kind_from_string(f.get_or<std::string>("kind", "imq"));
  auto sigma = f.get<double>("sigma");
  auto c = f.get<double>("c");
  f.finish();
  switch (k.kind) {
    case KernelKind::Linear:
      break;
    case KernelKind::Gaussian:
      if (!sigma) {
        if (!features) throw InvalidArgument("kernel.sigma is required without input data");
        sigma = median_heuristic(*features);
      }
      k.sigma = *sigma;
      break;
    case KernelKind::Imq:
      k.c = c.value_or(10.0);
      break;
  }
  k.validate();
  return k;
}

json generator_json(const GeneratorSpec& g, bool explicit_params) {
  json j;
  j["kind"] = to_string(g.kind);
  j["latent_dim"] = g.latent_dim;
  j["output_dim"] = g.output_dim;
  j["prior"] = to_string(g.prior);
  if (g.kind == GeneratorKind::Mlp) j["layer_sizes"] = g.layer_sizes;
  if (g.kind == GeneratorKind::Affine || g.kind == GeneratorKind::Mlp) {
    if (explicit_params) {
      j["parameters"] = g.parameters;
    } else {
      j["seed"] = g.seed;
    }
  }
  return j;
}

json extractor_json(const ExtractorSpec& e, bool explicit_params) {
  json j;
  j["kind"] = to_string(e.kind);
  j["input_dim"] = e.input_dim;
  j["feature_dim"] = e.feature_dim;
  switch (e.kind) {
    case ExtractorKind::ColorMaxPool:
      j["channels"] = e.channels;
      j["height"] = e.height;
      j["width"] = e.width;
      break;
    case ExtractorKind::RandomProjectionTanh:
      if (explicit_params) {
        j["parameters"] = e.parameters;
      } else {
        j["seed"] = e.seed;
      }
      break;
    case ExtractorKind::Concat: {
      json children = json::array();
      // Child parameters are always written inline; their provenance is not tracked.
      for (const auto& c : e.children) children.push_back(extractor_json(c, true));
      j["children"] = children;
      break;
    }
    case ExtractorKind::Identity:
      break;
  }
  return j;
}

}  // namespace

RunConfig parse_run_config(std::string_view json_text, const fs::path& base_dir,
                           const ConfigOverrides& overrides) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
  }
  Fields f(root, "config");
  RunConfig cfg;

  auto experiment = f.get<std::string>("experiment");
  if (experiment) {
    cfg.experiment = experiment_kind_from_string(*experiment);
    if (overrides.experiment && *overrides.experiment != cfg.experiment) {
      throw InvalidArgument("config experiment '" + *experiment + "' does not match subcommand '" +
                            std::string(to_string(*overrides.experiment)) + "'");
    }
  } else if (overrides.experiment) {
    cfg.experiment = *overrides.experiment;
  } else {
    throw InvalidArgument("config.experiment is required");
  }

  if (f.has("input")) {
    Fields in(f.raw("input"), "input");
    auto csv = in.get<std::string>("csv");
    auto dir = in.get<std::string>("image_dir");
    in.finish();
    if (csv.has_value() == dir.has_value()) throw InvalidArgument("input needs exactly one of 'csv' or 'image_dir'");
    cfg.input.kind = csv ? InputSource::Kind::Csv : InputSource::Kind::ImageDir;
    cfg.input.path = resolve_path(csv ? *csv : *dir, base_dir);
    if (!fs::exists(cfg.input.path)) throw InvalidArgument("input path '" + cfg.input.path.string() + "' does not exist");
  }

  cfg.weights = f.get<std::vector<double>>("weights");
  cfg.grid_denominator = f.get_or<int>("grid_denominator", 8);
  auto n = f.get<int>("n");
  cfg.n = n.value_or(1);
  cfg.seed = overrides.seed ? *overrides.seed : f.get_or<std::uint64_t>("seed", 0);
  if (overrides.seed) f.has("seed");
  cfg.record_wall_time = f.get_or<bool>("record_wall_time", false);
  if (overrides.output_dir) {
    f.has("output_dir");
    cfg.output_dir = fs::absolute(*overrides.output_dir).lexically_normal();
  } else {
    cfg.output_dir = resolve_path(f.get_or<std::string>("output_dir", "out"), base_dir);
  }

  if (f.has("optimizer")) {
    Fields o(f.raw("optimizer"), "optimizer");
    cfg.optimizer.max_iters = o.get_or("max_iters", cfg.optimizer.max_iters);
    cfg.optimizer.adam.learning_rate = o.get_or("learning_rate", cfg.optimizer.adam.learning_rate);
    cfg.optimizer.adam.beta1 = o.get_or("beta1", cfg.optimizer.adam.beta1);
    cfg.optimizer.adam.beta2 = o.get_or("beta2", cfg.optimizer.adam.beta2);
    cfg.optimizer.adam.epsilon = o.get_or("epsilon", cfg.optimizer.adam.epsilon);
    cfg.optimizer.tol = o.get_or("tol", cfg.optimizer.tol);
    cfg.optimizer.patience = o.get_or("patience", cfg.optimizer.patience);
    cfg.optimizer.clamp = o.get<double>("clamp");
    o.finish();
  }
  if (f.has("curve")) {
    Fields c(f.raw("curve"), "curve");
    cfg.curve.n_values = c.get_or("n_values", cfg.curve.n_values);
    cfg.curve.repeats = c.get_or("repeats", cfg.curve.repeats);
    c.finish();
  }
  if (f.has("bench")) {
    Fields b(f.raw("bench"), "bench");
    cfg.bench.m_values = b.get_or("m_values", cfg.bench.m_values);
    cfg.bench.n_values = b.get_or("n_values", cfg.bench.n_values);
    cfg.bench.iters_per_point = b.get_or("iters_per_point", cfg.bench.iters_per_point);
    cfg.bench.warmup = b.get_or("warmup", cfg.bench.warmup);
    b.finish();
  }
  if (f.has("gradcheck")) {
    Fields g(f.raw("gradcheck"), "gradcheck");
    cfg.gradcheck.cases = g.get_or("cases", cfg.gradcheck.cases);
    cfg.gradcheck.h = g.get_or("h", cfg.gradcheck.h);
    g.finish();
  }
  const json* gen_node = f.has("generator") ? &f.raw("generator") : nullptr;
  const json* ext_node = f.has("extractor") ? &f.raw("extractor") : nullptr;
  const json* ker_node = f.has("kernel") ? &f.raw("kernel") : nullptr;
  f.finish();

  // Data.
  if (cfg.input.kind == InputSource::Kind::Csv) {
    cfg.data = load_points_csv(cfg.input.path);
  } else if (cfg.input.kind == InputSource::Kind::ImageDir) {
    const auto images = load_image_directory(cfg.input.path);
    const ImageRecord& first = images.front();
    cfg.layout = ImageLayout{first.channels, first.height, first.width};
    cfg.data.resize(static_cast<Eigen::Index>(images.size()), static_cast<Eigen::Index>(first.pixels.size()));
    for (std::size_t i = 0; i < images.size(); ++i) {
      if (images[i].channels != first.channels || images[i].height != first.height || images[i].width != first.width) {
        throw InvalidArgument("images in '" + cfg.input.path.string() + "' differ in shape");
      }
      cfg.data.row(static_cast<Eigen::Index>(i)) = images[i].flattened().transpose();
    }
  }
  const bool has_data = cfg.input.kind != InputSource::Kind::None;

  // Experiment requirements.
  const ExperimentKind kind = cfg.experiment;
  const bool needs_input = kind != ExperimentKind::Bench && kind != ExperimentKind::Gradcheck;
  if (needs_input && !has_data) throw InvalidArgument(std::string(to_string(kind)) + " needs an input");
  if (cfg.n < 1) throw InvalidArgument("n must be >= 1");
  if ((kind == ExperimentKind::Compress || kind == ExperimentKind::Grid) && cfg.n != 1) {
    throw InvalidArgument(std::string(to_string(kind)) + " always uses n = 1");
  }
  if (kind == ExperimentKind::Compress && (cfg.data.rows() < 2 || cfg.data.rows() > 3)) {
    throw InvalidArgument("compress takes 2 or 3 input points");
  }
  if (kind == ExperimentKind::Grid) {
    if (cfg.data.rows() != 3) throw InvalidArgument("grid takes exactly 3 input points");
    if (cfg.weights) throw InvalidArgument("grid sweeps its own weights; remove 'weights'");
    if (cfg.grid_denominator < 1) throw InvalidArgument("grid_denominator must be >= 1");
  }
  if (has_data && cfg.weights) {
    // Throws with the violated constraint in the message.
    (void)cfg.weighted_input();
  }

  if (kind == ExperimentKind::Gradcheck) {
    if (cfg.gradcheck.cases < 1) throw InvalidArgument("gradcheck.cases must be >= 1");
    if (!(cfg.gradcheck.h > 0.0)) throw InvalidArgument("gradcheck.h must be positive");
    return cfg;
  }

  // Models.
  const std::optional<int> data_dim = has_data ? std::optional<int>(static_cast<int>(cfg.data.cols())) : std::nullopt;
  ParsedGenerator gen = parse_generator(gen_node, data_dim, base_dir);
  cfg.generator = gen.spec;
  cfg.generator_params_explicit = gen.explicit_params;
  if (data_dim && cfg.generator.output_dim != *data_dim) {
    throw InvalidArgument("generator output_dim " + std::to_string(cfg.generator.output_dim) +
                          " does not match data dimension " + std::to_string(*data_dim));
  }
  if (kind == ExperimentKind::Herd && cfg.generator.kind != GeneratorKind::Identity) {
    throw InvalidArgument("herd uses the identity generator");
  }
  const int dim = cfg.generator.output_dim;
  ParsedExtractor ext = parse_extractor(ext_node, dim, cfg.layout, base_dir, "extractor");
  cfg.extractor = ext.spec;
  cfg.extractor_params_explicit = ext.explicit_params;
  if (!cfg.layout && cfg.extractor.kind == ExtractorKind::ColorMaxPool) {
    cfg.layout = ImageLayout{3, cfg.extractor.height, cfg.extractor.width};
  }

  std::optional<Matrix> features;
  if (has_data) features = extract_features(cfg.extractor, cfg.data);
  cfg.kernel = parse_kernel(ker_node, features);

  // Herding matches in data space: the clamp box defaults to one that covers the input.
  if (kind == ExperimentKind::Herd && !cfg.optimizer.clamp) {
    cfg.optimizer.clamp = std::max(1.0, cfg.data.cwiseAbs().maxCoeff());
  }
  if (cfg.optimizer.clamp && !(*cfg.optimizer.clamp > 0.0)) throw InvalidArgument("optimizer.clamp must be positive");
  if (cfg.optimizer.max_iters < 0) throw InvalidArgument("optimizer.max_iters must be >= 0");
  if (cfg.optimizer.patience < 1) throw InvalidArgument("optimizer.patience must be >= 1");
  (void)AdamState::zeros(1, 1, cfg.optimizer.adam);

  if (kind == ExperimentKind::Curve) {
    if (cfg.curve.n_values.empty()) throw InvalidArgument("curve.n_values must not be empty");
    for (int v : cfg.curve.n_values) if (v < 1) throw InvalidArgument("curve.n_values must be >= 1");
    if (cfg.curve.repeats < 1) throw InvalidArgument("curve.repeats must be >= 1");
  }
  if (kind == ExperimentKind::Bench) {
    for (int v : cfg.bench.m_values) if (v < 1) throw InvalidArgument("bench.m_values must be >= 1");
    for (int v : cfg.bench.n_values) if (v < 1) throw InvalidArgument("bench.n_values must be >= 1");
    if (cfg.bench.iters_per_point < 1) throw InvalidArgument("bench.iters_per_point must be >= 1");
    if (cfg.bench.warmup < 0) throw InvalidArgument("bench.warmup must be >= 0");
  }
  return cfg;
}

RunConfig load_run_config(const fs::path& path, const ConfigOverrides& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open config '" + path.string() + "'");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_run_config(text, fs::absolute(path).parent_path(), overrides);
}

std::string resolved_config_json(const RunConfig& cfg) {
  json j;
  j["experiment"] = to_string(cfg.experiment);
  if (cfg.input.kind == InputSource::Kind::Csv) j["input"] = {{"csv", cfg.input.path.string()}};
  if (cfg.input.kind == InputSource::Kind::ImageDir) j["input"] = {{"image_dir", cfg.input.path.string()}};
  if (cfg.weights) j["weights"] = *cfg.weights;
  if (cfg.experiment == ExperimentKind::Grid) j["grid_denominator"] = cfg.grid_denominator;
  j["n"] = cfg.n;
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir.string();
  j["record_wall_time"] = cfg.record_wall_time;
  if (cfg.experiment == ExperimentKind::Gradcheck) {
    j["gradcheck"] = {{"cases", cfg.gradcheck.cases}, {"h", cfg.gradcheck.h}};
    return j.dump(2) + "\n";
  }
  j["generator"] = generator_json(cfg.generator, cfg.generator_params_explicit);
  j["extractor"] = extractor_json(cfg.extractor, cfg.extractor_params_explicit);
  json k = {{"kind", to_string(cfg.kernel.kind)}};
  if (cfg.kernel.kind == KernelKind::Gaussian) k["sigma"] = cfg.kernel.sigma;
  if (cfg.kernel.kind == KernelKind::Imq) k["c"] = cfg.kernel.c;
  j["kernel"] = k;
  json o = {{"max_iters", cfg.optimizer.max_iters},
            {"learning_rate", cfg.optimizer.adam.learning_rate},
            {"beta1", cfg.optimizer.adam.beta1},
            {"beta2", cfg.optimizer.adam.beta2},
            {"epsilon", cfg.optimizer.adam.epsilon},
            {"tol", cfg.optimizer.tol},
            {"patience", cfg.optimizer.patience}};
  if (cfg.optimizer.clamp) o["clamp"] = *cfg.optimizer.clamp;
  j["optimizer"] = o;
  if (cfg.experiment == ExperimentKind::Curve) {
    j["curve"] = {{"n_values", cfg.curve.n_values}, {"repeats", cfg.curve.repeats}};
  }
  if (cfg.experiment == ExperimentKind::Bench) {
    j["bench"] = {{"m_values", cfg.bench.m_values},
                  {"n_values", cfg.bench.n_values},
                  {"iters_per_point", cfg.bench.iters_per_point},
                  {"warmup", cfg.bench.warmup}};
  }
  return j.dump(2) + "\n";
}

}  // namespace kmm
