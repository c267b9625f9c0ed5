#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kmm/eval.hpp"
#include "kmm/kernels.hpp"
#include "kmm/models.hpp"
#include "kmm/optimize.hpp"
#include "kmm/types.hpp"

namespace kmm {

enum class ExperimentKind { Match, Herd, Compress, Grid, Curve, Bench, Gradcheck };

std::string_view to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(std::string_view name);

struct ImageLayout {
  int channels = 0;
  int height = 0;
  int width = 0;
};

struct InputSource {
  enum class Kind { None, Csv, ImageDir };
  Kind kind = Kind::None;
  std::filesystem::path path;
};

struct OptimizerConfig {
  int max_iters = 2000;
  AdamOptions adam;
  double tol = 1e-7;
  int patience = 20;
  std::optional<double> clamp;
};

struct CurveConfig {
  std::vector<int> n_values{1, 2, 5, 10};
  int repeats = 3;
};

struct BenchConfig {
  std::vector<int> m_values{64, 128};
  std::vector<int> n_values{64, 128};
  int iters_per_point = 50;
  int warmup = 5;
};

struct GradcheckConfig {
  int cases = 50;
  double h = 1e-5;
};

/// A fully resolved experiment: defaults filled in, relative paths made
/// absolute, data loaded, and every spec validated against the data.
struct RunConfig {
  ExperimentKind experiment = ExperimentKind::Match;
  InputSource input;
  std::optional<std::vector<double>> weights;
  int grid_denominator = 8;
  int n = 1;
  GeneratorSpec generator;
  bool generator_params_explicit = false;
  ExtractorSpec extractor;
  bool extractor_params_explicit = false;
  KernelSpec kernel;
  OptimizerConfig optimizer;
  CurveConfig curve;
  BenchConfig bench;
  GradcheckConfig gradcheck;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 0;
  bool record_wall_time = false;

  // Loaded state, not serialised.
  Matrix data;
  std::optional<ImageLayout> layout;

  SolverOptions solver_options() const;
  WeightedInput weighted_input() const;
};

struct ConfigOverrides {
  std::optional<ExperimentKind> experiment;
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::uint64_t> seed;
};

/// Parses a JSON config (unknown keys are rejected), applies overrides, loads
/// the referenced data and resolves defaults. Relative paths are taken
/// relative to `base_dir`.
RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& base_dir,
                           const ConfigOverrides& overrides = {});
RunConfig load_run_config(const std::filesystem::path& path, const ConfigOverrides& overrides = {});

/// The resolved config as JSON text; loading it reproduces the same run.
std::string resolved_config_json(const RunConfig& config);

}  // namespace kmm
