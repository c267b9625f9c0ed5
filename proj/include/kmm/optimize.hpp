#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "kmm/kernels.hpp"
#include "kmm/mmd.hpp"
#include "kmm/models.hpp"
#include "kmm/types.hpp"

namespace kmm {

struct AdamOptions {
  double learning_rate = 0.05;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  Matrix first_moment;
  Matrix second_moment;
  long step = 0;
  AdamOptions options;

  /// Zero moments shaped like a rows x cols latent matrix.
  static AdamState zeros(Eigen::Index rows, Eigen::Index cols, AdamOptions options = {});
};

/// Projection onto the l-infinity ball of the given radius.
Matrix clamp_latents(MatrixRef Z, double radius);

/// One bias-corrected Adam update. Returns the new state and the updated Z
/// (not yet clamped).
std::pair<AdamState, Matrix> adam_step(AdamState state, MatrixRef Z, MatrixRef gradient);

struct SolverOptions {
  int max_iters = 2000;
  AdamOptions adam;
  std::uint64_t seed = 0;
  // Defaults to the prior's radius (1 for uniform_box, 3.5 for standard_normal).
  std::optional<double> clamp_radius;
  double tol = 1e-7;
  int patience = 20;
  // Minimise the reporting form instead of the dropped-constant form. The
  // gradient, and therefore every iterate, is the same either way.
  bool optimize_with_constant = false;
  // Called with (iteration, Z) for the initial latents and after every clamp.
  std::function<void(int, const Matrix&)> on_iterate;
};

struct TrajectoryRecord {
  int iteration = 0;
  double objective = 0.0;  // reporting form, constant included
  double elapsed_ms = 0.0;
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;
  Matrix latents;
  Matrix outputs;
  double clamp_radius = 1.0;

  double initial_objective() const { return records.front().objective; }
  double final_objective() const { return records.back().objective; }
  std::vector<double> best_so_far() const;
};

double resolve_clamp_radius(const GeneratorSpec& g, const SolverOptions& opts);

/// Row j = generator_vjp(g, Z_j, output_grad_j).
Matrix pullback_to_latents(const GeneratorSpec& g, MatrixRef Z, MatrixRef output_grad);

/// Minimises MMD^2(X, {g(z_i)}, w) over n latents with Adam, clamping Z onto
/// the l-infinity ball after every step. Record 0 is the initial objective;
/// record t is the objective after t steps. Stops at max_iters, or once the
/// relative improvement stays below tol for `patience` consecutive steps.
Trajectory solve_kmm(const WeightedInput& input, const GeneratorSpec& g, const ExtractorSpec& e,
                     const KernelSpec& k, int n, const SolverOptions& opts);

/// Single output matched against 2 or 3 weighted inputs.
Trajectory compression_run(MatrixRef inputs, VectorRef weights, const GeneratorSpec& g,
                           const ExtractorSpec& e, const KernelSpec& k, const SolverOptions& opts);

/// All (a, b, c) / denominator with nonnegative integers a + b + c = denominator,
/// in descending lexicographic order: (1,0,0) first, (0,0,1) last.
std::vector<std::array<double, 3>> simplex_weight_grid(int denominator);

}  // namespace kmm
