#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kmm/kernels.hpp"
#include "kmm/mmd.hpp"
#include "kmm/models.hpp"
#include "kmm/types.hpp"

// Finite-difference verification of the full latent gradient
//   Z -> g(Z) -> E(.) -> MMD^2
// across every generator / extractor / kernel combination.

namespace kmm {

struct GradcheckCase {
  std::string label;
  GeneratorSpec generator;
  ExtractorSpec extractor;
  KernelSpec kernel;
  MatchObjective objective;
  Matrix latents;
};

/// `count` seeded cases cycling through every valid (generator, extractor,
/// kernel) combination. Latents whose outputs sit within 1e-3 of a max-pooling
/// tie are redrawn.
std::vector<GradcheckCase> gradcheck_cases(int count, std::uint64_t seed);

/// Reporting objective as a function of the latents.
double latent_objective(const GradcheckCase& c, MatrixRef Z);

/// Analytic gradient of latent_objective.
Matrix latent_gradient(const GradcheckCase& c, MatrixRef Z);

/// ||a - b||_inf / max(||a||_inf, ||b||_inf), or 0 when both vanish.
double max_relative_error(MatrixRef analytic, MatrixRef numeric);

struct GradcheckResult {
  std::string label;
  double max_rel_error = 0.0;
};

struct GradcheckReport {
  std::vector<GradcheckResult> results;
  double max_rel_error = 0.0;
};

/// Compares latent_gradient with central differences of step h on every case.
GradcheckReport run_gradcheck(int count = 50, std::uint64_t seed = 0, double h = 1e-5);

}  // namespace kmm
