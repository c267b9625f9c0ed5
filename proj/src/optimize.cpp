#include "kmm/optimize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "kmm/error.hpp"

namespace kmm {

AdamState AdamState::zeros(Eigen::Index rows, Eigen::Index cols, AdamOptions options) {
  detail::require(options.beta1 >= 0.0 && options.beta1 < 1.0, "adam beta1 must lie in [0, 1)");
  detail::require(options.beta2 >= 0.0 && options.beta2 < 1.0, "adam beta2 must lie in [0, 1)");
  detail::require(options.learning_rate > 0.0, "adam learning rate must be positive");
  detail::require(options.epsilon > 0.0, "adam epsilon must be positive");
  AdamState s;
  s.first_moment = Matrix::Zero(rows, cols);
  s.second_moment = Matrix::Zero(rows, cols);
  s.options = options;
  return s;
}

Matrix clamp_latents(MatrixRef Z, double radius) {
  if (!(radius > 0.0)) {
    throw InvalidArgument("clamp radius must be positive, got " + std::to_string(radius));
  }
  return Z.cwiseMax(-radius).cwiseMin(radius);
}

std::pair<AdamState, Matrix> adam_step(AdamState state, MatrixRef Z, MatrixRef gradient) {
  if (Z.rows() != gradient.rows() || Z.cols() != gradient.cols() ||
      state.first_moment.rows() != Z.rows() || state.first_moment.cols() != Z.cols()) {
    throw InvalidArgument("adam_step shape mismatch");
  }
  if (!gradient.allFinite()) throw NumericalError("adam_step received a non-finite gradient");

  const AdamOptions& o = state.options;
  state.step += 1;
  state.first_moment = o.beta1 * state.first_moment + (1.0 - o.beta1) * gradient;
  state.second_moment =
      o.beta2 * state.second_moment + (1.0 - o.beta2) * gradient.cwiseProduct(gradient);
  const double c1 = 1.0 - std::pow(o.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(o.beta2, static_cast<double>(state.step));

  Matrix next(Z.rows(), Z.cols());
  for (Eigen::Index i = 0; i < Z.size(); ++i) {
    const double m_hat = state.first_moment.data()[i] / c1;
    const double v_hat = state.second_moment.data()[i] / c2;
    next.data()[i] = Z.data()[i] - o.learning_rate * m_hat / (std::sqrt(v_hat) + o.epsilon);
  }
  return {std::move(state), std::move(next)};
}

std::vector<double> Trajectory::best_so_far() const {
  std::vector<double> best;
  best.reserve(records.size());
  double cur = std::numeric_limits<double>::infinity();
  for (const auto& r : records) {
    cur = std::min(cur, r.objective);
    best.push_back(cur);
  }
  return best;
}

double resolve_clamp_radius(const GeneratorSpec& g, const SolverOptions& opts) {
  const double r = opts.clamp_radius.value_or(default_clamp_radius(g.prior));
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw InvalidArgument("clamp radius must be positive, got " + std::to_string(r));
  }
  return r;
}

Matrix pullback_to_latents(const GeneratorSpec& g, MatrixRef Z, MatrixRef output_grad) {
  detail::require(Z.rows() == output_grad.rows(), "pullback row count mismatch");
  Matrix grad(Z.rows(), Z.cols());
  for (Eigen::Index j = 0; j < Z.rows(); ++j) {
    grad.row(j) = generator_vjp(g, Z.row(j), output_grad.row(j)).transpose();
  }
  return grad;
}

namespace {

constexpr double kRoundoffUlps = 64.0;

void check_finite(double value, int iteration) {
  if (!std::isfinite(value)) {
    throw NumericalError("objective became non-finite (" + std::to_string(value) +
                         ") at iteration " + std::to_string(iteration));
  }
}

}  // namespace

Trajectory solve_kmm(const WeightedInput& input, const GeneratorSpec& g, const ExtractorSpec& e,
                     const KernelSpec& k, int n, const SolverOptions& opts) {
  detail::require(n >= 1, "solve_kmm needs n >= 1");
  detail::require(opts.max_iters >= 0, "max_iters must be nonnegative");
  detail::require(opts.patience >= 1, "patience must be at least 1");
  g.validate();
  if (g.output_dim != e.input_dim) {
    throw InvalidArgument("generator output_dim " + std::to_string(g.output_dim) +
                          " does not match extractor input_dim " + std::to_string(e.input_dim));
  }
  const double radius = resolve_clamp_radius(g, opts);
  const MatchObjective reporting(input, k, e, true);
  const MatchObjective dropped = reporting.with_constant(false);
  const MatchObjective& step_obj = opts.optimize_with_constant ? reporting : dropped;

  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  };

  Trajectory traj;
  traj.clamp_radius = radius;
  Matrix Z = clamp_latents(sample_prior(g, n, opts.seed), radius);
  AdamState adam = AdamState::zeros(Z.rows(), Z.cols(), opts.adam);
  if (opts.on_iterate) opts.on_iterate(0, Z);

  Matrix Y = generator_forward(g, Z);
  ObjectiveEvaluation ev = step_obj.evaluate(Y);
  double reported = opts.optimize_with_constant ? ev.value : ev.value + reporting.constant();
  check_finite(reported, 0);
  traj.records.push_back({0, reported, elapsed_ms()});

  int stalled = 0;
  for (int it = 1; it <= opts.max_iters; ++it) {
    const Matrix grad = pullback_to_latents(g, Z, ev.gradient);
    auto [next_state, next_Z] = adam_step(std::move(adam), Z, grad);
    adam = std::move(next_state);
    Z = clamp_latents(next_Z, radius);
    if (opts.on_iterate) opts.on_iterate(it, Z);

    Y = generator_forward(g, Z);
    ev = step_obj.evaluate(Y);
    const double prev = reported;
    reported = opts.optimize_with_constant ? ev.value : ev.value + reporting.constant();
    check_finite(reported, it);
    traj.records.push_back({it, reported, elapsed_ms()});

    // Near the optimum the reported value is a difference of O(constant)
    // terms; changes below their rounding noise are not progress.
    const double noise = kRoundoffUlps * std::numeric_limits<double>::epsilon() *
                         (std::abs(reporting.constant()) + std::abs(reported - reporting.constant()));
    const bool improved = prev - reported > std::max(opts.tol * std::abs(prev), noise);
    stalled = improved ? 0 : stalled + 1;
    if (stalled >= opts.patience) break;
  }

  traj.latents = std::move(Z);
  traj.outputs = std::move(Y);
  return traj;
}

Trajectory compression_run(MatrixRef inputs, VectorRef weights, const GeneratorSpec& g,
                           const ExtractorSpec& e, const KernelSpec& k, const SolverOptions& opts) {
  detail::require(inputs.rows() == 2 || inputs.rows() == 3, "compression takes 2 or 3 inputs");
  WeightedInput input{Matrix(inputs), Vector(weights)};
  return solve_kmm(input, g, e, k, 1, opts);
}

std::vector<std::array<double, 3>> simplex_weight_grid(int denominator) {
  detail::require(denominator >= 1, "weight grid denominator must be >= 1");
  const auto d = static_cast<double>(denominator);
  std::vector<std::array<double, 3>> grid;
  grid.reserve(static_cast<std::size_t>((denominator + 1) * (denominator + 2) / 2));
  for (int a = denominator; a >= 0; --a) {
    for (int b = denominator - a; b >= 0; --b) {
      const int c = denominator - a - b;
      grid.push_back({a / d, b / d, c / d});
    }
  }
  return grid;
}

}  // namespace kmm
