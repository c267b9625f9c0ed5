#include "kmm/run.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>

#include "json.hpp"
#include "kmm/error.hpp"
#include "kmm/gradcheck.hpp"
#include "kmm/io.hpp"

namespace kmm {

namespace fs = std::filesystem;

namespace {

constexpr double kGradcheckTolerance = 1e-5;

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string cell_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "cell_%02zu.csv", index);
  return buf;
}

std::vector<ImageRecord> as_images(MatrixRef rows, const ImageLayout& layout) {
  std::vector<ImageRecord> images;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    images.push_back(ImageRecord::from_flat(rows.row(i).transpose(), layout.channels, layout.height, layout.width));
  }
  return images;
}

// Image artifacts only make sense when the outputs have the image's shape.
bool writes_images(const RunConfig& cfg) {
  return cfg.layout &&
         cfg.generator.output_dim == cfg.layout->channels * cfg.layout->height * cfg.layout->width;
}

void write_solve(const RunConfig& cfg, const Trajectory& traj, std::ostream& log) {
  const fs::path& dir = cfg.output_dir;
  save_trace_csv(dir / "trace.csv", traj, cfg.record_wall_time);
  save_points_csv(dir / "outputs.csv", traj.outputs);
  save_points_csv(dir / "latents.csv", traj.latents);

  nlohmann::json summary = {{"experiment", to_string(cfg.experiment)},
                            {"n", traj.outputs.rows()},
                            {"iterations", traj.records.back().iteration},
                            {"initial_objective", traj.initial_objective()},
                            {"final_objective", traj.final_objective()},
                            {"clamp_radius", traj.clamp_radius}};
  write_text(dir / "summary.json", summary.dump(2) + "\n");

  if (writes_images(cfg)) {
    const auto outputs = as_images(traj.outputs, *cfg.layout);
    for (std::size_t j = 0; j < outputs.size(); ++j) {
      char name[32];
      std::snprintf(name, sizeof name, "output_%02zu.ppm", j);
      save_image_pnm(dir / "outputs" / name, outputs[j]);
    }
    save_image_grid(outputs, static_cast<int>(std::min<std::size_t>(outputs.size(), 8)), dir / "outputs_grid.ppm");
    const auto inputs = as_images(cfg.data, *cfg.layout);
    save_image_grid(inputs, static_cast<int>(std::min<std::size_t>(inputs.size(), 8)), dir / "inputs_grid.ppm");
  }
  log << to_string(cfg.experiment) << ": " << traj.records.back().iteration << " iterations, objective "
      << format_double(traj.initial_objective()) << " -> " << format_double(traj.final_objective()) << "\n";
}

int run_grid(const RunConfig& cfg, std::ostream& log) {
  const auto weights = simplex_weight_grid(cfg.grid_denominator);
  const fs::path& dir = cfg.output_dir;
  std::string summary = "w1,w2,w3,objective\n";
  Matrix all_outputs(static_cast<Eigen::Index>(weights.size()), cfg.generator.output_dim);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    SolverOptions opts = cfg.solver_options();
    opts.seed = derive_seed(cfg.seed, i);
    const Vector w = Eigen::Map<const Vector>(weights[i].data(), 3);
    const Trajectory traj = compression_run(cfg.data, w, cfg.generator, cfg.extractor, cfg.kernel, opts);
    save_points_csv(dir / "grid" / cell_name(i), traj.outputs);
    save_trace_csv(dir / "traces" / cell_name(i), traj, cfg.record_wall_time);
    all_outputs.row(static_cast<Eigen::Index>(i)) = traj.outputs.row(0);
    summary += format_double(weights[i][0]) + "," + format_double(weights[i][1]) + "," +
               format_double(weights[i][2]) + "," + format_double(traj.final_objective()) + "\n";
  }
  write_text(dir / "grid_summary.csv", summary);
  if (writes_images(cfg)) {
    save_image_grid(as_images(all_outputs, *cfg.layout), cfg.grid_denominator + 1, dir / "grid_outputs.ppm");
  }
  log << "grid: " << weights.size() << " cells\n";
  return 0;
}

int run_gradcheck_suite(const RunConfig& cfg, std::ostream& log) {
  const GradcheckReport report = run_gradcheck(cfg.gradcheck.cases, cfg.seed, cfg.gradcheck.h);
  std::string csv = "case,max_rel_error\n";
  for (std::size_t i = 0; i < report.results.size(); ++i) {
    const GradcheckResult& r = report.results[i];
    csv += std::to_string(i) + "," + format_double(r.max_rel_error) + "\n";
    if (!(r.max_rel_error < kGradcheckTolerance)) log << "case " << i << " (" << r.label << ") failed\n";
  }
  write_text(cfg.output_dir / "gradcheck.csv", csv);
  const bool ok = report.max_rel_error < kGradcheckTolerance;
  log << "gradcheck: " << report.results.size() << " cases, max relative error "
      << format_double(report.max_rel_error) << (ok ? " (ok)" : " (FAILED)") << "\n";
  return ok ? 0 : 3;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& log) {
  const fs::path& dir = cfg.output_dir;
  fs::create_directories(dir);
  write_text(dir / "config.json", resolved_config_json(cfg));

  switch (cfg.experiment) {
    case ExperimentKind::Match:
    case ExperimentKind::Herd:
      write_solve(cfg, solve_kmm(cfg.weighted_input(), cfg.generator, cfg.extractor, cfg.kernel, cfg.n, cfg.solver_options()), log);
      return 0;
    case ExperimentKind::Compress: {
      const WeightedInput input = cfg.weighted_input();
      write_solve(cfg, compression_run(input.points(), input.weights(), cfg.generator, cfg.extractor, cfg.kernel, cfg.solver_options()), log);
      return 0;
    }
    case ExperimentKind::Grid:
      return run_grid(cfg, log);
    case ExperimentKind::Curve: {
      const auto curve = objective_vs_n_curve(cfg.weighted_input(), cfg.generator, cfg.extractor, cfg.kernel,
                                              cfg.solver_options(), cfg.curve.n_values, cfg.curve.repeats, cfg.seed);
      save_curve_csv(dir / "curve.csv", curve);
      for (const auto& p : curve) log << "n=" << p.n << " objective " << format_double(p.value) << "\n";
      return 0;
    }
    case ExperimentKind::Bench: {
      BenchOptions opts;
      opts.iters_per_point = cfg.bench.iters_per_point;
      opts.warmup = cfg.bench.warmup;
      opts.adam = cfg.optimizer.adam;
      opts.clamp_radius = cfg.optimizer.clamp;
      const auto cells = runtime_vs_n(cfg.bench.m_values, cfg.bench.n_values, cfg.generator, cfg.extractor,
                                      cfg.kernel, opts, cfg.seed);
      save_bench_csv(dir / "bench.csv", cells);
      for (const auto& c : cells) log << "m=" << c.m << " n=" << c.n << " " << format_double(c.ms_per_iter) << " ms/iter\n";
      return 0;
    }
    case ExperimentKind::Gradcheck:
      return run_gradcheck_suite(cfg, log);
  }
  throw InvalidArgument("unknown experiment kind");
}

}  // namespace kmm
