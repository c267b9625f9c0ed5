#pragma once

#include <iosfwd>

#include "kmm/config.hpp"

namespace kmm {

/// Runs one experiment and writes its artifacts under config.output_dir:
///   every kind        config.json
///   match/herd/compress  trace.csv, outputs.csv, latents.csv, summary.json
///                      (+ outputs/*.ppm and outputs_grid.ppm for image data)
///   grid              grid/cell_NN.csv, traces/cell_NN.csv, grid_summary.csv
///   curve             curve.csv
///   bench             bench.csv
///   gradcheck         gradcheck.csv
/// Returns the process exit status. Validation, numerical and I/O failures
/// are thrown as InvalidArgument, NumericalError and IoError.
int run(const RunConfig& config, std::ostream& log);

}  // namespace kmm
