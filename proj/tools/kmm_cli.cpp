// kmm <experiment> --config <path> [--out <dir>] [--seed <u64>]
//
// Exit status: 0 success, 2 invalid config or arguments, 3 numerical failure,
// 4 I/O failure, 1 anything else.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "kmm/config.hpp"
#include "kmm/error.hpp"
#include "kmm/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Kernel mean matching experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;

  for (const char* name : {"match", "herd", "compress", "grid", "curve", "bench", "gradcheck"}) {
    CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides the config)");
    sub->add_option("--seed", seed, "random seed (overrides the config)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    kmm::ConfigOverrides overrides;
    overrides.experiment = kmm::experiment_kind_from_string(app.get_subcommands().front()->get_name());
    if (!out_dir.empty()) overrides.output_dir = out_dir;
    overrides.seed = seed;
    const kmm::RunConfig config = kmm::load_run_config(config_path, overrides);
    return kmm::run(config, std::cout);
  } catch (const kmm::InvalidArgument& e) {
    std::cerr << "kmm: invalid argument: " << e.what() << "\n";
    return 2;
  } catch (const kmm::NumericalError& e) {
    std::cerr << "kmm: numerical error: " << e.what() << "\n";
    return 3;
  } catch (const kmm::IoError& e) {
    std::cerr << "kmm: i/o error: " << e.what() << "\n";
    return 4;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "kmm: i/o error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "kmm: error: " << e.what() << "\n";
    return 1;
  }
}
