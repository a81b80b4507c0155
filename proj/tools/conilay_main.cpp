#include <CLI11.hpp>
#include <exception>
#include <iostream>
#include <string>

#include "conilay/experiments.hpp"
#include "conilay/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"conilay: spectral laboratory for the Dirichlet Laplacian on "
               "conical layers"};
  app.set_version_flag("--version", std::string(conilay::kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int workers = 0;

  const std::pair<const char*, const char*> experiments[] = {
      {"sweep", "eigenvalue sweep over the aperture angle"},
      {"counting", "near-threshold counting staircase"},
      {"potential", "effective transverse potential table"},
      {"modes", "eigenfunction export in physical coordinates"},
      {"semicl", "semiclassical guide/triangle eigenvalues"},
      {"agmon", "weighted localization diagnostics"},
      {"verify", "run the full verification suite"},
  };
  for (auto [name, desc] : experiments) {
    auto* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", config_path, "JSON configuration file");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--workers", workers, "concurrent solves");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    std::string experiment = app.get_subcommands().front()->get_name();
    auto cfg = conilay::experiments::load_config(experiment, config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (workers > 0) cfg.workers = workers;
    return conilay::experiments::run_experiment(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
