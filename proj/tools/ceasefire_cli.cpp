#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "ceasefire/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"ceasefire: swap/squeeze haloscope readout model"};
  app.require_subcommand(1);
  app.fallthrough();  // accept global options after the subcommand

  ceasefire::RunOptions opts;
  app.add_option("--config", opts.config_path, "configuration file (JSON)")
      ->required();
  app.add_option("--out", opts.out_dir, "output directory")->required();
  app.add_option("--threads", opts.threads, "worker threads (0 = auto)")
      ->default_val(0);
  app.add_option("--seed", opts.seed,
                 "seed for randomized property-test drivers; physics outputs "
                 "are seed-independent")
      ->default_val(0);

  const char* names[] = {"two-mode", "scan-map", "mismatch",
                         "circuit",  "four-mode", "fsr-sweep"};
  const char* descs[] = {
      "visibility curves and enhancement of the two-mode model",
      "enhancement map over (g = h, kappa_m/kappa_l) with the optimal ridge",
      "reflection map and enhancement sweep for mismatched rates",
      "normal-mode catalog and interaction rates of the circuit model",
      "four-mode visibility and enhancement",
      "enhancement versus cavity detuning and line length"};
  for (int i = 0; i < 6; ++i) app.add_subcommand(names[i], descs[i]);

  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const ceasefire::RunManifest man = ceasefire::run(command, opts);
    std::printf("%s: wrote %zu output file(s) to %s in %.3f s\n", command.c_str(),
                man.outputs.size(), opts.out_dir.c_str(), man.wall_time);
    return 0;
  } catch (const ceasefire::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    switch (e.kind()) {
      case ceasefire::ErrorKind::config:
      case ceasefire::ErrorKind::invalid_params:
        return 1;
      case ceasefire::ErrorKind::io:
        return 3;
      default:
        return 2;  // numerical failure (divergence, window, singular system)
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
