#pragma once

#include <filesystem>
#include <iosfwd>
#include <iostream>

#include "iwatsuka/runconfig.hpp"

namespace iwatsuka {

// Executes a run configuration and writes its artifacts. Returns the exit
// code contract of the CLI: 0 success, 1 numerical failure (non-confining
// potential, eigenvalue collision, non-convergence), 2 configuration error.
// Human-readable summary lines go to `out`, error messages to `err`.
int run(const RunConfig& cfg, std::ostream& out = std::cout,
        std::ostream& err = std::cerr);

// Gnuplot script reproducing the dispersion curves of a bands.csv, with
// horizontal guide lines at the tail levels read from meta.json.
// Deterministic byte output; throws ConfigError if inputs are missing.
void emit_plot_script(const std::filesystem::path& bands_csv,
                      const std::filesystem::path& meta_json,
                      const std::filesystem::path& out_path);

}  // namespace iwatsuka
