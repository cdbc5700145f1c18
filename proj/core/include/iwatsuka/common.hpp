#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace iwatsuka {

// Thrown for malformed run configurations and input files (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when a computation cannot proceed: non-confining potential,
// eigenvalue collision, non-convergence (CLI exit code 1).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

std::vector<double> linspace(double lo, double hi, int count);

// Locale-independent shortest-faithful decimal, 17 significant digits.
// Used for every number written to CSV and plot scripts so that repeated
// runs produce byte-identical files.
std::string format_double(double v);

}  // namespace iwatsuka
