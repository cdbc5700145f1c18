#pragma once

#include <vector>

#include "iwatsuka/common.hpp"
#include "iwatsuka/profiles.hpp"

namespace iwatsuka {

// Vector potential in the asymmetric (Landau) gauge,
//   A_y(x) = integral of B from base_point to x.
// Closed-form antiderivatives for the analytic profile kinds; cumulative
// trapezoid on the sample grid (exact for the piecewise-linear interpolant)
// plus linear tail extension for tabulated fields. The tabulated cumulative
// sums are cached eagerly, so evaluation is pure and thread-safe.
class GaugeFunction {
 public:
  explicit GaugeFunction(ProfileSpec field, double base_point = 0.0);

  double operator()(double x) const { return primitive(x) - offset_; }
  double base_point() const { return base_point_; }
  const ProfileSpec& field() const { return field_; }

  GaugeFunction rebased(double new_base) const;

 private:
  double primitive(double x) const;

  ProfileSpec field_;
  double base_point_ = 0.0;
  double offset_ = 0.0;                 // primitive(base_point_)
  std::vector<double> cumulative_;      // tabulated kind
  std::vector<double> prefix_;          // piecewise-constant kind
};

inline double vector_potential(const GaugeFunction& g, double x) { return g(x); }
GaugeFunction rebase_gauge(const GaugeFunction& g, double new_base);

struct TurningPoints {
  double xi = 0.0;
  std::vector<double> roots;  // sorted; |xi + A_y(r)| <= tol for each
  bool unique = false;        // exactly one root
};

// All sign-change roots of xi + A_y on the box, refined by bisection to
// |xi + A_y(r)| <= root_tol_scale * (1 + |xi|). No sign change found means
// empty roots with unique=false; the caller may widen the box.
// Even-multiplicity touch points are not detected by the sign scan.
TurningPoints turning_points(const GaugeFunction& g, double xi,
                             Interval search_box,
                             double root_tol_scale = 1e-12,
                             int scan_points = 4096);

// Doubling expansion of the search box until a root is found, starting from
// [-r0, r0] with r0 covering the field's structure, capped at half-width
// 65536. Returns the empty result if the cap is reached without a sign
// change (legitimate for large |xi| of one sign).
TurningPoints turning_points_auto(const GaugeFunction& g, double xi,
                                  double root_tol_scale = 1e-12);

}  // namespace iwatsuka
