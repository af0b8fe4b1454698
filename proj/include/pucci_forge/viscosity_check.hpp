// Pointwise Pucci inequalities for the measurable-coefficient criterion and
// the scan of the compact surface S = {|x|^2 - t = 1, t <= 0}.
//
// The 2-D example is parabolic-homogeneous, so u_t - P(D2u) scales by a
// positive power under (t, x) -> (a^2 t, a x). Checking S therefore checks
// (-inf, 0] x R^2 minus the origin. S is reduced to the curve
// x = (r, 0), t = r^2 - 1, r in [0, 1] by radial symmetry.

#ifndef PUCCI_FORGE_VISCOSITY_CHECK_HPP
#define PUCCI_FORGE_VISCOSITY_CHECK_HPP

#include <optional>

#include "pucci_forge/candidates.hpp"
#include "pucci_forge/symmat.hpp"

namespace pucci {

/// m_plus = P+(D2u) - u_t, m_minus = u_t - P-(D2u). The point passes when
/// both are non-negative.
struct PucciMargins {
  double m_plus = 0;
  double m_minus = 0;

  bool pass(double tol = 0) const { return m_plus >= -tol && m_minus >= -tol; }
  double worst() const { return m_plus < m_minus ? m_plus : m_minus; }
};

PucciMargins pucci_margins(const Jet<double>& jet, const EllipticityWindow& w);

struct Extremum {
  double min = 0;
  double max = 0;
};

struct SurfaceScanReport {
  double alpha = 0;
  int grid_n = 0;
  Extremum ut;
  Extremum ur_over_r;
  Extremum urr;
  std::optional<EllipticityWindow> admissible_window;
};

/// Margin tolerance used by verify_measurable.
inline constexpr double kMarginTolerance = 1e-12;

inline constexpr int kDefaultGridN = 10000;

/// Tabulates u_t, u_r/r and u_rr at grid_n + 1 uniform nodes in r and picks
/// lambda = min u_t / (max u_r/r + max u_rr+), then
/// Lambda = (max u_t + lambda max u_rr-) / min u_r/r. The window is absent
/// when min u_t <= 0 or min u_r/r <= 0.
SurfaceScanReport scan_surface(double alpha, int grid_n = kDefaultGridN);

/// The point of S with coordinates r: (t, x) = (r^2 - 1, (r, 0)).
SpacePoint surface_point(double r);

struct MeasurableVerdict {
  bool pass = false;
  PucciMargins worst_margins;
  SpacePoint witness;  // node with the smallest margin
};

/// Checks both Pucci margins >= -1e-12 at every node of S.
MeasurableVerdict verify_measurable(double alpha, const EllipticityWindow& w, int grid_n = kDefaultGridN);

}  // namespace pucci

#endif  // PUCCI_FORGE_VISCOSITY_CHECK_HPP
