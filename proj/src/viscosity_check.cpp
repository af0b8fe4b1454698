#include "pucci_forge/viscosity_check.hpp"

#include <algorithm>
#include <limits>
#include <vector>

#include "pucci_forge/parallel.hpp"

namespace pucci {

PucciMargins pucci_margins(const Jet<double>& jet, const EllipticityWindow& w) {
  const auto parts = trace_parts(jet.hess);
  return {pucci_plus(parts, w) - jet.ut, jet.ut - pucci_minus(parts, w)};
}

namespace {

void check_scan_args(double alpha, int grid_n) {
  if (!(alpha > 0 && alpha < 4)) throw InvalidInput("alpha must lie in (0, 4)");
  if (grid_n < 2) throw InvalidInput("grid_n must be at least 2");
}

}  // namespace

SpacePoint surface_point(double r) {
  VectorXd9 x(2);
  x << r, 0.0;
  return {r * r - 1, x};
}

SurfaceScanReport scan_surface(double alpha, int grid_n) {
  check_scan_args(alpha, grid_n);
  std::vector<RadialProfile> nodes(grid_n + 1);
  parallel_for(nodes.size(), [&](std::size_t i) {
    const double r = static_cast<double>(i) / grid_n;
    nodes[i] = measurable_radial_profile(alpha, r * r - 1, r);
  });

  constexpr double inf = std::numeric_limits<double>::infinity();
  SurfaceScanReport rep;
  rep.alpha = alpha;
  rep.grid_n = grid_n;
  rep.ut = rep.ur_over_r = rep.urr = {inf, -inf};
  double urr_plus = 0, urr_minus = 0;
  for (const auto& n : nodes) {
    rep.ut = {std::min(rep.ut.min, n.ut), std::max(rep.ut.max, n.ut)};
    rep.ur_over_r = {std::min(rep.ur_over_r.min, n.ur_over_r), std::max(rep.ur_over_r.max, n.ur_over_r)};
    rep.urr = {std::min(rep.urr.min, n.urr), std::max(rep.urr.max, n.urr)};
    urr_plus = std::max(urr_plus, n.urr);
    urr_minus = std::max(urr_minus, -n.urr);
  }

  if (rep.ut.min > 0 && rep.ur_over_r.min > 0) {
    const double lambda = rep.ut.min / (rep.ur_over_r.max + urr_plus);
    const double Lambda = std::max(lambda, (rep.ut.max + lambda * urr_minus) / rep.ur_over_r.min);
    rep.admissible_window = EllipticityWindow(lambda, Lambda);
  }
  return rep;
}

MeasurableVerdict verify_measurable(double alpha, const EllipticityWindow& w, int grid_n) {
  check_scan_args(alpha, grid_n);
  const auto cand = CandidateSpec::make(CandidateId::Measurable2D, alpha);
  std::vector<PucciMargins> margins(grid_n + 1);
  parallel_for(margins.size(), [&](std::size_t i) {
    const double r = static_cast<double>(i) / grid_n;
    margins[i] = pucci_margins(evaluate_jet(cand, surface_point(r)), w);
  });

  std::size_t worst = 0;
  for (std::size_t i = 1; i < margins.size(); ++i)
    if (margins[i].worst() < margins[worst].worst()) worst = i;

  MeasurableVerdict out;
  out.worst_margins = margins[worst];
  out.pass = out.worst_margins.pass(kMarginTolerance);
  out.witness = surface_point(static_cast<double>(worst) / grid_n);
  return out;
}

}  // namespace pucci
