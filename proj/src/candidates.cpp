#include "pucci_forge/candidates.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace pucci {

std::string_view to_string(CandidateId id) {
  switch (id) {
    case CandidateId::Measurable2D:
      return "measurable2d";
    case CandidateId::Cand1:
      return "cand1";
    case CandidateId::Cand2:
      return "cand2";
    case CandidateId::Cand3:
      return "cand3";
    case CandidateId::NvtElliptic:
      return "nvt";
    case CandidateId::Smart9D:
      return "smart9d";
  }
  return "unknown";
}

CandidateId parse_candidate_id(std::string_view name) {
  for (auto id : {CandidateId::Measurable2D, CandidateId::Cand1, CandidateId::Cand2, CandidateId::Cand3,
                  CandidateId::NvtElliptic, CandidateId::Smart9D})
    if (name == to_string(id)) return id;
  throw InvalidInput("unknown candidate '" + std::string(name) +
                     "' (expected measurable2d, cand1, cand2, cand3, nvt or smart9d)");
}

CandidateSpec CandidateSpec::make(CandidateId id, double alpha) {
  CandidateSpec c;
  c.id = id;
  c.alpha = alpha;
  switch (id) {
    case CandidateId::Measurable2D:
      c.dim = 2;
      if (!(alpha > 0 && alpha < 4)) throw InvalidInput("alpha must lie in (0, 4)");
      break;
    case CandidateId::Smart9D:
      c.dim = 9;
      break;
    default:
      c.dim = 5;
  }
  return c;
}

std::string CandidateSpec::singular_set() const {
  return elliptic() ? "the origin x = 0" : "the point (t, x) = (0, 0)";
}

double distance_to_singular_set(const CandidateSpec& c, const SpacePoint& p) {
  const double s = p.x.squaredNorm();
  return c.elliptic() ? std::sqrt(s) : std::sqrt(s + p.t * p.t);
}

namespace detail {

void check_point(const CandidateSpec& c, double t, int xdim, double dist) {
  if (xdim != c.dim) {
    std::ostringstream msg;
    msg << to_string(c.id) << " expects x in R^" << c.dim << ", got R^" << xdim;
    throw InvalidInput(msg.str());
  }
  if (c.parabolic() && t > 0) throw InvalidInput("parabolic candidates are defined for t <= 0 only");
  if (!(dist >= kSingularGuard)) {
    std::ostringstream msg;
    msg << "cannot evaluate " << to_string(c.id) << " within " << kSingularGuard << " of " << c.singular_set();
    throw SingularEvaluation(msg.str());
  }
}

}  // namespace detail

const std::array<CubicTerm, 8>& cartan_terms() {
  static const double k = 1.5 * std::sqrt(3.0);
  static const std::array<CubicTerm, 8> terms{{
      {1.0, {0, 0, 0}},
      {1.5, {0, 2, 2}},
      {1.5, {0, 3, 3}},
      {-3.0, {0, 4, 4}},
      {-3.0, {0, 1, 1}},
      {k, {1, 2, 2}},
      {-k, {1, 3, 3}},
      {2 * k, {2, 3, 4}},
  }};
  return terms;
}

const std::array<CubicTerm, 6>& det3_terms() {
  // rows (0 1 2), (3 4 5), (6 7 8); one term per permutation of columns
  static const std::array<CubicTerm, 6> terms{{
      {1.0, {0, 4, 8}},
      {-1.0, {0, 5, 7}},
      {-1.0, {1, 3, 8}},
      {1.0, {1, 5, 6}},
      {1.0, {2, 3, 7}},
      {-1.0, {2, 4, 6}},
  }};
  return terms;
}

RadialProfile measurable_radial_profile(double alpha, double t, double r) {
  const auto c = CandidateSpec::make(CandidateId::Measurable2D, alpha);
  VectorXd9 x(2);
  x << r, 0.0;
  const auto jet = evaluate_jet(c, SpacePoint{t, x});
  // at x = (r, 0) the radial direction is e1 and the tangential one e2
  return {jet.ut, jet.hess(1, 1), jet.hess(0, 0)};
}

Jet<double> fd_jet(const CandidateSpec& c, const SpacePoint& p, double h) {
  using Real = long double;
  if (!(h > 0)) throw InvalidInput("fd_jet: step h must be positive");
  const double dist = distance_to_singular_set(c, p);
  if (dist < 10 * h) {
    std::ostringstream msg;
    msg << "fd_jet: stencil of width " << h << " comes within 10h of " << c.singular_set() << "; shrink h";
    throw StencilError(msg.str(), dist / 20);
  }
  if (c.parabolic() && p.t > 0) throw InvalidInput("parabolic candidates are defined for t <= 0 only");

  const int d = c.dim;
  const Real hh = h;
  const Real t0 = c.elliptic() ? Real(0) : Real(p.t);
  const Vector<Real> x0 = p.x.cast<Real>();
  auto u = [&](Real t, const Vector<Real>& x) { return evaluate_value<Real>(c, t, x); };

  Jet<double> out;
  const Real u0 = u(t0, x0);
  out.value = double(u0);

  if (c.elliptic()) {
    out.ut = 0;
  } else if (t0 + hh <= 0) {
    out.ut = double((u(t0 + hh, x0) - u(t0 - hh, x0)) / (2 * hh));
  } else {
    out.ut = double((3 * u0 - 4 * u(t0 - hh, x0) + u(t0 - 2 * hh, x0)) / (2 * hh));
  }

  out.grad.resize(d);
  Matrix<Real> hess(d, d);
  for (int i = 0; i < d; ++i) {
    Vector<Real> xp = x0, xm = x0;
    xp(i) += hh;
    xm(i) -= hh;
    const Real up = u(t0, xp), um = u(t0, xm);
    out.grad(i) = double((up - um) / (2 * hh));
    hess(i, i) = (up - 2 * u0 + um) / (hh * hh);
    for (int j = 0; j < i; ++j) {
      Vector<Real> xpp = xp, xpm = xp, xmp = xm, xmm = xm;
      xpp(j) += hh;
      xpm(j) -= hh;
      xmp(j) += hh;
      xmm(j) -= hh;
      const Real v = (u(t0, xpp) - u(t0, xpm) - u(t0, xmp) + u(t0, xmm)) / (4 * hh * hh);
      hess(i, j) = v;
      hess(j, i) = v;
    }
  }
  out.hess = SymMatrix<double>::from_dense(hess.cast<double>());
  return out;
}

double jet_relative_error(const Jet<double>& a, const Jet<double>& b) {
  auto rel = [](double diff, double sa, double sb) {
    const double scale = std::max(sa, sb);
    return scale > 0 ? diff / scale : 0.0;
  };
  double worst = rel(std::abs(a.value - b.value), std::abs(a.value), std::abs(b.value));
  worst = std::max(worst, rel(std::abs(a.ut - b.ut), std::abs(a.ut), std::abs(b.ut)));
  worst = std::max(worst, rel((a.grad - b.grad).cwiseAbs().maxCoeff(), a.grad.cwiseAbs().maxCoeff(),
                              b.grad.cwiseAbs().maxCoeff()));
  worst = std::max(worst, rel((a.hess - b.hess).max_abs(), a.hess.max_abs(), b.hess.max_abs()));
  return worst;
}

FdCheckReport fd_check(const CandidateSpec& c, int points, double h, std::uint64_t seed) {
  if (points < 1) throw InvalidInput("fd-check needs at least one point");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  FdCheckReport out;
  out.points = points;
  out.h = h;
  for (int k = 0; k < points;) {
    SpacePoint p;
    p.t = c.elliptic() ? 0.0 : -unit(rng);
    p.x.resize(c.dim);
    for (int i = 0; i < c.dim; ++i) p.x(i) = gauss(rng);
    p.x *= std::pow(unit(rng), 1.0 / c.dim) / p.x.norm();
    if (distance_to_singular_set(c, p) < kFdCheckClearance) continue;
    const double err = jet_relative_error(evaluate_jet(c, p), fd_jet(c, p, h));
    if (err > out.max_relative_error || k == 0) {
      out.max_relative_error = err;
      out.worst_point = p;
    }
    ++k;
  }
  return out;
}

double homogeneity_defect(const CandidateSpec& c, const SpacePoint& p, double a) {
  if (!(a > 0)) throw InvalidInput("homogeneity_defect: scale a must be positive");
  double degree = 0;
  double time_scale = 0;
  switch (c.id) {
    case CandidateId::Measurable2D:
      degree = c.alpha;
      time_scale = a * a;
      break;
    case CandidateId::NvtElliptic:
    case CandidateId::Smart9D:
      degree = 2;
      time_scale = 0;
      break;
    default:
      throw NotApplicable(std::string(to_string(c.id)) + " is not homogeneous; homogeneity_defect does not apply");
  }
  const SpacePoint scaled{time_scale * p.t, (a * p.x).eval()};
  const double lhs = evaluate_value<double>(c, p);
  const double rhs = std::pow(a, -degree) * evaluate_value<double>(c, scaled);
  return std::abs(lhs - rhs);
}

}  // namespace pucci
