// Closed-form candidate functions and their jets (u, u_t, grad u, D2u).
//
// All six candidates share one of two shapes:
//   * a function of (t, |x|^2) only (the 2-D measurable-coefficient example);
//   * a cubic form times a function of (t, |x|^2), u = P(x) g(t, |x|^2).
// For the second shape the derivatives follow from the product rule with
// grad g = 2 g_s x and D2g = 2 g_s I + 4 g_ss x x^T; the per-candidate
// factors g, g_t, g_s, g_ss are derived by hand below.
//
// The plain value functions (`evaluate_value`) transcribe the candidate
// formulas directly and share no code with the jet path, so finite
// differences of them are an independent check of the derivatives.

#ifndef PUCCI_FORGE_CANDIDATES_HPP
#define PUCCI_FORGE_CANDIDATES_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include "pucci_forge/errors.hpp"
#include "pucci_forge/symmat.hpp"

namespace pucci {

enum class CandidateId { Measurable2D, Cand1, Cand2, Cand3, NvtElliptic, Smart9D };

std::string_view to_string(CandidateId id);
/// Accepts the CLI spellings: measurable2d, cand1, cand2, cand3, nvt, smart9d.
CandidateId parse_candidate_id(std::string_view name);

struct CandidateSpec {
  CandidateId id = CandidateId::Cand3;
  int dim = 5;
  double alpha = 1.0;  // only meaningful for Measurable2D, in (0, 4)

  static CandidateSpec make(CandidateId id, double alpha = 1.0);

  /// Functions of x alone; time is pinned to 0 and u_t = 0.
  bool elliptic() const { return id == CandidateId::NvtElliptic || id == CandidateId::Smart9D; }
  bool parabolic() const { return !elliptic(); }
  std::string_view name() const { return to_string(id); }
  /// The singular set: "the point (t,x) = (0,0)" or "the origin x = 0".
  std::string singular_set() const;
};

/// A space-time point. For elliptic candidates t is ignored.
struct SpacePoint {
  double t = 0;
  VectorXd9 x;

  SpacePoint() = default;
  SpacePoint(double t_, VectorXd9 x_) : t(t_), x(std::move(x_)) {}
};

template <typename Scalar = double>
struct Jet {
  Scalar value = 0;
  Scalar ut = 0;
  Vector<Scalar> grad;
  SymMatrix<Scalar> hess;
};

/// Singular points closer than this are refused.
inline constexpr double kSingularGuard = 1e-12;

/// Euclidean distance in (t, x) to (0, 0) for parabolic candidates; |x| for
/// elliptic ones.
double distance_to_singular_set(const CandidateSpec& c, const SpacePoint& p);

// ---------------------------------------------------------------------------
// Cubic forms

/// c * x_i * x_j * x_k; indices may repeat.
struct CubicTerm {
  double coef;
  std::array<int, 3> idx;
};

template <typename Scalar>
struct CubicJet {
  Scalar value = 0;
  Vector<Scalar> grad;
  SymMatrix<Scalar> hess;
};

/// Monomial expansion of the Cartan cubic
/// x1^3 + 3/2 x1 (x3^2 + x4^2 - 2 x5^2 - 2 x2^2) + 3 sqrt(3)/2 (x2 x3^2 - x2 x4^2 + 2 x3 x4 x5).
const std::array<CubicTerm, 8>& cartan_terms();

/// The six signed monomials of det of the 3x3 matrix with rows
/// (x1 x2 x3), (x4 x5 x6), (x7 x8 x9).
const std::array<CubicTerm, 6>& det3_terms();

/// Value, gradient and Hessian of a sum of cubic monomials. Each monomial
/// is treated as a product of three factors, which handles repeated indices
/// without special cases.
template <typename Scalar, std::size_t N>
CubicJet<Scalar> eval_cubic(const std::array<CubicTerm, N>& terms, const Vector<Scalar>& x) {
  const int d = static_cast<int>(x.size());
  CubicJet<Scalar> out;
  out.grad = Vector<Scalar>::Zero(d);
  out.hess = SymMatrix<Scalar>(d);
  Matrix<Scalar> h = Matrix<Scalar>::Zero(d, d);
  for (const auto& term : terms) {
    const Scalar c = Scalar(term.coef);
    const auto& k = term.idx;
    const Scalar f0 = x(k[0]), f1 = x(k[1]), f2 = x(k[2]);
    out.value += c * f0 * f1 * f2;
    out.grad(k[0]) += c * f1 * f2;
    out.grad(k[1]) += c * f0 * f2;
    out.grad(k[2]) += c * f0 * f1;
    // ordered pairs of distinct factor positions
    h(k[0], k[1]) += c * f2;
    h(k[1], k[0]) += c * f2;
    h(k[0], k[2]) += c * f1;
    h(k[2], k[0]) += c * f1;
    h(k[1], k[2]) += c * f0;
    h(k[2], k[1]) += c * f0;
  }
  out.hess = SymMatrix<Scalar>::from_dense(h);
  return out;
}

/// The Cartan cubic with its gradient and Hessian (the Hessian is linear in x
/// and traceless).
template <typename Scalar = double>
CubicJet<Scalar> p5(const Vector<Scalar>& x) {
  if (x.size() != 5) throw InvalidInput("p5 takes a 5-vector");
  return eval_cubic<Scalar>(cartan_terms(), x);
}

// ---------------------------------------------------------------------------
// Closed-form expressions, value only

template <typename Scalar>
Scalar p5_value(const Vector<Scalar>& x) {
  using std::sqrt;
  const Scalar x1 = x(0), x2 = x(1), x3 = x(2), x4 = x(3), x5 = x(4);
  return x1 * x1 * x1 + Scalar(1.5) * x1 * (x3 * x3 + x4 * x4 - 2 * x5 * x5 - 2 * x2 * x2) +
         Scalar(3) * sqrt(Scalar(3)) / 2 * (x2 * x3 * x3 - x2 * x4 * x4 + 2 * x3 * x4 * x5);
}

template <typename Scalar>
Scalar det3_value(const Vector<Scalar>& x) {
  return x(0) * (x(4) * x(8) - x(5) * x(7)) - x(1) * (x(3) * x(8) - x(5) * x(6)) +
         x(2) * (x(3) * x(7) - x(4) * x(6));
}

namespace detail {

void check_point(const CandidateSpec& c, double t, int xdim, double dist);

}  // namespace detail

/// u(t, x) straight from the closed-form expression of the candidate.
template <typename Scalar>
Scalar evaluate_value(const CandidateSpec& c, Scalar t, const Vector<Scalar>& x) {
  using std::pow;
  using std::sqrt;
  const Scalar s = x.squaredNorm();
  const double dist = c.elliptic() ? std::sqrt(double(s)) : std::sqrt(double(s + t * t));
  detail::check_point(c, double(t), static_cast<int>(x.size()), dist);
  switch (c.id) {
    case CandidateId::Measurable2D:
      return (s + t) / pow(s - t, Scalar(1) - Scalar(c.alpha) / 2);
    case CandidateId::Cand1:
      return p5_value(x) / sqrt(s - t);
    case CandidateId::Cand2:
      return p5_value(x) / (-t + sqrt(s + t * t));
    case CandidateId::Cand3:
      return p5_value(x) / (-t + sqrt(s + t * t)) + p5_value(x) / 12;
    case CandidateId::NvtElliptic:
      return p5_value(x) / sqrt(s);
    case CandidateId::Smart9D:
      return det3_value(x) / sqrt(s);
  }
  throw InvalidInput("unknown candidate");
}

template <typename Scalar = double>
Scalar evaluate_value(const CandidateSpec& c, const SpacePoint& p) {
  return evaluate_value<Scalar>(c, Scalar(p.t), p.x.cast<Scalar>().eval());
}

// ---------------------------------------------------------------------------
// Jets

namespace detail {

/// g and its partials in (t, s), s = |x|^2.
template <typename Scalar>
struct RadialFactor {
  Scalar g, g_t, g_s, g_ss;
};

template <typename Scalar>
RadialFactor<Scalar> radial_factor(CandidateId id, Scalar t, Scalar s) {
  using std::sqrt;
  switch (id) {
    case CandidateId::Cand1: {
      // g = w^{-1/2}, w = s - t
      const Scalar w = s - t;
      const Scalar r = Scalar(1) / sqrt(w);
      const Scalar r3 = r / w;
      return {r, r3 / 2, -r3 / 2, Scalar(3) / 4 * r3 / w};
    }
    case CandidateId::Cand2:
    case CandidateId::Cand3: {
      // g = 1/D, D = q - t, q = sqrt(s + t^2)
      const Scalar q = sqrt(s + t * t);
      const Scalar den = q - t;
      const Scalar d_t = t / q - Scalar(1);
      const Scalar d_s = Scalar(1) / (2 * q);
      const Scalar d_ss = Scalar(-1) / (4 * q * q * q);
      const Scalar inv = Scalar(1) / den;
      const Scalar inv2 = inv * inv;
      RadialFactor<Scalar> out{inv, -d_t * inv2, -d_s * inv2, -d_ss * inv2 + 2 * d_s * d_s * inv2 * inv};
      if (id == CandidateId::Cand3) out.g += Scalar(1) / 12;
      return out;
    }
    case CandidateId::NvtElliptic:
    case CandidateId::Smart9D: {
      const Scalar r = Scalar(1) / sqrt(s);
      const Scalar r3 = r / s;
      return {r, Scalar(0), -r3 / 2, Scalar(3) / 4 * r3 / s};
    }
    case CandidateId::Measurable2D:
      break;
  }
  throw InvalidInput("radial_factor: candidate is not of product form");
}

template <typename Scalar>
Jet<Scalar> measurable_jet(double alpha, Scalar t, const Vector<Scalar>& x) {
  using std::pow;
  // u = (s + t) w^b, w = s - t, b = alpha/2 - 1
  const Scalar s = x.squaredNorm();
  const Scalar w = s - t;
  const Scalar b = Scalar(alpha) / 2 - 1;
  const Scalar wb1 = pow(w, b - 1);
  const Scalar sum = s + t;
  Jet<Scalar> j;
  j.value = sum * wb1 * w;
  j.ut = wb1 * (w - b * sum);
  const Scalar u_s = wb1 * (w + b * sum);
  const Scalar u_ss = 2 * b * wb1 + b * (b - 1) * sum * wb1 / w;
  j.grad = 2 * u_s * x;
  Matrix<Scalar> h = 4 * u_ss * x * x.transpose();
  h.diagonal().array() += 2 * u_s;
  j.hess = SymMatrix<Scalar>::from_dense(h);
  return j;
}

}  // namespace detail

/// Closed-form jet. Throws SingularEvaluation within kSingularGuard of the
/// singular set and InvalidInput for t > 0 on parabolic candidates.
template <typename Scalar = double>
Jet<Scalar> evaluate_jet(const CandidateSpec& c, Scalar t, const Vector<Scalar>& x) {
  const Scalar s = x.squaredNorm();
  const double dist = c.elliptic() ? std::sqrt(double(s)) : std::sqrt(double(s + t * t));
  detail::check_point(c, double(t), static_cast<int>(x.size()), dist);
  if (c.id == CandidateId::Measurable2D) return detail::measurable_jet<Scalar>(c.alpha, t, x);

  const Scalar tt = c.elliptic() ? Scalar(0) : t;
  const auto cubic = c.id == CandidateId::Smart9D ? eval_cubic<Scalar>(det3_terms(), x)
                                                  : eval_cubic<Scalar>(cartan_terms(), x);
  const auto g = detail::radial_factor<Scalar>(c.id, tt, s);
  const Scalar p = cubic.value;

  Jet<Scalar> j;
  j.value = p * g.g;
  j.ut = p * g.g_t;
  j.grad = g.g * cubic.grad + 2 * g.g_s * p * x;
  // g D2P + 2 g_s (grad P x^T + x grad P^T) + P (2 g_s I + 4 g_ss x x^T)
  const Vector<Scalar> gp = cubic.grad;
  Matrix<Scalar> h = g.g * cubic.hess.dense() + 2 * g.g_s * (gp * x.transpose() + x * gp.transpose()) +
                     4 * p * g.g_ss * x * x.transpose();
  h.diagonal().array() += 2 * p * g.g_s;
  j.hess = SymMatrix<Scalar>::from_dense(h);
  return j;
}

template <typename Scalar = double>
Jet<Scalar> evaluate_jet(const CandidateSpec& c, const SpacePoint& p) {
  return evaluate_jet<Scalar>(c, Scalar(p.t), p.x.cast<Scalar>().eval());
}

/// Radial quantities of the 2-D measurable example at (t, r): u_t, u_r / r
/// and u_rr, read off the analytic Hessian at x = (r, 0).
struct RadialProfile {
  double ut = 0;
  double ur_over_r = 0;
  double urr = 0;
};
RadialProfile measurable_radial_profile(double alpha, double t, double r);

/// Central-difference jet built from extended-precision value samples.
/// Second-order stencils; in time the stencil is one-sided (backward) when
/// t + h would leave t <= 0. Throws StencilError when the point is closer
/// than 10 h to the singular set.
Jet<double> fd_jet(const CandidateSpec& c, const SpacePoint& p, double h);

/// Largest field-wise relative error between two jets. Each field (value,
/// u_t, gradient, Hessian) contributes |a - b|_inf / max(|a|_inf, |b|_inf);
/// a field that is zero in both jets contributes 0.
double jet_relative_error(const Jet<double>& a, const Jet<double>& b);

struct FdCheckReport {
  int points = 0;
  double h = 0;
  double max_relative_error = 0;
  SpacePoint worst_point;
};

/// Minimum distance from the singular set of the points drawn by fd_check.
inline constexpr double kFdCheckClearance = 0.1;

/// Compares evaluate_jet with fd_jet(h) at `points` points drawn uniformly
/// from the unit cylinder (unit ball for elliptic candidates) at distance
/// >= 0.1 from the singular set.
FdCheckReport fd_check(const CandidateSpec& c, int points, double h, std::uint64_t seed);

/// |u(t,x) - a^{-alpha} u(a^2 t, a x)| for the 2-D measurable example and
/// |u(x) - a^{-2} u(a x)| for the degree-two elliptic candidates. Throws
/// NotApplicable for cand1..cand3.
double homogeneity_defect(const CandidateSpec& c, const SpacePoint& p, double a);

}  // namespace pucci

#endif  // PUCCI_FORGE_CANDIDATES_HPP
