// The implicit operator F behind a candidate that meets the ratio condition,
// represented by the sup formula over a fixed sample of jets:
//
//     F(M) = sup_p  u_t(p) + P-(M - D2u(p)).
//
// Over a finite sample the sup is a max, hence a lower bound for the true F
// that increases as the sample grows. Each anchor p1 gives the upper bound
// u_t(p1) + P+(M - D2u(p1)) once the ratio condition holds with the window.

#ifndef PUCCI_FORGE_OPERATOR_RECONSTRUCTION_HPP
#define PUCCI_FORGE_OPERATOR_RECONSTRUCTION_HPP

#include <cstdint>
#include <limits>
#include <vector>

#include "pucci_forge/candidates.hpp"
#include "pucci_forge/symmat.hpp"

namespace pucci {

inline constexpr int kDefaultSampleSize = 100000;
inline constexpr int kDefaultAnchors = 16;
inline constexpr double kSampleExclusion = 1e-2;
inline constexpr double kAuditTolerance = 1e-8;

/// Immutable sample of points and jets. Points and jets are index-aligned.
struct JetSample {
  CandidateSpec candidate;
  std::vector<SpacePoint> points;
  std::vector<Jet<double>> jets;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Halton points in the closed cylinder [-1, 0] x B_1 (x in B_1 for elliptic
/// candidates) at distance >= `exclusion` from the singular set. The cube
/// [-1, 1]^d is mapped onto the ball radially, x = y |y|_inf / |y|_2. For
/// parabolic candidates every 16th point lies on the slice t = 0.
std::vector<SpacePoint> halton_points(const CandidateSpec& c, int count, double exclusion = kSampleExclusion);

/// Evaluates jets at `points`. Throws InvalidInput when `points` is empty.
JetSample build_sample(const CandidateSpec& c, std::vector<SpacePoint> points);

inline JetSample build_sample(const CandidateSpec& c, int count = kDefaultSampleSize,
                              double exclusion = kSampleExclusion) {
  return build_sample(c, halton_points(c, count, exclusion));
}

struct OperatorSample {
  SymMatrix<double> M;
  double f_value = 0;
  SpacePoint support_point;
  std::size_t support_index = 0;
  std::size_t sample_size = 0;
  /// Tightest anchor bound u_t(p1) + P+(M - D2u(p1)).
  double upper_bound = 0;
  std::size_t upper_anchor = 0;
};

/// Max over the sample of u_t(p) + P-(M - D2u(p), w); ties go to the lowest
/// index. Anchors are `anchors` evenly spaced sample indices. Throws
/// InvalidInput for an empty sample or a dimension mismatch.
OperatorSample reconstruct_F(const JetSample& sample, const SymMatrix<double>& M, const EllipticityWindow& w,
                             int anchors = kDefaultAnchors);

/// F(M) alone, without support point or anchors.
double reconstructed_F(const JetSample& sample, const SymMatrix<double>& M, const EllipticityWindow& w);

struct AuditResult {
  /// max over trials of max(P-(B) - dF, dF - P+(B)) with dF = F(A+B) - F(A);
  /// non-positive when every trial lies inside the bounds.
  double worst_violation = -std::numeric_limits<double>::infinity();
  int trials = 0;
  SymMatrix<double> worst_A, worst_B;
};

/// Checks P-(B) <= F(A+B) - F(A) <= P+(B) for `trials` random pairs (A, B)
/// with independent standard normal upper-triangle entries.
AuditResult ellipticity_audit(const JetSample& sample, const EllipticityWindow& w, int trials, std::uint64_t seed);

/// |u_t(p) - F(D2u(p))| at sample point `index`.
double equation_residual(const JetSample& sample, std::size_t index, const EllipticityWindow& w);

struct ResidualSummary {
  double max_residual = 0;
  std::size_t worst_index = 0;
  int evaluated = 0;
};

/// Residuals at `count` evenly spaced sample points.
ResidualSummary equation_residuals(const JetSample& sample, int count, const EllipticityWindow& w);

/// Largest violation of P-(D2u(p) - D2u(q)) <= u_t(p) - u_t(q) <= P+(...)
/// over `pairs` random sample pairs; non-positive when all hold.
double sandwich_violation(const JetSample& sample, const EllipticityWindow& w, int pairs, std::uint64_t seed);

}  // namespace pucci

#endif  // PUCCI_FORGE_OPERATOR_RECONSTRUCTION_HPP
