// The pairwise ratio condition for fully nonlinear solvability and the
// multi-start stochastic gradient ascent that hunts for violations.
//
// For two space-time points p, q with jets J_p, J_q, let a = u_t(p) - u_t(q)
// and B = D2u(p) - D2u(q). The ratio is
//
//     rho = (a_- + tr B_+) / (a_+ + tr B_-)
//
// with a_- = max(-a, 0). The function solves some uniformly parabolic
// equation iff C^{-1} <= rho <= C over all pairs for some C >= 1. The search
// maximizes |log rho| over pairs in the closed unit cylinder; a run
// "diverges" once rho or 1/rho exceeds the divergence threshold.

#ifndef PUCCI_FORGE_RATIO_SEARCH_HPP
#define PUCCI_FORGE_RATIO_SEARCH_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pucci_forge/candidates.hpp"
#include "pucci_forge/symmat.hpp"

namespace pucci {

inline constexpr double kCollapseFloor = 1e-13;
inline constexpr std::uint64_t kDefaultSeed = 0x5EED5EED;

enum class RatioKind { Finite, Infinite, Undefined };

struct RatioValue {
  double numerator = 0;
  double denominator = 0;
  double value = 0;  // +inf for Infinite, NaN for Undefined
  RatioKind kind = RatioKind::Undefined;

  bool defined() const { return kind != RatioKind::Undefined; }
  /// max(rho, 1/rho); +inf when rho is 0 or +inf.
  double symmetric() const;
};

RatioValue ratio(double ut_diff, const TraceParts<double>& hess_diff, double collapse_floor = kCollapseFloor);
RatioValue ratio(const Jet<double>& p, const Jet<double>& q, double collapse_floor = kCollapseFloor);

/// |log rho|; empty for an undefined ratio (identical jets), which callers
/// treat as a request to re-perturb.
std::optional<double> objective(const RatioValue& r);

struct PairState {
  SpacePoint p, q;
  Jet<double> jet_p, jet_q;
  RatioValue ratio;
};

/// Evaluates both jets and the ratio.
PairState make_pair_state(const CandidateSpec& c, const SpacePoint& p, const SpacePoint& q,
                          double collapse_floor = kCollapseFloor);

inline std::optional<double> objective(const PairState& pair) { return objective(pair.ratio); }

struct CampaignConfig {
  int starts = 200;
  int iters_per_start = 20000;
  double step0 = 1e-2;
  double noise0 = 1e-2;
  double divergence_threshold = 1e4;
  double collapse_floor = kCollapseFloor;
  double exclusion_radius = 1e-10;
  std::uint64_t rng_seed = kDefaultSeed;
  /// Targeted initial pairs from seed_near_failure instead of uniform ones.
  bool seeded = false;

  void validate() const;
};

/// One row of an optional per-iteration trace.
struct TraceRow {
  int start = 0;
  int iter = 0;
  double ratio = 0;
  double objective = 0;
  std::vector<double> coords;  // t_p, x_p, t_q, x_q (times omitted for elliptic)
};

using TraceSink = std::function<void(const TraceRow&)>;

struct AscentResult {
  double max_ratio = 1;  // running max of max(rho, 1/rho) over finite ratios
  bool diverged = false;
  int diverged_at = -1;  // iteration of first divergence
  int iterations = 0;
  int reperturbations = 0;
  PairState best_pair;   // pair realizing max_ratio
  PairState final_pair;
};

/// Projects a pair of points into the closed cylinder [-1, 0] x B_1 (time
/// is pinned to 0 for elliptic candidates), then pushes each point radially
/// out of the exclusion ball around the singular point.
void project_into_domain(const CandidateSpec& c, SpacePoint& p, double exclusion_radius);

/// Stochastic gradient ascent of |log rho| from `init`, in sum/difference
/// pair coordinates. Gradients are central differences with per-coordinate
/// stencils of step_k/10 times the coordinate's scale; each coordinate moves
/// by its own step, grown x1.2 while its gradient sign persists and halved on
/// reversal, capped by step_k = step0 / sqrt(1 + k/1000). Noise has relative
/// size noise_k / step_k with noise_k = noise0 / sqrt(1 + k). Time gradient
/// components pushing out of [-1, 0] are dropped. `seed` drives the noise.
/// Throws NotApplicable for the 2-D measurable example, which is not claimed
/// to solve a fully nonlinear equation.
AscentResult ascend(const CandidateSpec& c, const PairState& init, const CampaignConfig& cfg, std::uint64_t seed,
                    const TraceSink& trace = {}, int start_index = 0);

struct StartOutcome {
  int index = 0;
  double max_ratio = 1;
  bool diverged = false;
  int diverged_at = -1;
  int reperturbations = 0;
  PairState best_pair;
  PairState final_pair;
};

struct CampaignReport {
  CandidateSpec candidate;
  CampaignConfig config;
  std::vector<StartOutcome> per_start;
  /// Largest per-start max over starts that stayed bounded: the estimated optimal C.
  double estimated_c = 1;
  /// Largest finite ratio seen over all starts, diverged ones included.
  double max_finite_ratio = 1;
  double divergence_fraction = 0;
  int diverged_starts = 0;
  double wall_time_s = 0;
};

/// Uniform random pair in the domain (t uniform in [-1, 0], x uniform in B_1).
PairState random_pair(const CandidateSpec& c, std::mt19937_64& rng, double exclusion_radius = 1e-10);

/// Per-start seed: base seed XOR start index.
inline std::uint64_t start_seed(std::uint64_t base, int index) { return base ^ static_cast<std::uint64_t>(index); }

/// Runs `cfg.starts` independent ascents. Starts run concurrently; the
/// report is identical for any worker count.
CampaignReport campaign(const CandidateSpec& c, const CampaignConfig& cfg, const TraceSink& trace = {});

/// Initial pairs placed on the known failure geometry: for cand1 two radially
/// aligned points (|x - y| <= 1e-6) on the ray x = -r e1, r in [0.2, 1], at
/// times 1e-3 to 1e-1 apart just below t = 0; for cand2 both points near the
/// line {t = 0, x = a e_i}, i cycling over the five axes. Throws NotApplicable
/// for other candidates.
std::vector<PairState> seed_near_failure(const CandidateSpec& c, const CampaignConfig& cfg);

}  // namespace pucci

#endif  // PUCCI_FORGE_RATIO_SEARCH_HPP
