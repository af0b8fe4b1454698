#include "pucci_forge/ratio_search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "pucci_forge/parallel.hpp"

namespace pucci {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMinScale = 1e-12;
constexpr double kMinStencil = 1e-11;
constexpr double kMinStep = 1e-14;
// difference-coordinate scales never drop below this fraction of |x_p - x_q|
constexpr double kComponentFloor = 1e-6;
constexpr double kGrow = 1.2;
constexpr double kShrink = 0.5;

// splitmix64 finalizer; decorrelates the ascent noise stream from the
// stream that drew the start's initial pair
std::uint64_t noise_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

double RatioValue::symmetric() const {
  switch (kind) {
    case RatioKind::Infinite:
      return kInf;
    case RatioKind::Undefined:
      return std::numeric_limits<double>::quiet_NaN();
    case RatioKind::Finite:
      break;
  }
  if (value <= 0) return kInf;
  return std::max(value, 1.0 / value);
}

RatioValue ratio(double ut_diff, const TraceParts<double>& hess_diff, double collapse_floor) {
  RatioValue r;
  r.numerator = std::max(-ut_diff, 0.0) + hess_diff.positive;
  r.denominator = std::max(ut_diff, 0.0) + hess_diff.negative;
  const bool small_num = r.numerator < collapse_floor;
  const bool small_den = r.denominator < collapse_floor;
  if (small_num && small_den) {
    r.kind = RatioKind::Undefined;
    r.value = std::numeric_limits<double>::quiet_NaN();
  } else if (small_den) {
    r.kind = RatioKind::Infinite;
    r.value = kInf;
  } else {
    r.kind = RatioKind::Finite;
    r.value = r.numerator / r.denominator;
  }
  return r;
}

RatioValue ratio(const Jet<double>& p, const Jet<double>& q, double collapse_floor) {
  return ratio(p.ut - q.ut, trace_parts(p.hess - q.hess), collapse_floor);
}

std::optional<double> objective(const RatioValue& r) {
  if (!r.defined()) return std::nullopt;
  if (r.kind == RatioKind::Infinite || r.value <= 0) return kInf;
  // difference of logs, so swapping the pair gives the same bits
  return std::abs(std::log(r.numerator) - std::log(r.denominator));
}

PairState make_pair_state(const CandidateSpec& c, const SpacePoint& p, const SpacePoint& q, double collapse_floor) {
  PairState s{p, q, evaluate_jet(c, p), evaluate_jet(c, q), {}};
  s.ratio = ratio(s.jet_p, s.jet_q, collapse_floor);
  return s;
}

void CampaignConfig::validate() const {
  if (starts < 1) throw InvalidInput("starts must be >= 1");
  if (iters_per_start < 1) throw InvalidInput("iters must be >= 1");
  if (!(step0 > 0)) throw InvalidInput("step0 must be positive");
  if (!(noise0 > 0)) throw InvalidInput("noise0 must be positive");
  if (!(divergence_threshold > 1)) throw InvalidInput("divergence-threshold must exceed 1");
  if (!(collapse_floor > 0)) throw InvalidInput("collapse floor must be positive");
  if (!(exclusion_radius > 0)) throw InvalidInput("exclusion radius must be positive");
}

void project_into_domain(const CandidateSpec& c, SpacePoint& p, double exclusion_radius) {
  if (c.elliptic()) {
    p.t = 0;
  } else {
    p.t = std::clamp(p.t, -1.0, 0.0);
  }
  const double nx = p.x.norm();
  if (nx > 1) p.x /= nx;

  const double dist = distance_to_singular_set(c, p);
  if (dist >= exclusion_radius) return;
  if (dist == 0) {
    // no direction to push along; step off along -t (or e1 for elliptic)
    if (c.elliptic())
      p.x(0) = exclusion_radius;
    else
      p.t = -exclusion_radius;
    return;
  }
  const double scale = exclusion_radius / dist;
  p.x *= scale;
  if (c.parabolic()) p.t *= scale;
}

namespace {

void check_searchable(const CandidateSpec& c) {
  if (c.id == CandidateId::Measurable2D)
    throw NotApplicable(
        "measurable2d is only claimed to satisfy the measurable-coefficient criterion; "
        "the ratio search does not apply");
}

/// Pair coordinates as one flat vector: (t_p, x_p, t_q, x_q) for parabolic
/// candidates, (x_p, x_q) for elliptic ones.
class PairCoords {
 public:
  explicit PairCoords(const CandidateSpec& c) : c_(c), block_(c.elliptic() ? c.dim : c.dim + 1) {}

  int size() const { return 2 * block_; }
  int block() const { return block_; }

  std::vector<double> pack(const SpacePoint& p, const SpacePoint& q) const {
    std::vector<double> z(size());
    write(p, z.data());
    write(q, z.data() + block_);
    return z;
  }

  SpacePoint point(const std::vector<double>& z, int which) const {
    const double* src = z.data() + which * block_;
    SpacePoint out;
    out.x.resize(c_.dim);
    int off = 0;
    if (c_.parabolic()) out.t = src[off++];
    for (int i = 0; i < c_.dim; ++i) out.x(i) = src[off + i];
    return out;
  }

  void project(std::vector<double>& z, double exclusion_radius) const {
    for (int which = 0; which < 2; ++which) {
      SpacePoint p = point(z, which);
      project_into_domain(c_, p, exclusion_radius);
      write(p, z.data() + which * block_);
    }
  }

 private:
  void write(const SpacePoint& p, double* dst) const {
    int off = 0;
    if (c_.parabolic()) dst[off++] = p.t;
    for (int i = 0; i < c_.dim; ++i) dst[off + i] = p.x(i);
  }

  const CandidateSpec& c_;
  int block_;
};

/// Objective evaluation that reuses the jet of whichever point did not move.
class PairObjective {
 public:
  PairObjective(const CandidateSpec& c, const PairCoords& coords, double collapse_floor)
      : c_(c), coords_(coords), floor_(collapse_floor) {}

  struct Eval {
    std::optional<double> f;
    RatioValue r;
  };

  /// Objective at z where only the block `moved` differs from `base`.
  Eval at(const std::vector<double>& z, int moved, const Jet<double>& fixed_jet) const {
    const Jet<double> jet = evaluate_jet(c_, coords_.point(z, moved));
    const RatioValue r = moved == 0 ? ratio(jet, fixed_jet, floor_) : ratio(fixed_jet, jet, floor_);
    return {objective(r), r};
  }

 private:
  const CandidateSpec& c_;
  const PairCoords& coords_;
  double floor_;
};

}  // namespace

AscentResult ascend(const CandidateSpec& c, const PairState& init, const CampaignConfig& cfg, std::uint64_t seed,
                    const TraceSink& trace, int start_index) {
  check_searchable(c);
  cfg.validate();

  const PairCoords coords(c);
  const PairObjective eval(c, coords, cfg.collapse_floor);
  const int n = coords.size();
  const int block = coords.block();
  const double log_threshold = std::log(cfg.divergence_threshold);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<double> z = coords.pack(init.p, init.q);
  coords.project(z, cfg.exclusion_radius);
  PairState cur = make_pair_state(c, coords.point(z, 0), coords.point(z, 1), cfg.collapse_floor);

  AscentResult out;
  out.best_pair = cur;

  auto record = [&](const PairState& s, int k) {
    const auto f = objective(s.ratio);
    if (!f) return;
    const double sym = s.ratio.symmetric();
    if (std::isfinite(sym) && sym > out.max_ratio) {
      out.max_ratio = sym;
      out.best_pair = s;
    }
    if (*f > log_threshold && !out.diverged) {
      out.diverged = true;
      out.diverged_at = k;
    }
  };

  auto perturb = [&](std::vector<double>& v, double scale) {
    for (auto& vi : v) vi += scale * gauss(rng);
    coords.project(v, cfg.exclusion_radius);
  };

  // identical jets carry no information: re-perturb until the ratio is defined
  for (int tries = 0; !cur.ratio.defined() && tries < 100; ++tries) {
    perturb(z, cfg.noise0);
    cur = make_pair_state(c, coords.point(z, 0), coords.point(z, 1), cfg.collapse_floor);
    ++out.reperturbations;
  }
  record(cur, 0);

  // Ascent runs in orthonormal sum/difference coordinates
  // w = ((p + q)/sqrt2, (p - q)/sqrt2). Each coordinate has a scale in
  // (0, 1]: sum coordinates follow the pair separation (center space also
  // follows sqrt|center time|, the parabolic length), difference coordinates
  // their own magnitude. Scales set the FD stencils and the initial
  // per-coordinate steps; steps then adapt by sign agreement of successive
  // gradients (grow on agreement, shrink on reversal), capped by step_k.
  const int toff = c.parabolic() ? 1 : 0;
  const double r2 = std::sqrt(0.5);
  std::vector<double> grad(n), zp, zm, best_stencil, w(n), dir(n), sigma(n);
  std::vector<double> delta(n), prev_sign(n, 0.0);
  for (int k = 0; k < cfg.iters_per_start && !out.diverged; ++k) {
    const double step = cfg.step0 / std::sqrt(1.0 + k / 1000.0);
    const double noise = cfg.noise0 / std::sqrt(1.0 + k);
    const double f0 = objective(cur.ratio).value_or(0.0);

    for (int i = 0; i < block; ++i) {
      w[i] = r2 * (z[i] + z[i + block]);
      w[i + block] = r2 * (z[i] - z[i + block]);
    }
    double sep = 0, dx = 0;
    for (int i = block; i < n; ++i) sep += w[i] * w[i];
    for (int i = block + toff; i < n; ++i) dx += w[i] * w[i];
    sep = std::sqrt(sep);
    dx = std::sqrt(dx);
    auto rel = [&](double v, double lo) { return std::clamp(v / step, lo, 1.0); };
    const double center_space = std::max(sep, toff ? std::sqrt(std::abs(w[0])) : 0.0);
    double min_space = 1.0;
    for (int i = 0; i < n; ++i) {
      if (i < toff)
        sigma[i] = rel(std::max(sep, std::abs(w[i])), kMinScale);
      else if (i < block)
        sigma[i] = rel(center_space, kMinScale);
      else if (i - block < toff)
        sigma[i] = rel(std::abs(w[i]), kMinScale);
      else
        sigma[i] = rel(std::abs(w[i]), kComponentFloor * rel(dx, kMinScale));
      if (i % block >= toff) min_space = std::min(min_space, sigma[i]);
    }
    if (k == 0)
      for (int i = 0; i < n; ++i) delta[i] = step * sigma[i];
    const double h_time = toff ? step * std::min(sigma[0], sigma[block]) / 10 : 0.0;
    const double h_space = step * min_space / 10;

    double best_f = f0;
    best_stencil.clear();
    for (int i = 0; i < n; ++i) {
      const int moved = i < block ? 0 : 1;
      const double h = std::max(i % block < toff ? h_time : h_space, kMinStencil);
      const Jet<double>& fixed = moved == 0 ? cur.jet_q : cur.jet_p;
      zp = z;
      zm = z;
      zp[i] += h;
      zm[i] -= h;
      coords.project(zp, cfg.exclusion_radius);
      coords.project(zm, cfg.exclusion_radius);
      const auto ep = eval.at(zp, moved, fixed);
      const auto em = eval.at(zm, moved, fixed);
      const double fp = ep.f.value_or(f0);
      const double fm = em.f.value_or(f0);
      const double span = zp[i] - zm[i];
      grad[i] = (span > 0 && std::isfinite(fp) && std::isfinite(fm)) ? (fp - fm) / span : 0.0;
      if (fp > best_f) {
        best_f = fp;
        best_stencil = zp;
      }
      if (fm > best_f) {
        best_f = fm;
        best_stencil = zm;
      }
    }

    std::vector<double> next;
    if (!best_stencil.empty() && best_f > log_threshold) {
      // a stencil point already exhibits the violation; take it
      next = best_stencil;
    } else {
      // projected gradient: time components pointing out of [-1, 0] are dropped
      if (c.parabolic())
        for (int i : {0, block})
          if ((z[i] >= 0 && grad[i] > 0) || (z[i] <= -1 && grad[i] < 0)) grad[i] = 0;
      for (int i = 0; i < block; ++i) {
        dir[i] = r2 * (grad[i] + grad[i + block]);
        dir[i + block] = r2 * (grad[i] - grad[i + block]);
      }
      for (int i = 0; i < n; ++i) {
        const double sg = dir[i] > 0 ? 1.0 : (dir[i] < 0 ? -1.0 : 0.0);
        if (sg * prev_sign[i] > 0)
          delta[i] *= kGrow;
        else if (sg * prev_sign[i] < 0)
          delta[i] *= kShrink;
        delta[i] = std::clamp(delta[i], kMinStep, step);
        prev_sign[i] = sg;
        w[i] += delta[i] * (sg + (noise / step) * gauss(rng));
      }
      next.resize(n);
      for (int i = 0; i < block; ++i) {
        next[i] = r2 * (w[i] + w[i + block]);
        next[i + block] = r2 * (w[i] - w[i + block]);
      }
      coords.project(next, cfg.exclusion_radius);
    }

    PairState cand = make_pair_state(c, coords.point(next, 0), coords.point(next, 1), cfg.collapse_floor);
    for (int tries = 0; !cand.ratio.defined() && tries < 100; ++tries) {
      next = z;
      perturb(next, std::max(noise, step) * std::max(sep, kMinScale));
      cand = make_pair_state(c, coords.point(next, 0), coords.point(next, 1), cfg.collapse_floor);
      ++out.reperturbations;
    }
    if (!cand.ratio.defined()) continue;

    z = std::move(next);
    cur = std::move(cand);
    out.iterations = k + 1;
    record(cur, k + 1);

    if (trace) {
      TraceRow row{start_index, k + 1, cur.ratio.value, objective(cur.ratio).value_or(0.0), z};
      trace(row);
    }
  }

  out.final_pair = cur;
  return out;
}

PairState random_pair(const CandidateSpec& c, std::mt19937_64& rng, double exclusion_radius) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto draw = [&] {
    SpacePoint p;
    p.t = c.elliptic() ? 0.0 : -unit(rng);
    p.x.resize(c.dim);
    for (int i = 0; i < c.dim; ++i) p.x(i) = gauss(rng);
    const double radius = std::pow(unit(rng), 1.0 / c.dim);
    p.x *= radius / p.x.norm();
    project_into_domain(c, p, exclusion_radius);
    return p;
  };
  const SpacePoint p = draw();
  const SpacePoint q = draw();
  return make_pair_state(c, p, q);
}

std::vector<PairState> seed_near_failure(const CandidateSpec& c, const CampaignConfig& cfg) {
  if (c.id != CandidateId::Cand1 && c.id != CandidateId::Cand2)
    throw NotApplicable("seed_near_failure targets the known failure sets of cand1 and cand2 only");
  cfg.validate();

  std::vector<PairState> out;
  out.reserve(cfg.starts);
  for (int i = 0; i < cfg.starts; ++i) {
    std::mt19937_64 rng(start_seed(cfg.rng_seed, i));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    SpacePoint p, q;
    if (c.id == CandidateId::Cand1) {
      // x on the ray where the cubic attains -1 (x = -r e1), y = x + delta
      // with delta radial and |delta| <= 1e-6; |t - s| log-uniform in
      // [1e-3, 1e-1] with the outer point earlier
      const double radius = 0.2 + 0.8 * unit(rng);
      VectorXd9 ray = VectorXd9::Zero(c.dim);
      ray(0) = -1.0;
      p.x = radius * ray;
      q.x = p.x + 1e-6 * unit(rng) * ray;
      const double gap = std::pow(10.0, -3.0 + 2.0 * unit(rng));
      p.t = -std::min(1.0 - gap, 1e-3 * unit(rng));
      q.t = p.t - gap;
    } else {
      // both points near {t = 0, x = a e_i}
      const int axis = i % c.dim;
      const double a = (unit(rng) < 0.5 ? -1.0 : 1.0) * (0.2 + 0.7 * unit(rng));
      VectorXd9 base = VectorXd9::Zero(c.dim);
      base(axis) = a;
      VectorXd9 off_p(c.dim), off_q(c.dim);
      for (int k = 0; k < c.dim; ++k) off_p(k) = gauss(rng);
      for (int k = 0; k < c.dim; ++k) off_q(k) = gauss(rng);
      p.x = base + 1e-3 * off_p.normalized();
      q.x = base + 1e-3 * off_q.normalized();
      p.t = -1e-4 * unit(rng);
      q.t = -1e-4 * unit(rng);
    }
    project_into_domain(c, p, cfg.exclusion_radius);
    project_into_domain(c, q, cfg.exclusion_radius);
    out.push_back(make_pair_state(c, p, q, cfg.collapse_floor));
  }
  return out;
}

CampaignReport campaign(const CandidateSpec& c, const CampaignConfig& cfg, const TraceSink& trace) {
  check_searchable(c);
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();

  std::vector<PairState> inits;
  if (cfg.seeded) {
    inits = seed_near_failure(c, cfg);
  } else {
    inits.reserve(cfg.starts);
    for (int i = 0; i < cfg.starts; ++i) {
      std::mt19937_64 rng(start_seed(cfg.rng_seed, i));
      inits.push_back(random_pair(c, rng, cfg.exclusion_radius));
    }
  }

  CampaignReport rep;
  rep.candidate = c;
  rep.config = cfg;
  rep.per_start.resize(cfg.starts);
  parallel_for(inits.size(), [&](std::size_t i) {
    const int idx = static_cast<int>(i);
    const auto res = ascend(c, inits[i], cfg, noise_seed(start_seed(cfg.rng_seed, idx)), trace, idx);
    rep.per_start[i] = {idx, res.max_ratio, res.diverged, res.diverged_at, res.reperturbations, res.best_pair,
                        res.final_pair};
  });

  for (const auto& s : rep.per_start) {
    rep.max_finite_ratio = std::max(rep.max_finite_ratio, s.max_ratio);
    if (s.diverged)
      ++rep.diverged_starts;
    else
      rep.estimated_c = std::max(rep.estimated_c, s.max_ratio);
  }
  rep.divergence_fraction = static_cast<double>(rep.diverged_starts) / cfg.starts;
  rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace pucci
