#include "pucci_forge/operator_reconstruction.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <sstream>

#include "pucci_forge/parallel.hpp"

namespace pucci {

namespace {

constexpr std::array<int, 11> kPrimes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31};
constexpr std::size_t kChunk = 4096;
constexpr int kBoundaryStride = 16;

double radical_inverse(std::uint64_t i, int base) {
  double inv = 1.0 / base, f = inv, out = 0;
  while (i > 0) {
    out += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return out;
}

void check_query(const JetSample& sample, const SymMatrix<double>& M) {
  if (sample.empty()) throw InvalidInput("operator reconstruction needs a nonempty sample");
  if (M.dim() != sample.candidate.dim) {
    std::ostringstream msg;
    msg << "query matrix is " << M.dim() << "x" << M.dim() << ", sample lives in R^" << sample.candidate.dim;
    throw InvalidInput(msg.str());
  }
}

double term(const Jet<double>& j, const SymMatrix<double>& M, const EllipticityWindow& w) {
  return j.ut + pucci_minus(M - j.hess, w);
}

struct Best {
  double value = -std::numeric_limits<double>::infinity();
  std::size_t index = 0;
};

// argmax over the sample; chunks reduce in index order, so the first
// maximizer wins regardless of scheduling
Best sup_over(const JetSample& sample, const SymMatrix<double>& M, const EllipticityWindow& w) {
  const std::size_t n = sample.size();
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<Best> local(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    Best b;
    const std::size_t end = std::min(n, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      const double v = term(sample.jets[i], M, w);
      if (v > b.value) b = {v, i};
    }
    local[c] = b;
  });
  Best out = local.front();
  for (const auto& b : local)
    if (b.value > out.value) out = b;
  return out;
}

SymMatrix<double> random_symmetric(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  SymMatrix<double> m(dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i <= j; ++i) m.set(i, j, gauss(rng));
  return m;
}

}  // namespace

std::vector<SpacePoint> halton_points(const CandidateSpec& c, int count, double exclusion) {
  if (count < 1) throw InvalidInput("sample size must be >= 1");
  if (!(exclusion >= 0)) throw InvalidInput("sample exclusion radius must be non-negative");
  const int toff = c.parabolic() ? 1 : 0;
  std::vector<SpacePoint> out;
  out.reserve(count);
  for (std::uint64_t i = 1; static_cast<int>(out.size()) < count; ++i) {
    SpacePoint p;
    p.t = toff ? -radical_inverse(i, kPrimes[0]) : 0.0;
    if (toff && out.size() % kBoundaryStride == 0) p.t = 0.0;
    p.x.resize(c.dim);
    for (int k = 0; k < c.dim; ++k) p.x(k) = 2 * radical_inverse(i, kPrimes[k + toff]) - 1;
    const double n2 = p.x.norm();
    if (n2 > 0) p.x *= p.x.cwiseAbs().maxCoeff() / n2;
    const double dist = distance_to_singular_set(c, p);
    if (dist < std::max(exclusion, kSingularGuard)) continue;
    out.push_back(std::move(p));
  }
  return out;
}

JetSample build_sample(const CandidateSpec& c, std::vector<SpacePoint> points) {
  if (points.empty()) throw InvalidInput("operator reconstruction needs a nonempty sample");
  JetSample s;
  s.candidate = c;
  s.points = std::move(points);
  s.jets.resize(s.points.size());
  parallel_for(s.points.size(), [&](std::size_t i) { s.jets[i] = evaluate_jet(c, s.points[i]); });
  return s;
}

OperatorSample reconstruct_F(const JetSample& sample, const SymMatrix<double>& M, const EllipticityWindow& w,
                             int anchors) {
  check_query(sample, M);
  if (anchors < 1) throw InvalidInput("anchor count must be >= 1");
  const Best best = sup_over(sample, M, w);

  OperatorSample out;
  out.M = M;
  out.f_value = best.value;
  out.support_index = best.index;
  out.support_point = sample.points[best.index];
  out.sample_size = sample.size();
  out.upper_bound = std::numeric_limits<double>::infinity();
  const std::size_t n = sample.size();
  const std::size_t k = std::min<std::size_t>(anchors, n);
  for (std::size_t a = 0; a < k; ++a) {
    const std::size_t idx = a * n / k;
    const auto& j = sample.jets[idx];
    const double ub = j.ut + pucci_plus(M - j.hess, w);
    if (ub < out.upper_bound) {
      out.upper_bound = ub;
      out.upper_anchor = idx;
    }
  }
  return out;
}

double reconstructed_F(const JetSample& sample, const SymMatrix<double>& M, const EllipticityWindow& w) {
  check_query(sample, M);
  return sup_over(sample, M, w).value;
}

AuditResult ellipticity_audit(const JetSample& sample, const EllipticityWindow& w, int trials, std::uint64_t seed) {
  if (trials < 1) throw InvalidInput("audit trials must be >= 1");
  std::mt19937_64 rng(seed);
  AuditResult out;
  const int d = sample.candidate.dim;
  for (int k = 0; k < trials; ++k) {
    const auto A = random_symmetric(d, rng);
    const auto B = random_symmetric(d, rng);
    const double dF = reconstructed_F(sample, A + B, w) - reconstructed_F(sample, A, w);
    const auto parts = trace_parts(B);
    const double v = std::max(pucci_minus(parts, w) - dF, dF - pucci_plus(parts, w));
    if (v > out.worst_violation) {
      out.worst_violation = v;
      out.worst_A = A;
      out.worst_B = B;
    }
  }
  out.trials = trials;
  return out;
}

double equation_residual(const JetSample& sample, std::size_t index, const EllipticityWindow& w) {
  if (index >= sample.size()) throw InvalidInput("residual index outside the sample");
  const auto& j = sample.jets[index];
  return std::abs(j.ut - reconstructed_F(sample, j.hess, w));
}

ResidualSummary equation_residuals(const JetSample& sample, int count, const EllipticityWindow& w) {
  if (count < 1) throw InvalidInput("residual count must be >= 1");
  ResidualSummary out;
  const std::size_t n = sample.size();
  const std::size_t k = std::min<std::size_t>(count, n);
  for (std::size_t a = 0; a < k; ++a) {
    const std::size_t idx = a * n / k;
    const double r = equation_residual(sample, idx, w);
    if (r > out.max_residual || a == 0) {
      out.max_residual = r;
      out.worst_index = idx;
    }
  }
  out.evaluated = static_cast<int>(k);
  return out;
}

double sandwich_violation(const JetSample& sample, const EllipticityWindow& w, int pairs, std::uint64_t seed) {
  if (sample.size() < 2) throw InvalidInput("sandwich check needs at least two sample points");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, sample.size() - 1);
  double worst = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < pairs; ++k) {
    const auto& p = sample.jets[pick(rng)];
    const auto& q = sample.jets[pick(rng)];
    const double dut = p.ut - q.ut;
    const auto parts = trace_parts(p.hess - q.hess);
    worst = std::max({worst, pucci_minus(parts, w) - dut, dut - pucci_plus(parts, w)});
  }
  return worst;
}

}  // namespace pucci
