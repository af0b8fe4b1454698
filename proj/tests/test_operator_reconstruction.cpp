#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "pucci_forge/jet_cache.hpp"
#include "pucci_forge/operator_reconstruction.hpp"
#include "pucci_forge/ratio_search.hpp"

using namespace pucci;

namespace {

const EllipticityWindow kWindow14 = EllipticityWindow::from_ratio_bound(14.0);

SymMatrix<double> random_sym(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  SymMatrix<double> m(d);
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) m.set(a, b, g(rng));
  return m;
}

const JetSample& cand3_sample() {
  static const JetSample s = build_sample(CandidateSpec::make(CandidateId::Cand3), 2000);
  return s;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("pucci_forge_test_" + name)).string();
}

}  // namespace

TEST(HaltonPoints, InDomainAndExcluded) {
  const auto c = CandidateSpec::make(CandidateId::Cand2);
  const auto pts = halton_points(c, 3000, 1e-2);
  ASSERT_EQ(pts.size(), 3000u);
  int top = 0;
  for (const auto& p : pts) {
    EXPECT_LE(p.x.norm(), 1.0 + 1e-12);
    EXPECT_LE(p.t, 0.0);
    EXPECT_GE(p.t, -1.0);
    EXPECT_GE(distance_to_singular_set(c, p), 1e-2);
    top += p.t == 0.0;
  }
  EXPECT_GE(top, 3000 / 16 - 1);
  const auto e = halton_points(CandidateSpec::make(CandidateId::Smart9D), 500, 1e-2);
  for (const auto& p : e) EXPECT_EQ(p.t, 0.0);
  EXPECT_EQ(halton_points(c, 100, 1e-2)[37].x, pts[37].x);
}

TEST(ReconstructF, Examples) {
  const auto& s = cand3_sample();
  for (std::size_t i : {std::size_t{0}, std::size_t{17}, std::size_t{1234}}) {
    const auto op = reconstruct_F(s, s.jets[i].hess, kWindow14);
    EXPECT_GE(op.f_value, s.jets[i].ut);
    EXPECT_NEAR(op.f_value, s.jets[i].ut, 1e-9);
    EXPECT_LE(op.f_value, op.upper_bound + 1e-12);
    EXPECT_EQ(op.sample_size, s.size());
  }
  EXPECT_THROW(reconstruct_F(JetSample{}, SymMatrix<double>(5), kWindow14), InvalidInput);
  EXPECT_THROW(reconstruct_F(s, SymMatrix<double>(3), kWindow14), InvalidInput);
  EXPECT_THROW(build_sample(CandidateSpec::make(CandidateId::Cand3), std::vector<SpacePoint>{}), InvalidInput);
}

TEST(ReconstructF, AnchorBoundsHoldForRandomQueries) {
  const auto& s = cand3_sample();
  std::mt19937_64 rng(21);
  for (int k = 0; k < 200; ++k) {
    const auto M = random_sym(5, rng);
    const auto op = reconstruct_F(s, M, kWindow14);
    EXPECT_TRUE(std::isfinite(op.f_value));
    EXPECT_EQ(op.f_value, reconstructed_F(s, M, kWindow14));
    for (int a = 0; a < kDefaultAnchors; ++a) {
      const std::size_t idx = static_cast<std::size_t>(a) * s.size() / kDefaultAnchors;
      EXPECT_LE(op.f_value, s.jets[idx].ut + pucci_plus(M - s.jets[idx].hess, kWindow14) + 1e-12);
    }
  }
}

TEST(ReconstructFProperty, MonotoneInNestedSamples) {
  const auto c = CandidateSpec::make(CandidateId::Cand3);
  const auto pts = halton_points(c, 1600);
  std::vector<SpacePoint> small(pts.begin(), pts.begin() + 400), mid(pts.begin(), pts.begin() + 800);
  const auto s1 = build_sample(c, small), s2 = build_sample(c, mid), s3 = build_sample(c, pts);
  std::mt19937_64 rng(23);
  for (int k = 0; k < 100; ++k) {
    const auto M = random_sym(5, rng);
    const double f1 = reconstructed_F(s1, M, kWindow14), f2 = reconstructed_F(s2, M, kWindow14),
                 f3 = reconstructed_F(s3, M, kWindow14);
    EXPECT_LE(f1, f2);
    EXPECT_LE(f2, f3);
  }
}

TEST(EllipticityAudit, Examples) {
  const auto& s = cand3_sample();
  std::mt19937_64 rng(25);
  for (int k = 0; k < 20; ++k) {
    const auto A = random_sym(5, rng);
    const double fA = reconstructed_F(s, A, kWindow14);
    EXPECT_EQ(reconstructed_F(s, A + SymMatrix<double>(5), kWindow14) - fA, 0.0);
    const double dI = reconstructed_F(s, A + SymMatrix<double>::identity(5), kWindow14) - fA;
    EXPECT_GE(dI, kWindow14.lambda * 5 - 1e-8);
    EXPECT_LE(dI, kWindow14.Lambda * 5 + 1e-8);
  }
}

TEST(EllipticityAuditProperty, Cand3Window14) {
  const auto audit = ellipticity_audit(cand3_sample(), kWindow14, 1000, 27);
  EXPECT_EQ(audit.trials, 1000);
  EXPECT_LE(audit.worst_violation, kAuditTolerance);
}

TEST(EquationResidualProperty, Cand3SampledPoints) {
  const auto& s = cand3_sample();
  const auto rep = equation_residuals(s, 200, kWindow14);
  EXPECT_EQ(rep.evaluated, 200);
  EXPECT_LE(rep.max_residual, 1e-9);
  EXPECT_LE(sandwich_violation(s, kWindow14, 10000, 29), 1e-12);
}

TEST(EquationResidual, EllipticUsesZeroRightHandSide) {
  const auto s = build_sample(CandidateSpec::make(CandidateId::NvtElliptic), 500);
  for (const auto& j : s.jets) EXPECT_EQ(j.ut, 0.0);
  EXPECT_LE(equation_residuals(s, 50, EllipticityWindow::from_ratio_bound(9.5)).max_residual, 1e-9);
}

// A sample holding a pair on which the ascent drove the CAND1 ratio past the
// divergence threshold cannot satisfy u_t = F(D2u) at both points.
TEST(EquationResidual, Cand1ViolatingPairBreaksEquation) {
  const auto c = CandidateSpec::make(CandidateId::Cand1);
  CampaignConfig cfg;
  cfg.starts = 1;
  cfg.iters_per_start = 10000;
  const auto init = seed_near_failure(c, cfg).front();
  const auto res = ascend(c, init, cfg, 77);
  ASSERT_TRUE(res.diverged);
  auto pts = halton_points(c, 200);
  pts.push_back(res.final_pair.p);
  pts.push_back(res.final_pair.q);
  const auto s = build_sample(c, pts);
  const double worst = std::max(equation_residual(s, s.size() - 2, kWindow14),
                                equation_residual(s, s.size() - 1, kWindow14));
  EXPECT_GT(worst, 1e-9);
}

TEST(JetCache, RoundTrip) {
  const auto c = CandidateSpec::make(CandidateId::Cand2);
  const auto s = build_sample(c, 300);
  const auto path = temp_path("roundtrip.bin");
  save_sample(path, s);
  EXPECT_EQ(std::filesystem::file_size(path), 32u + 300u * 8u * (1 + 5 + 2 + 5 + 15));
  const auto r = load_sample(path, c);
  ASSERT_EQ(r.size(), s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(r.points[i].t, s.points[i].t);
    EXPECT_EQ(r.points[i].x, s.points[i].x);
    EXPECT_EQ(r.jets[i].value, s.jets[i].value);
    EXPECT_EQ(r.jets[i].ut, s.jets[i].ut);
    EXPECT_EQ(r.jets[i].grad, s.jets[i].grad);
    EXPECT_EQ((r.jets[i].hess - s.jets[i].hess).max_abs(), 0.0);
  }
  EXPECT_THROW(load_sample(path, CandidateSpec::make(CandidateId::Cand3)), std::runtime_error);
  const auto again = cached_sample(path, c, 300, kSampleExclusion);
  EXPECT_EQ(again.size(), 300u);
  std::filesystem::remove(path);
}

TEST(JetCache, RejectsBadMagicAndTruncation) {
  const auto c = CandidateSpec::make(CandidateId::Cand3);
  const auto path = temp_path("bad.bin");
  {
    std::ofstream out(path, std::ios::binary);
    out << "NOTJETS1 and some more bytes to fill the header";
  }
  EXPECT_THROW(load_sample(path, c), std::runtime_error);
  save_sample(path, build_sample(c, 10));
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 8);
  EXPECT_THROW(load_sample(path, c), std::runtime_error);
  std::filesystem::remove(path);
  EXPECT_THROW(load_sample(path, c), std::runtime_error);
}
