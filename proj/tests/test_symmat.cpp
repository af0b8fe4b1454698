#include <gtest/gtest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "pucci_forge/symmat.hpp"

using namespace pucci;

namespace {

SymMatrix<double> random_sym(int d, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  SymMatrix<double> m(d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i <= j; ++i) m.set(i, j, g(rng));
  return m;
}

// lambda I <= A <= Lambda I built from a random orthogonal frame
SymMatrix<double> random_admissible(int d, const EllipticityWindow& w, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(w.lambda, w.Lambda);
  Eigen::HouseholderQR<MatrixXd9> qr(random_sym(d, rng).dense());
  const MatrixXd9 q = qr.householderQ();
  VectorXd9 ev(d);
  for (int i = 0; i < d; ++i) ev(i) = u(rng);
  return SymMatrix<double>::from_dense(q * ev.asDiagonal() * q.transpose());
}

const EllipticityWindow kW12{1.0, 2.0};

}  // namespace

TEST(SymMatrix, WritesAreMirrored) {
  SymMatrix<double> m(3);
  m.set(0, 2, 4.5);
  m.add(2, 0, 0.5);
  EXPECT_EQ(m(0, 2), 5.0);
  EXPECT_EQ(m(2, 0), 5.0);
}

TEST(SymMatrix, FromDenseSymmetrizes) {
  MatrixXd9 a(2, 2);
  a << 1, 2, 4, 3;
  const auto m = SymMatrix<double>::from_dense(a);
  EXPECT_EQ(m(0, 1), 3.0);
  EXPECT_EQ(m(1, 0), 3.0);
}

TEST(SymMatrix, RejectsNonFiniteAndBadDimension) {
  MatrixXd9 a = MatrixXd9::Zero(2, 2);
  a(0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(SymMatrix<double>::from_dense(a), InvalidInput);
  EXPECT_THROW(SymMatrix<double>(0), InvalidInput);
  EXPECT_THROW(SymMatrix<double>(10), InvalidInput);
}

TEST(EigenDecompose, DiagonalInput) {
  const auto e = eigen_decompose(SymMatrix<double>::diagonal({2.0, -1.0}));
  EXPECT_EQ(e.eigenvalues(0), 2.0);
  EXPECT_EQ(e.eigenvalues(1), -1.0);
  EXPECT_NEAR(std::abs(e.eigenvectors(0, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(e.eigenvectors(1, 1)), 1.0, 1e-15);
}

TEST(EigenDecompose, IdentityFive) {
  const auto e = eigen_decompose(SymMatrix<double>::identity(5));
  for (int i = 0; i < 5; ++i) EXPECT_EQ(e.eigenvalues(i), 1.0);
}

TEST(EigenDecompose, RecoversConjugatedDiagonal) {
  // rotation by 0.3 about x3 composed with rotation by -0.7 about x1
  const double c1 = std::cos(0.3), s1 = std::sin(0.3), c2 = std::cos(-0.7), s2 = std::sin(-0.7);
  MatrixXd9 r1(3, 3), r2(3, 3);
  r1 << c1, -s1, 0, s1, c1, 0, 0, 0, 1;
  r2 << 1, 0, 0, 0, c2, -s2, 0, s2, c2;
  const MatrixXd9 r = r1 * r2;
  VectorXd9 d(3);
  d << 3, 1, -2;
  const auto e = eigen_decompose(SymMatrix<double>::from_dense(r * d.asDiagonal() * r.transpose()));
  EXPECT_NEAR(e.eigenvalues(0), 3.0, 1e-13);
  EXPECT_NEAR(e.eigenvalues(1), 1.0, 1e-13);
  EXPECT_NEAR(e.eigenvalues(2), -2.0, 1e-13);
}

TEST(EigenDecompose, RejectsNonFinite) {
  SymMatrix<double> m(2);
  m.set(0, 1, std::numeric_limits<double>::infinity());
  EXPECT_THROW(eigen_decompose(m), InvalidInput);
}

TEST(EigenDecomposeProperty, ReconstructionOrthonormalityAndEigenOracle) {
  std::mt19937_64 rng(11);
  for (int d : {1, 2, 5, 9}) {
    for (int k = 0; k < 200; ++k) {
      const auto m = random_sym(d, rng, k % 2 ? 1.0 : 1e3);
      const auto e = eigen_decompose(m);
      const MatrixXd9 recon = e.eigenvectors * e.eigenvalues.asDiagonal() * e.eigenvectors.transpose();
      const double scale = 1e-12 * (1 + m.max_abs());
      EXPECT_LE((recon - m.dense()).cwiseAbs().maxCoeff(), scale);
      EXPECT_LE((e.eigenvectors.transpose() * e.eigenvectors - MatrixXd9::Identity(d, d)).cwiseAbs().maxCoeff(),
                1e-12);
      for (int i = 1; i < d; ++i) EXPECT_GE(e.eigenvalues(i - 1), e.eigenvalues(i));
      // independent oracle: Eigen's self-adjoint solver (ascending order)
      Eigen::SelfAdjointEigenSolver<MatrixXd9> ref(m.dense(), Eigen::EigenvaluesOnly);
      for (int i = 0; i < d; ++i) EXPECT_NEAR(e.eigenvalues(i), ref.eigenvalues()(d - 1 - i), scale);
      const auto ev = eigenvalues(m);
      for (int i = 0; i < d; ++i) EXPECT_NEAR(ev(i), e.eigenvalues(i), scale);
    }
  }
}

TEST(EigenDecomposeProperty, Deterministic) {
  std::mt19937_64 rng(5);
  const auto m = random_sym(9, rng);
  const auto a = eigen_decompose(m), b = eigen_decompose(m);
  EXPECT_EQ(a.eigenvalues, b.eigenvalues);
  EXPECT_EQ(a.eigenvectors, b.eigenvectors);
}

TEST(SplitParts, Examples) {
  auto [p, n] = split_parts(SymMatrix<double>::diagonal({3.0, -2.0}));
  EXPECT_NEAR(p(0, 0), 3.0, 1e-15);
  EXPECT_NEAR(p(1, 1), 0.0, 1e-15);
  EXPECT_NEAR(n(0, 0), 0.0, 1e-15);
  EXPECT_NEAR(n(1, 1), 2.0, 1e-15);

  std::mt19937_64 rng(3);
  const auto a = random_sym(4, rng);
  const auto psd = SymMatrix<double>::from_dense(a.dense() * a.dense());
  EXPECT_LE(split_parts(psd).second.max_abs(), 1e-12 * psd.max_abs());

  auto [p2, n2] = split_parts(-SymMatrix<double>::identity(3));
  EXPECT_EQ(p2.max_abs(), 0.0);
  EXPECT_EQ(n2, SymMatrix<double>::identity(3));
}

TEST(SplitPartsProperty, PartsAreOrthogonalPsdAndAddUp) {
  std::mt19937_64 rng(17);
  for (int d : {2, 5, 9}) {
    for (int k = 0; k < 200; ++k) {
      const auto m = random_sym(d, rng);
      const auto [p, n] = split_parts(m);
      EXPECT_LE(((p - n) - m).max_abs(), 1e-12);
      EXPECT_LE((p.dense() * n.dense()).cwiseAbs().maxCoeff(), 1e-10);
      EXPECT_GE(eigenvalues(p)(d - 1), -1e-12);
      EXPECT_GE(eigenvalues(n)(d - 1), -1e-12);
      const auto tp = trace_parts(m);
      EXPECT_NEAR(m.trace(), tp.positive - tp.negative, 1e-10);
      EXPECT_NEAR(p.trace(), tp.positive, 1e-10);
    }
  }
}

TEST(TracePartsProperty, NegationSwapsPartsExactly) {
  std::mt19937_64 rng(31);
  for (int d : {1, 2, 5, 9}) {
    for (int k = 0; k < 500; ++k) {
      const auto m = random_sym(d, rng, k % 2 ? 1.0 : 1e-3);
      const auto a = trace_parts(m), b = trace_parts(-m);
      EXPECT_EQ(a.positive, b.negative);
      EXPECT_EQ(a.negative, b.positive);
      EXPECT_NEAR(a.positive - a.negative, m.trace(), 1e-12 * (1 + m.max_abs()));
    }
  }
}

TEST(Pucci, Examples) {
  EXPECT_DOUBLE_EQ(pucci_plus(SymMatrix<double>::identity(2), kW12), 4.0);
  EXPECT_DOUBLE_EQ(pucci_plus(SymMatrix<double>::diagonal({1.0, -1.0}), kW12), 1.0);
  EXPECT_DOUBLE_EQ(pucci_minus(SymMatrix<double>::diagonal({1.0, -1.0}), kW12), -1.0);
}

TEST(Pucci, WindowValidation) {
  EXPECT_THROW(EllipticityWindow(0.0, 1.0), InvalidInput);
  EXPECT_THROW(EllipticityWindow(2.0, 1.0), InvalidInput);
  EXPECT_THROW(EllipticityWindow::from_ratio_bound(0.5), InvalidInput);
  const auto w = EllipticityWindow::from_ratio_bound(4.0);
  EXPECT_DOUBLE_EQ(w.lambda, 0.25);
  EXPECT_DOUBLE_EQ(w.Lambda, 4.0);
}

TEST(PucciProperty, AntisymmetryHomogeneityEllipticity) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int d : {2, 5, 9}) {
    for (int k = 0; k < 300; ++k) {
      const double lo = 0.05 + u(rng) / 5, hi = lo + u(rng);
      const EllipticityWindow w(lo, hi);
      const auto a = random_sym(d, rng), b = random_sym(d, rng);
      const double c = u(rng);
      EXPECT_NEAR(pucci_plus(a, w), -pucci_minus(-a, w), 1e-9);
      EXPECT_NEAR(pucci_plus(c * a, w), c * pucci_plus(a, w), 1e-9 * (1 + c));
      EXPECT_NEAR(pucci_minus(c * a, w), c * pucci_minus(a, w), 1e-9 * (1 + c));
      EXPECT_LE(pucci_minus(a, w), pucci_plus(a, w) + 1e-12);
      const double diff = pucci_plus(a + b, w) - pucci_plus(a, w);
      EXPECT_GE(diff, pucci_minus(b, w) - 1e-9);
      EXPECT_LE(diff, pucci_plus(b, w) + 1e-9);
      const double diff_m = pucci_minus(a + b, w) - pucci_minus(a, w);
      EXPECT_GE(diff_m, pucci_minus(b, w) - 1e-9);
      EXPECT_LE(diff_m, pucci_plus(b, w) + 1e-9);
    }
  }
}

TEST(PucciProperty, SupAndInfOverAdmissibleCoefficients) {
  std::mt19937_64 rng(29);
  const EllipticityWindow w(0.3, 2.5);
  for (int k = 0; k < 1000; ++k) {
    const int d = k % 2 ? 5 : 9;
    const auto m = random_sym(d, rng);
    const auto a = random_admissible(d, w, rng);
    const double tr = trace_product(a, m);
    EXPECT_LE(tr, pucci_plus(m, w) + 1e-9);
    EXPECT_GE(tr, pucci_minus(m, w) - 1e-9);
  }
}

TEST(ReconstructCoefficients, Examples) {
  const EllipticityWindow w(0.25, 3.0);
  const auto a0 = reconstruct_coefficients(SymMatrix<double>::identity(2), 2 * w.lambda, w);
  EXPECT_LE((a0 - w.lambda * SymMatrix<double>::identity(2)).max_abs(), 1e-14);

  const auto a1 = reconstruct_coefficients(SymMatrix<double>::diagonal({1.0, -1.0}), 0.0, kW12);
  EXPECT_NEAR(a1(0, 0), 1.5, 1e-15);
  EXPECT_NEAR(a1(1, 1), 1.5, 1e-15);
  EXPECT_NEAR(a1(0, 1), 0.0, 1e-15);

  const auto a2 = reconstruct_coefficients(SymMatrix<double>::zero(3), 0.0, kW12);
  EXPECT_LE((a2 - 1.5 * SymMatrix<double>::identity(3)).max_abs(), 1e-15);
}

TEST(ReconstructCoefficients, SandwichViolationCarriesMargins) {
  try {
    reconstruct_coefficients(SymMatrix<double>::identity(2), 10.0, kW12);
    FAIL() << "expected CertificationFailure";
  } catch (const CertificationFailure& e) {
    EXPECT_DOUBLE_EQ(e.margin_plus(), 4.0 - 10.0);
    EXPECT_DOUBLE_EQ(e.margin_minus(), 10.0 - 2.0);
  }
}

TEST(ReconstructCoefficientsProperty, AdmissibleAndExact) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const EllipticityWindow w(0.2, 3.0);
  for (int d : {2, 5, 9}) {
    for (int k = 0; k < 300; ++k) {
      const auto h = random_sym(d, rng);
      const double lo = pucci_minus(h, w), hi = pucci_plus(h, w);
      const double ut = lo + u(rng) * (hi - lo);
      const auto a = reconstruct_coefficients(h, ut, w);
      const auto ev = eigenvalues(a);
      EXPECT_LE(ev(0), w.Lambda + 1e-10);
      EXPECT_GE(ev(d - 1), w.lambda - 1e-10);
      EXPECT_NEAR(trace_product(a, h), ut, 1e-9 * (1 + std::abs(ut)));
    }
  }
}
