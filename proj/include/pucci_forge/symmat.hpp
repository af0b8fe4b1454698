// Symmetric matrices, spectral parts and the extremal Pucci operators.
//
// Everything here is templated on the scalar type so the finite-difference
// oracle can run in extended precision while the search loops stay in double.
// Dimensions are small (at most 9), so storage is fixed-capacity and never
// touches the heap.

#ifndef PUCCI_FORGE_SYMMAT_HPP
#define PUCCI_FORGE_SYMMAT_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <utility>

#include <Eigen/Dense>

#include "pucci_forge/errors.hpp"

namespace pucci {

inline constexpr int kMaxDim = 9;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

using MatrixXd9 = Matrix<double>;
using VectorXd9 = Vector<double>;

/// Dense symmetric matrix. Every write goes to both (i, j) and (j, i), so
/// the stored entries are exactly symmetric at all times.
template <typename Scalar = double>
class SymMatrix {
 public:
  using DenseType = Matrix<Scalar>;

  SymMatrix() = default;

  explicit SymMatrix(int dim) : m_(DenseType::Zero(check_dim(dim), dim)) {}

  static SymMatrix zero(int dim) { return SymMatrix(dim); }

  static SymMatrix identity(int dim) {
    SymMatrix out(dim);
    out.m_.setIdentity();
    return out;
  }

  static SymMatrix diagonal(std::initializer_list<Scalar> diag) {
    SymMatrix out(static_cast<int>(diag.size()));
    int i = 0;
    for (Scalar v : diag) {
      out.m_(i, i) = v;
      ++i;
    }
    return out;
  }

  template <typename Derived>
  static SymMatrix diagonal(const Eigen::MatrixBase<Derived>& diag) {
    SymMatrix out(static_cast<int>(diag.size()));
    for (int i = 0; i < out.dim(); ++i) out.m_(i, i) = diag(i);
    return out;
  }

  /// Symmetrizes (A + A^T) / 2. Rejects non-square or non-finite input.
  template <typename Derived>
  static SymMatrix from_dense(const Eigen::MatrixBase<Derived>& a) {
    if (a.rows() != a.cols()) throw InvalidInput("symmetric matrix must be square");
    SymMatrix out(static_cast<int>(a.rows()));
    for (int j = 0; j < out.dim(); ++j) {
      out.m_(j, j) = a(j, j);
      for (int i = 0; i < j; ++i) {
        const Scalar v = (a(i, j) + a(j, i)) / Scalar(2);
        out.m_(i, j) = v;
        out.m_(j, i) = v;
      }
    }
    if (!out.all_finite()) throw InvalidInput("symmetric matrix has a non-finite entry");
    return out;
  }

  int dim() const { return static_cast<int>(m_.rows()); }

  Scalar operator()(int i, int j) const { return m_(i, j); }

  void set(int i, int j, Scalar v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }

  void add(int i, int j, Scalar v) {
    m_(i, j) += v;
    if (i != j) m_(j, i) += v;
  }

  const DenseType& dense() const { return m_; }

  Scalar trace() const { return m_.trace(); }

  Scalar max_abs() const { return m_.size() == 0 ? Scalar(0) : m_.cwiseAbs().maxCoeff(); }

  bool all_finite() const { return m_.allFinite(); }

  template <typename Other>
  SymMatrix<Other> cast() const {
    SymMatrix<Other> out(dim());
    for (int j = 0; j < dim(); ++j)
      for (int i = 0; i <= j; ++i) out.set(i, j, static_cast<Other>(m_(i, j)));
    return out;
  }

  SymMatrix& operator+=(const SymMatrix& o) {
    m_ += o.m_;
    return *this;
  }
  SymMatrix& operator-=(const SymMatrix& o) {
    m_ -= o.m_;
    return *this;
  }
  SymMatrix& operator*=(Scalar c) {
    m_ *= c;
    return *this;
  }

  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(SymMatrix a, Scalar c) { return a *= c; }
  friend SymMatrix operator*(Scalar c, SymMatrix a) { return a *= c; }
  friend SymMatrix operator-(SymMatrix a) {
    a.m_ = -a.m_;
    return a;
  }
  friend bool operator==(const SymMatrix& a, const SymMatrix& b) {
    return a.dim() == b.dim() && a.m_ == b.m_;
  }

 private:
  static int check_dim(int dim) {
    if (dim < 1 || dim > kMaxDim) throw InvalidInput("symmetric matrix dimension out of range [1, 9]");
    return dim;
  }

  DenseType m_;
};

/// tr(A M) for symmetric A, M without forming the product.
template <typename Scalar>
Scalar trace_product(const SymMatrix<Scalar>& a, const SymMatrix<Scalar>& m) {
  return a.dense().cwiseProduct(m.dense()).sum();
}

template <typename Scalar>
struct EigenDecomposition {
  Vector<Scalar> eigenvalues;   // descending
  Matrix<Scalar> eigenvectors;  // orthonormal columns, matching eigenvalues
};

namespace detail {

// One cyclic Jacobi sweep schedule. Rotations are applied to `a` in place
// and accumulated into `v` when it is non-null. Returns once the off-diagonal
// Frobenius norm falls below 1e-14 relative to the full norm.
template <typename Scalar>
void jacobi_diagonalize(Matrix<Scalar>& a, Matrix<Scalar>* v) {
  const int n = static_cast<int>(a.rows());
  const Scalar total = a.norm();
  if (total == Scalar(0)) return;
  const Scalar tol = Scalar(1e-14) * total;
  constexpr int kMaxSweeps = 64;

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    Scalar off = 0;
    for (int q = 1; q < n; ++q)
      for (int p = 0; p < q; ++p) off += a(p, q) * a(p, q);
    if (std::sqrt(Scalar(2) * off) <= tol) return;

    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const Scalar apq = a(p, q);
        if (apq == Scalar(0)) continue;
        const Scalar theta = (a(q, q) - a(p, p)) / (Scalar(2) * apq);
        const Scalar t = (theta >= 0 ? Scalar(1) : Scalar(-1)) /
                         (std::abs(theta) + std::sqrt(theta * theta + Scalar(1)));
        const Scalar c = Scalar(1) / std::sqrt(t * t + Scalar(1));
        const Scalar s = t * c;

        for (int k = 0; k < n; ++k) {
          const Scalar akp = a(k, p);
          const Scalar akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const Scalar apk = a(p, k);
          const Scalar aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0;
        a(q, p) = 0;

        if (v != nullptr) {
          for (int k = 0; k < n; ++k) {
            const Scalar vkp = (*v)(k, p);
            const Scalar vkq = (*v)(k, q);
            (*v)(k, p) = c * vkp - s * vkq;
            (*v)(k, q) = s * vkp + c * vkq;
          }
        }
      }
    }
  }
}

}  // namespace detail

/// Full eigendecomposition by cyclic Jacobi rotations. Deterministic: the
/// sweep order is fixed and ties in the final sort keep their sweep order.
template <typename Scalar>
EigenDecomposition<Scalar> eigen_decompose(const SymMatrix<Scalar>& m) {
  if (!m.all_finite()) throw InvalidInput("eigen_decompose: matrix has a non-finite entry");
  const int n = m.dim();
  Matrix<Scalar> a = m.dense();
  Matrix<Scalar> v = Matrix<Scalar>::Identity(n, n);
  detail::jacobi_diagonalize(a, &v);

  std::array<int, kMaxDim> order{};
  std::iota(order.begin(), order.begin() + n, 0);
  std::stable_sort(order.begin(), order.begin() + n, [&](int i, int j) { return a(i, i) > a(j, j); });

  EigenDecomposition<Scalar> out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (int k = 0; k < n; ++k) {
    out.eigenvalues(k) = a(order[k], order[k]);
    out.eigenvectors.col(k) = v.col(order[k]);
  }
  return out;
}

/// Eigenvalues only (descending); skips the rotation accumulation.
template <typename Scalar>
Vector<Scalar> eigenvalues(const SymMatrix<Scalar>& m) {
  if (!m.all_finite()) throw InvalidInput("eigenvalues: matrix has a non-finite entry");
  Matrix<Scalar> a = m.dense();
  detail::jacobi_diagonalize<Scalar>(a, nullptr);
  Vector<Scalar> ev = a.diagonal();
  std::sort(ev.data(), ev.data() + ev.size(), std::greater<Scalar>());
  return ev;
}

/// tr(M+) and tr(M-), both non-negative.
template <typename Scalar>
struct TraceParts {
  Scalar positive = 0;
  Scalar negative = 0;
};

/// Sums the unsorted Jacobi diagonal in index order. Jacobi on -M produces
/// exactly the negated diagonal, so trace_parts(-M) swaps the two parts
/// bit for bit.
template <typename Scalar>
TraceParts<Scalar> trace_parts(const SymMatrix<Scalar>& m) {
  if (!m.all_finite()) throw InvalidInput("trace_parts: matrix has a non-finite entry");
  Matrix<Scalar> a = m.dense();
  detail::jacobi_diagonalize<Scalar>(a, nullptr);
  TraceParts<Scalar> out;
  for (int i = 0; i < a.rows(); ++i) {
    const Scalar ev = a(i, i);
    if (ev > 0)
      out.positive += ev;
    else
      out.negative -= ev;
  }
  return out;
}

/// M = M+ - M- with both parts positive semidefinite and M+ M- = 0.
template <typename Scalar>
std::pair<SymMatrix<Scalar>, SymMatrix<Scalar>> split_parts(const SymMatrix<Scalar>& m) {
  const auto eig = eigen_decompose(m);
  const int n = m.dim();
  Vector<Scalar> pos(n), neg(n);
  for (int i = 0; i < n; ++i) {
    pos(i) = std::max(eig.eigenvalues(i), Scalar(0));
    neg(i) = std::max(-eig.eigenvalues(i), Scalar(0));
  }
  const auto& q = eig.eigenvectors;
  return {SymMatrix<Scalar>::from_dense(q * pos.asDiagonal() * q.transpose()),
          SymMatrix<Scalar>::from_dense(q * neg.asDiagonal() * q.transpose())};
}

/// Ellipticity constants 0 < lambda <= Lambda.
struct EllipticityWindow {
  double lambda = 1;
  double Lambda = 1;

  EllipticityWindow() = default;
  EllipticityWindow(double lo, double hi) : lambda(lo), Lambda(hi) {
    if (!(lo > 0) || !(hi >= lo) || !std::isfinite(hi))
      throw InvalidInput("ellipticity window requires 0 < lambda <= Lambda < inf");
  }

  /// (1/C, C), the window matched to a ratio bound C >= 1.
  static EllipticityWindow from_ratio_bound(double c) {
    if (!(c >= 1)) throw InvalidInput("ratio bound C must be >= 1");
    return {1.0 / c, c};
  }
};

template <typename Scalar>
Scalar pucci_plus(const TraceParts<Scalar>& parts, const EllipticityWindow& w) {
  return Scalar(w.Lambda) * parts.positive - Scalar(w.lambda) * parts.negative;
}

template <typename Scalar>
Scalar pucci_minus(const TraceParts<Scalar>& parts, const EllipticityWindow& w) {
  return Scalar(w.lambda) * parts.positive - Scalar(w.Lambda) * parts.negative;
}

/// Lambda tr M+ - lambda tr M-, the sup of tr(AM) over lambda I <= A <= Lambda I.
template <typename Scalar>
Scalar pucci_plus(const SymMatrix<Scalar>& m, const EllipticityWindow& w) {
  return pucci_plus(trace_parts(m), w);
}

/// lambda tr M+ - Lambda tr M-, the matching inf.
template <typename Scalar>
Scalar pucci_minus(const SymMatrix<Scalar>& m, const EllipticityWindow& w) {
  return pucci_minus(trace_parts(m), w);
}

/// Eigenvalues with |mu| <= this are treated as zero when building projectors.
inline constexpr double kZeroEigenvalue = 1e-12;

/// Admissible coefficients for u_t = tr(A D2u): returns A with
/// lambda I <= A <= Lambda I and tr(A hess) = ut. The two extremal matrices
/// that realize P+ and P- are blended by theta = (ut - P-) / (P+ - P-).
/// Throws CertificationFailure when ut lies outside [P-(hess), P+(hess)].
template <typename Scalar>
SymMatrix<Scalar> reconstruct_coefficients(const SymMatrix<Scalar>& hess, Scalar ut, const EllipticityWindow& w) {
  const auto eig = eigen_decompose(hess);
  TraceParts<Scalar> parts;
  for (int i = 0; i < eig.eigenvalues.size(); ++i) {
    const Scalar mu = eig.eigenvalues(i);
    if (mu > 0)
      parts.positive += mu;
    else
      parts.negative -= mu;
  }
  const Scalar p_plus = pucci_plus(parts, w);
  const Scalar p_minus = pucci_minus(parts, w);
  const Scalar margin_plus = p_plus - ut;
  const Scalar margin_minus = ut - p_minus;
  const Scalar slack = Scalar(1e-12) * (Scalar(1) + std::abs(ut));
  if (margin_plus < -slack || margin_minus < -slack)
    throw CertificationFailure("u_t lies outside the Pucci sandwich", static_cast<double>(margin_plus),
                               static_cast<double>(margin_minus));

  const int n = hess.dim();
  Vector<Scalar> high(n), low(n);
  for (int i = 0; i < n; ++i) {
    const bool positive = eig.eigenvalues(i) > Scalar(kZeroEigenvalue);
    high(i) = positive ? Scalar(w.Lambda) : Scalar(w.lambda);
    low(i) = positive ? Scalar(w.lambda) : Scalar(w.Lambda);
  }
  const Scalar spread = p_plus - p_minus;
  Scalar theta = Scalar(0.5);
  if (spread > 0) theta = std::clamp((ut - p_minus) / spread, Scalar(0), Scalar(1));

  const auto& q = eig.eigenvectors;
  const Vector<Scalar> blend = theta * high + (Scalar(1) - theta) * low;
  return SymMatrix<Scalar>::from_dense(q * blend.asDiagonal() * q.transpose());
}

}  // namespace pucci

#endif  // PUCCI_FORGE_SYMMAT_HPP
