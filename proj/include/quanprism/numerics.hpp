#pragma once

// Dense complex linear algebra for small quantum systems (dimension <= 64).
//
// Matrices are Eigen::MatrixXcd. Indexing is 0-based everywhere except
// matrix_unit(), which mirrors the conventional 1-based E_jk notation.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "quanprism/errors.hpp"

namespace quanprism {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

// Largest Hilbert-space dimension the dense routines are sized for.
inline constexpr Eigen::Index kMaxDim = 64;

// Default for structural predicates (unitarity, diagonality, ...).
inline constexpr double kStructuralEps = 1e-9;
// Default for identities that hold in exact arithmetic.
inline constexpr double kExactEps = 1e-12;

// Absolute tolerance carried by every tolerance-aware predicate.
struct Tolerance {
  double eps = kStructuralEps;

  constexpr Tolerance() = default;
  explicit Tolerance(double e) : eps(e) {
    if (!(e >= 0.0) || !std::isfinite(e)) {
      throw ValidationError("tolerance must be a finite nonnegative number");
    }
  }
};

// ---------------------------------------------------------------------------
// shape helpers

inline void require_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw DimensionError(std::string(what) + ": expected a square matrix, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

inline void require_same_shape(const CMatrix& a, const CMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(what) + ": shape mismatch " + std::to_string(a.rows()) +
                         "x" + std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                         "x" + std::to_string(b.cols()));
  }
}

inline bool all_finite(const CMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Complex z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

// Largest entry modulus; 0 for an empty matrix.
inline double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// constructors for common operators

inline CMatrix identity(Eigen::Index d) { return CMatrix::Identity(d, d); }

inline CMatrix pauli_x() {
  CMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

inline CMatrix pauli_y() {
  CMatrix m(2, 2);
  m << 0.0, -kI, kI, 0.0;
  return m;
}

inline CMatrix pauli_z() {
  CMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

inline CMatrix hadamard() {
  CMatrix m(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  m << s, s, s, -s;
  return m;
}

// CNOT with the first tensor factor as control.
inline CMatrix cnot() {
  CMatrix m = CMatrix::Zero(4, 4);
  m(0, 0) = m(1, 1) = 1.0;
  m(2, 3) = m(3, 2) = 1.0;
  return m;
}

inline CMatrix diag_phases(const std::vector<double>& phases) {
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(phases.size()),
                            static_cast<Eigen::Index>(phases.size()));
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    m(k, k) = std::polar(1.0, phases[i]);
  }
  return m;
}

// E_jk: d x d with a single unit entry at (j, k), both 1-based.
inline CMatrix matrix_unit(Eigen::Index d, Eigen::Index j, Eigen::Index k) {
  if (d < 1 || j < 1 || k < 1 || j > d || k > d) {
    throw DimensionError("matrix_unit: index (" + std::to_string(j) + "," + std::to_string(k) +
                         ") out of range for dimension " + std::to_string(d));
  }
  CMatrix m = CMatrix::Zero(d, d);
  m(j - 1, k - 1) = 1.0;
  return m;
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

// ---------------------------------------------------------------------------
// inner products and norms

// Hilbert-Schmidt product <s, t> = Tr(s t*), conjugate-linear in t.
inline Complex hs_inner(const CMatrix& s, const CMatrix& t) {
  require_same_shape(s, t, "hs_inner");
  return (s.array() * t.array().conjugate()).sum();
}

// Singular values in descending order, length min(rows, cols).
inline std::vector<double> singular_values(const CMatrix& m) {
  if (m.size() == 0) return {};
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

inline double trace_norm(const CMatrix& m) {
  double total = 0.0;
  for (double s : singular_values(m)) total += s;
  return total;
}

// ---------------------------------------------------------------------------
// structural predicates

inline bool is_hermitian(const CMatrix& m, Tolerance tol = Tolerance{}) {
  if (m.rows() != m.cols()) return false;
  return max_abs(m - m.adjoint()) <= tol.eps;
}

inline bool is_unitary(const CMatrix& m, Tolerance tol = Tolerance{}) {
  if (m.rows() != m.cols() || m.rows() == 0) return false;
  return max_abs(m.adjoint() * m - identity(m.rows())) <= tol.eps;
}

inline bool is_diagonal(const CMatrix& m, Tolerance tol = Tolerance{}) {
  if (m.rows() != m.cols()) return false;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (i != j) worst = std::max(worst, std::abs(m(i, j)));
    }
  }
  return worst <= tol.eps;
}

// ---------------------------------------------------------------------------
// Hermitian spectral calculus

struct HermitianEigen {
  Eigen::VectorXd values;  // ascending
  CMatrix vectors;         // columns are eigenvectors
};

inline HermitianEigen hermitian_eigen(const CMatrix& h, Tolerance tol = Tolerance{}) {
  require_square(h, "hermitian_eigen");
  if (!is_hermitian(h, tol)) {
    throw ValidationError("hermitian_eigen: matrix is not Hermitian within " +
                          std::to_string(tol.eps));
  }
  const CMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("hermitian_eigen: eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

// Eigenvalues this close to zero are indistinguishable from rounding noise of
// the eigensolver and are treated as exactly zero by psd_sqrt.
inline double eigen_noise_floor(Eigen::Index d, double scale) {
  return 64.0 * static_cast<double>(d) * std::numeric_limits<double>::epsilon() *
         std::max(1.0, scale);
}

// Principal square root of a PSD matrix. Eigenvalues in [-eps, 0) are clamped
// to zero; anything more negative is an error.
inline CMatrix psd_sqrt(const CMatrix& h, Tolerance tol = Tolerance{}) {
  const HermitianEigen eig = hermitian_eigen(h, tol);
  const Eigen::Index d = h.rows();
  if (d == 0) return h;
  const double scale = eig.values.cwiseAbs().maxCoeff();
  const double floor = eigen_noise_floor(d, scale);
  Eigen::VectorXd roots(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double lambda = eig.values(i);
    if (lambda < -tol.eps) {
      throw NumericalError("psd_sqrt: eigenvalue " + std::to_string(lambda) +
                           " is below -" + std::to_string(tol.eps));
    }
    roots(i) = lambda <= floor ? 0.0 : std::sqrt(lambda);
  }
  return eig.vectors * roots.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
}

// Number of singular values above `threshold`.
inline Eigen::Index numerical_rank(const CMatrix& m, double threshold) {
  Eigen::Index r = 0;
  for (double s : singular_values(m)) {
    if (s > threshold) ++r;
  }
  return r;
}

// ---------------------------------------------------------------------------
// 2x2 matrices in the Pauli basis

// Coefficients (z0, z1, z2, z3) with m = z0 I + z1 X + z2 Y + z3 Z.
using PauliCoefficients = std::array<Complex, 4>;

inline PauliCoefficients pauli_decompose(const CMatrix& m) {
  if (m.rows() != 2 || m.cols() != 2) {
    throw DimensionError("pauli_decompose: expected a 2x2 matrix");
  }
  return {0.5 * (m(0, 0) + m(1, 1)), 0.5 * (m(0, 1) + m(1, 0)),
          0.5 * kI * (m(0, 1) - m(1, 0)), 0.5 * (m(0, 0) - m(1, 1))};
}

inline CMatrix pauli_compose(const PauliCoefficients& z) {
  return z[0] * identity(2) + z[1] * pauli_x() + z[2] * pauli_y() + z[3] * pauli_z();
}

// Closed-form singular values of z0 I + z1 X + z2 Y + z3 Z:
//   s^2 = S +- sqrt(S^2 - D^2),  S = sum |z_k|^2,  D = |z0^2 - z1^2 - z2^2 - z3^2|.
// The smaller root is evaluated as D^2 / (S + sqrt(S^2 - D^2)), which is the
// same radical without the cancellation. Returns (s1, s2) with s1 >= s2.
inline std::pair<double, double> pauli_singular_values(const PauliCoefficients& z,
                                                       Tolerance tol = Tolerance{}) {
  const double s = std::norm(z[0]) + std::norm(z[1]) + std::norm(z[2]) + std::norm(z[3]);
  const double d = std::abs(z[0] * z[0] - z[1] * z[1] - z[2] * z[2] - z[3] * z[3]);
  const double radicand = (s - d) * (s + d);
  if (radicand < -tol.eps * std::max(1.0, s * s)) {
    throw NumericalError("pauli_singular_values: negative inner radicand " +
                         std::to_string(radicand));
  }
  const double inner = std::sqrt(std::max(radicand, 0.0));
  const double big = s + inner;
  const double s1 = std::sqrt(big);
  const double s2 = big > 0.0 ? std::sqrt(d * d / big) : 0.0;
  return {s1, s2};
}

}  // namespace quanprism
