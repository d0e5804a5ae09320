#pragma once

// Channel construction, application, Choi matrices, complementary channels,
// Kraus-representation equivalence and tensor composition.

#include <algorithm>
#include <numeric>
#include <optional>
#include <set>
#include <utility>

#include "quanprism/channel_types.hpp"
#include "quanprism/states.hpp"

namespace quanprism {

// ---------------------------------------------------------------------------
// conversions

inline KrausChannel as_kraus(const MixedUnitaryChannel& mu) {
  std::vector<CMatrix> ops;
  ops.reserve(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) ops.push_back(std::sqrt(mu.prob(i)) * mu.unitary(i));
  return KrausChannel(std::move(ops));
}

// Reads a Kraus list as a mixed unitary channel when every operator is a
// multiple of a unitary (A_i* A_i = c_i I). Zero operators are dropped.
inline std::optional<MixedUnitaryChannel> try_mixed_unitary(const KrausChannel& c,
                                                            Tolerance tol = Tolerance{}) {
  if (!c.is_square()) return std::nullopt;
  const Eigen::Index d = c.in_dim();
  std::vector<double> probs;
  std::vector<CMatrix> unitaries;
  for (const auto& a : c.ops()) {
    const CMatrix gram = a.adjoint() * a;
    const double weight = gram.trace().real() / static_cast<double>(d);
    if (weight <= tol.eps) continue;
    if (max_abs(gram - weight * identity(d)) > tol.eps) return std::nullopt;
    probs.push_back(weight);
    unitaries.push_back(a / std::sqrt(weight));
  }
  const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
  for (auto& p : probs) p /= total;
  try {
    return MixedUnitaryChannel(std::move(probs), std::move(unitaries), tol);
  } catch (const ValidationError&) {
    return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// application

inline CMatrix apply(const KrausChannel& c, const CMatrix& x) {
  if (x.rows() != c.in_dim() || x.cols() != c.in_dim()) {
    throw DimensionError("apply: operand is " + std::to_string(x.rows()) + "x" +
                         std::to_string(x.cols()) + ", channel input dimension is " +
                         std::to_string(c.in_dim()));
  }
  CMatrix out = CMatrix::Zero(c.out_dim(), c.out_dim());
  for (const auto& a : c.ops()) out.noalias() += a * x * a.adjoint();
  return out;
}

inline DensityOperator apply(const KrausChannel& c, const DensityOperator& rho) {
  CMatrix out = apply(c, rho.matrix());
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityOperator(std::move(out));
}

inline CMatrix apply(const MixedUnitaryChannel& mu, const CMatrix& x) {
  if (x.rows() != mu.dim() || x.cols() != mu.dim()) {
    throw DimensionError("apply: operand does not match channel dimension");
  }
  CMatrix out = CMatrix::Zero(mu.dim(), mu.dim());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    out.noalias() += mu.prob(i) * (mu.unitary(i) * x * mu.unitary(i).adjoint());
  }
  return out;
}

inline DensityOperator apply(const MixedUnitaryChannel& mu, const DensityOperator& rho) {
  CMatrix out = apply(mu, rho.matrix());
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityOperator(std::move(out));
}

// ---------------------------------------------------------------------------
// Choi matrices and equality

// J = sum_ij E_ij (x) Phi(E_ij); row/column index is input * out_dim + output.
inline CMatrix choi(const KrausChannel& c) {
  const Eigen::Index din = c.in_dim();
  const Eigen::Index dout = c.out_dim();
  CMatrix j = CMatrix::Zero(din * dout, din * dout);
  CVector v(din * dout);
  for (const auto& a : c.ops()) {
    for (Eigen::Index i = 0; i < din; ++i)
      for (Eigen::Index r = 0; r < dout; ++r) v(i * dout + r) = a(r, i);
    j.noalias() += v * v.adjoint();
  }
  return j;
}

inline double choi_distance(const KrausChannel& c1, const KrausChannel& c2) {
  if (c1.in_dim() != c2.in_dim() || c1.out_dim() != c2.out_dim()) {
    throw DimensionError("choi_distance: channels have different dimensions");
  }
  return max_abs(choi(c1) - choi(c2));
}

inline bool channels_equal(const KrausChannel& c1, const KrausChannel& c2,
                           Tolerance tol = Tolerance{}) {
  return choi_distance(c1, c2) <= tol.eps;
}

// Inverse of choi(): Kraus operators from the spectral decomposition of a
// (numerically) PSD Choi matrix.
inline KrausChannel kraus_from_choi(const CMatrix& j, Eigen::Index in_dim, Eigen::Index out_dim,
                                    Tolerance tol = Tolerance{}) {
  if (j.rows() != in_dim * out_dim || j.cols() != in_dim * out_dim) {
    throw DimensionError("kraus_from_choi: Choi matrix has the wrong size");
  }
  const CMatrix herm = 0.5 * (j + j.adjoint());
  const HermitianEigen eig = hermitian_eigen(herm, tol);
  const double floor = eigen_noise_floor(j.rows(), eig.values.cwiseAbs().maxCoeff());
  std::vector<CMatrix> ops;
  for (Eigen::Index k = eig.values.size() - 1; k >= 0; --k) {
    const double lambda = eig.values(k);
    if (lambda < -tol.eps) {
      throw NumericalError("kraus_from_choi: Choi matrix is not positive semidefinite");
    }
    if (lambda <= floor) continue;
    CMatrix a(out_dim, in_dim);
    for (Eigen::Index i = 0; i < in_dim; ++i)
      for (Eigen::Index r = 0; r < out_dim; ++r)
        a(r, i) = std::sqrt(lambda) * eig.vectors(i * out_dim + r, k);
    ops.push_back(std::move(a));
  }
  if (ops.empty()) throw NumericalError("kraus_from_choi: Choi matrix is zero");
  return KrausChannel(std::move(ops), tol);
}

// ---------------------------------------------------------------------------
// complementary channel

// Psi(x) = sum_{j,k} sqrt(p_j p_k) <U_k* U_j, x> E_jk for any d x d operand x.
inline CMatrix complementary_apply(const MixedUnitaryChannel& mu, const CMatrix& x) {
  if (x.rows() != mu.dim() || x.cols() != mu.dim()) {
    throw DimensionError("complementary_apply: operand does not match channel dimension");
  }
  const auto n = static_cast<Eigen::Index>(mu.size());
  CMatrix out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto jj = static_cast<std::size_t>(j);
      const auto kk = static_cast<std::size_t>(k);
      const CMatrix prod = mu.unitary(kk).adjoint() * mu.unitary(jj);
      out(j, k) = std::sqrt(mu.prob(jj) * mu.prob(kk)) * hs_inner(prod, x);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// representation equivalence

// Finds u with a_i = sum_j u_ij b_j and u* u = I, or nothing when the two lists
// describe different channels.
//
// The shorter list is padded with zero operators so both have K = max(r, m)
// entries and u is K x K unitary; rows index the (padded) a-list, columns the
// (padded) b-list. With vec(a_i), vec(b_j) as columns of A and B the relation
// reads A = B u^T. The part of u^T on the row space of A is the least-squares
// solution B^+ A (singular values of B below 1e-10 count as zero); the rest
// maps ker A isometrically onto ker B.
inline std::optional<CMatrix> kraus_equivalent(const std::vector<CMatrix>& a_ops,
                                               const std::vector<CMatrix>& b_ops,
                                               Tolerance tol = Tolerance{}) {
  if (a_ops.empty() || b_ops.empty()) {
    throw ValidationError("kraus_equivalent: operator lists must be nonempty");
  }
  const Eigen::Index rows = a_ops.front().rows();
  const Eigen::Index cols = a_ops.front().cols();
  auto check = [&](const CMatrix& m) {
    if (m.rows() != rows || m.cols() != cols) {
      throw DimensionError("kraus_equivalent: operators have inconsistent shapes");
    }
  };
  std::for_each(a_ops.begin(), a_ops.end(), check);
  std::for_each(b_ops.begin(), b_ops.end(), check);

  const auto k = static_cast<Eigen::Index>(std::max(a_ops.size(), b_ops.size()));
  const Eigen::Index len = rows * cols;
  auto stack = [&](const std::vector<CMatrix>& ops) {
    CMatrix m = CMatrix::Zero(len, k);
    for (std::size_t i = 0; i < ops.size(); ++i) {
      m.col(static_cast<Eigen::Index>(i)) = Eigen::Map<const CVector>(ops[i].data(), len);
    }
    return m;
  };
  const CMatrix a = stack(a_ops);
  const CMatrix b = stack(b_ops);

  // Same channel iff A A* = B B* (a reindexed Choi matrix).
  if (max_abs(a * a.adjoint() - b * b.adjoint()) > tol.eps) return std::nullopt;

  constexpr double kRankCut = 1e-10;
  Eigen::JacobiSVD<CMatrix> svd_a(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::JacobiSVD<CMatrix> svd_b(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
  auto rank_of = [](const Eigen::VectorXd& s) {
    Eigen::Index r = 0;
    while (r < s.size() && s(r) > kRankCut) ++r;
    return r;
  };
  const Eigen::Index rank_a = rank_of(svd_a.singularValues());
  const Eigen::Index rank_b = rank_of(svd_b.singularValues());
  if (rank_a != rank_b) return std::nullopt;

  const Eigen::VectorXd& sb = svd_b.singularValues();
  CMatrix b_pinv = CMatrix::Zero(k, len);
  for (Eigen::Index i = 0; i < rank_b; ++i) {
    b_pinv.noalias() += svd_b.matrixV().col(i) * (svd_b.matrixU().col(i).adjoint() / sb(i));
  }
  CMatrix ut = b_pinv * a;
  const Eigen::Index nullity = k - rank_a;
  if (nullity > 0) {
    ut += svd_b.matrixV().rightCols(nullity) * svd_a.matrixV().rightCols(nullity).adjoint();
  }
  CMatrix u = ut.transpose();

  if (max_abs(u.adjoint() * u - identity(k)) > tol.eps) return std::nullopt;
  if (max_abs(b * u.transpose() - a) > tol.eps) return std::nullopt;
  return u;
}

// ---------------------------------------------------------------------------
// composition

inline KrausChannel tensor(const KrausChannel& c1, const KrausChannel& c2) {
  std::vector<CMatrix> ops;
  ops.reserve(c1.size() * c2.size());
  for (const auto& a : c1.ops())
    for (const auto& b : c2.ops()) ops.push_back(kron(a, b));
  return KrausChannel(std::move(ops));
}

// Maximum number of branches n_consecutive() will enumerate.
inline constexpr std::size_t kMaxBranches = 4096;

// n uses of the same channel on n systems: probabilities p_{i1}...p_{in},
// unitaries U_{i1} (x) ... (x) U_{in}, with i1 the slowest-varying index.
inline MixedUnitaryChannel n_consecutive(const MixedUnitaryChannel& mu, int n) {
  if (n < 1) throw ValidationError("n_consecutive: n must be positive");
  double dim = 1.0;
  double branches = 1.0;
  for (int i = 0; i < n; ++i) {
    dim *= static_cast<double>(mu.dim());
    branches *= static_cast<double>(mu.size());
  }
  if (dim > static_cast<double>(kMaxDim) || branches > static_cast<double>(kMaxBranches)) {
    throw CapacityError("n_consecutive: " + std::to_string(n) +
                        " uses exceed the dense size budget");
  }
  std::vector<double> probs = mu.probs();
  std::vector<CMatrix> unitaries = mu.unitaries();
  for (int step = 1; step < n; ++step) {
    std::vector<double> next_p;
    std::vector<CMatrix> next_u;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      for (std::size_t j = 0; j < mu.size(); ++j) {
        next_p.push_back(probs[i] * mu.prob(j));
        next_u.push_back(kron(unitaries[i], mu.unitary(j)));
      }
    }
    probs = std::move(next_p);
    unitaries = std::move(next_u);
  }
  return MixedUnitaryChannel(std::move(probs), std::move(unitaries));
}

// Two-qubit channel with Kraus operators (E_i (x) E_j) CNOT, where
// E_0 = sqrt(1 - lambda) I and E_1 = sqrt(lambda) Z.
inline KrausChannel controlled_phase_damping(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ValidationError("controlled_phase_damping: lambda must lie in [0, 1]");
  }
  const CMatrix e[2] = {std::sqrt(1.0 - lambda) * identity(2), std::sqrt(lambda) * pauli_z()};
  std::vector<CMatrix> ops;
  for (const auto& ei : e)
    for (const auto& ej : e) ops.push_back(kron(ei, ej) * cnot());
  return KrausChannel(std::move(ops));
}

struct FactorizationResult {
  bool factorizable = false;
  // Second over first operator-Schmidt coefficient of the reordered Choi matrix.
  double schmidt_ratio = 0.0;
  // Present when factorizable: channels whose tensor product reproduces the input.
  std::optional<std::pair<KrausChannel, KrausChannel>> factors;
  double reconstruction_error = 0.0;
};

inline constexpr double kProductThreshold = 1e-7;

// Decides whether a channel on C^{d1} (x) C^{d2} is a tensor product of
// channels on the two factors. The Choi matrix is regrouped so that a product
// channel becomes the rank-one matrix vec(J1) vec(J2)^T and its operator-Schmidt
// spectrum is inspected.
inline FactorizationResult tensor_factorization_check(const KrausChannel& c, Eigen::Index d1,
                                                      Eigen::Index d2) {
  if (!c.is_square() || d1 < 1 || d2 < 1 || d1 * d2 != c.in_dim()) {
    throw DimensionError("tensor_factorization_check: dimension " + std::to_string(c.in_dim()) +
                         " does not factor as " + std::to_string(d1) + "*" + std::to_string(d2));
  }
  const Eigen::Index d = d1 * d2;
  const CMatrix j = choi(c);
  const Eigen::Index n1 = d1 * d1;
  const Eigen::Index n2 = d2 * d2;
  CMatrix r(n1 * n1, n2 * n2);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index jj = 0; jj < d; ++jj)
        for (Eigen::Index b = 0; b < d; ++b) {
          const Eigen::Index i1 = i / d2, i2 = i % d2;
          const Eigen::Index a1 = a / d2, a2 = a % d2;
          const Eigen::Index j1 = jj / d2, j2 = jj % d2;
          const Eigen::Index b1 = b / d2, b2 = b % d2;
          const Eigen::Index row = (i1 * d1 + a1) * n1 + (j1 * d1 + b1);
          const Eigen::Index col = (i2 * d2 + a2) * n2 + (j2 * d2 + b2);
          r(row, col) = j(i * d + a, jj * d + b);
        }

  Eigen::JacobiSVD<CMatrix> svd(r, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  FactorizationResult result;
  result.schmidt_ratio = s.size() > 1 && s(0) > 0.0 ? s(1) / s(0) : 0.0;
  result.factorizable = result.schmidt_ratio <= kProductThreshold;
  if (!result.factorizable) return result;

  auto reshape = [](const CVector& v, Eigen::Index n) {
    CMatrix m(n, n);
    for (Eigen::Index x = 0; x < n; ++x)
      for (Eigen::Index y = 0; y < n; ++y) m(x, y) = v(x * n + y);
    return m;
  };
  CMatrix j1 = reshape(svd.matrixU().col(0), n1);
  CMatrix j2 = reshape(svd.matrixV().col(0).conjugate(), n2);
  // Fix the split of the scalar s(0) by Tr J1 = d1 (trace preservation).
  const Complex t1 = j1.trace();
  j1 *= static_cast<double>(d1) / t1;
  j2 *= s(0) * t1 / static_cast<double>(d1);

  constexpr double kFactorTol = 1e-6;
  KrausChannel f1 = kraus_from_choi(j1, d1, d1, Tolerance{kFactorTol});
  KrausChannel f2 = kraus_from_choi(j2, d2, d2, Tolerance{kFactorTol});
  result.reconstruction_error = max_abs(choi(tensor(f1, f2)) - j);
  result.factors.emplace(std::move(f1), std::move(f2));
  return result;
}

// Sub-channel on a subset of branches (0-based indices) with probabilities
// renormalized to sum to one.
inline MixedUnitaryChannel local_operation(const MixedUnitaryChannel& mu,
                                           const std::vector<std::size_t>& subset) {
  if (subset.empty()) throw ValidationError("local_operation: subset is empty");
  std::set<std::size_t> seen;
  double mass = 0.0;
  for (auto k : subset) {
    if (k >= mu.size()) throw ValidationError("local_operation: branch index out of range");
    if (!seen.insert(k).second) throw ValidationError("local_operation: repeated branch index");
    mass += mu.prob(k);
  }
  std::vector<double> probs;
  std::vector<CMatrix> unitaries;
  for (auto k : subset) {
    probs.push_back(mu.prob(k) / mass);
    unitaries.push_back(mu.unitary(k));
  }
  return MixedUnitaryChannel(std::move(probs), std::move(unitaries));
}

}  // namespace quanprism
