#pragma once

// Pure states, density operators, fidelity, purification and partial trace.
//
// Composite spaces H (x) Z use system-major flat indexing: the basis vector
// |i> (x) |k> sits at index i * N + k, where N = dim Z. The ancilla basis
// |k> is 0-based here (the usual textbook labelling starts at 1).

#include <algorithm>

#include "quanprism/channel_types.hpp"
#include "quanprism/numerics.hpp"

namespace quanprism {

// Unit vector in C^d.
class PureState {
 public:
  explicit PureState(CVector amplitudes, Tolerance tol = Tolerance{})
      : amps_(std::move(amplitudes)) {
    if (amps_.size() == 0) throw ValidationError("PureState: empty amplitude list");
    if (!all_finite(amps_)) throw ValidationError("PureState: non-finite amplitude");
    const double norm2 = amps_.squaredNorm();
    if (std::abs(norm2 - 1.0) > tol.eps) {
      throw ValidationError("PureState: squared norm is " + std::to_string(norm2));
    }
  }

  // Rescales a nonzero vector to unit norm.
  static PureState normalized(const CVector& v) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
      throw ValidationError("PureState: cannot normalize a zero or non-finite vector");
    }
    return PureState(v / n);
  }

  // Computational basis vector |k>, 0-based.
  static PureState basis(Eigen::Index d, Eigen::Index k) {
    if (k < 0 || k >= d) throw DimensionError("PureState::basis: index out of range");
    CVector v = CVector::Zero(d);
    v(k) = 1.0;
    return PureState(std::move(v));
  }

  Eigen::Index dim() const noexcept { return amps_.size(); }
  const CVector& amplitudes() const noexcept { return amps_; }
  Complex operator()(Eigen::Index k) const { return amps_(k); }

 private:
  CVector amps_;
};

// Hermitian, positive semidefinite, unit trace.
class DensityOperator {
 public:
  explicit DensityOperator(CMatrix m, Tolerance tol = Tolerance{}) : m_(std::move(m)) {
    require_square(m_, "DensityOperator");
    if (m_.rows() == 0) throw ValidationError("DensityOperator: empty matrix");
    if (!all_finite(m_)) throw ValidationError("DensityOperator: non-finite entry");
    if (!is_hermitian(m_, tol)) throw ValidationError("DensityOperator: not Hermitian");
    const Complex tr = m_.trace();
    if (std::abs(tr - 1.0) > tol.eps) {
      throw ValidationError("DensityOperator: trace is " + std::to_string(tr.real()));
    }
    const double lowest = hermitian_eigen(m_, tol).values.minCoeff();
    if (lowest < -tol.eps) {
      throw ValidationError("DensityOperator: negative eigenvalue " + std::to_string(lowest));
    }
  }

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const CMatrix& matrix() const noexcept { return m_; }

 private:
  CMatrix m_;
};

// Vector on H (x) Z whose ancilla partial trace is a channel output.
struct Purification {
  PureState vector;
  Eigen::Index system_dim;
  Eigen::Index ancilla_dim;
};

enum class Subsystem { system, ancilla };

struct CompositeDims {
  Eigen::Index system;
  Eigen::Index ancilla;
};

// <phi1|phi2>, conjugate-linear in the first argument.
inline Complex inner(const PureState& phi1, const PureState& phi2) {
  if (phi1.dim() != phi2.dim()) throw DimensionError("inner: state dimensions differ");
  return phi1.amplitudes().dot(phi2.amplitudes());
}

// Equality up to a global phase: |<phi1|phi2>| = 1.
inline bool same_up_to_phase(const PureState& phi1, const PureState& phi2,
                             Tolerance tol = Tolerance{}) {
  return phi1.dim() == phi2.dim() && std::abs(std::abs(inner(phi1, phi2)) - 1.0) <= tol.eps;
}

inline DensityOperator density_of(const PureState& phi) {
  const CVector& v = phi.amplitudes();
  CMatrix m = v * v.adjoint();
  // Exact Hermitian symmetry; the trace is 1 up to the state's own norm error.
  m = 0.5 * (m + m.adjoint()).eval();
  return DensityOperator(std::move(m));
}

inline double fidelity_pure(const PureState& phi1, const PureState& phi2) {
  return std::min(1.0, std::abs(inner(phi1, phi2)));
}

// F(rho1, rho2) = || sqrt(rho1) sqrt(rho2) ||_1, clamped to [0, 1].
inline double fidelity(const DensityOperator& rho1, const DensityOperator& rho2) {
  if (rho1.dim() != rho2.dim()) throw DimensionError("fidelity: dimension mismatch");
  const CMatrix product = psd_sqrt(rho1.matrix()) * psd_sqrt(rho2.matrix());
  return std::clamp(trace_norm(product), 0.0, 1.0);
}

// Partial trace of an operator on H (x) Z, keeping the named factor. Works on
// arbitrary (not necessarily Hermitian) operators.
inline CMatrix partial_trace(const CMatrix& m, Subsystem keep, CompositeDims dims) {
  require_square(m, "partial_trace");
  const Eigen::Index d = dims.system;
  const Eigen::Index n = dims.ancilla;
  if (d < 1 || n < 1 || d * n != m.rows()) {
    throw DimensionError("partial_trace: dimension " + std::to_string(m.rows()) +
                         " does not factor as " + std::to_string(d) + "*" + std::to_string(n));
  }
  if (keep == Subsystem::system) {
    CMatrix out = CMatrix::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index k = 0; k < n; ++k) out(i, j) += m(i * n + k, j * n + k);
    return out;
  }
  CMatrix out = CMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index l = 0; l < n; ++l)
      for (Eigen::Index i = 0; i < d; ++i) out(k, l) += m(i * n + k, i * n + l);
  return out;
}

inline DensityOperator partial_trace(const DensityOperator& rho, Subsystem keep,
                                     CompositeDims dims) {
  CMatrix reduced = partial_trace(rho.matrix(), keep, dims);
  reduced = 0.5 * (reduced + reduced.adjoint()).eval();
  return DensityOperator(std::move(reduced));
}

// |Psi> = sum_k A_k |phi> (x) |k> for a Kraus list; for a mixed unitary
// channel A_k = sqrt(p_k) U_k.
inline Purification purify(const KrausChannel& channel, const PureState& phi) {
  if (!channel.is_square() || channel.in_dim() != phi.dim()) {
    throw DimensionError("purify: channel and state dimensions differ");
  }
  const Eigen::Index d = channel.out_dim();
  const auto n = static_cast<Eigen::Index>(channel.size());
  CVector psi = CVector::Zero(d * n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const CVector branch = channel.op(static_cast<std::size_t>(k)) * phi.amplitudes();
    for (Eigen::Index i = 0; i < d; ++i) psi(i * n + k) = branch(i);
  }
  return {PureState(std::move(psi)), d, n};
}

inline Purification purify(const MixedUnitaryChannel& channel, const PureState& phi) {
  if (channel.dim() != phi.dim()) {
    throw DimensionError("purify: channel and state dimensions differ");
  }
  const Eigen::Index d = channel.dim();
  const auto n = static_cast<Eigen::Index>(channel.size());
  CVector psi = CVector::Zero(d * n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    const CVector branch =
        std::sqrt(channel.prob(idx)) * (channel.unitary(idx) * phi.amplitudes());
    for (Eigen::Index i = 0; i < d; ++i) psi(i * n + k) = branch(i);
  }
  return {PureState(std::move(psi)), d, n};
}

// Tr_H(|Psi2><Psi1|), an N x N matrix whose trace norm is the fidelity of the
// two reduced system states. Entry (k, l) = <phi1| A_l* A_k |phi2>.
inline CMatrix cross_operator(const Purification& psi1, const Purification& psi2) {
  if (psi1.system_dim != psi2.system_dim || psi1.ancilla_dim != psi2.ancilla_dim) {
    throw DimensionError("cross_operator: purifications live on different spaces");
  }
  const CMatrix outer = psi2.vector.amplitudes() * psi1.vector.amplitudes().adjoint();
  return partial_trace(outer, Subsystem::ancilla, {psi1.system_dim, psi1.ancilla_dim});
}

}  // namespace quanprism
