#pragma once

// Fidelity and distinguishability preservation: a direct numerical check and
// the structural criteria on Kraus products that characterize it.
//
// Basis indices and branch indices are 0-based.

#include <optional>
#include <string>
#include <vector>

#include "quanprism/channels.hpp"

namespace quanprism {

struct PreservationVerdict {
  bool preserved = false;
  double fidelity_in = 0.0;
  double fidelity_out = 0.0;
  std::optional<bool> criterion_holds;
  std::optional<std::string> certificate;
};

// Compares F(phi1, phi2) with F(Phi(phi1), Phi(phi2)).
inline PreservationVerdict preserves_fidelity_direct(const KrausChannel& c, const PureState& phi1,
                                                     const PureState& phi2,
                                                     Tolerance tol = Tolerance{}) {
  if (!c.is_square() || c.in_dim() != phi1.dim() || phi1.dim() != phi2.dim()) {
    throw DimensionError("preserves_fidelity_direct: channel and state dimensions differ");
  }
  PreservationVerdict v;
  v.fidelity_in = fidelity_pure(phi1, phi2);
  v.fidelity_out = fidelity(apply(c, density_of(phi1)), apply(c, density_of(phi2)));
  v.preserved = std::abs(v.fidelity_in - v.fidelity_out) <= tol.eps;
  return v;
}

inline PreservationVerdict preserves_fidelity_direct(const MixedUnitaryChannel& mu,
                                                     const PureState& phi1, const PureState& phi2,
                                                     Tolerance tol = Tolerance{}) {
  return preserves_fidelity_direct(as_kraus(mu), phi1, phi2, tol);
}

// ---------------------------------------------------------------------------
// distinguishable pairs

namespace detail {

inline CMatrix basis_matrix(const std::vector<PureState>& basis, Eigen::Index d, Tolerance tol) {
  if (static_cast<Eigen::Index>(basis.size()) != d) {
    throw ValidationError("basis must have " + std::to_string(d) + " vectors");
  }
  CMatrix b(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const PureState& v = basis[static_cast<std::size_t>(k)];
    if (v.dim() != d) throw DimensionError("basis vector has the wrong dimension");
    b.col(k) = v.amplitudes();
  }
  if (!is_unitary(b, tol)) throw ValidationError("basis is not orthonormal");
  return b;
}

inline std::string pair_label(std::size_t i, std::size_t j) {
  return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

// First branch pair (i, j) for which `ok(B* U_j* U_i B)` fails.
template <class Pred>
std::optional<std::pair<std::size_t, std::size_t>> first_failing_product(
    const MixedUnitaryChannel& mu, const CMatrix& b, Pred ok) {
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (std::size_t j = 0; j < mu.size(); ++j) {
      const CMatrix m = b.adjoint() * mu.unitary(j).adjoint() * mu.unitary(i) * b;
      if (!ok(m)) return std::make_pair(i, j);
    }
  }
  return std::nullopt;
}

}  // namespace detail

// Qubit channel: every U_j* U_i is diagonal in the basis (phi1, phi2).
inline bool diagonal_criterion_qubit(const MixedUnitaryChannel& mu, const PureState& phi1,
                                     const PureState& phi2, Tolerance tol = Tolerance{}) {
  if (mu.dim() != 2) throw DimensionError("diagonal_criterion_qubit: channel is not a qubit channel");
  const CMatrix b = detail::basis_matrix({phi1, phi2}, 2, tol);
  return !detail::first_failing_product(mu, b, [&](const CMatrix& m) {
            return is_diagonal(m, tol);
          }).has_value();
}

inline MixedUnitaryChannel conjugated_channel(const MixedUnitaryChannel& mu, const CMatrix& u0,
                                              Tolerance tol = Tolerance{}) {
  if (u0.rows() != mu.dim() || u0.cols() != mu.dim()) {
    throw DimensionError("conjugated_channel: u0 does not match channel dimension");
  }
  if (!is_unitary(u0, tol)) throw ValidationError("conjugated_channel: u0 is not unitary");
  std::vector<CMatrix> unitaries;
  unitaries.reserve(mu.size());
  for (const auto& u : mu.unitaries()) unitaries.push_back(u0.adjoint() * u * u0);
  return MixedUnitaryChannel(mu.probs(), std::move(unitaries));
}

// A split of the index set into an invariant support S (|S| <= 2) and its
// complement, on which the operator acts as a single phase.
struct TwoLevelPartition {
  std::vector<Eigen::Index> support;
  std::vector<Eigen::Index> complement;
};

// Finds the partition with the smallest support, ties broken by the
// lexicographically smallest complement. Indices are 0-based.
inline std::optional<TwoLevelPartition> is_two_level(const CMatrix& u, Tolerance tol = Tolerance{}) {
  if (!is_unitary(u, tol)) throw ValidationError("is_two_level: matrix is not unitary");
  const Eigen::Index d = u.rows();
  auto check = [&](const std::vector<Eigen::Index>& support) -> std::optional<TwoLevelPartition> {
    std::vector<bool> in_s(static_cast<std::size_t>(d), false);
    for (auto s : support) in_s[static_cast<std::size_t>(s)] = true;
    std::vector<Eigen::Index> comp;
    for (Eigen::Index k = 0; k < d; ++k)
      if (!in_s[static_cast<std::size_t>(k)]) comp.push_back(k);
    // Off-block entries vanish, and the complement block is a phase times I.
    for (Eigen::Index r = 0; r < d; ++r)
      for (Eigen::Index c = 0; c < d; ++c) {
        const bool rs = in_s[static_cast<std::size_t>(r)];
        const bool cs = in_s[static_cast<std::size_t>(c)];
        if (rs != cs && std::abs(u(r, c)) > tol.eps) return std::nullopt;
        if (!rs && !cs && r != c && std::abs(u(r, c)) > tol.eps) return std::nullopt;
      }
    if (!comp.empty()) {
      const Complex phase = u(comp.front(), comp.front());
      for (auto k : comp)
        if (std::abs(u(k, k) - phase) > tol.eps) return std::nullopt;
    }
    return TwoLevelPartition{support, comp};
  };
  for (Eigen::Index size = 0; size <= std::min<Eigen::Index>(2, d); ++size) {
    std::vector<TwoLevelPartition> found;
    for (Eigen::Index a = 0; a < d; ++a) {
      for (Eigen::Index b = a; b < d; ++b) {
        std::vector<Eigen::Index> support;
        if (size >= 1) support.push_back(a);
        if (size == 2) {
          if (b == a) continue;
          support.push_back(b);
        } else if (b != a) {
          continue;
        }
        if (auto p = check(support)) found.push_back(std::move(*p));
        if (size == 0) break;
      }
      if (size == 0) break;
    }
    if (!found.empty()) {
      return *std::min_element(found.begin(), found.end(), [](const auto& x, const auto& y) {
        return x.complement < y.complement;
      });
    }
  }
  return std::nullopt;
}

// Qutrit channel, basis (phi1, phi2, phi3): every U_j* U_i has zero entries
// at (0,1) and (1,0) in that basis. Such a product is two-level with phi1
// and phi2 in different blocks.
inline bool two_level_criterion_qutrit(const MixedUnitaryChannel& mu,
                                       const std::vector<PureState>& basis,
                                       Tolerance tol = Tolerance{}) {
  if (mu.dim() != 3) throw DimensionError("two_level_criterion_qutrit: channel is not a qutrit channel");
  const CMatrix b = detail::basis_matrix(basis, 3, tol);
  return !detail::first_failing_product(mu, b, [&](const CMatrix& m) {
            return std::abs(m(0, 1)) <= tol.eps && std::abs(m(1, 0)) <= tol.eps &&
                   is_two_level(m, Tolerance{std::max(tol.eps, 1e-8)}).has_value();
          }).has_value();
}

// Every U_j* U_i is diagonal in the standard basis.
inline bool all_diagonal_criterion(const MixedUnitaryChannel& mu, Tolerance tol = Tolerance{}) {
  return !detail::first_failing_product(mu, identity(mu.dim()), [&](const CMatrix& m) {
            return is_diagonal(m, tol);
          }).has_value();
}

// Multiplier S with Phi(x) = S o x (entrywise), when the channel has that form.
inline std::optional<CMatrix> schur_multiplier(const KrausChannel& c, Tolerance tol = Tolerance{}) {
  if (!c.is_square()) return std::nullopt;
  const Eigen::Index d = c.in_dim();
  CMatrix s(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index k = 0; k < d; ++k) {
      CMatrix out = quanprism::apply(c, matrix_unit(d, j + 1, k + 1));
      s(j, k) = out(j, k);
      out(j, k) = 0.0;
      if (max_abs(out) > tol.eps) return std::nullopt;
    }
  }
  return s;
}

inline bool is_schur_channel(const KrausChannel& c, Tolerance tol = Tolerance{}) {
  return schur_multiplier(c, tol).has_value();
}

// Standard-basis subset s: (A_j* A_i)(k, l) = 0 for all i, j (including
// i = j) and all k != l in s.
inline bool subset_criterion(const KrausChannel& c, const std::vector<Eigen::Index>& s,
                             Tolerance tol = Tolerance{}) {
  if (!c.is_square()) throw DimensionError("subset_criterion: channel is not square");
  if (s.size() < 2) throw ValidationError("subset_criterion: subset needs at least two indices");
  std::set<Eigen::Index> seen;
  for (auto k : s) {
    if (k < 0 || k >= c.in_dim()) throw ValidationError("subset_criterion: index out of range");
    if (!seen.insert(k).second) throw ValidationError("subset_criterion: repeated index");
  }
  for (const auto& ai : c.ops()) {
    for (const auto& aj : c.ops()) {
      const CMatrix m = aj.adjoint() * ai;
      for (auto k : s)
        for (auto l : s)
          if (k != l && std::abs(m(k, l)) > tol.eps) return false;
    }
  }
  return true;
}

// Product of qubit channels: the pair |0...00>, |0...01> stays distinguishable
// when the last factor satisfies the qubit diagonal criterion.
inline bool uncorrelated_criterion(const std::vector<MixedUnitaryChannel>& factors,
                                   Tolerance tol = Tolerance{}) {
  if (factors.empty()) throw ValidationError("uncorrelated_criterion: no factors");
  for (const auto& f : factors) {
    if (f.dim() != 2) throw DimensionError("uncorrelated_criterion: factors must be qubit channels");
  }
  return diagonal_criterion_qubit(factors.back(), PureState::basis(2, 0), PureState::basis(2, 1),
                                  tol);
}

// ---------------------------------------------------------------------------
// non-orthogonal pairs

// Below this overlap modulus a pair counts as orthogonal.
inline constexpr double kOrthogonalCut = 1e-12;

struct RelativityValue {
  Complex value{0.0, 0.0};
  bool defined = false;
};

// R_U(phi1, phi2) = <phi1|U|phi2> / <phi1|phi2>.
inline RelativityValue relativity(const CMatrix& u, const PureState& phi1, const PureState& phi2) {
  if (u.rows() != phi1.dim() || u.cols() != phi2.dim() || phi1.dim() != phi2.dim()) {
    throw DimensionError("relativity: operator and state dimensions differ");
  }
  const Complex overlap = inner(phi1, phi2);
  if (std::abs(overlap) < kOrthogonalCut) return {};
  const Complex num = phi1.amplitudes().dot(u * phi2.amplitudes());
  return {num / overlap, true};
}

inline bool is_symmetric_pair(const CMatrix& u, const PureState& phi1, const PureState& phi2,
                              Tolerance tol = Tolerance{}) {
  const RelativityValue r12 = relativity(u, phi1, phi2);
  if (!r12.defined) throw ValidationError("is_symmetric_pair: states are orthogonal");
  const RelativityValue r21 = relativity(u, phi2, phi1);
  return std::abs(r12.value - r21.value) <= tol.eps;
}

// Two-branch channel t U1 . U1* + (1 - t) U2 . U2* preserves the fidelity of a
// non-orthogonal pair iff the pair is symmetric under U = U1* U2 and
// |R_U(phi1, phi2)| <= 1. Then the 2x2 matrix whose trace norm gives the output
// fidelity is Hermitian PSD with unit trace. t plays no role for t in (0, 1);
// at the endpoints the channel is unitary and the answer is always yes.
inline bool rank2_fidelity_criterion(const CMatrix& u1, const CMatrix& u2, double t,
                                     const PureState& phi1, const PureState& phi2,
                                     Tolerance tol = Tolerance{}) {
  if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("rank2_fidelity_criterion: t outside [0, 1]");
  if (!is_unitary(u1, tol) || !is_unitary(u2, tol)) {
    throw ValidationError("rank2_fidelity_criterion: operators must be unitary");
  }
  const CMatrix u = u1.adjoint() * u2;
  const RelativityValue r12 = relativity(u, phi1, phi2);
  if (!r12.defined) throw ValidationError("rank2_fidelity_criterion: states are orthogonal");
  if (t == 0.0 || t == 1.0) return true;
  const RelativityValue r21 = relativity(u, phi2, phi1);
  return std::abs(r12.value - r21.value) <= tol.eps && std::abs(r12.value) <= 1.0 + tol.eps;
}

// Every two-branch sub-channel must pass rank2_fidelity_criterion for the whole
// channel to preserve the pair's fidelity.
inline bool rankN_necessary_condition(const MixedUnitaryChannel& mu, const PureState& phi1,
                                      const PureState& phi2, Tolerance tol = Tolerance{}) {
  if (!relativity(identity(mu.dim()), phi1, phi2).defined) {
    throw ValidationError("rankN_necessary_condition: states are orthogonal");
  }
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = i + 1; j < mu.size(); ++j)
      if (!rank2_fidelity_criterion(mu.unitary(i), mu.unitary(j), 0.5, phi1, phi2, tol)) {
        return false;
      }
  return true;
}

// |c|^2 + |d|^2 <= 2 and 2|c - d*| = ||c|^2 - |d|^2|.
inline bool unit_conjugate_test(Complex c, Complex d, Tolerance tol = Tolerance{}) {
  const double sum = std::norm(c) + std::norm(d);
  const double lhs = 2.0 * std::abs(c - std::conj(d));
  const double rhs = std::abs(std::norm(c) - std::norm(d));
  return sum <= 2.0 + tol.eps && std::abs(lhs - rhs) <= tol.eps;
}

}  // namespace quanprism
