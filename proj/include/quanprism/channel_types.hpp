#pragma once

// Value types for quantum channels. Operations on them live in channels.hpp.

#include <numeric>
#include <string>
#include <vector>

#include "quanprism/numerics.hpp"

namespace quanprism {

// Completely positive trace-preserving map rho -> sum_i A_i rho A_i*, with
// every A_i of shape out_dim x in_dim.
class KrausChannel {
 public:
  explicit KrausChannel(std::vector<CMatrix> ops, Tolerance tol = Tolerance{})
      : ops_(std::move(ops)) {
    if (ops_.empty()) throw ValidationError("KrausChannel: operator list is empty");
    const Eigen::Index rows = ops_.front().rows();
    const Eigen::Index cols = ops_.front().cols();
    if (rows == 0 || cols == 0) throw ValidationError("KrausChannel: empty operator");
    CMatrix completeness = CMatrix::Zero(cols, cols);
    for (const auto& a : ops_) {
      if (a.rows() != rows || a.cols() != cols) {
        throw DimensionError("KrausChannel: operators have inconsistent shapes");
      }
      if (!all_finite(a)) throw ValidationError("KrausChannel: non-finite entry");
      completeness += a.adjoint() * a;
    }
    const double residual = max_abs(completeness - identity(cols));
    if (residual > tol.eps) {
      throw ValidationError("KrausChannel: sum A_i* A_i deviates from identity by " +
                            std::to_string(residual));
    }
  }

  Eigen::Index in_dim() const noexcept { return ops_.front().cols(); }
  Eigen::Index out_dim() const noexcept { return ops_.front().rows(); }
  bool is_square() const noexcept { return in_dim() == out_dim(); }
  std::size_t size() const noexcept { return ops_.size(); }
  const std::vector<CMatrix>& ops() const noexcept { return ops_; }
  const CMatrix& op(std::size_t i) const { return ops_.at(i); }

 private:
  std::vector<CMatrix> ops_;
};

// Mixed unitary channel rho -> sum_i p_i U_i rho U_i*.
//
// Branches with zero probability are rejected; drop them before constructing.
class MixedUnitaryChannel {
 public:
  MixedUnitaryChannel(std::vector<double> probs, std::vector<CMatrix> unitaries,
                      Tolerance tol = Tolerance{})
      : probs_(std::move(probs)), unitaries_(std::move(unitaries)) {
    if (probs_.empty()) throw ValidationError("MixedUnitaryChannel: no branches");
    if (probs_.size() != unitaries_.size()) {
      throw ValidationError("MixedUnitaryChannel: " + std::to_string(probs_.size()) +
                            " probabilities for " + std::to_string(unitaries_.size()) +
                            " unitaries");
    }
    const Eigen::Index d = unitaries_.front().rows();
    for (std::size_t i = 0; i < probs_.size(); ++i) {
      if (!(probs_[i] > 0.0) || !std::isfinite(probs_[i])) {
        throw ValidationError("MixedUnitaryChannel: probability " + std::to_string(i) +
                              " must be strictly positive");
      }
      const auto& u = unitaries_[i];
      if (u.rows() != d || u.cols() != d) {
        throw DimensionError("MixedUnitaryChannel: unitary " + std::to_string(i) +
                             " has the wrong shape");
      }
      if (!all_finite(u) || !is_unitary(u, tol)) {
        throw ValidationError("MixedUnitaryChannel: operator " + std::to_string(i) +
                              " is not unitary");
      }
    }
    const double total = std::accumulate(probs_.begin(), probs_.end(), 0.0);
    if (std::abs(total - 1.0) > kExactEps) {
      throw ValidationError("MixedUnitaryChannel: probabilities sum to " +
                            std::to_string(total));
    }
  }

  Eigen::Index dim() const noexcept { return unitaries_.front().rows(); }
  std::size_t size() const noexcept { return probs_.size(); }
  const std::vector<double>& probs() const noexcept { return probs_; }
  const std::vector<CMatrix>& unitaries() const noexcept { return unitaries_; }
  double prob(std::size_t i) const { return probs_.at(i); }
  const CMatrix& unitary(std::size_t i) const { return unitaries_.at(i); }

 private:
  std::vector<double> probs_;
  std::vector<CMatrix> unitaries_;
};

}  // namespace quanprism
