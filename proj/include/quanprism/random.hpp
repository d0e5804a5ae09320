#pragma once

// Random states and operators for sampling-based checks. All draws go through
// an explicit engine so results are reproducible from a seed.

#include <cstdint>
#include <random>

#include "quanprism/numerics.hpp"

namespace quanprism {

using Rng = std::mt19937_64;

inline constexpr std::uint64_t kDefaultSeed = 0x5EED;

inline CMatrix random_ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      m(i, j) = Complex(re, im);
    }
  }
  return m;
}

// Haar-distributed unitary via QR of a Ginibre matrix with the phases of R's
// diagonal folded back into Q.
inline CMatrix haar_unitary(Eigen::Index d, Rng& rng) {
  const CMatrix g = random_ginibre(d, d, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * CMatrix::Identity(d, d);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < d; ++k) {
    const double mag = std::abs(r(k, k));
    const Complex phase = mag > 0.0 ? r(k, k) / mag : Complex(1.0);
    q.col(k) *= phase;
  }
  return q;
}

// Uniformly distributed unit vector.
inline CVector random_unit_vector(Eigen::Index d, Rng& rng) {
  CVector v = random_ginibre(d, 1, rng);
  return v / v.norm();
}

// Random point on the probability simplex (flat Dirichlet).
inline std::vector<double> random_probabilities(std::size_t n, Rng& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> p(n);
  double total = 0.0;
  for (auto& x : p) {
    x = expo(rng);
    total += x;
  }
  for (auto& x : p) x /= total;
  return p;
}

inline double random_uniform(double lo, double hi, Rng& rng) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace quanprism
