#pragma once

// General phase damping (GPD) channels: rho -> sum_i p_i D_i rho D_i* with
// diagonal unitaries D_i whose first entry is 1, and D_1 = I.

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "quanprism/preservation.hpp"
#include "quanprism/random.hpp"

namespace quanprism {

// Wraps an angle into [0, 2 pi).
inline double wrap_phase(double theta) {
  double w = std::fmod(theta, 2.0 * kPi);
  if (w < 0.0) w += 2.0 * kPi;
  if (w >= 2.0 * kPi) w = 0.0;
  return w;
}

class GPDChannel {
 public:
  // level_phases[i][k] is the phase of D_i on basis level k; level 0 and the
  // whole first branch must be zero.
  GPDChannel(std::vector<double> probs, std::vector<std::vector<double>> level_phases)
      : probs_(std::move(probs)), phases_(std::move(level_phases)) {
    if (probs_.empty() || probs_.size() != phases_.size()) {
      throw ValidationError("GPD: need one phase list per probability");
    }
    const std::size_t d = phases_.front().size();
    if (d < 1 || d > static_cast<std::size_t>(kMaxDim)) throw ValidationError("GPD: bad dimension");
    double total = 0.0;
    for (double p : probs_) {
      if (!(p > 0.0) || !std::isfinite(p)) throw ValidationError("GPD: probabilities must be positive");
      total += p;
    }
    if (std::abs(total - 1.0) > kExactEps) {
      throw ValidationError("GPD: probabilities sum to " + std::to_string(total));
    }
    for (auto& row : phases_) {
      if (row.size() != d) throw ValidationError("GPD: phase lists differ in length");
      for (double& t : row) {
        if (!std::isfinite(t)) throw ValidationError("GPD: non-finite phase");
        t = wrap_phase(t);
      }
      if (std::abs(std::polar(1.0, row[0]) - 1.0) > kExactEps) {
        throw ValidationError("GPD: level 0 must carry phase 0");
      }
      row[0] = 0.0;
    }
    for (double& t : phases_.front()) {
      if (std::abs(std::polar(1.0, t) - 1.0) > kExactEps) {
        throw ValidationError("GPD: the first branch must be the identity");
      }
      t = 0.0;
    }
    const double n = static_cast<double>(probs_.size());
    if (mixing_parameter() > std::pow(1.0 / n, n) * (1.0 + kStructuralEps)) {
      throw ValidationError("GPD: mixing parameter exceeds (1/N)^N");
    }
  }

  Eigen::Index dim() const noexcept { return static_cast<Eigen::Index>(phases_.front().size()); }
  std::size_t size() const noexcept { return probs_.size(); }
  const std::vector<double>& probs() const noexcept { return probs_; }
  const std::vector<std::vector<double>>& level_phases() const noexcept { return phases_; }

  // Relative phase of each branch on a qubit.
  std::vector<double> phases() const {
    if (dim() != 2) throw DimensionError("GPD: phases() needs a qubit channel");
    std::vector<double> out;
    for (const auto& row : phases_) out.push_back(row[1]);
    return out;
  }

  CMatrix d_matrix(std::size_t i) const { return diag_phases(phases_.at(i)); }

  // p = prod_i p_i.
  double mixing_parameter() const {
    double p = 1.0;
    for (double x : probs_) p *= x;
    return p;
  }

  MixedUnitaryChannel to_mixed_unitary() const {
    std::vector<CMatrix> ds;
    for (std::size_t i = 0; i < size(); ++i) ds.push_back(d_matrix(i));
    return MixedUnitaryChannel(probs_, std::move(ds));
  }

  KrausChannel to_kraus() const { return as_kraus(to_mixed_unitary()); }

 private:
  std::vector<double> probs_;
  std::vector<std::vector<double>> phases_;
};

// Qubit GPD with D_i = diag(1, e^{i phases[i]}).
inline GPDChannel make_gpd(const std::vector<double>& probs, const std::vector<double>& phases) {
  if (probs.size() != phases.size()) throw ValidationError("make_gpd: length mismatch");
  std::vector<std::vector<double>> levels;
  for (double t : phases) levels.push_back({0.0, t});
  return GPDChannel(probs, std::move(levels));
}

inline void require_unit_interval(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) throw ValidationError(std::string(what) + " must lie in [0, 1]");
}

// K1 = diag(1, sqrt(1 - lambda)), K2 = diag(0, sqrt(lambda)).
inline KrausChannel phase_damping_kraus(double lambda) {
  require_unit_interval(lambda, "phase damping lambda");
  CMatrix k1 = CMatrix::Zero(2, 2);
  CMatrix k2 = CMatrix::Zero(2, 2);
  k1(0, 0) = 1.0;
  k1(1, 1) = std::sqrt(1.0 - lambda);
  k2(1, 1) = std::sqrt(lambda);
  return KrausChannel({k1, k2});
}

// Phase damping as a GPD: theta = pi, p1 = (1 + sqrt(1 - lambda)) / 2. At
// lambda = 0 the second branch has zero weight and is dropped.
inline GPDChannel from_phase_damping(double lambda) {
  require_unit_interval(lambda, "phase damping lambda");
  const double root = std::sqrt(1.0 - lambda);
  const double p2 = lambda / (2.0 * (1.0 + root));
  if (p2 == 0.0) return make_gpd({1.0}, {0.0});
  return make_gpd({(1.0 + root) / 2.0, p2}, {0.0, kPi});
}

// S1 = [[1, 0], [0, sqrt(1 - eta)]], S2 = [[0, sqrt(eta)], [0, 0]].
inline KrausChannel amplitude_damping(double eta) {
  require_unit_interval(eta, "amplitude damping eta");
  CMatrix s1 = CMatrix::Zero(2, 2);
  CMatrix s2 = CMatrix::Zero(2, 2);
  s1(0, 0) = 1.0;
  s1(1, 1) = std::sqrt(1.0 - eta);
  s2(0, 1) = std::sqrt(eta);
  return KrausChannel({s1, s2});
}

// rho -> (1 - zeta) rho + zeta I / 2 with Kraus operators
// sqrt(1 - 3 zeta / 4) I and sqrt(zeta / 4) times each Pauli matrix.
inline KrausChannel depolarizing(double zeta) {
  if (!(zeta >= 0.0 && zeta <= 4.0 / 3.0)) {
    throw ValidationError("depolarizing zeta must lie in [0, 4/3]");
  }
  const double w = std::sqrt(zeta / 4.0);
  return KrausChannel({std::sqrt(std::max(0.0, 1.0 - 0.75 * zeta)) * identity(2), w * pauli_x(),
                       w * pauli_y(), w * pauli_z()});
}

// ---------------------------------------------------------------------------
// recognition

struct GPDRecognition {
  CMatrix u0;
  GPDChannel gpd;
};

// rho -> u0 GPD(rho) u0*.
inline MixedUnitaryChannel compose_unitary(const CMatrix& u0, const GPDChannel& gpd) {
  std::vector<CMatrix> us;
  for (std::size_t i = 0; i < gpd.size(); ++i) us.push_back(u0 * gpd.d_matrix(i));
  return MixedUnitaryChannel(gpd.probs(), std::move(us));
}

namespace detail {

inline std::optional<GPDRecognition> confirm(const KrausChannel& c, CMatrix u0, GPDChannel gpd) {
  if (choi_distance(as_kraus(compose_unitary(u0, gpd)), c) > kStructuralEps) return std::nullopt;
  return GPDRecognition{std::move(u0), std::move(gpd)};
}

inline std::vector<double> phases_of_diagonal(const CMatrix& d) {
  std::vector<double> out;
  const Complex ref = d(0, 0) / std::abs(d(0, 0));
  for (Eigen::Index k = 0; k < d.rows(); ++k) out.push_back(std::arg(d(k, k) / ref));
  return out;
}

}  // namespace detail

// Mixed unitary channel whose products U_j* U_i are all diagonal: u0 = U_1 and
// D_i = U_1* U_i with its global phase removed so that D_i(0, 0) = 1.
inline std::optional<GPDRecognition> recognize_gpd(const MixedUnitaryChannel& mu,
                                                   Tolerance tol = Tolerance{}) {
  if (!all_diagonal_criterion(mu, tol)) return std::nullopt;
  const CMatrix& u1 = mu.unitary(0);
  std::vector<std::vector<double>> levels;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    levels.push_back(detail::phases_of_diagonal(u1.adjoint() * mu.unitary(i)));
  }
  return detail::confirm(as_kraus(mu), u1, GPDChannel(mu.probs(), std::move(levels)));
}

// Kraus form: the images of |k><k| must be orthogonal pure states, which fixes
// u0 up to column phases; conjugating them away must leave a Schur channel.
// A qubit Schur multiplier with off-diagonal s is written as
// p1 + (1 - p1) e^{-i theta}. In higher dimension the diagonal Kraus operators
// must individually have constant modulus; other mixed unitary Schur channels
// are not detected.
inline std::optional<GPDRecognition> recognize_gpd(const KrausChannel& c,
                                                   Tolerance tol = Tolerance{}) {
  if (!c.is_square()) return std::nullopt;
  if (auto mu = try_mixed_unitary(c, tol)) {
    if (auto r = recognize_gpd(*mu, tol)) return r;
  }
  const Eigen::Index d = c.in_dim();
  CMatrix u1(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const CMatrix e = matrix_unit(d, k + 1, k + 1);
    const HermitianEigen eig = hermitian_eigen(quanprism::apply(c, e), tol);
    if (std::abs(eig.values(d - 1) - 1.0) > tol.eps) return std::nullopt;
    CVector v = eig.vectors.col(d - 1);
    Eigen::Index big = 0;
    v.cwiseAbs().maxCoeff(&big);
    v *= std::abs(v(big)) / v(big);
    u1.col(k) = v;
  }
  if (!is_unitary(u1, tol)) return std::nullopt;

  std::vector<CMatrix> rotated;
  for (const auto& a : c.ops()) rotated.push_back(u1.adjoint() * a);
  const KrausChannel rotated_channel(std::move(rotated), Tolerance{1e-8});
  const auto s = schur_multiplier(rotated_channel, tol);
  if (!s) return std::nullopt;

  if (d == 2) {
    const Complex off = (*s)(0, 1);
    const Complex w = off - 1.0;
    if (std::abs(w) <= tol.eps) return detail::confirm(c, u1, make_gpd({1.0}, {0.0}));
    if (std::abs(std::abs(off) - 1.0) <= tol.eps) {
      CMatrix u0 = u1 * diag_phases({0.0, -std::arg(off)});
      return detail::confirm(c, std::move(u0), make_gpd({1.0}, {0.0}));
    }
    const double tau = -2.0 * w.real() / std::norm(w);
    const double p1 = 1.0 - 1.0 / tau;
    const Complex rotor = 1.0 + w * tau;  // e^{-i theta}
    return detail::confirm(c, u1, make_gpd({p1, 1.0 - p1}, {0.0, -std::arg(rotor)}));
  }

  std::vector<double> probs;
  std::vector<std::vector<double>> levels;
  for (const auto& b : rotated_channel.ops()) {
    if (!is_diagonal(b, tol)) return std::nullopt;
    const double mod = std::abs(b(0, 0));
    for (Eigen::Index k = 0; k < d; ++k)
      if (std::abs(std::abs(b(k, k)) - mod) > tol.eps) return std::nullopt;
    if (mod * mod <= tol.eps) continue;
    probs.push_back(mod * mod);
    levels.push_back(detail::phases_of_diagonal(b));
  }
  // Fold the first branch into u0 so that D_1 = I.
  const CMatrix d1 = diag_phases(levels.front());
  for (auto& row : levels)
    for (std::size_t k = 0; k < row.size(); ++k) row[k] -= levels.front()[k];
  for (std::size_t k = 0; k < levels.front().size(); ++k) levels.front()[k] = 0.0;
  double total = 0.0;
  for (double p : probs) total += p;
  for (double& p : probs) p /= total;
  return detail::confirm(c, u1 * d1, GPDChannel(std::move(probs), std::move(levels)));
}

// ---------------------------------------------------------------------------
// decoherence

// Factor |sum_k p_k e^{-i theta_k}| applied to the off-diagonal entry of a
// qubit density matrix.
inline double coherence_multiplier(const GPDChannel& gpd) {
  if (gpd.dim() != 2) throw DimensionError("coherence_multiplier: qubit GPD required");
  Complex sum{0.0, 0.0};
  const auto phases = gpd.phases();
  for (std::size_t k = 0; k < gpd.size(); ++k) sum += gpd.probs()[k] * std::polar(1.0, -phases[k]);
  return std::min(1.0, std::abs(sum));
}

// Maximally coherent qubit state (|0> + |1>)(<0| + <1|) / 2.
inline CMatrix rho_max_coherent() { return CMatrix::Constant(2, 2, Complex(0.5, 0.0)); }

// |Phi(rho)_{01}| / Tr Phi(rho) for a qubit GPD, by applying the channel.
// Dividing by the trace cancels rounding in the probability sum, so zero
// phases give exactly |rho_{01}|.
inline double output_coherence(const GPDChannel& gpd, const CMatrix& rho) {
  const CMatrix out = quanprism::apply(gpd.to_mixed_unitary(), rho);
  return std::abs(out(0, 1)) / out.trace().real();
}

// Inclusive evenly spaced grid; count = 1 gives just `start`.
struct Grid {
  double start = 0.0;
  double stop = 0.0;
  int count = 0;

  std::vector<double> points() const {
    if (count < 1 || !std::isfinite(start) || !std::isfinite(stop)) {
      throw ValidationError("grid needs a positive point count and finite bounds");
    }
    std::vector<double> out;
    for (int i = 0; i < count; ++i) {
      out.push_back(count == 1 ? start : start + (stop - start) * i / (count - 1));
    }
    return out;
  }
};

struct SweepTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  // Free-form key/value notes written as CSV comments.
  std::vector<std::pair<std::string, std::string>> metadata;
};

// Rank-2 GPD over mixing parameter p = p1 (1 - p1) in [0, 1/4] (larger root
// p1 >= 1/2) and relative phase theta, input rho_m.
inline SweepTable rank2_sweep(const Grid& p_grid, const Grid& theta_grid) {
  SweepTable t;
  t.columns = {"p", "p1", "theta", "coherence"};
  t.metadata = {{"family", "rank2"}, {"root", "p1=(1+sqrt(1-4p))/2"}, {"input", "rho_m"}};
  const auto thetas = theta_grid.points();
  for (double p : p_grid.points()) {
    if (!(p >= 0.0 && p <= 0.25 + kExactEps)) {
      throw ValidationError("rank2 sweep: mixing parameter must lie in [0, 1/4]");
    }
    const double root = std::sqrt(std::max(0.0, 1.0 - 4.0 * p));
    const double p1 = (1.0 + root) / 2.0;
    const double p2 = 2.0 * p / (1.0 + root);
    for (double theta : thetas) {
      const GPDChannel g = p2 > 0.0 ? make_gpd({p1, p2}, {0.0, theta}) : make_gpd({1.0}, {0.0});
      t.rows.push_back({p, p1, theta, output_coherence(g, rho_max_coherent())});
    }
  }
  return t;
}

// Rank-3 GPD with fixed probabilities over (theta2, theta3), input rho_m.
inline SweepTable rank3_sweep(const std::vector<double>& probs, const Grid& theta2_grid,
                              const Grid& theta3_grid) {
  if (probs.size() != 3) throw ValidationError("rank3 sweep: three probabilities required");
  SweepTable t;
  t.columns = {"theta2", "theta3", "coherence"};
  t.metadata = {{"family", "rank3"}, {"input", "rho_m"}};
  const auto t3 = theta3_grid.points();
  for (double a : theta2_grid.points()) {
    for (double b : t3) {
      const GPDChannel g = make_gpd(probs, {0.0, a, b});
      t.rows.push_back({a, b, output_coherence(g, rho_max_coherent())});
    }
  }
  return t;
}

// Formats a double with 12 significant digits.
inline std::string format_real(double x) {
  if (x == 0.0) x = 0.0;  // drops the sign of -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline std::string to_csv(const SweepTable& t) {
  std::string out;
  for (const auto& [k, v] : t.metadata) out += "# " + k + ": " + v + "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_real(row[i]);
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// preserved pairs

struct ProbeReport {
  std::size_t samples = 0;
  // Largest |F_out - F_in| between a sampled superposition and |0> or |1>.
  double anchor_max_deviation = 0.0;
  bool anchors_preserved = false;
  std::size_t preserved_pairs = 0;
  // Smallest |F_out - F_in| seen over the sampled superposition pairs.
  double min_pair_deviation = 0.0;
  std::vector<std::pair<CVector, CVector>> examples;  // first few preserved pairs
};

inline constexpr double kAnchorTol = 1e-10;
inline constexpr double kPairTol = 1e-8;
inline constexpr double kSampleCut = 1e-6;

// Samples random superpositions. Pairs sharing a relative phase are preserved
// by every GPD but form a null set, so random pairs are expected to show a
// fidelity change.
inline ProbeReport preserved_set_probe(const GPDChannel& gpd, std::size_t samples,
                                       std::uint64_t seed = kDefaultSeed) {
  if (gpd.dim() != 2) throw DimensionError("preserved_set_probe: qubit GPD required");
  bool degenerate = true;
  for (double t : gpd.phases())
    if (std::abs(std::polar(1.0, t) - 1.0) > kExactEps) degenerate = false;
  if (degenerate) throw ValidationError("preserved_set_probe: GPD is the identity channel");

  const KrausChannel c = gpd.to_kraus();
  Rng rng(seed);
  auto superposition = [&] {
    for (;;) {
      CVector v = random_unit_vector(2, rng);
      if (std::abs(v(0)) >= kSampleCut && std::abs(v(1)) >= kSampleCut) return v;
    }
  };
  const DensityOperator out0 = quanprism::apply(c, density_of(PureState::basis(2, 0)));
  const DensityOperator out1 = quanprism::apply(c, density_of(PureState::basis(2, 1)));

  ProbeReport rep;
  rep.samples = samples;
  rep.min_pair_deviation = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < samples; ++n) {
    const PureState phi(superposition());
    const DensityOperator out = quanprism::apply(c, density_of(phi));
    const double d0 = std::abs(fidelity(out0, out) - std::abs(phi(0)));
    const double d1 = std::abs(fidelity(out1, out) - std::abs(phi(1)));
    rep.anchor_max_deviation = std::max({rep.anchor_max_deviation, d0, d1});

    PureState psi(superposition());
    while (std::abs(inner(phi, psi)) < kSampleCut) psi = PureState(superposition());
    const double f_in = fidelity_pure(phi, psi);
    const double f_out = fidelity(out, quanprism::apply(c, density_of(psi)));
    const double dev = std::abs(f_out - f_in);
    rep.min_pair_deviation = std::min(rep.min_pair_deviation, dev);
    if (dev <= kPairTol) {
      ++rep.preserved_pairs;
      if (rep.examples.size() < 10) rep.examples.emplace_back(phi.amplitudes(), psi.amplitudes());
    }
  }
  if (samples == 0) rep.min_pair_deviation = 0.0;
  rep.anchors_preserved = rep.anchor_max_deviation <= kAnchorTol;
  return rep;
}

}  // namespace quanprism
