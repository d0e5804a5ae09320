#include <gtest/gtest.h>

#include "constructions.hpp"
#include "quanprism/io.hpp"

using namespace quanprism;

namespace {

GPDChannel random_gpd(std::size_t n, Rng& rng) {
  std::vector<double> phases{0.0};
  for (std::size_t i = 1; i < n; ++i) phases.push_back(random_uniform(0.1, 2 * kPi - 0.1, rng));
  return make_gpd(random_probabilities(n, rng), phases);
}

}  // namespace

TEST(GPD, WrapPhase) {
  EXPECT_DOUBLE_EQ(wrap_phase(-kPi / 2), 1.5 * kPi);
  EXPECT_DOUBLE_EQ(wrap_phase(2 * kPi), 0.0);
  EXPECT_NEAR(wrap_phase(5 * kPi), kPi, 1e-12);
}

TEST(GPD, Validation) {
  EXPECT_THROW(make_gpd({0.5, 0.5}, {0.1, kPi}), ValidationError);
  EXPECT_THROW(make_gpd({0.5, 0.4}, {0.0, kPi}), ValidationError);
  EXPECT_THROW(make_gpd({0.5, 0.5}, {0.0}), ValidationError);
  EXPECT_THROW(make_gpd({1.0, 0.0}, {0.0, kPi}), ValidationError);
  EXPECT_THROW(GPDChannel({0.5, 0.5}, {{0.0, 0.0}, {0.3, 1.0}}), ValidationError);
  EXPECT_NO_THROW(make_gpd({0.5, 0.5}, {0.0, kPi}));
  EXPECT_THROW(make_gpd({0.5, 0.5}, {0.0, kPi}).d_matrix(2), std::out_of_range);
  EXPECT_THROW(GPDChannel({1.0}, {{0.0, 0.0, 0.0}}).phases(), DimensionError);
}

TEST(GPD, Accessors) {
  const GPDChannel g = make_gpd({0.2, 0.3, 0.5}, {0.0, -kPi / 2, kPi});
  EXPECT_EQ(g.dim(), 2);
  EXPECT_EQ(g.size(), 3u);
  EXPECT_NEAR(g.phases()[1], 1.5 * kPi, 1e-15);
  EXPECT_NEAR(g.mixing_parameter(), 0.03, 1e-15);
  EXPECT_LE(max_abs(g.d_matrix(2) - pauli_z()), 1e-15);
}

TEST(GPD, StructuralProperties) {
  Rng rng(61);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index d = 2 + trial % 3;
    const std::size_t n = 1 + trial % 4;
    std::vector<std::vector<double>> levels;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> row{0.0};
      for (Eigen::Index k = 1; k < d; ++k) row.push_back(i == 0 ? 0.0 : random_uniform(-kPi, kPi, rng));
      levels.push_back(row);
    }
    const GPDChannel g(random_probabilities(n, rng), levels);
    const MixedUnitaryChannel mu = g.to_mixed_unitary();
    EXPECT_TRUE(all_diagonal_criterion(mu));
    EXPECT_TRUE(is_schur_channel(g.to_kraus()));
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = a + 1; b < d; ++b)
        EXPECT_LE(preserves_fidelity_direct(mu, PureState::basis(d, a), PureState::basis(d, b)).fidelity_out, 1e-9);
  }
}

TEST(GPD, PhaseDampingEquivalence) {
  for (int k = 0; k <= 20; ++k) {
    const double lambda = k / 20.0;
    const GPDChannel g = from_phase_damping(lambda);
    EXPECT_LE(choi_distance(g.to_kraus(), phase_damping_kraus(lambda)), 1e-12) << lambda;
  }
}

TEST(GPD, PhaseDampingKrausRelation) {
  const double lambda = 0.36;
  const GPDChannel g = from_phase_damping(lambda);
  EXPECT_NEAR(g.probs()[0], 0.9, 1e-15);
  const auto u = kraus_equivalent(g.to_kraus().ops(), phase_damping_kraus(lambda).ops());
  ASSERT_TRUE(u.has_value());
  EXPECT_LE(max_abs(u->adjoint() * *u - identity(2)), 1e-8);
  CMatrix expected(2, 2);
  expected << std::sqrt(0.9), std::sqrt(0.1), std::sqrt(0.1), -std::sqrt(0.9);
  EXPECT_LE(max_abs(*u - expected), 1e-8);
}

TEST(GPD, StandardChannelValidation) {
  EXPECT_THROW(phase_damping_kraus(1.1), ValidationError);
  EXPECT_THROW(amplitude_damping(-0.1), ValidationError);
  EXPECT_THROW(depolarizing(1.5), ValidationError);
  const CMatrix out = quanprism::apply(depolarizing(1.0), rho_max_coherent());
  EXPECT_LE(max_abs(out - identity(2) / 2.0), 1e-15);
}

TEST(Recognize, MixedUnitaryRoundTrip) {
  Rng rng(62);
  for (int trial = 0; trial < 40; ++trial) {
    const GPDChannel g = random_gpd(1 + trial % 4, rng);
    const CMatrix w = haar_unitary(2, rng);
    const MixedUnitaryChannel mu = compose_unitary(w, g);
    const auto r = recognize_gpd(mu);
    ASSERT_TRUE(r.has_value());
    EXPECT_LE(choi_distance(as_kraus(compose_unitary(r->u0, r->gpd)), as_kraus(mu)), 1e-9);
    const auto rk = recognize_gpd(as_kraus(mu));
    ASSERT_TRUE(rk.has_value());
    EXPECT_LE(choi_distance(as_kraus(compose_unitary(rk->u0, rk->gpd)), as_kraus(mu)), 1e-9);
  }
}

TEST(Recognize, KrausListsWithoutUnitaryOperators) {
  Rng rng(63);
  for (int trial = 0; trial < 20; ++trial) {
    const GPDChannel g = random_gpd(2 + trial % 3, rng);
    const CMatrix w = haar_unitary(2, rng);
    const KrausChannel base = as_kraus(compose_unitary(w, g));
    const auto n = static_cast<Eigen::Index>(base.size());
    const CMatrix mix = haar_unitary(n, rng);
    std::vector<CMatrix> ops;
    for (Eigen::Index i = 0; i < n; ++i) {
      CMatrix a = CMatrix::Zero(2, 2);
      for (Eigen::Index j = 0; j < n; ++j) a += mix(i, j) * base.op(static_cast<std::size_t>(j));
      ops.push_back(a);
    }
    const auto r = recognize_gpd(KrausChannel(ops));
    ASSERT_TRUE(r.has_value());
    EXPECT_LE(choi_distance(as_kraus(compose_unitary(r->u0, r->gpd)), base), 1e-9);
  }
  const auto pd = recognize_gpd(phase_damping_kraus(0.36));
  ASSERT_TRUE(pd.has_value());
  EXPECT_NEAR(coherence_multiplier(pd->gpd), 0.8, 1e-12);
}

TEST(Recognize, RotatedDephasing) {
  const auto r = recognize_gpd(fixtures::rotated_dephasing());
  ASSERT_TRUE(r.has_value());
  const MixedUnitaryChannel mu = fixtures::rotated_dephasing();
  EXPECT_LE(max_abs(r->u0 - mu.unitary(0)), 1e-12);
  EXPECT_LE(max_abs(r->gpd.d_matrix(1) - diag_phases({0.0, kPi / 2})), 1e-12);
  EXPECT_NEAR(r->gpd.probs()[0], 1.0 / 3, 1e-15);
}

TEST(Recognize, NonDephasingChannels) {
  for (double eta : {0.25, 0.5, 0.75}) EXPECT_FALSE(recognize_gpd(amplitude_damping(eta)).has_value()) << eta;
  for (double zeta : {0.5, 1.0}) EXPECT_FALSE(recognize_gpd(depolarizing(zeta)).has_value()) << zeta;
  EXPECT_FALSE(recognize_gpd(MixedUnitaryChannel({0.5, 0.5}, {identity(2), hadamard()})).has_value());
}

TEST(Recognize, QutritDiagonalKraus) {
  Rng rng(64);
  std::vector<std::vector<double>> levels{{0.0, 0.0, 0.0}, {0.0, 1.0, 2.5}, {0.0, -2.0, 0.7}};
  const GPDChannel g({0.5, 0.3, 0.2}, levels);
  const CMatrix w = haar_unitary(3, rng);
  const KrausChannel k = as_kraus(compose_unitary(w, g));
  const auto r = recognize_gpd(k);
  ASSERT_TRUE(r.has_value());
  EXPECT_LE(choi_distance(as_kraus(compose_unitary(r->u0, r->gpd)), k), 1e-9);
}

TEST(Coherence, MultiplierBoundAndEquality) {
  Rng rng(65);
  for (int trial = 0; trial < 100; ++trial) {
    const GPDChannel g = random_gpd(2 + trial % 3, rng);
    const double m = coherence_multiplier(g);
    EXPECT_LT(m, 1.0);
    EXPECT_NEAR(m, 2.0 * output_coherence(g, rho_max_coherent()), 1e-12);
  }
  EXPECT_DOUBLE_EQ(coherence_multiplier(make_gpd({0.25, 0.25, 0.5}, {0.0, 0.0, 0.0})), 1.0);
  EXPECT_NEAR(coherence_multiplier(make_gpd({0.5, 0.5}, {0.0, kPi})), 0.0, 1e-15);
}

TEST(Sweep, GridPoints) {
  EXPECT_EQ((Grid{0.0, 1.0, 5}.points()), (std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}));
  EXPECT_EQ((Grid{0.3, 1.0, 1}.points()), (std::vector<double>{0.3}));
  EXPECT_THROW((Grid{0.0, 1.0, 0}.points()), ValidationError);
}

TEST(Sweep, Rank2AtPiMatchesClosedForm) {
  const SweepTable t = rank2_sweep(Grid{0.0, 0.25, 51}, Grid{kPi, kPi, 1});
  ASSERT_EQ(t.rows.size(), 51u);
  for (const auto& row : t.rows) {
    EXPECT_NEAR(row[0], row[1] * (1 - row[1]), 1e-12);
    EXPECT_NEAR(row[3], std::abs(2 * row[1] - 1) / 2, 1e-12);
  }
  EXPECT_THROW(rank2_sweep(Grid{0.0, 0.3, 3}, Grid{kPi, kPi, 1}), ValidationError);
}

TEST(Sweep, ZeroPhasesKeepFullCoherence) {
  const SweepTable t2 = rank2_sweep(Grid{0.0, 0.25, 11}, Grid{0.0, 0.0, 1});
  for (const auto& row : t2.rows) EXPECT_EQ(row[3], 0.5);
  const SweepTable t3 = rank3_sweep({0.2, 0.3, 0.5}, Grid{0.0, 0.0, 1}, Grid{0.0, 0.0, 1});
  ASSERT_EQ(t3.rows.size(), 1u);
  EXPECT_EQ(t3.rows[0][2], 0.5);
}

TEST(Sweep, Rank3MatchesClosedForm) {
  const std::vector<double> p{0.2, 0.3, 0.5};
  const SweepTable t = rank3_sweep(p, Grid{0.0, 2 * kPi, 9}, Grid{0.0, 2 * kPi, 7});
  EXPECT_EQ(t.rows.size(), 63u);
  for (const auto& row : t.rows) {
    const Complex s = p[0] + p[1] * std::polar(1.0, -row[0]) + p[2] * std::polar(1.0, -row[1]);
    EXPECT_NEAR(row[2], std::abs(s) / 2, 1e-12);
  }
  EXPECT_THROW(rank3_sweep({0.5, 0.5}, Grid{0.0, 1.0, 2}, Grid{0.0, 1.0, 2}), ValidationError);
}

TEST(Sweep, CsvLayout) {
  const std::string csv = to_csv(rank2_sweep(Grid{0.0, 0.25, 2}, Grid{kPi, kPi, 1}));
  EXPECT_EQ(csv,
            "# family: rank2\n# root: p1=(1+sqrt(1-4p))/2\n# input: rho_m\n"
            "p,p1,theta,coherence\n"
            "0,1,3.14159265359,0.5\n"
            "0.25,0.5,3.14159265359,3.06161699787e-17\n");
  EXPECT_EQ(format_real(-0.0), "0");
  EXPECT_EQ(format_real(1.0 / 3), "0.333333333333");
}

TEST(Probe, AnchorsHoldAndFlaggedPairsShareTheRelativePhase) {
  Rng rng(66);
  for (int trial = 0; trial < 5; ++trial) {
    const ProbeReport r = preserved_set_probe(random_gpd(2 + trial % 3, rng), 2000, kDefaultSeed + trial);
    EXPECT_EQ(r.samples, 2000u);
    EXPECT_TRUE(r.anchors_preserved);
    EXPECT_LE(r.anchor_max_deviation, 1e-10);
    EXPECT_EQ(r.examples.size(), std::min<std::size_t>(r.preserved_pairs, 10));
    EXPECT_EQ(r.preserved_pairs == 0, r.min_pair_deviation > kPairTol);
    for (const auto& [x, y] : r.examples) {
      const double mismatch = std::remainder(std::arg(x(1) / x(0)) - std::arg(y(1) / y(0)), 2 * kPi);
      EXPECT_LT(std::abs(mismatch), 1e-2);
    }
  }
  EXPECT_THROW(preserved_set_probe(make_gpd({1.0}, {0.0}), 10), ValidationError);
  EXPECT_THROW(preserved_set_probe(GPDChannel({1.0}, {{0.0, 0.0, 0.0}}), 10), DimensionError);
}

TEST(Probe, DeviationIsQuadraticNearTheSharedPhaseFamily) {
  const GPDChannel g = make_gpd({0.7, 0.3}, {0.0, kPi});
  const auto dev = [&](double delta) {
    CVector x(2), y(2);
    x << 0.6, 0.8;
    y << 0.8, std::polar(0.6, delta);
    const PreservationVerdict v = preserves_fidelity_direct(g.to_kraus(), PureState(x), PureState(y));
    return v.fidelity_out - v.fidelity_in;
  };
  EXPECT_LE(std::abs(dev(0.0)), 1e-12);
  const double ratio = dev(2e-3) / dev(1e-3);
  EXPECT_NEAR(ratio, 4.0, 0.05);
  EXPECT_LT(dev(1e-4), 1e-8);
}

TEST(Probe, Deterministic) {
  const GPDChannel g = make_gpd({0.6, 0.4}, {0.0, 2.0});
  const ProbeReport a = preserved_set_probe(g, 500, 99);
  const ProbeReport b = preserved_set_probe(g, 500, 99);
  EXPECT_EQ(a.min_pair_deviation, b.min_pair_deviation);
  EXPECT_EQ(a.anchor_max_deviation, b.anchor_max_deviation);
}

TEST(Probe, SharedRelativePhasePairsArePreserved) {
  // (r, c e^{ia}) and (s, c' e^{ia}) with all moduli positive: preserved by
  // every GPD, so sampling must avoid them rather than rule them out.
  Rng rng(67);
  for (int trial = 0; trial < 20; ++trial) {
    const GPDChannel g = random_gpd(3, rng);
    const double a = random_uniform(-kPi, kPi, rng);
    const double r = random_uniform(0.1, 0.9, rng), s = random_uniform(0.1, 0.9, rng);
    CVector x(2), y(2);
    x << r, std::polar(std::sqrt(1 - r * r), a);
    y << s, std::polar(std::sqrt(1 - s * s), a);
    EXPECT_TRUE(preserves_fidelity_direct(g.to_mixed_unitary(), PureState(x), PureState(y)).preserved);
  }
}
