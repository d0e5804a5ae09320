#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace quanprism;

namespace {

GPDChannel random_gpd(std::size_t n, Rng& rng) {
  std::vector<double> phases{0.0};
  for (std::size_t i = 1; i < n; ++i) phases.push_back(random_uniform(-kPi, kPi, rng));
  return make_gpd(random_probabilities(n, rng), phases);
}

Gate random_gate(int n, Rng& rng) {
  static const GateKind kinds[] = {GateKind::ry, GateKind::cry, GateKind::cp,
                                   GateKind::x,  GateKind::cx,  GateKind::h};
  for (;;) {
    const GateKind k = kinds[rng() % 6];
    if (gate_arity(k) == 2 && n < 2) continue;
    Gate g{k, {}, {}};
    if (gate_param_count(k)) g.params.push_back(random_uniform(-kPi, kPi, rng));
    const int a = static_cast<int>(rng() % static_cast<unsigned>(n));
    if (gate_arity(k) == 2) {
      int b = static_cast<int>(rng() % static_cast<unsigned>(n - 1));
      if (b >= a) ++b;
      g.qubits = {a, b};
    } else {
      g.qubits = {a};
    }
    return g;
  }
}

Circuit random_circuit(Rng& rng) {
  Circuit c;
  c.num_qubits = 1 + static_cast<int>(rng() % 4);
  c.target = static_cast<int>(rng() % static_cast<unsigned>(c.num_qubits));
  for (int q = 0; q < c.num_qubits; ++q)
    if (q != c.target) c.ancillas.push_back(q);
  const int len = static_cast<int>(rng() % 12);
  for (int i = 0; i < len; ++i) c.gates.push_back(random_gate(c.num_qubits, rng));
  return c;
}

// Register unitary as a product of gate matrices.
CMatrix register_unitary(const Circuit& c) {
  CMatrix v = identity(Eigen::Index{1} << c.num_qubits);
  for (const auto& g : c.gates) v = gate_matrix(g, c.num_qubits) * v;
  return v;
}

// Kraus operators <a|V|.,0> built from the dense register unitary.
std::vector<CMatrix> kraus_by_projection(const Circuit& c) {
  const CMatrix v = register_unitary(c);
  const int n = c.num_qubits;
  auto bit = [&](int q) { return Eigen::Index{1} << (n - 1 - q); };
  const std::size_t k = c.ancillas.size();
  std::vector<CMatrix> ops;
  for (std::size_t a = 0; a < (std::size_t{1} << k); ++a) {
    CMatrix op = CMatrix::Zero(2, 2);
    Eigen::Index anc = 0;
    for (std::size_t i = 0; i < k; ++i)
      if (a >> (k - 1 - i) & 1) anc |= bit(c.ancillas[i]);
    for (int s = 0; s < 2; ++s)
      for (int t = 0; t < 2; ++t) op(t, s) = v(anc | (t ? bit(c.target) : 0), s ? bit(c.target) : 0);
    ops.push_back(op);
  }
  return ops;
}

}  // namespace

TEST(GateMatrix, Examples) {
  EXPECT_LE(max_abs(gate_matrix({GateKind::ry, {0.0}, {0}}, 1) - identity(2)), 0.0);
  CMatrix ry_pi(2, 2);
  ry_pi << 0.0, -1.0, 1.0, 0.0;
  EXPECT_LE(max_abs(gate_matrix({GateKind::ry, {kPi}, {0}}, 1) - ry_pi), 1e-15);
  EXPECT_LE(max_abs(gate_matrix({GateKind::cp, {0.7}, {0, 1}}, 2) - diag_phases({0.0, 0.0, 0.0, 0.7})), 1e-15);
  EXPECT_LE(max_abs(gate_matrix({GateKind::cx, {}, {0, 1}}, 2) - cnot()), 0.0);
  EXPECT_LE(max_abs(gate_matrix({GateKind::h, {}, {1}}, 2) - kron(identity(2), hadamard())), 1e-15);
  CMatrix cry = identity(4);
  cry.bottomRightCorner(2, 2) = ry_matrix(1.1);
  EXPECT_LE(max_abs(gate_matrix({GateKind::cry, {1.1}, {0, 1}}, 2) - cry), 1e-15);
}

TEST(GateMatrix, ControlBelowTarget) {
  // cx with control q1, target q0 swaps |01> and |11>.
  const CMatrix m = gate_matrix({GateKind::cx, {}, {1, 0}}, 2);
  CMatrix expected = CMatrix::Zero(4, 4);
  expected(0, 0) = expected(2, 2) = expected(1, 3) = expected(3, 1) = 1.0;
  EXPECT_LE(max_abs(m - expected), 0.0);
}

TEST(GateMatrix, UnitaryOnRandomGates) {
  Rng rng(71);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 4;
    const CMatrix m = gate_matrix(random_gate(n, rng), n);
    EXPECT_LE(max_abs(m.adjoint() * m - identity(m.rows())), 1e-12);
  }
}

TEST(GateMatrix, InvalidGates) {
  EXPECT_THROW(gate_matrix({GateKind::cx, {}, {0, 0}}, 2), ValidationError);
  EXPECT_THROW(gate_matrix({GateKind::x, {}, {2}}, 2), ValidationError);
  EXPECT_THROW(gate_matrix({GateKind::ry, {}, {0}}, 1), ValidationError);
  EXPECT_THROW(gate_matrix({GateKind::h, {}, {0, 1}}, 2), ValidationError);
}

TEST(Simulate, MatchesRegisterUnitary) {
  Rng rng(72);
  for (int trial = 0; trial < 50; ++trial) {
    const Circuit c = random_circuit(rng);
    const CVector psi = random_unit_vector(Eigen::Index{1} << c.num_qubits, rng);
    EXPECT_LE(max_abs(simulate(c, psi) - register_unitary(c) * psi), 1e-12);
  }
}

TEST(CircuitToChannel, TrivialCircuits) {
  Circuit empty;
  EXPECT_LE(choi_distance(circuit_to_channel(empty), KrausChannel({identity(2)})), 0.0);
  Circuit flip;
  flip.gates.push_back({GateKind::x, {}, {0}});
  EXPECT_LE(choi_distance(circuit_to_channel(flip), KrausChannel({pauli_x()})), 0.0);
}

TEST(CircuitToChannel, MatchesDenseProjection) {
  Rng rng(73);
  for (int trial = 0; trial < 50; ++trial) {
    const Circuit c = random_circuit(rng);
    const KrausChannel k = circuit_to_channel(c);
    const auto ops = kraus_by_projection(c);
    ASSERT_EQ(k.size(), ops.size());
    for (std::size_t i = 0; i < ops.size(); ++i) EXPECT_LE(max_abs(k.op(i) - ops[i]), 1e-12);
  }
}

TEST(Synth, SingleBranchIsEmpty) {
  const Circuit c = synth_gpd(make_gpd({1.0}, {0.0}));
  EXPECT_TRUE(c.gates.empty());
  EXPECT_LE(choi_distance(circuit_to_channel(c), KrausChannel({identity(2)})), 1e-15);
}

TEST(Synth, TwoBranches) {
  const double q = 0.3, theta = 1.2;
  const GPDChannel g = make_gpd({1 - q, q}, {0.0, theta});
  const Circuit c = synth_gpd(g);
  EXPECT_EQ(c.num_qubits, 2);
  EXPECT_EQ(c.ancillas, std::vector<int>{0});
  ASSERT_EQ(c.gates.size(), 2u);
  EXPECT_EQ(c.gates[0].kind, GateKind::ry);
  EXPECT_NEAR(c.gates[0].params[0], 2 * std::acos(std::sqrt(1 - q)), 1e-12);
  EXPECT_EQ(c.gates[1].kind, GateKind::cp);
  EXPECT_NEAR(c.gates[1].params[0], theta, 1e-12);
  EXPECT_EQ(c.gates[1].qubits, (std::vector<int>{0, 1}));
  EXPECT_LE(max_abs(qp_oracle::choi_by_definition(kraus_by_projection(c)) -
                    qp_oracle::choi_by_definition(g.to_kraus().ops())),
            1e-9);
}

TEST(Synth, RandomRoundTrip) {
  Rng rng(74);
  for (int trial = 0; trial < 100; ++trial) {
    const GPDChannel g = random_gpd(1 + trial % 4, rng);
    const Circuit c = synth_gpd(g);
    const double dist = max_abs(qp_oracle::choi_by_definition(kraus_by_projection(c)) -
                                qp_oracle::choi_by_definition(g.to_kraus().ops()));
    EXPECT_LE(dist, 1e-9) << trial;
  }
}

TEST(Synth, AncillaPreparationProbabilities) {
  Rng rng(75);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + trial % 7;
    const GPDChannel g = random_gpd(n, rng);
    Circuit c = synth_gpd(g);
    // Keep only gates that act on ancillas alone.
    std::erase_if(c.gates, [&](const Gate& gate) {
      return std::find(gate.qubits.begin(), gate.qubits.end(), c.target) != gate.qubits.end();
    });
    CVector zero = CVector::Zero(Eigen::Index{1} << c.num_qubits);
    zero(0) = 1.0;
    const CVector out = simulate(c, zero);
    const auto k = c.ancillas.size();
    for (std::size_t i = 0; i < (std::size_t{1} << k); ++i) {
      const Eigen::Index idx = static_cast<Eigen::Index>(i) << 1;
      const double expected = i < n ? g.probs()[i] : 0.0;
      EXPECT_NEAR(std::norm(out(idx)), expected, 1e-12) << trial << " branch " << i;
    }
  }
}

TEST(Synth, AncillaCount) {
  Rng rng(76);
  const std::pair<std::size_t, std::size_t> cases[] = {{1, 1}, {2, 1}, {3, 2}, {4, 2}, {5, 3}, {8, 3}, {9, 4}};
  for (const auto& [n, k] : cases) {
    const Circuit c = synth_gpd(n == 1 ? make_gpd({1.0}, {0.0}) : random_gpd(n, rng));
    EXPECT_EQ(c.ancillas.size(), k) << n;
  }
  EXPECT_THROW(synth_gpd(GPDChannel({1.0}, {{0.0, 0.0, 0.0}})), DimensionError);
}

TEST(Text, EmitTwoBranchListing) {
  const Circuit c = synth_gpd(make_gpd({0.5, 0.5}, {0.0, kPi}));
  EXPECT_EQ(emit_text(c),
            "qubits 2; target 1; ancilla 0;\n"
            "# ancilla register value i selects branch i; first listed ancilla is most significant\n"
            "ry(1.5707963267949) q0\n"
            "cp(3.14159265358979) q0,q1\n");
  Circuit empty;
  EXPECT_EQ(emit_text(empty), "qubits 1; target 0; ancilla;\n");
}

TEST(Text, RoundTripOnRandomCircuits) {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const Circuit c = random_circuit(rng);
    const std::string text = emit_text(c);
    const Circuit back = parse_text(text);
    EXPECT_EQ(emit_text(back), text);
    EXPECT_EQ(back.num_qubits, c.num_qubits);
    EXPECT_EQ(back.target, c.target);
    EXPECT_EQ(back.ancillas, c.ancillas);
    ASSERT_EQ(back.gates.size(), c.gates.size());
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
      EXPECT_EQ(back.gates[i].kind, c.gates[i].kind);
      EXPECT_EQ(back.gates[i].qubits, c.gates[i].qubits);
      if (!c.gates[i].params.empty()) {
        EXPECT_NEAR(back.gates[i].params[0], c.gates[i].params[0], 1e-14);
      }
    }
  }
}

TEST(Text, SynthesizedCircuitsSurviveTheTextFormat) {
  Rng rng(78);
  for (int trial = 0; trial < 20; ++trial) {
    const GPDChannel g = random_gpd(1 + trial % 4, rng);
    const Circuit back = parse_text(emit_text(synth_gpd(g)));
    EXPECT_LE(choi_distance(circuit_to_channel(back), g.to_kraus()), 1e-9);
  }
}

TEST(Text, AcceptsCommentsAndPiAngles) {
  const Circuit c = parse_text("# comment\n\nqubits 2; target 1; ancilla 0\nry(pi/2) q0  # prep\ncp(-pi) q0, q1\n");
  ASSERT_EQ(c.gates.size(), 2u);
  EXPECT_NEAR(c.gates[0].params[0], kPi / 2, 1e-15);
  EXPECT_NEAR(c.gates[1].params[0], -kPi, 1e-15);
}

namespace {

int parse_error_line(const std::string& src) {
  try {
    parse_text(src);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST(Text, ErrorsCarryLineNumbers) {
  const std::string header = "qubits 2; target 1; ancilla 0;\n";
  EXPECT_EQ(parse_error_line(header + "ry(0.1) q0\nfoo q0\n"), 3);
  EXPECT_EQ(parse_error_line(header + "cx q0,q2\n"), 2);
  EXPECT_EQ(parse_error_line(header + "ry(abc) q0\n"), 2);
  EXPECT_EQ(parse_error_line(header + "ry(0.1 q0\n"), 2);
  EXPECT_EQ(parse_error_line(header + "x q0,q1\n"), 2);
  EXPECT_EQ(parse_error_line(header + "h\n"), 2);
  EXPECT_EQ(parse_error_line(header + "h 0\n"), 2);
  EXPECT_EQ(parse_error_line("\n\nqubits 2; target 1\n"), 3);
  EXPECT_EQ(parse_error_line("qubits 2; target 1; ancilla 1;\n"), 1);
  EXPECT_EQ(parse_error_line("qubits 2; target 1; ancilla 0; extra 3;\n"), 1);
  EXPECT_NE(parse_error_line(""), -1);
}
