#pragma once

// Gate-level circuits on a target qubit plus ancillas, their simulation, and a
// synthesis of qubit GPD channels.
//
// Register convention: qubit 0 is the most significant bit of a basis index.

#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "quanprism/angle.hpp"
#include "quanprism/dephasing.hpp"

namespace quanprism {

enum class GateKind { ry, cry, cp, x, cx, h };

struct Gate {
  GateKind kind;
  std::vector<double> params;
  std::vector<int> qubits;  // controls first, target last

  friend bool operator==(const Gate&, const Gate&) = default;
};

inline const char* gate_name(GateKind k) {
  switch (k) {
    case GateKind::ry: return "ry";
    case GateKind::cry: return "cry";
    case GateKind::cp: return "cp";
    case GateKind::x: return "x";
    case GateKind::cx: return "cx";
    case GateKind::h: return "h";
  }
  return "?";
}

inline std::size_t gate_arity(GateKind k) {
  return k == GateKind::cry || k == GateKind::cp || k == GateKind::cx ? 2 : 1;
}

inline std::size_t gate_param_count(GateKind k) {
  return k == GateKind::ry || k == GateKind::cry || k == GateKind::cp ? 1 : 0;
}

inline void validate_gate(const Gate& g, int num_qubits) {
  if (g.qubits.size() != gate_arity(g.kind) || g.params.size() != gate_param_count(g.kind)) {
    throw ValidationError(std::string("gate ") + gate_name(g.kind) + ": wrong operand count");
  }
  for (int q : g.qubits) {
    if (q < 0 || q >= num_qubits) {
      throw ValidationError(std::string("gate ") + gate_name(g.kind) + ": qubit " +
                            std::to_string(q) + " out of range");
    }
  }
  if (g.qubits.size() == 2 && g.qubits[0] == g.qubits[1]) {
    throw ValidationError(std::string("gate ") + gate_name(g.kind) + ": control equals target");
  }
  for (double p : g.params) {
    if (!std::isfinite(p)) throw ValidationError("gate parameter is not finite");
  }
}

struct Circuit {
  int num_qubits = 1;
  int target = 0;
  std::vector<int> ancillas;
  std::vector<Gate> gates;

  friend bool operator==(const Circuit&, const Circuit&) = default;

  void validate() const {
    if (num_qubits < 1) throw ValidationError("circuit: needs at least one qubit");
    if (target < 0 || target >= num_qubits) throw ValidationError("circuit: target out of range");
    std::vector<bool> used(static_cast<std::size_t>(num_qubits), false);
    used[static_cast<std::size_t>(target)] = true;
    for (int a : ancillas) {
      if (a < 0 || a >= num_qubits) throw ValidationError("circuit: ancilla out of range");
      if (used[static_cast<std::size_t>(a)]) {
        throw ValidationError("circuit: ancilla " + std::to_string(a) + " repeated or equal to target");
      }
      used[static_cast<std::size_t>(a)] = true;
    }
    for (const auto& g : gates) validate_gate(g, num_qubits);
  }
};

// ---------------------------------------------------------------------------
// gate matrices

inline CMatrix ry_matrix(double theta) {
  CMatrix m(2, 2);
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  m << c, -s, s, c;
  return m;
}

inline CMatrix phase_matrix(double phi) { return diag_phases({0.0, phi}); }

namespace detail {

// 2x2 operator the gate applies to its last qubit.
inline CMatrix target_operator(const Gate& g) {
  switch (g.kind) {
    case GateKind::ry:
    case GateKind::cry: return ry_matrix(g.params[0]);
    case GateKind::cp: return phase_matrix(g.params[0]);
    case GateKind::x:
    case GateKind::cx: return pauli_x();
    case GateKind::h: return hadamard();
  }
  return identity(2);
}

inline std::size_t bit_of(int qubit, int num_qubits) {
  return std::size_t{1} << (num_qubits - 1 - qubit);
}

// Applies a (possibly controlled) gate in place to a register state vector.
inline void apply_gate(CVector& state, const Gate& g, int num_qubits) {
  const CMatrix u = target_operator(g);
  const std::size_t tbit = bit_of(g.qubits.back(), num_qubits);
  const std::size_t cbit = g.qubits.size() == 2 ? bit_of(g.qubits.front(), num_qubits) : 0;
  const auto dim = static_cast<std::size_t>(state.size());
  for (std::size_t i = 0; i < dim; ++i) {
    if (i & tbit) continue;
    if (cbit && !(i & cbit)) continue;
    const std::size_t j = i | tbit;
    const auto ii = static_cast<Eigen::Index>(i);
    const auto jj = static_cast<Eigen::Index>(j);
    const Complex a = state(ii);
    const Complex b = state(jj);
    state(ii) = u(0, 0) * a + u(0, 1) * b;
    state(jj) = u(1, 0) * a + u(1, 1) * b;
  }
}

}  // namespace detail

inline constexpr int kMaxRegister = 12;

// Full-register unitary of a single gate.
inline CMatrix gate_matrix(const Gate& g, int num_qubits) {
  if (num_qubits < 1 || num_qubits > kMaxRegister) {
    throw CapacityError("gate_matrix: register size " + std::to_string(num_qubits) +
                        " outside [1, " + std::to_string(kMaxRegister) + "]");
  }
  validate_gate(g, num_qubits);
  const Eigen::Index dim = Eigen::Index{1} << num_qubits;
  CMatrix m(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    CVector e = CVector::Zero(dim);
    e(col) = 1.0;
    detail::apply_gate(e, g, num_qubits);
    m.col(col) = e;
  }
  return m;
}

inline CVector simulate(const Circuit& c, CVector state) {
  c.validate();
  if (state.size() != (Eigen::Index{1} << c.num_qubits)) {
    throw DimensionError("simulate: state does not match register size");
  }
  for (const auto& g : c.gates) detail::apply_gate(state, g, c.num_qubits);
  return state;
}

// Channel on the target qubit: Kraus operators <a|V|0...0> over ancilla basis
// states a, with the first listed ancilla as the most significant bit of a.
// Every qubit other than the target must be an ancilla.
inline KrausChannel circuit_to_channel(const Circuit& c) {
  c.validate();
  if (c.num_qubits > kMaxRegister) {
    throw CapacityError("circuit_to_channel: at most " + std::to_string(kMaxRegister) + " qubits");
  }
  if (static_cast<int>(c.ancillas.size()) + 1 != c.num_qubits) {
    throw ValidationError("circuit_to_channel: every non-target qubit must be an ancilla");
  }
  const int n = c.num_qubits;
  const Eigen::Index dim = Eigen::Index{1} << n;
  const std::size_t k = c.ancillas.size();
  const std::size_t tbit = detail::bit_of(c.target, n);
  std::vector<CMatrix> ops(std::size_t{1} << k, CMatrix::Zero(2, 2));
  for (int s = 0; s < 2; ++s) {
    CVector state = CVector::Zero(dim);
    state(static_cast<Eigen::Index>(s ? tbit : 0)) = 1.0;
    for (const auto& g : c.gates) detail::apply_gate(state, g, n);
    for (Eigen::Index idx = 0; idx < dim; ++idx) {
      const auto u = static_cast<std::size_t>(idx);
      std::size_t a = 0;
      for (int q : c.ancillas) a = (a << 1) | ((u & detail::bit_of(q, n)) ? 1 : 0);
      ops[a]((u & tbit) ? 1 : 0, s) = state(idx);
    }
  }
  return KrausChannel(std::move(ops));
}

// ---------------------------------------------------------------------------
// synthesis

namespace detail {

// RY (or phase) on `target` scaled by the AND of `controls`, using
// prod b = 2^{1-m} sum_{S != {}} (-1)^{|S|-1} XOR_{i in S} b_i: each parity is
// collected on the last control of S with a CX ladder.
inline void multi_controlled(std::vector<Gate>& out, GateKind single, GateKind controlled,
                             double angle, const std::vector<int>& controls, int target) {
  const std::size_t m = controls.size();
  if (m == 0) {
    out.push_back({single, {angle}, {target}});
    return;
  }
  const double scale = std::ldexp(1.0, -static_cast<int>(m - 1));
  for (std::size_t mask = 1; mask < (std::size_t{1} << m); ++mask) {
    std::vector<int> subset;
    for (std::size_t i = 0; i < m; ++i)
      if (mask & (std::size_t{1} << i)) subset.push_back(controls[i]);
    const double sign = subset.size() % 2 == 1 ? 1.0 : -1.0;
    const int last = subset.back();
    for (std::size_t i = 0; i + 1 < subset.size(); ++i) out.push_back({GateKind::cx, {}, {subset[i], last}});
    out.push_back({controlled, {sign * angle * scale}, {last, target}});
    for (std::size_t i = subset.size() - 1; i-- > 0;) out.push_back({GateKind::cx, {}, {subset[i], last}});
  }
}

// Conjugates by X on the controls whose required value is 0.
inline void with_pattern(std::vector<Gate>& out, const std::vector<int>& controls,
                         std::size_t pattern, const std::function<void()>& body) {
  const std::size_t m = controls.size();
  auto flip = [&] {
    for (std::size_t i = 0; i < m; ++i)
      if (!((pattern >> (m - 1 - i)) & 1)) out.push_back({GateKind::x, {}, {controls[i]}});
  };
  flip();
  body();
  flip();
}

// Drops adjacent pairs of identical X gates.
inline void cancel_x_pairs(std::vector<Gate>& gates) {
  std::vector<Gate> kept;
  for (auto& g : gates) {
    if (g.kind == GateKind::x && !kept.empty() && kept.back() == g) {
      kept.pop_back();
      continue;
    }
    kept.push_back(std::move(g));
  }
  gates = std::move(kept);
}

}  // namespace detail

inline constexpr double kSynthTol = 1e-9;

// Ancillas 0..k-1 (k = ceil(log2 max(N, 2))), target k. A binary tree of RY
// rotations puts amplitude sqrt(p_i) on ancilla basis state |i>; then each
// branch with nonzero phase gets a phase on the target conditioned on |i>.
inline Circuit synth_gpd(const GPDChannel& gpd) {
  if (gpd.dim() != 2) throw DimensionError("synth_gpd: qubit GPD required");
  const std::size_t n = gpd.size();
  int k = 1;
  while ((std::size_t{1} << k) < n) ++k;
  if (k + 1 > kMaxRegister) throw CapacityError("synth_gpd: too many branches");

  Circuit c;
  c.num_qubits = k + 1;
  c.target = k;
  for (int a = 0; a < k; ++a) c.ancillas.push_back(a);

  std::vector<double> q(std::size_t{1} << k, 0.0);
  std::copy(gpd.probs().begin(), gpd.probs().end(), q.begin());
  for (int level = 0; level < k; ++level) {
    const std::size_t span = std::size_t{1} << (k - level);  // leaves under one node
    std::vector<int> controls(c.ancillas.begin(), c.ancillas.begin() + level);
    for (std::size_t prefix = 0; prefix < (std::size_t{1} << level); ++prefix) {
      double w0 = 0.0, w1 = 0.0;
      for (std::size_t leaf = 0; leaf < span; ++leaf) {
        (leaf < span / 2 ? w0 : w1) += q[prefix * span + leaf];
      }
      if (w1 == 0.0) continue;
      const double angle = 2.0 * std::atan2(std::sqrt(w1), std::sqrt(w0));
      detail::with_pattern(c.gates, controls, prefix, [&] {
        detail::multi_controlled(c.gates, GateKind::ry, GateKind::cry, angle, controls, level);
      });
    }
  }
  const auto phases = gpd.phases();
  for (std::size_t i = 0; i < n; ++i) {
    if (phases[i] == 0.0) continue;
    detail::with_pattern(c.gates, c.ancillas, i, [&] {
      detail::multi_controlled(c.gates, GateKind::cp, GateKind::cp, phases[i], c.ancillas,
                               c.target);
    });
  }
  detail::cancel_x_pairs(c.gates);
  const double dist = choi_distance(circuit_to_channel(c), gpd.to_kraus());
  if (dist > kSynthTol) {
    throw NumericalError("synth_gpd: synthesized circuit misses the channel by " +
                         std::to_string(dist));
  }
  return c;
}

// ---------------------------------------------------------------------------
// text format

inline std::string emit_text(const Circuit& c) {
  c.validate();
  std::string out = "qubits " + std::to_string(c.num_qubits) + "; target " +
                    std::to_string(c.target) + "; ancilla";
  for (std::size_t i = 0; i < c.ancillas.size(); ++i) {
    out += (i ? "," : " ") + std::to_string(c.ancillas[i]);
  }
  out += ";\n";
  if (!c.ancillas.empty()) {
    out += "# ancilla register value i selects branch i; first listed ancilla is most significant\n";
  }
  char buf[40];
  for (const auto& g : c.gates) {
    out += gate_name(g.kind);
    if (!g.params.empty()) {
      std::snprintf(buf, sizeof buf, "(%.15g)", g.params[0]);
      out += buf;
    }
    for (std::size_t i = 0; i < g.qubits.size(); ++i) {
      out += (i ? ",q" : " q") + std::to_string(g.qubits[i]);
    }
    out += "\n";
  }
  return out;
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline int parse_index(const std::string& s, int line) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos || s.size() > 6) {
    throw ParseError("expected a qubit index, got '" + s + "'", line);
  }
  return std::stoi(s);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

inline void parse_header(const std::string& text, Circuit& c, int line) {
  auto fields = split(text, ';');
  if (!fields.empty() && fields.back().empty()) fields.pop_back();
  bool have_qubits = false, have_target = false, have_ancilla = false;
  for (const auto& f : fields) {
    const auto sp = f.find(' ');
    const std::string key = f.substr(0, sp);
    const std::string val = sp == std::string::npos ? "" : trim(f.substr(sp + 1));
    if (key == "qubits" && !have_qubits) {
      c.num_qubits = parse_index(val, line);
      have_qubits = true;
    } else if (key == "target" && !have_target) {
      c.target = parse_index(val, line);
      have_target = true;
    } else if (key == "ancilla" && !have_ancilla) {
      if (!val.empty())
        for (const auto& a : split(val, ',')) c.ancillas.push_back(parse_index(a, line));
      have_ancilla = true;
    } else {
      throw ParseError("unexpected header field '" + f + "'", line);
    }
  }
  if (!have_qubits || !have_target || !have_ancilla) {
    throw ParseError("header must give qubits, target and ancilla", line);
  }
}

inline Gate parse_gate(const std::string& text, int line) {
  const auto sp = text.find_first_of(" \t");
  if (sp == std::string::npos) throw ParseError("gate without operands: '" + text + "'", line);
  std::string head = text.substr(0, sp);
  const std::string operands = trim(text.substr(sp));
  std::string name = head;
  std::vector<double> params;
  if (const auto open = head.find('('); open != std::string::npos) {
    if (head.back() != ')') throw ParseError("unbalanced parenthesis in '" + head + "'", line);
    name = head.substr(0, open);
    try {
      params.push_back(parse_angle(head.substr(open + 1, head.size() - open - 2)));
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line);
    }
  }
  static const std::pair<const char*, GateKind> kinds[] = {
      {"ry", GateKind::ry}, {"cry", GateKind::cry}, {"cp", GateKind::cp},
      {"x", GateKind::x},   {"cx", GateKind::cx},   {"h", GateKind::h}};
  const auto it = std::find_if(std::begin(kinds), std::end(kinds),
                               [&](const auto& kv) { return name == kv.first; });
  if (it == std::end(kinds)) throw ParseError("unknown gate '" + name + "'", line);
  Gate g{it->second, std::move(params), {}};
  for (const auto& q : split(operands, ',')) {
    if (q.size() < 2 || q[0] != 'q') throw ParseError("expected qN operand, got '" + q + "'", line);
    g.qubits.push_back(parse_index(q.substr(1), line));
  }
  if (g.qubits.size() != gate_arity(g.kind) || g.params.size() != gate_param_count(g.kind)) {
    throw ParseError(std::string("wrong operand count for ") + gate_name(g.kind), line);
  }
  return g;
}

}  // namespace detail

inline Circuit parse_text(const std::string& src) {
  Circuit c;
  bool header = false;
  std::istringstream in(src);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = detail::trim(raw.substr(0, raw.find('#')));
    if (text.empty()) continue;
    if (!header) {
      detail::parse_header(text, c, line);
      header = true;
      continue;
    }
    Gate g = detail::parse_gate(text, line);
    for (int q : g.qubits) {
      if (q >= c.num_qubits) throw ParseError("qubit " + std::to_string(q) + " out of range", line);
    }
    c.gates.push_back(std::move(g));
  }
  if (!header) throw ParseError("missing header line", line);
  try {
    c.validate();
  } catch (const ValidationError& e) {
    throw ParseError(e.what(), 1);
  }
  return c;
}

}  // namespace quanprism
