#pragma once

// JSON channel files, named channels and state specifications.
//
// Matrix: {"rows": r, "cols": c, "data": [e00, e01, ...]} in row-major order,
// each entry a number or a [re, im] pair.
// Channel file: {"kind": "mixed_unitary" | "kraus" | "gpd" | "named", ...}.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "quanprism/angle.hpp"
#include "quanprism/dephasing.hpp"

namespace quanprism {

using json = nlohmann::json;

// Structurally malformed input (missing keys, wrong JSON types).
class FormatError : public ParseError {
 public:
  explicit FormatError(const std::string& what) : ParseError(what, 0) {}
};

// ---------------------------------------------------------------------------
// numbers and matrices

// Rounds to 12 significant digits so reports are byte-stable.
inline json report_number(double x) { return std::stod(format_real(x)); }

inline const json& require_key(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing key '") + key + "'");
  return j.at(key);
}

inline double as_real(const json& j, const char* what) {
  if (!j.is_number()) throw FormatError(std::string(what) + " must be a number");
  return j.get<double>();
}

inline Complex as_complex(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw FormatError("complex entries must be a number or a [re, im] pair");
}

// Accepts numbers and pi-expressions such as "pi/2".
inline double as_angle(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_angle(j.get<std::string>());
  throw FormatError("angles must be numbers or strings such as \"pi/2\"");
}

inline CMatrix matrix_from_json(const json& j) {
  const json& rows = require_key(j, "rows");
  const json& cols = require_key(j, "cols");
  const json& data = require_key(j, "data");
  const auto natural = [](const json& n) { return n.is_number_integer() && n.get<long long>() >= 0; };
  if (!natural(rows) || !natural(cols) || !data.is_array()) {
    throw FormatError("matrix needs unsigned rows/cols and a data array");
  }
  const auto r = rows.get<Eigen::Index>();
  const auto c = cols.get<Eigen::Index>();
  if (r < 1 || c < 1 || r > kMaxDim || c > kMaxDim) throw ValidationError("matrix size out of range");
  if (static_cast<Eigen::Index>(data.size()) != r * c) {
    throw FormatError("matrix data has " + std::to_string(data.size()) + " entries, expected " +
                      std::to_string(r * c));
  }
  CMatrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index k = 0; k < c; ++k) m(i, k) = as_complex(data[static_cast<std::size_t>(i * c + k)]);
  return m;
}

inline json matrix_to_json(const CMatrix& m, bool rounded = true) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      const Complex z = m(i, k);
      if (rounded) {
        data.push_back(json::array({report_number(z.real()), report_number(z.imag())}));
      } else {
        data.push_back(json::array({z.real(), z.imag()}));
      }
    }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

// ---------------------------------------------------------------------------
// channels

struct LoadedChannel {
  std::string kind;
  std::string label;
  KrausChannel kraus;
  std::optional<MixedUnitaryChannel> mixed;
  std::optional<GPDChannel> gpd;
};

namespace fixtures {

// Two-branch qubit channel whose products are diagonal; it maps |0> and |1>
// to orthogonal pure states.
inline MixedUnitaryChannel rotated_dephasing() {
  const double s = 1.0 / std::sqrt(2.0);
  CMatrix k1(2, 2), k2(2, 2);
  k1 << s, s * kI, s * kI, s;
  k2 << s, -s, s * kI, s * kI;
  return MixedUnitaryChannel({1.0 / 3.0, 2.0 / 3.0}, {k1, k2});
}

// Two-qubit channel (I rho I + W rho W*) / 2 that keeps |00>, |01>
// distinguishable without being block diagonal.
inline KrausChannel two_qubit_partial_dephasing() {
  const double r2 = std::sqrt(2.0);
  const double h = 1.0 / r2;
  CMatrix a2(4, 4);
  a2 << r2, 0.0, h * (1.0 + kI), h * (1.0 - kI),
        0.0, r2, h * (1.0 - kI), h * (1.0 + kI),
        1.0, 1.0, -1.0, -1.0,
        1.0, -1.0, -kI, kI;
  a2 /= 2.0 * r2;
  return KrausChannel({h * identity(4), a2});
}

// Equal mixture of I, diag(1, i), diag(1, -1).
inline MixedUnitaryChannel three_phase_dephasing() {
  return MixedUnitaryChannel({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0},
                             {identity(2), diag_phases({0.0, kPi / 2.0}), diag_phases({0.0, kPi})});
}

}  // namespace fixtures

inline LoadedChannel from_mixed(std::string kind, std::string label, MixedUnitaryChannel mu) {
  KrausChannel k = as_kraus(mu);
  return {std::move(kind), std::move(label), std::move(k), std::move(mu), std::nullopt};
}

inline LoadedChannel from_kraus(std::string kind, std::string label, KrausChannel k) {
  auto mu = try_mixed_unitary(k);
  return {std::move(kind), std::move(label), std::move(k), std::move(mu), std::nullopt};
}

inline LoadedChannel from_gpd(std::string kind, std::string label, GPDChannel g) {
  LoadedChannel c = from_mixed(std::move(kind), std::move(label), g.to_mixed_unitary());
  c.gpd = std::move(g);
  return c;
}

inline LoadedChannel named_channel(const std::string& name, std::optional<double> param) {
  auto need = [&]() {
    if (!param) throw FormatError("named channel '" + name + "' needs a 'param'");
    return *param;
  };
  if (name == "phase_damping") {
    const double lambda = need();
    LoadedChannel c = from_kraus("named", name, phase_damping_kraus(lambda));
    c.gpd = from_phase_damping(lambda);
    return c;
  }
  if (name == "amplitude_damping") return from_kraus("named", name, amplitude_damping(need()));
  if (name == "depolarizing") return from_kraus("named", name, depolarizing(need()));
  if (name == "controlled_phase_damping") {
    return from_kraus("named", name, controlled_phase_damping(need()));
  }
  if (name == "rotated_dephasing") return from_mixed("named", name, fixtures::rotated_dephasing());
  if (name == "two_qubit_partial_dephasing") {
    return from_kraus("named", name, fixtures::two_qubit_partial_dephasing());
  }
  if (name == "three_phase_dephasing") {
    return from_gpd("named", name, make_gpd({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, {0.0, kPi / 2.0, kPi}));
  }
  throw ValidationError("unknown named channel '" + name + "'");
}

inline std::vector<double> real_list(const json& j, const char* what) {
  if (!j.is_array()) throw FormatError(std::string(what) + " must be an array");
  std::vector<double> out;
  for (const auto& x : j) out.push_back(as_real(x, what));
  return out;
}

inline std::vector<CMatrix> matrix_list(const json& j, const char* what) {
  if (!j.is_array()) throw FormatError(std::string(what) + " must be an array of matrices");
  std::vector<CMatrix> out;
  for (const auto& m : j) out.push_back(matrix_from_json(m));
  return out;
}

inline LoadedChannel channel_from_json(const json& j) {
  const json& kind_j = require_key(j, "kind");
  if (!kind_j.is_string()) throw FormatError("'kind' must be a string");
  const std::string kind = kind_j.get<std::string>();
  LoadedChannel c = [&]() -> LoadedChannel {
    if (kind == "mixed_unitary") {
      return from_mixed(kind, kind,
                        MixedUnitaryChannel(real_list(require_key(j, "probs"), "probs"),
                                            matrix_list(require_key(j, "unitaries"), "unitaries")));
    }
    if (kind == "kraus") {
      return from_kraus(kind, kind, KrausChannel(matrix_list(require_key(j, "ops"), "ops")));
    }
    if (kind == "gpd") {
      std::vector<double> probs = real_list(require_key(j, "probs"), "probs");
      if (j.contains("level_phases")) {
        std::vector<std::vector<double>> levels;
        for (const auto& row : j.at("level_phases")) {
          if (!row.is_array()) throw FormatError("level_phases must be an array of arrays");
          std::vector<double> r;
          for (const auto& x : row) r.push_back(as_angle(x));
          levels.push_back(std::move(r));
        }
        return from_gpd(kind, kind, GPDChannel(std::move(probs), std::move(levels)));
      }
      const json& ph = require_key(j, "phases");
      if (!ph.is_array()) throw FormatError("phases must be an array");
      std::vector<double> phases;
      for (const auto& x : ph) phases.push_back(as_angle(x));
      return from_gpd(kind, kind, make_gpd(probs, phases));
    }
    if (kind == "named") {
      const json& name = require_key(j, "name");
      if (!name.is_string()) throw FormatError("'name' must be a string");
      std::optional<double> param;
      if (j.contains("param")) param = as_real(j.at("param"), "param");
      return named_channel(name.get<std::string>(), param);
    }
    throw FormatError("unknown channel kind '" + kind + "'");
  }();
  if (j.contains("dim")) {
    const json& d = j.at("dim");
    if (!d.is_number_integer()) throw FormatError("'dim' must be an integer");
    if (d.get<Eigen::Index>() != c.kraus.in_dim()) {
      throw ValidationError("declared dim " + std::to_string(d.get<long long>()) +
                            " does not match operators of dimension " +
                            std::to_string(c.kraus.in_dim()));
    }
  }
  return c;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline LoadedChannel load_channel_file(const std::string& path) {
  return channel_from_json(json::parse(read_file(path)));
}

// Exact (round-trip) GPD file contents.
inline json gpd_to_json(const GPDChannel& g) {
  json j = {{"kind", "gpd"}, {"dim", g.dim()}, {"probs", g.probs()}};
  if (g.dim() == 2) {
    j["phases"] = g.phases();
  } else {
    j["level_phases"] = g.level_phases();
  }
  return j;
}

// ---------------------------------------------------------------------------
// states

// "|k>", "|+>", "|->" or a JSON amplitude array (numbers or [re, im] pairs).
// Amplitude arrays are rescaled to unit norm.
inline PureState parse_state(const std::string& text, Eigen::Index dim) {
  if (text.size() >= 3 && text.front() == '|' && text.back() == '>') {
    const std::string body = text.substr(1, text.size() - 2);
    if (body == "+" || body == "-") {
      if (dim < 2) throw DimensionError("state " + text + " needs dimension >= 2");
      CVector v = CVector::Zero(dim);
      v(0) = 1.0;
      v(1) = body == "+" ? 1.0 : -1.0;
      return PureState::normalized(v);
    }
    if (body.find_first_not_of("0123456789") != std::string::npos || body.size() > 6) {
      throw FormatError("unknown state '" + text + "'");
    }
    const Eigen::Index k = std::stol(body);
    if (k >= dim) throw DimensionError("state " + text + " exceeds dimension " + std::to_string(dim));
    return PureState::basis(dim, k);
  }
  const json j = json::parse(text);
  if (!j.is_array()) throw FormatError("state must be |k>, |+>, |-> or an amplitude array");
  if (static_cast<Eigen::Index>(j.size()) != dim) {
    throw DimensionError("state has " + std::to_string(j.size()) + " amplitudes, channel dimension is " +
                         std::to_string(dim));
  }
  CVector v(dim);
  for (Eigen::Index k = 0; k < dim; ++k) v(k) = as_complex(j[static_cast<std::size_t>(k)]);
  return PureState::normalized(v);
}

}  // namespace quanprism
