#pragma once

// Command-line front end. run_cli() holds all logic so it can be driven
// in-process; tools/quanprism.cpp is a thin main().
//
// Exit codes: 0 ok / predicate true, 1 predicate false, 2 usage or input
// format error, 3 validation error, 4 numerical failure.

#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "quanprism/circuit.hpp"
#include "quanprism/io.hpp"

namespace quanprism {

enum ExitCode : int {
  kExitOk = 0,
  kExitFalse = 1,
  kExitUsage = 2,
  kExitInvalid = 3,
  kExitNumerical = 4,
};

struct CliOptions {
  double tol = kStructuralEps;
  std::uint64_t seed = kDefaultSeed;
  bool json = false;
};

namespace cli {

inline constexpr double kDistinguishableCut = 1e-8;
inline constexpr double kChoiRankCut = 1e-8;

inline void print_report(const json& report, bool as_json, std::ostream& out) {
  if (as_json) {
    out << report.dump(2) << "\n";
    return;
  }
  for (const auto& [key, value] : report.items()) {
    out << key << ": " << (value.is_string() ? value.get<std::string>() : value.dump()) << "\n";
  }
}

inline void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot write '" + path + "'");
  f << text;
}

inline std::vector<double> parse_list(const std::string& text, bool angles) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(angles ? parse_angle(item) : detail::parse_number(detail::trim(item), text));
  }
  if (out.empty()) throw FormatError("empty list '" + text + "'");
  return out;
}

// "start:stop:count", bounds may be pi-expressions.
inline Grid parse_grid(const std::string& text) {
  const auto parts = detail::split(text, ':');
  if (parts.size() != 3) throw FormatError("grid must look like start:stop:count, got '" + text + "'");
  Grid g{parse_angle(parts[0]), parse_angle(parts[1]), 0};
  if (parts[2].empty() || parts[2].find_first_not_of("0123456789") != std::string::npos ||
      parts[2].size() > 7) {
    throw FormatError("grid count must be a nonnegative integer, got '" + parts[2] + "'");
  }
  g.count = std::stoi(parts[2]);
  if (g.count < 1) throw FormatError("grid '" + text + "' is empty");
  return g;
}

inline json gpd_report(const GPDChannel& g) {
  json j;
  json probs = json::array();
  for (double p : g.probs()) probs.push_back(report_number(p));
  j["probs"] = probs;
  if (g.dim() == 2) {
    json ph = json::array();
    for (double t : g.phases()) ph.push_back(report_number(t));
    j["phases"] = ph;
  } else {
    json rows = json::array();
    for (const auto& row : g.level_phases()) {
      json r = json::array();
      for (double t : row) r.push_back(report_number(t));
      rows.push_back(r);
    }
    j["level_phases"] = rows;
  }
  j["mixing_parameter"] = report_number(g.mixing_parameter());
  return j;
}

// ---------------------------------------------------------------------------
// commands

inline int cmd_inspect(const std::string& file, const CliOptions& opt, std::ostream& out,
                       std::ostream& err) {
  const LoadedChannel c = load_channel_file(file);
  const Tolerance tol{opt.tol};
  CMatrix completeness = -identity(c.kraus.in_dim());
  for (const auto& a : c.kraus.ops()) completeness += a.adjoint() * a;
  const auto rec = recognize_gpd(c.kraus, tol);

  json r;
  r["kind"] = c.kind;
  r["label"] = c.label;
  r["dim"] = c.kraus.in_dim();
  r["kraus_count"] = c.kraus.size();
  r["mixed_unitary"] = c.mixed.has_value();
  r["branches"] = c.mixed ? json(c.mixed->size()) : json(nullptr);
  r["completeness_residual"] = report_number(max_abs(completeness));
  r["choi_rank"] = numerical_rank(choi(c.kraus), kChoiRankCut);
  r["schur"] = is_schur_channel(c.kraus, tol);
  r["gpd_recognizable"] = rec.has_value();
  if (rec) {
    json g = gpd_report(rec->gpd);
    g["u0"] = matrix_to_json(rec->u0);
    r["gpd"] = g;
  } else {
    r["gpd"] = nullptr;
  }
  print_report(r, opt.json, out);
  err << c.label << ": dim " << c.kraus.in_dim() << ", " << c.kraus.size() << " Kraus operators, "
      << (rec ? "GPD-recognizable" : "not GPD-recognizable") << "\n";
  return kExitOk;
}

// Third basis vector completing an orthonormal pair in C^3.
inline PureState complete_qutrit_basis(const PureState& a, const PureState& b) {
  const CVector& x = a.amplitudes();
  const CVector& y = b.amplitudes();
  CVector z(3);
  z << x(1) * y(2) - x(2) * y(1), x(2) * y(0) - x(0) * y(2), x(0) * y(1) - x(1) * y(0);
  return PureState::normalized(z.conjugate());
}

inline std::optional<Eigen::Index> basis_index(const PureState& s) {
  for (Eigen::Index k = 0; k < s.dim(); ++k) {
    if (std::abs(std::abs(s(k)) - 1.0) <= kExactEps) return k;
  }
  return std::nullopt;
}

inline int cmd_check_preserve(const std::string& file, const std::string& s1, const std::string& s2,
                              const std::string& mode, bool criterion, const CliOptions& opt,
                              std::ostream& out, std::ostream& err) {
  if (mode != "fidelity" && mode != "distinguishability") {
    throw FormatError("--mode must be fidelity or distinguishability");
  }
  const LoadedChannel c = load_channel_file(file);
  const Tolerance tol{opt.tol};
  const Eigen::Index d = c.kraus.in_dim();
  const PureState phi1 = parse_state(s1, d);
  const PureState phi2 = parse_state(s2, d);

  PreservationVerdict v = preserves_fidelity_direct(c.kraus, phi1, phi2, tol);
  if (mode == "distinguishability") {
    if (v.fidelity_in > kDistinguishableCut) {
      throw ValidationError("distinguishability mode needs orthogonal states");
    }
    v.preserved = v.fidelity_out <= kDistinguishableCut;
  }

  if (criterion) {
    const bool orthogonal = std::abs(inner(phi1, phi2)) < kOrthogonalCut;
    const auto k1 = basis_index(phi1);
    const auto k2 = basis_index(phi2);
    if (mode == "fidelity" && orthogonal) {
      v.certificate = "n/a (orthogonal pair)";
    } else if (mode == "distinguishability" && k1 && k2) {
      v.criterion_holds = subset_criterion(c.kraus, {*k1, *k2}, tol);
      v.certificate = "subset_criterion";
    } else if (!c.mixed) {
      v.certificate = "n/a (not mixed unitary)";
    } else if (mode == "distinguishability" && d == 2) {
      v.criterion_holds = diagonal_criterion_qubit(*c.mixed, phi1, phi2, tol);
      v.certificate = "diagonal_criterion_qubit";
    } else if (mode == "distinguishability" && d == 3) {
      v.criterion_holds = two_level_criterion_qutrit(
          *c.mixed, {phi1, phi2, complete_qutrit_basis(phi1, phi2)}, tol);
      v.certificate = "two_level_criterion_qutrit";
    } else if (mode == "distinguishability") {
      v.certificate = "n/a (no structural criterion for this dimension)";
    } else if (c.mixed->size() == 1) {
      v.criterion_holds = true;
      v.certificate = "unitary channel";
    } else if (c.mixed->size() == 2) {
      v.criterion_holds = rank2_fidelity_criterion(c.mixed->unitary(0), c.mixed->unitary(1),
                                                   c.mixed->prob(0), phi1, phi2, tol);
      v.certificate = "rank2_fidelity_criterion";
    } else {
      v.criterion_holds = rankN_necessary_condition(*c.mixed, phi1, phi2, tol);
      v.certificate = "rankN_necessary_condition (necessary only)";
    }
  }

  json r;
  r["preserved"] = v.preserved;
  r["fidelity_in"] = report_number(v.fidelity_in);
  r["fidelity_out"] = report_number(v.fidelity_out);
  r["criterion"] = v.criterion_holds ? json(*v.criterion_holds) : json(nullptr);
  r["certificate"] = v.certificate ? json(*v.certificate) : json(nullptr);
  out << r.dump(2) << "\n";
  err << (v.preserved ? "preserved" : "not preserved") << " (F_in " << format_real(v.fidelity_in)
      << ", F_out " << format_real(v.fidelity_out) << ")\n";
  return v.preserved ? kExitOk : kExitFalse;
}

inline int emit_gpd(const GPDChannel& g, const std::string& out_path, std::ostream& out,
                    std::ostream& err) {
  write_output(out_path, gpd_to_json(g).dump(2) + "\n", out);
  err << "GPD with " << g.size() << " branches, mixing parameter "
      << format_real(g.mixing_parameter()) << "\n";
  return kExitOk;
}

inline int cmd_gpd_recognize(const std::string& file, const CliOptions& opt, std::ostream& out,
                             std::ostream& err) {
  const LoadedChannel c = load_channel_file(file);
  const auto rec = recognize_gpd(c.kraus, Tolerance{opt.tol});
  json r;
  r["recognized"] = rec.has_value();
  if (rec) {
    r["u0"] = matrix_to_json(rec->u0);
    const json g = gpd_report(rec->gpd);
    for (const auto& [k, v] : g.items()) r[k] = v;
  }
  if (opt.json) {
    print_report(r, true, out);
  } else if (rec) {
    print_report(r, false, out);
  } else {
    out << "not GPD-equivalent\n";
  }
  err << c.label << (rec ? ": GPD-equivalent\n" : ": not GPD-equivalent\n");
  return rec ? kExitOk : kExitFalse;
}

inline int cmd_gpd_probe(const std::string& file, std::size_t samples, const CliOptions& opt,
                         std::ostream& out, std::ostream& err) {
  const LoadedChannel c = load_channel_file(file);
  if (!c.gpd) throw ValidationError("probe needs a GPD channel file");
  const ProbeReport rep = preserved_set_probe(*c.gpd, samples, opt.seed);
  json r;
  r["samples"] = rep.samples;
  r["seed"] = opt.seed;
  r["anchors_preserved"] = rep.anchors_preserved;
  r["anchor_max_deviation"] = report_number(rep.anchor_max_deviation);
  r["preserved_pairs"] = rep.preserved_pairs;
  r["min_pair_deviation"] = report_number(rep.min_pair_deviation);
  print_report(r, opt.json, out);
  err << rep.preserved_pairs << " preserved superposition pairs in " << rep.samples << " samples\n";
  return rep.anchors_preserved && rep.preserved_pairs == 0 ? kExitOk : kExitFalse;
}

struct SweepArgs {
  std::string family;
  std::string theta = "pi";
  std::string p_grid, theta_grid, theta2_grid, theta3_grid, probs, out;
};

inline int cmd_sweep(const SweepArgs& a, const CliOptions& opt, std::ostream& out,
                     std::ostream& err) {
  SweepTable t;
  if (a.family == "rank2") {
    if (a.p_grid.empty()) throw FormatError("rank2 sweep needs --p-grid");
    const double theta = parse_angle(a.theta);
    const Grid tg = a.theta_grid.empty() ? Grid{theta, theta, 1} : parse_grid(a.theta_grid);
    t = rank2_sweep(parse_grid(a.p_grid), tg);
  } else if (a.family == "rank3") {
    if (a.probs.empty()) throw FormatError("rank3 sweep needs --probs");
    const std::string g2 = a.theta2_grid.empty() ? a.theta_grid : a.theta2_grid;
    const std::string g3 = a.theta3_grid.empty() ? a.theta_grid : a.theta3_grid;
    if (g2.empty() || g3.empty()) throw FormatError("rank3 sweep needs --theta-grid");
    t = rank3_sweep(parse_list(a.probs, false), parse_grid(g2), parse_grid(g3));
  } else {
    throw FormatError("--family must be rank2 or rank3");
  }
  double lo = 1.0, hi = 0.0;
  for (const auto& row : t.rows) {
    lo = std::min(lo, row.back());
    hi = std::max(hi, row.back());
  }
  write_output(a.out, to_csv(t), out);
  json r = {{"rows", t.rows.size()},
            {"min_coherence", report_number(lo)},
            {"max_coherence", report_number(hi)}};
  if (!a.out.empty() && opt.json) print_report(r, true, out);
  err << t.rows.size() << " rows, coherence in [" << format_real(lo) << ", " << format_real(hi)
      << "]\n";
  return kExitOk;
}

inline int cmd_synth(const std::string& file, const std::string& out_path, bool verify,
                     const CliOptions& opt, std::ostream& out, std::ostream& err) {
  const LoadedChannel c = load_channel_file(file);
  if (!c.gpd) throw ValidationError("synth needs a GPD channel file");
  const Circuit circ = synth_gpd(*c.gpd);
  write_output(out_path, emit_text(circ), out);
  err << circ.gates.size() << " gates on " << circ.num_qubits << " qubits\n";
  if (!verify) return kExitOk;
  const double dist = choi_distance(circuit_to_channel(circ), c.gpd->to_kraus());
  json r = {{"choi_distance", report_number(dist)}, {"equal", dist <= kSynthTol}};
  if (!out_path.empty()) print_report(r, opt.json, out);
  err << "choi_distance: " << format_real(dist) << "\n";
  return dist <= kSynthTol ? kExitOk : kExitNumerical;
}

inline int cmd_verify(const std::string& circuit_file, const std::string& channel_file,
                      const CliOptions& opt, std::ostream& out, std::ostream& err) {
  const Circuit circ = parse_text(read_file(circuit_file));
  const LoadedChannel c = load_channel_file(channel_file);
  if (c.kraus.in_dim() != 2) throw DimensionError("verify compares against a qubit channel");
  const double dist = choi_distance(circuit_to_channel(circ), c.kraus);
  const bool equal = dist <= kSynthTol;
  print_report({{"choi_distance", report_number(dist)}, {"equal", equal}}, opt.json, out);
  err << (equal ? "circuit realizes the channel\n" : "circuit does NOT realize the channel\n");
  return equal ? kExitOk : kExitNumerical;
}

}  // namespace cli

// Runs the CLI on `args` (without the program name).
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum channel preservation and dephasing toolkit", "quanprism"};
  app.fallthrough();
  app.require_subcommand(1);
  CliOptions opt;
  app.add_option("--tol", opt.tol, "Tolerance for structural predicates")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", opt.seed, "Seed for randomized commands");
  app.add_flag("--json", opt.json, "Machine-readable JSON reports");

  std::function<int()> action;

  std::string file;
  auto* inspect = app.add_subcommand("inspect", "Summarize a channel file");
  inspect->add_option("file", file, "Channel JSON file")->required();
  inspect->callback([&] { action = [&] { return cli::cmd_inspect(file, opt, out, err); }; });

  std::string s1, s2, mode = "fidelity";
  bool criterion = false;
  auto* check = app.add_subcommand("check-preserve", "Check fidelity or distinguishability preservation");
  check->add_option("file", file, "Channel JSON file")->required();
  check->add_option("--state1", s1, "First state: |k>, |+>, |-> or JSON amplitudes")->required();
  check->add_option("--state2", s2, "Second state")->required();
  check->add_option("--mode", mode, "fidelity or distinguishability");
  check->add_flag("--criterion", criterion, "Also run the structural criterion");
  check->callback([&] {
    action = [&] { return cli::cmd_check_preserve(file, s1, s2, mode, criterion, opt, out, err); };
  });

  auto* gpd = app.add_subcommand("gpd", "General phase damping tools");
  gpd->require_subcommand(1);
  std::string probs, phases, out_path;
  double lambda = 0.0;
  std::size_t samples = 10000;
  auto* make = gpd->add_subcommand("make", "Write a qubit GPD channel file");
  make->add_option("--probs", probs, "Comma-separated probabilities")->required();
  make->add_option("--phases", phases, "Comma-separated phases (pi-expressions allowed)")->required();
  make->add_option("--out", out_path, "Output file (default stdout)");
  make->callback([&] {
    action = [&] {
      return cli::emit_gpd(make_gpd(cli::parse_list(probs, false), cli::parse_list(phases, true)),
                           out_path, out, err);
    };
  });
  auto* from_pd = gpd->add_subcommand("from-pd", "Phase damping channel as a GPD");
  from_pd->add_option("--lambda", lambda, "Damping parameter in [0, 1]")->required();
  from_pd->add_option("--out", out_path, "Output file (default stdout)");
  from_pd->callback([&] {
    action = [&] { return cli::emit_gpd(from_phase_damping(lambda), out_path, out, err); };
  });
  auto* recognize = gpd->add_subcommand("recognize", "Test unitary equivalence to a GPD");
  recognize->add_option("file", file, "Channel JSON file")->required();
  recognize->callback([&] { action = [&] { return cli::cmd_gpd_recognize(file, opt, out, err); }; });
  auto* probe = gpd->add_subcommand("probe", "Search random superposition pairs for preserved fidelity");
  probe->add_option("file", file, "GPD channel file")->required();
  probe->add_option("--samples", samples, "Number of sampled pairs");
  probe->callback([&] { action = [&] { return cli::cmd_gpd_probe(file, samples, opt, out, err); }; });

  cli::SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Coherence of rho_m under a GPD family, as CSV");
  sweep->add_option("--family", sweep_args.family, "rank2 or rank3")->required();
  sweep->add_option("--theta", sweep_args.theta, "Fixed relative phase for rank2 (default pi)");
  sweep->add_option("--p-grid", sweep_args.p_grid, "Mixing parameter grid start:stop:count");
  sweep->add_option("--theta-grid", sweep_args.theta_grid, "Phase grid start:stop:count");
  sweep->add_option("--theta2-grid", sweep_args.theta2_grid, "rank3 grid for theta2");
  sweep->add_option("--theta3-grid", sweep_args.theta3_grid, "rank3 grid for theta3");
  sweep->add_option("--probs", sweep_args.probs, "rank3 probabilities p1,p2,p3");
  sweep->add_option("--out", sweep_args.out, "CSV file (default stdout)");
  sweep->callback([&] { action = [&] { return cli::cmd_sweep(sweep_args, opt, out, err); }; });

  bool verify = false;
  auto* synth = app.add_subcommand("synth", "Synthesize a circuit for a qubit GPD");
  synth->add_option("file", file, "GPD channel file")->required();
  synth->add_option("--out", out_path, "Circuit file (default stdout)");
  synth->add_flag("--verify", verify, "Rebuild the channel from the circuit and compare");
  synth->callback([&] {
    action = [&] { return cli::cmd_synth(file, out_path, verify, opt, out, err); };
  });

  std::string circuit_file;
  auto* verify_cmd = app.add_subcommand("verify", "Compare a circuit file with a qubit channel");
  verify_cmd->add_option("circuit", circuit_file, "Circuit text file")->required();
  verify_cmd->add_option("channel", file, "Channel JSON file")->required();
  verify_cmd->callback([&] {
    action = [&] { return cli::cmd_verify(circuit_file, file, opt, out, err); };
  });

  std::vector<const char*> argv{"quanprism"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    return action ? action() : kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const json::exception& e) {
    err << "error: malformed JSON: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Error& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitInvalid;
  }
}

}  // namespace quanprism
