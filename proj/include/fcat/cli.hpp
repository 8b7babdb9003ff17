#pragma once

// Command-line front end: verification suites, fidelity sweeps and the gate
// table, with CSV/JSON output. Requires CLI11 and nlohmann/json.

#include "fcat/channels.hpp"
#include "fcat/gates.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace fcat::cli {

enum ExitCode : int { kSuccess = 0, kVerificationFailure = 1, kConfigError = 2, kIoError = 3 };

class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kMinCutoff = 10;

/// Shortest decimal that parses back to the same double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& text, const std::string& what) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw config_error("invalid number for " + what + ": '" + text + "'");
  return v;
}

/// start:stop:step (linear, inclusive of stop up to rounding) or
/// start:stop:Nlog (N log-spaced points, both ends included).
struct Grid {
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;
  int log_count = 0;

  std::vector<double> values() const {
    std::vector<double> out;
    if (log_count > 0) {
      if (log_count == 1) return {start};
      const double a = std::log10(start), b = std::log10(stop);
      for (int i = 0; i < log_count; ++i) out.push_back(std::pow(10.0, a + (b - a) * i / (log_count - 1)));
      out.front() = start;
      out.back() = stop;
      return out;
    }
    const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (long i = 0; i < n; ++i) out.push_back(start + static_cast<double>(i) * step);
    return out;
  }

  std::string text() const {
    return format_double(start) + ":" + format_double(stop) + ":" +
           (log_count > 0 ? std::to_string(log_count) + "log" : format_double(step));
  }
};

inline Grid parse_grid(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() != 3) throw config_error("grid must be start:stop:step or start:stop:Nlog, got '" + spec + "'");
  Grid g;
  g.start = parse_double(parts[0], "grid start");
  g.stop = parse_double(parts[1], "grid stop");
  if (parts[2].size() > 3 && parts[2].substr(parts[2].size() - 3) == "log") {
    const double n = parse_double(parts[2].substr(0, parts[2].size() - 3), "grid point count");
    if (n < 1 || n != std::floor(n)) throw config_error("log grid needs a positive integer point count");
    if (!(g.start > 0.0) || !(g.stop >= g.start)) throw config_error("log grid needs 0 < start <= stop");
    g.log_count = static_cast<int>(n);
  } else {
    g.step = parse_double(parts[2], "grid step");
    if (!(g.step > 0.0)) throw config_error("grid step must be positive");
    if (!(g.stop >= g.start)) throw config_error("grid is empty: stop < start");
  }
  return g;
}

enum class Format { Csv, Json };

struct RunConfig {
  std::string group = "d8";
  double alpha = canonical_alpha();
  double phi = std::numbers::pi / 2;
  double gamma = 0.01;
  int cutoff = kDefaultCutoff;
  Grid alpha_grid = parse_grid("0.9:1.6:0.01");
  Grid gamma_grid = parse_grid("0.001:0.1:20log");
  std::string output_path;  // empty: standard output
  Format format = Format::Csv;

  bool canonical() const {
    return std::abs(alpha - canonical_alpha()) <= 1e-12 && std::abs(phi - std::numbers::pi / 2) <= 1e-12;
  }
};

inline nlohmann::json to_json(const RunConfig& c) {
  return {{"group", c.group},
          {"alpha", c.alpha},
          {"phi", c.phi},
          {"gamma", c.gamma},
          {"cutoff", c.cutoff},
          {"alpha_grid", c.alpha_grid.text()},
          {"gamma_grid", c.gamma_grid.text()},
          {"out", c.output_path},
          {"format", c.format == Format::Csv ? "csv" : "json"}};
}

inline Format parse_format(const std::string& s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  throw config_error("format must be csv or json, got '" + s + "'");
}

/// Applies the keys of a JSON config object; unknown keys are rejected.
inline void apply_json(RunConfig& c, const nlohmann::json& j) {
  if (!j.is_object()) throw config_error("config file must hold a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "group") c.group = value.get<std::string>();
      else if (key == "alpha") c.alpha = value.get<double>();
      else if (key == "phi") c.phi = value.get<double>();
      else if (key == "gamma") c.gamma = value.get<double>();
      else if (key == "cutoff") c.cutoff = value.get<int>();
      else if (key == "alpha_grid") c.alpha_grid = parse_grid(value.get<std::string>());
      else if (key == "gamma_grid") c.gamma_grid = parse_grid(value.get<std::string>());
      else if (key == "out") c.output_path = value.get<std::string>();
      else if (key == "format") c.format = parse_format(value.get<std::string>());
      else throw config_error("unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("bad config value: ") + e.what());
  }
}

inline RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot read config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw config_error("config file '" + path + "' is not valid JSON: " + e.what());
  }
  RunConfig c;
  apply_json(c, j);
  return c;
}

inline void validate(const RunConfig& c) {
  if (c.group != "d8") throw config_error("group '" + c.group + "' is not supported (the gate and loss suites need d8)");
  if (!(c.alpha > 0.0)) throw config_error("alpha must be positive");
  if (!(c.gamma >= 0.0 && c.gamma < 1.0)) throw config_error("gamma must lie in [0, 1)");
  if (c.cutoff < kMinCutoff) {
    const double tail = coherent_tail_mass(cplx(c.alpha), c.cutoff);
    std::ostringstream msg;
    msg << "cutoff " << c.cutoff << " is below the minimum " << kMinCutoff << " (coherent tail mass at alpha "
        << format_double(c.alpha) << " is " << format_double(tail) << ")";
    throw config_error(msg.str());
  }
  if (c.alpha_grid.values().empty() || c.gamma_grid.values().empty()) throw config_error("grids must be non-empty");
}

// ---------------------------------------------------------------- verify

struct Check {
  std::string suite;
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool skipped = false;
  std::string note;

  bool passed() const { return skipped || value <= tolerance; }
  std::string status() const { return skipped ? "SKIP" : (passed() ? "PASS" : "FAIL"); }
};

namespace detail {

inline FiniteMatrixGroup d8() { return make_group(GroupSpec::d8()); }

/// Builds the code, turning library input errors into configuration errors.
inline CodeBasis code_for(const RunConfig& c) {
  try {
    const auto group = d8();
    const auto f = build_fourier_transform(group, irrep_table(group, GroupSpec::d8()));
    return build_code_basis(make_constellation(group, c.alpha, c.phi, c.cutoff), f);
  } catch (const input_error& e) {
    throw config_error(std::string("cannot build the code: ") + e.what());
  } catch (const numerical_error& e) {
    throw config_error(std::string("cannot build the code: ") + e.what());
  }
}

inline double covariance_residual(const CodeBasis& code) {
  double worst = 0.0;
  const auto& group = code.constellation.group;
  for (std::size_t g = 0; g < group.size(); ++g) {
    const Mat2& lg = group.matrix(g);
    const auto pg = passive_gaussian_unitary(lg, code.config());
    for (int l = 0; l < 2; ++l)
      for (int m = 0; m < 2; ++m) {
        FockState expected = FockState::zero(code.config());
        for (int lp = 0; lp < 2; ++lp) expected = expected + code.state(lp, m) * lg(lp, l);
        worst = std::max(worst, infidelity(pg.apply(code.state(l, m)), expected));
      }
  }
  return worst;
}

inline Mat code_gram(const CodeBasis& code) {
  Mat g(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) g(i, j) = code.basis_states[i].inner(code.basis_states[j]);
  return g;
}

}  // namespace detail

inline std::vector<Check> run_verify(const RunConfig& c) {
  validate(c);
  std::vector<Check> out;
  const bool canon = c.canonical();
  const std::string need = "requires alpha = sqrt(pi/2), phi = pi/2";
  auto add = [&](std::string suite, std::string name, double value, double tol) {
    out.push_back({std::move(suite), std::move(name), value, tol, false, {}});
  };
  auto canonical_only = [&](std::string suite, std::string name, double tol, auto&& compute) {
    if (canon) add(std::move(suite), std::move(name), compute(), tol);
    else out.push_back({std::move(suite), std::move(name), 0.0, tol, true, need});
  };

  // group_core
  for (const auto& spec : {GroupSpec::d8(), GroupSpec::cyclic(8)}) {
    const auto g = make_group(spec);
    const auto irreps = irrep_table(g, spec);
    const auto f = build_fourier_transform(g, irreps);
    const std::string tag = spec.kind == GroupKind::D8 ? "d8" : "z8";
    add("group", "qft_unitarity_" + tag, unitarity_residual(f.matrix), 1e-12);
    add("group", "qft_block_diagonal_" + tag, verify_block_diagonalization(f, g, irreps), 1e-12);
  }

  // encoder
  const CodeBasis code = detail::code_for(c);
  add("encoder", "code_orthonormality", (detail::code_gram(code) - Mat::Identity(4, 4)).norm(), 1e-10);
  add("encoder", "covariance", detail::covariance_residual(code), 1e-9);
  canonical_only("encoder", "product_form", 1e-9, [&] {
    double worst = 0.0;
    for (int l = 0; l < 2; ++l)
      for (int m = 0; m < 2; ++m)
        worst = std::max(worst, infidelity(code.state(l, m), product_form_codeword(c.alpha, l, m, c.cutoff)));
    return worst;
  });
  canonical_only("encoder", "gram_fourier_diagonal", 1e-10,
                 [&] { return gram_fourier_spectrum(code.gram, code.fourier).off_diagonal; });
  {
    const auto q = cat_qudit(8, 4, 1.25);
    double worst = 0.0;
    for (int k = 0; k < 4; ++k)
      for (int j = 0; j < 4; ++j)
        worst = std::max(worst, std::abs(std::abs(q.codewords[k].inner(q.codewords[j])) - (k == j ? 1.0 : 0.0)));
    add("encoder", "cat_qudit_8_4_orthonormal", worst, 1e-10);
  }

  // gates
  const FockConfig cfg = code.config();
  {
    const auto x = logical_action(passive_gaussian_unitary(paulis::X(), cfg), code);
    add("gates", "x_l_swap", (x.matrix - logical::on_l(paulis::X())).norm(), 1e-9);
    add("gates", "x_l_swap_leakage", x.leakage, 1e-7);
    const auto z = logical_action(mode2_parity(cfg), code);
    add("gates", "z_l_parity", (z.matrix - logical::on_l(paulis::Z())).norm(), 1e-9);
    const auto xz = logical_action(total_number_phase(cfg), code);
    add("gates", "xm_zm_total_phase",
        compare_up_to_phase(xz.matrix, logical::on_m(Mat2(paulis::X() * paulis::Z()))).residual, 1e-9);
  }
  {
    const auto s = s_gate_check(code);
    add("gates", "s_l_self_kerr", (s.matrix - logical::on_l(paulis::S())).norm(), 1e-8);
    auto snap = snap_gate_check(code);
    add("gates", "s_l_snap", compare_up_to_phase(snap.s.matrix, s.matrix).residual, 1e-8);
    add("gates", "t_l_snap", compare_up_to_phase(snap.t.matrix, logical::on_l(paulis::T())).residual, 1e-8);
  }
  add("gates", "cz_cross_kerr", (cz_gate_check(code) - logical_cz()).norm(), 1e-8);
  {
    double worst = 0.0;
    for (const Mat2& u : {Mat2(paulis::H()), Mat2(paulis::X()), Mat2(paulis::Z()), Mat2(paulis::X() * paulis::Z())})
      worst = std::max(worst, hadamard_deformation_check(code, u).max_infidelity);
    add("gates", "deformation_lemma", worst, 1e-8);
  }
  {
    const auto h = composite_hadamard_check(code);
    add("gates", "composite_hadamard", compare_up_to_phase(h.matrix, logical::on_l(paulis::H())).residual, 1e-7);
    add("gates", "composite_hadamard_leakage", h.leakage, 1e-7);
  }
  canonical_only("gates", "zeno_projected_drive", 1e-8, [&] { return zeno_projected_hamiltonian(code).residual; });
  std::optional<Mod4Report> mod4;
  if (canon) mod4 = mod4_measurement(code).report;
  canonical_only("gates", "mod4_table_cells", 1e-8, [&] { return mod4->max_mass_outside; });
  canonical_only("gates", "mod4_loss_readout", 1e-8, [&] { return mod4->max_loss_y_error; });
  canonical_only("gates", "zy_fock_expansion", 1e-9, [&] { return zy_eigenstate_expansion(code); });

  // channels
  canonical_only("channels", "kl_first_order", 1e-9, [&] { return kl_first_order_check(code, Vec2(1, 0)); });
  {
    const auto plain = lindblad_kernel_check(code, false);
    const auto deformed = lindblad_kernel_check(code, true);
    add("channels", "lindblad_kernel", plain.max_residual, 1e-8);
    add("channels", "lindblad_kernel_deformed", deformed.max_residual, 1e-8);
    add("channels", "odd_parity", std::max(plain.parity_residual, deformed.parity_residual), 1e-12);
  }
  {
    const auto group = detail::d8();
    const auto fock = qec_matrix_fock(code, c.gamma);
    const auto analytic = qec_matrix_analytic(group, code.fourier, c.alpha, c.gamma);
    add("channels", "qec_fock_vs_analytic", (fock.entries - analytic.entries).cwiseAbs().maxCoeff(), 1e-6);
    add("channels", "fent_fock_vs_analytic",
        std::abs(petz_entanglement_fidelity(fock) - petz_entanglement_fidelity(analytic)), 1e-8);
    add("channels", "kraus_completeness", fock.kraus_residual, 1e-8);
    add("channels", "fent_lossless",
        std::abs(1.0 - petz_entanglement_fidelity(qec_matrix_analytic(group, code.fourier, c.alpha, 0.0))), 1e-12);
  }
  return out;
}

// ---------------------------------------------------------------- output

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

/// Writes `content` to `path`, or to `fallback` when the path is empty.
inline void emit(const std::string& content, const std::string& path, std::ostream& fallback) {
  if (path.empty()) {
    fallback << content;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw io_error("cannot open '" + path + "' for writing");
  file << content;
  file.flush();
  if (!file) throw io_error("failed writing '" + path + "'");
}

inline nlohmann::json check_json(const Check& c) {
  return {{"suite", c.suite}, {"name", c.name},     {"value", c.value},
          {"tolerance", c.tolerance}, {"status", c.status()}, {"note", c.note}};
}

inline int cmd_verify(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto checks = run_verify(c);
  std::vector<std::string> failed;
  for (const auto& chk : checks)
    if (!chk.passed()) failed.push_back(chk.suite + "." + chk.name);

  if (c.format == Format::Json) {
    nlohmann::json records = nlohmann::json::array();
    for (const auto& chk : checks) records.push_back(check_json(chk));
    const nlohmann::json doc{{"config", to_json(c)},
                             {"records", records},
                             {"summary", {{"passed", failed.empty()}, {"failed", failed}}}};
    emit(doc.dump(2) + "\n", c.output_path, out);
  } else if (!c.output_path.empty()) {
    std::string csv = "suite,name,value,tolerance,status,note\n";
    for (const auto& chk : checks)
      csv += chk.suite + "," + chk.name + "," + format_double(chk.value) + "," + format_double(chk.tolerance) + "," +
             chk.status() + "," + csv_escape(chk.note) + "\n";
    emit(csv, c.output_path, out);
  }
  if (c.format == Format::Csv || !c.output_path.empty()) {
    std::ostream& text = c.output_path.empty() ? out : err;
    for (const auto& chk : checks) {
      text << std::left << std::setw(5) << chk.status() << std::setw(40) << (chk.suite + "." + chk.name);
      if (chk.skipped) text << chk.note << "\n";
      else text << "value=" << format_double(chk.value) << " tol=" << format_double(chk.tolerance) << "\n";
    }
    text << (failed.empty() ? "all checks passed\n" : "failed:");
    for (std::size_t i = 0; i < failed.size(); ++i) text << (i ? "," : " ") << failed[i];
    if (!failed.empty()) text << "\n";
  }
  return failed.empty() ? kSuccess : kVerificationFailure;
}

// ---------------------------------------------------------------- sweeps

inline std::string sweep_csv(const std::string& column, const SweepResult& r) {
  std::string csv = column + ",infidelity,condition_number,flags\n";
  for (const auto& p : r.points)
    csv += format_double(p.x) + "," + (p.flagged ? std::string() : format_double(p.infidelity)) + "," +
           format_double(p.condition_number) + "," + csv_escape(p.note) + "\n";
  return csv;
}

inline nlohmann::json sweep_records(const std::string& column, const SweepResult& r) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& p : r.points) {
    nlohmann::json flags = nlohmann::json::array();
    if (!p.note.empty()) flags.push_back(p.note);
    records.push_back({{column, p.x},
                       {"infidelity", p.flagged ? nlohmann::json(nullptr) : nlohmann::json(p.infidelity)},
                       {"condition_number", std::isfinite(p.condition_number) ? nlohmann::json(p.condition_number)
                                                                               : nlohmann::json(nullptr)},
                       {"flags", flags}});
  }
  return records;
}

inline bool strictly_increasing(const SweepResult& r) {
  const SweepPoint* prev = nullptr;
  for (const auto& p : r.points) {
    if (p.flagged) continue;
    if (prev && !(p.infidelity > prev->infidelity)) return false;
    prev = &p;
  }
  return true;
}

inline void write_sweep(const RunConfig& c, const std::string& column, const SweepResult& r,
                        const nlohmann::json& summary, std::ostream& out) {
  if (c.format == Format::Json) {
    const nlohmann::json doc{{"config", to_json(c)}, {"records", sweep_records(column, r)}, {"summary", summary}};
    emit(doc.dump(2) + "\n", c.output_path, out);
  } else {
    emit(sweep_csv(column, r), c.output_path, out);
  }
}

inline int cmd_sweep_alpha(const RunConfig& c, std::ostream& out, std::ostream& err) {
  validate(c);
  const auto r = sweep_alpha(c.gamma, c.alpha_grid.values());
  std::size_t flagged = 0;
  for (const auto& p : r.points) flagged += p.flagged;
  nlohmann::json summary{{"gamma", c.gamma}, {"points", r.points.size()}, {"flagged", flagged}};
  summary["argmin"] = r.argmin ? nlohmann::json(*r.argmin) : nlohmann::json(nullptr);
  write_sweep(c, "alpha", r, summary, out);
  err << "argmin alpha = " << (r.argmin ? format_double(*r.argmin) : "none") << " (gamma = " << format_double(c.gamma)
      << ", " << r.points.size() << " points, " << flagged << " flagged)\n";
  return kSuccess;
}

inline int cmd_sweep_gamma(const RunConfig& c, std::ostream& out, std::ostream& err) {
  validate(c);
  const auto r = sweep_gamma(c.alpha, c.gamma_grid.values());
  const bool monotone = strictly_increasing(r);
  nlohmann::json summary{{"alpha", c.alpha}, {"points", r.points.size()}, {"monotone", monotone}};
  summary["slope"] = r.slope ? nlohmann::json(*r.slope) : nlohmann::json(nullptr);
  write_sweep(c, "gamma", r, summary, out);
  err << "log-log slope over [1e-3, 1e-2] = " << (r.slope ? format_double(*r.slope) : "n/a")
      << "; monotone = " << (monotone ? "yes" : "no") << "\n";
  return kSuccess;
}

// ---------------------------------------------------------------- gates demo

struct GateRow {
  std::string name;
  std::string implementation;
  Mat matrix;
  double leakage = 0.0;
  double residual = 0.0;
  double tolerance = 0.0;

  bool passed() const { return residual <= tolerance && leakage <= 1e-7; }
};

inline std::vector<GateRow> gate_rows(const RunConfig& c) {
  validate(c);
  const CodeBasis code = detail::code_for(c);
  const FockConfig cfg = code.config();
  std::vector<GateRow> rows;
  auto row = [&](std::string name, std::string impl, const LogicalAction& a, const Mat& target, double tol,
                 bool phase_free) {
    const double res = phase_free ? compare_up_to_phase(a.matrix, target).residual : (a.matrix - target).norm();
    rows.push_back({std::move(name), std::move(impl), a.matrix, a.leakage, res, tol});
  };
  row("X_L", "SWAP pi(X)", logical_action(passive_gaussian_unitary(paulis::X(), cfg), code),
      logical::on_l(paulis::X()), 1e-9, false);
  row("Z_L", "(-1)^{n2}", logical_action(mode2_parity(cfg), code), logical::on_l(paulis::Z()), 1e-9, false);
  row("X_M Z_M", "-i^{n1+n2}", logical_action(total_number_phase(cfg), code),
      logical::on_m(Mat2(paulis::X() * paulis::Z())), 1e-9, true);
  row("S_L", "self-Kerr i^{n2^2}", s_gate_check(code), logical::on_l(paulis::S()), 1e-8, false);
  const auto snap = snap_gate_check(code);
  row("S_L", "SNAP e^{i pi n^2/2}", snap.s, logical::on_l(paulis::S()), 1e-8, true);
  row("T_L", "SNAP e^{i pi n^4/4}", snap.t, logical::on_l(paulis::T()), 1e-8, true);
  row("H_L H_M", "beamsplitter pi(H), deformed code", hadamard_deformation_check(code).action,
      logical::both(paulis::H(), paulis::H()), 1e-8, true);
  row("H_L", "i^{n2^2} pi(H) i^{n2^2} pi(H) i^{n2^2}", composite_hadamard_check(code), logical::on_l(paulis::H()),
      1e-7, true);
  {
    const Mat cz = cz_gate_check(code);
    rows.push_back({"CZ", "cross-Kerr (-1)^{n2 n4}", cz, 0.0, (cz - logical_cz()).norm(), 1e-8});
  }
  {
    const double theta = std::numbers::pi / 4;
    const auto z = zeno_projected_hamiltonian(code, theta);
    Vec phases(4);
    phases << std::polar(1.0, theta), std::polar(1.0, -theta), std::polar(1.0, -theta), std::polar(1.0, theta);
    rows.push_back({"e^{i theta Z_L Z_M}", "Zeno drive a1^2 + a1^dag^2, theta = pi/4", z.unitary(), 0.0,
                    (z.unitary() - Mat(phases.asDiagonal())).norm(), 1e-8});
  }
  return rows;
}

inline std::string format_matrix(const Mat& m) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(4);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    s << "    ";
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const cplx v = m(i, j);
      s << std::setw(8) << (std::abs(v.real()) < 5e-5 ? 0.0 : v.real()) << (v.imag() < 0 ? "-" : "+") << std::setw(6)
        << std::abs(v.imag()) << "i ";
    }
    s << "\n";
  }
  return s.str();
}

inline int cmd_gates_demo(const RunConfig& c, std::ostream& out, std::ostream&) {
  const auto rows = gate_rows(c);
  bool ok = true;
  if (c.format == Format::Json) {
    nlohmann::json records = nlohmann::json::array();
    for (const auto& r : rows) {
      nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
      for (Eigen::Index i = 0; i < r.matrix.rows(); ++i) {
        nlohmann::json rr = nlohmann::json::array(), ii = nlohmann::json::array();
        for (Eigen::Index j = 0; j < r.matrix.cols(); ++j) rr.push_back(r.matrix(i, j).real()), ii.push_back(r.matrix(i, j).imag());
        re.push_back(rr), im.push_back(ii);
      }
      records.push_back({{"gate", r.name}, {"implementation", r.implementation}, {"leakage", r.leakage},
                         {"residual", r.residual}, {"tolerance", r.tolerance}, {"passed", r.passed()},
                         {"matrix_real", re}, {"matrix_imag", im}});
      ok = ok && r.passed();
    }
    emit(nlohmann::json{{"config", to_json(c)}, {"records", records}, {"summary", {{"passed", ok}}}}.dump(2) + "\n",
         c.output_path, out);
  } else {
    std::ostringstream s;
    for (const auto& r : rows) {
      s << (r.passed() ? "PASS " : "FAIL ") << r.name << "  [" << r.implementation << "]\n"
        << "  residual=" << format_double(r.residual) << " tol=" << format_double(r.tolerance)
        << " leakage=" << format_double(r.leakage) << "\n";
      if (r.matrix.rows() == 4) s << format_matrix(r.matrix);
      ok = ok && r.passed();
    }
    emit(s.str(), c.output_path, out);
  }
  return ok ? kSuccess : kVerificationFailure;
}

// ---------------------------------------------------------------- entry point

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fourier cat code: verification, loss sweeps and logical gates", "fcat"};
  app.fallthrough();
  app.require_subcommand(1);

  std::optional<double> alpha, phi, gamma;
  std::optional<int> cutoff;
  std::optional<std::string> grid, format, out_path, config_path;
  app.add_option("--alpha", alpha, "coherent amplitude alpha (constellation (alpha, alpha e^{i phi}))");
  app.add_option("--phi", phi, "relative phase of the second mode, radians");
  app.add_option("--gamma", gamma, "loss probability in [0, 1)");
  app.add_option("--cutoff", cutoff, "Fock cutoff per mode (>= 10)");
  app.add_option("--grid", grid, "sweep grid start:stop:step or start:stop:Nlog");
  app.add_option("--format", format, "csv or json");
  app.add_option("--out", out_path, "output file (default: standard output)");
  app.add_option("--config", config_path, "JSON config file; flags override its values");

  auto* verify = app.add_subcommand("verify", "run every invariant check");
  auto* sweep_a = app.add_subcommand("sweep-alpha", "Petz infidelity against alpha");
  auto* sweep_g = app.add_subcommand("sweep-gamma", "Petz infidelity against gamma, with log-log slope");
  auto* gates = app.add_subcommand("gates-demo", "logical action of each physical gate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kConfigError;
  }

  try {
    RunConfig c = config_path ? load_config_file(*config_path) : RunConfig{};
    if (alpha) c.alpha = *alpha;
    if (phi) c.phi = *phi;
    if (gamma) c.gamma = *gamma;
    if (cutoff) c.cutoff = *cutoff;
    if (format) c.format = parse_format(*format);
    if (out_path) c.output_path = *out_path;
    if (grid) {
      if (sweep_a->parsed()) c.alpha_grid = parse_grid(*grid);
      else if (sweep_g->parsed()) c.gamma_grid = parse_grid(*grid);
      else throw config_error("--grid only applies to sweep commands");
    }
    validate(c);
    if (verify->parsed()) return cmd_verify(c, out, err);
    if (sweep_a->parsed()) return cmd_sweep_alpha(c, out, err);
    if (sweep_g->parsed()) return cmd_sweep_gamma(c, out, err);
    if (gates->parsed()) return cmd_gates_demo(c, out, err);
    return kConfigError;
  } catch (const config_error& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const io_error& e) {
    err << "I/O error: " << e.what() << "\n";
    return kIoError;
  } catch (const input_error& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const numerical_error& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kVerificationFailure;
  }
}

}  // namespace fcat::cli
