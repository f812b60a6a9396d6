#pragma once

// Configuration parsing, subcommand dispatch and deterministic CSV/JSON
// emission.  Configs are flat `key = value` documents with `#` comments;
// identical configs produce byte-identical output (17 significant digits,
// fixed column sets, atomic file writes).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "diracwave/frames.hpp"

namespace diracwave {

inline constexpr const char* tool_version = "diracwave 0.1.0";

struct RunConfig {
  // exactly one parameter block
  std::optional<NormalizedConfig> normalized;
  std::optional<PhysicalInput> physical;

  StateKind kind = StateKind::Ground;
  Branch branch = Branch::Plus;
  DSign d_sign = DSign::Minus;
  int epsilon = +1;

  double t_start = 0.0;
  double t_end = 0.0; // 0 means one carrier period
  int samples = 65;
  double z = 0.0;

  double c_g = 1.0;
  double c_e2 = 0.0;

  std::string sweep_param;      // e0 | h | omega_n
  std::string sweep_observable; // see run(); default energy_avg
  double sweep_start = 0.0;
  double sweep_end = 0.0;
  int sweep_steps = 1;

  TransformParams frame_params;
  bool gamma_given = false;
  double eta = 0.0;

  int grid_points = 256;
  double fd_step = 1e-3;

  std::string format = "csv";

  /// The effective dimensionless parameters for the run.
  NormalizedConfig effective() const {
    NormalizedConfig cfg;
    if (normalized) {
      cfg = *normalized;
    } else if (physical) {
      cfg = normalize_input(*physical, d_sign, branch);
    } else {
      throw std::domain_error("RunConfig: no parameter block present");
    }
    cfg.branch = branch;
    cfg.d_sign = d_sign;
    cfg.validate();
    return cfg;
  }
};

struct EmittedTable {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

namespace detail {

inline std::string format_g17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct KeyValue {
  std::string key, value;
  int line = 0;
};

inline std::vector<KeyValue> parse_kv(const std::string& text,
                                      const std::string& origin) {
  std::vector<KeyValue> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::domain_error(origin + ":" + std::to_string(lineno) +
                              ": expected `key = value`");
    KeyValue kv;
    kv.key = trim(line.substr(0, eq));
    kv.value = trim(line.substr(eq + 1));
    kv.line = lineno;
    if (kv.key.empty() || kv.value.empty())
      throw std::domain_error(origin + ":" + std::to_string(lineno) +
                              ": empty key or value");
    out.push_back(kv);
  }
  return out;
}

inline double parse_double(const KeyValue& kv, const std::string& origin) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(kv.value, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != kv.value.size())
    throw std::domain_error(origin + ":" + std::to_string(kv.line) +
                            ": key `" + kv.key + "` expects a number, got `" +
                            kv.value + "`");
  return v;
}

inline int parse_int(const KeyValue& kv, const std::string& origin) {
  const double v = parse_double(kv, origin);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw std::domain_error(origin + ":" + std::to_string(kv.line) +
                            ": key `" + kv.key + "` expects an integer");
  return i;
}

} // namespace detail

/// Parse a flat key-value configuration document; `overrides` are extra
/// `key=value` entries (from --set) applied after the document.
inline RunConfig load_config(const std::string& text,
                             const std::vector<std::string>& overrides = {},
                             const std::string& origin = "config") {
  auto kvs = detail::parse_kv(text, origin);
  {
    std::map<std::string, int> seen;
    for (const auto& kv : kvs) {
      if (seen.count(kv.key))
        throw std::domain_error(origin + ":" + std::to_string(kv.line) +
                                ": duplicate key `" + kv.key + "` (first at line " +
                                std::to_string(seen[kv.key]) + ")");
      seen[kv.key] = kv.line;
    }
  }
  for (const auto& ov : overrides) {
    auto extra = detail::parse_kv(ov, "--set");
    for (auto& kv : extra) {
      std::erase_if(kvs, [&](const detail::KeyValue& e) { return e.key == kv.key; });
      kvs.push_back(kv);
    }
  }

  static const std::vector<std::string> normalized_keys{"e0", "h", "omega_n"};
  static const std::vector<std::string> physical_keys{"H", "H3", "Omega",
                                                      "mass", "charge"};
  bool has_norm = false, has_phys = false;
  for (const auto& kv : kvs) {
    for (const auto& k : normalized_keys) has_norm |= kv.key == k;
    for (const auto& k : physical_keys) has_phys |= kv.key == k;
  }
  if (has_norm && has_phys)
    throw std::domain_error(
        origin + ": both normalized (e0/h/omega_n) and physical "
                 "(H/H3/Omega/mass/charge) parameter blocks present");
  if (!has_norm && !has_phys)
    throw std::domain_error(
        origin + ": no parameter block; required keys are either "
                 "{e0, h[, omega_n]} or {H, H3, Omega[, mass, charge]}");

  RunConfig rc;
  NormalizedConfig ncfg; // defaults: e0=1, h=0, omega_n=1e-6
  ncfg.h = 0.0;
  PhysicalInput pin;
  bool have_e0 = false, have_h = false;

  for (const auto& kv : kvs) {
    const std::string& k = kv.key;
    if (k == "e0") { ncfg.e0 = detail::parse_double(kv, origin); have_e0 = true; }
    else if (k == "h") { ncfg.h = detail::parse_double(kv, origin); have_h = true; }
    else if (k == "omega_n") ncfg.omega_n = detail::parse_double(kv, origin);
    else if (k == "H") pin.wave_amplitude_H = detail::parse_double(kv, origin);
    else if (k == "H3") pin.static_field_H3 = detail::parse_double(kv, origin);
    else if (k == "Omega") pin.frequency_Omega = detail::parse_double(kv, origin);
    else if (k == "mass") pin.mass_m = detail::parse_double(kv, origin);
    else if (k == "charge") pin.charge_e = detail::parse_double(kv, origin);
    else if (k == "epsilon") rc.epsilon = detail::parse_int(kv, origin);
    else if (k == "kind") {
      if (kv.value == "ground") rc.kind = StateKind::Ground;
      else if (kv.value == "excited1") rc.kind = StateKind::Excited1;
      else if (kv.value == "excited2") rc.kind = StateKind::Excited2;
      else
        throw std::domain_error(origin + ":" + std::to_string(kv.line) +
                                ": kind must be ground|excited1|excited2");
    } else if (k == "branch") {
      if (kv.value == "plus") rc.branch = Branch::Plus;
      else if (kv.value == "minus") rc.branch = Branch::Minus;
      else
        throw std::domain_error(origin + ":" + std::to_string(kv.line) +
                                ": branch must be plus|minus");
    } else if (k == "d_sign") {
      if (kv.value == "plus") rc.d_sign = DSign::Plus;
      else if (kv.value == "minus") rc.d_sign = DSign::Minus;
      else
        throw std::domain_error(origin + ":" + std::to_string(kv.line) +
                                ": d_sign must be plus|minus");
    } else if (k == "t_start") rc.t_start = detail::parse_double(kv, origin);
    else if (k == "t_end") rc.t_end = detail::parse_double(kv, origin);
    else if (k == "samples") rc.samples = detail::parse_int(kv, origin);
    else if (k == "z") rc.z = detail::parse_double(kv, origin);
    else if (k == "c_g") rc.c_g = detail::parse_double(kv, origin);
    else if (k == "c_e2") rc.c_e2 = detail::parse_double(kv, origin);
    else if (k == "sweep_param") rc.sweep_param = kv.value;
    else if (k == "sweep_observable") rc.sweep_observable = kv.value;
    else if (k == "sweep_start") rc.sweep_start = detail::parse_double(kv, origin);
    else if (k == "sweep_end") rc.sweep_end = detail::parse_double(kv, origin);
    else if (k == "sweep_steps") rc.sweep_steps = detail::parse_int(kv, origin);
    else if (k == "tau") rc.frame_params.tau = detail::parse_double(kv, origin);
    else if (k == "lambda") rc.frame_params.lambda_len = detail::parse_double(kv, origin);
    else if (k == "gamma") { rc.frame_params.gamma = detail::parse_double(kv, origin); rc.gamma_given = true; }
    else if (k == "v") rc.frame_params.v = detail::parse_double(kv, origin);
    else if (k == "n") rc.frame_params.n = detail::parse_int(kv, origin);
    else if (k == "eta") rc.eta = detail::parse_double(kv, origin);
    else if (k == "grid_points") rc.grid_points = detail::parse_int(kv, origin);
    else if (k == "fd_step") rc.fd_step = detail::parse_double(kv, origin);
    else if (k == "format") {
      if (kv.value != "csv" && kv.value != "json")
        throw std::domain_error(origin + ":" + std::to_string(kv.line) +
                                ": format must be csv|json");
      rc.format = kv.value;
    } else {
      throw std::domain_error(origin + ":" + std::to_string(kv.line) +
                              ": unknown key `" + k + "`");
    }
  }

  if (has_norm) {
    if (!have_e0 || !have_h)
      throw std::domain_error(origin +
                              ": normalized block requires both e0 and h");
    ncfg.epsilon = rc.epsilon;
    ncfg.branch = rc.branch;
    ncfg.d_sign = rc.d_sign;
    ncfg.validate();
    rc.normalized = ncfg;
  } else {
    pin.propagation_sign_epsilon = rc.epsilon;
    pin.validate();
    rc.physical = pin;
  }
  if (rc.samples < 2)
    throw std::domain_error(origin + ": samples must be >= 2");
  if (rc.sweep_steps < 1)
    throw std::domain_error(origin + ": sweep_steps must be >= 1");
  if (rc.grid_points < 8)
    throw std::domain_error(origin + ": grid_points must be >= 8");
  return rc;
}

inline RunConfig load_config_file(const std::string& path,
                                  const std::vector<std::string>& overrides = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::domain_error("cannot open config file `" + path + "`");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_config(buf.str(), overrides, path);
}

namespace detail {

/// Effective configuration echo; parseable back into the same RunConfig.
inline std::vector<std::pair<std::string, std::string>> config_echo(
    const RunConfig& rc) {
  std::vector<std::pair<std::string, std::string>> kv;
  auto num = [&](const char* k, double v) { kv.emplace_back(k, format_g17(v)); };
  auto str = [&](const char* k, const std::string& v) { kv.emplace_back(k, v); };
  if (rc.normalized) {
    num("e0", rc.normalized->e0);
    num("h", rc.normalized->h);
    num("omega_n", rc.normalized->omega_n);
  } else if (rc.physical) {
    num("H", rc.physical->wave_amplitude_H);
    num("H3", rc.physical->static_field_H3);
    num("Omega", rc.physical->frequency_Omega);
    num("mass", rc.physical->mass_m);
    num("charge", rc.physical->charge_e);
  }
  kv.emplace_back("epsilon", std::to_string(rc.epsilon));
  str("kind", to_string(rc.kind));
  str("branch", rc.branch == Branch::Plus ? "plus" : "minus");
  str("d_sign", rc.d_sign == DSign::Plus ? "plus" : "minus");
  num("t_start", rc.t_start);
  num("t_end", rc.t_end);
  kv.emplace_back("samples", std::to_string(rc.samples));
  num("z", rc.z);
  num("c_g", rc.c_g);
  num("c_e2", rc.c_e2);
  if (!rc.sweep_param.empty()) {
    str("sweep_param", rc.sweep_param);
    str("sweep_observable",
        rc.sweep_observable.empty() ? "energy_avg" : rc.sweep_observable);
    num("sweep_start", rc.sweep_start);
    num("sweep_end", rc.sweep_end);
    kv.emplace_back("sweep_steps", std::to_string(rc.sweep_steps));
  }
  num("tau", rc.frame_params.tau);
  num("lambda", rc.frame_params.lambda_len);
  if (rc.gamma_given) num("gamma", rc.frame_params.gamma);
  num("v", rc.frame_params.v);
  kv.emplace_back("n", std::to_string(rc.frame_params.n));
  num("eta", rc.eta);
  kv.emplace_back("grid_points", std::to_string(rc.grid_points));
  num("fd_step", rc.fd_step);
  str("format", rc.format);
  return kv;
}

inline void start_table(EmittedTable& t, const RunConfig& rc) {
  t.metadata.emplace_back("version", tool_version);
  for (auto& kv : config_echo(rc)) t.metadata.push_back(kv);
}

} // namespace detail

/// Execute a subcommand.  Valid subcommands: solve, expand, state,
/// observables, timeseries, frames, sweep.
inline EmittedTable run(const RunConfig& rc, const std::string& subcommand) {
  EmittedTable t;
  detail::start_table(t, rc);
  const NormalizedConfig cfg = rc.effective();
  const GridSpec grid{rc.grid_points, 6.0};
  if (rc.d_sign == DSign::Plus && subcommand != "state")
    throw std::domain_error(
        "d_sign = plus (the reflected family) is supported by the `state` "
        "subcommand only; closed-form observables cover d_sign = minus");

  if (subcommand == "solve") {
    const double p = singular_momentum(rc.kind, cfg);
    const double lam = lambda_param(rc.kind, p, cfg);
    const EnergyRoots roots = characteristic_roots(rc.kind, cfg, lam);
    const CharacteristicPoly poly = characteristic_poly(rc.kind, cfg, lam);
    t.header = {"root_index", "root_re", "root_im", "in_singular_pair",
                "abs_poly_residual"};
    for (int i = 0; i < 3; ++i) {
      const cplx r = roots.roots[static_cast<std::size_t>(i)];
      const bool sing = i == roots.singular_pair[0] || i == roots.singular_pair[1];
      t.rows.push_back({static_cast<double>(i), r.real(), r.imag(),
                        sing ? 1.0 : 0.0, std::abs(poly.eval(r))});
    }
    return t;
  }

  if (subcommand == "expand") {
    t.header = {"branch_sign", "c0", "c1", "c2", "exact_root", "series_value",
                "abs_error"};
    for (Branch b : {Branch::Plus, Branch::Minus}) {
      NormalizedConfig c2 = cfg;
      c2.branch = b;
      const SeriesExpansion s = singular_series(rc.kind, c2);
      const double root = singular_root(rc.kind, c2).real();
      const double sval = s.eval(c2.h);
      t.rows.push_back({static_cast<double>(branch_sign(b)), s.c0, s.c1, s.c2,
                        root, sval, std::abs(root - sval)});
    }
    return t;
  }

  if (subcommand == "state") {
    const StateSolution st =
        build_state(rc.kind, cfg, rc.d_sign == DSign::Plus);
    const double norm_rot =
        quadrature_norm(st, FrameTag::Rotating, 0.0, rc.z, grid);
    const double t_probe = cfg.omega_n > 0.0 ? 0.37 / cfg.omega_n : 0.0;
    const double norm_lab =
        quadrature_norm(st, FrameTag::Initial, t_probe, rc.z, grid);
    const double resid =
        dirac_residual(st, default_sample_points(st), 0.0, rc.fd_step);
    t.header = {"kind_id", "branch_sign", "e0", "h", "omega_n", "epsilon",
                "energy", "p_tilde", "lambda", "d", "d2_re", "d2_im",
                "norm_const", "norm_rotating", "norm_initial",
                "dirac_residual"};
    t.rows.push_back({static_cast<double>(static_cast<int>(rc.kind)),
                      static_cast<double>(branch_sign(cfg.branch)), cfg.e0,
                      cfg.h, cfg.omega_n, static_cast<double>(cfg.epsilon),
                      st.energy_e, st.p_tilde, st.lambda, st.envelope.d,
                      st.envelope.d2.real(), st.envelope.d2.imag(),
                      st.norm_const, norm_rot, norm_lab, resid});
    return t;
  }

  if (subcommand == "observables") {
    const StateSolution st = build_state(rc.kind, cfg);
    const double tt = rc.t_start, zz = rc.z;
    const double e_closed = average_energy(st);
    const double e_quad =
        observable_quadrature(st, OperatorSpec::Hamiltonian, tt, zz, grid);
    const auto p_closed = average_momentum(st, tt, zz);
    const auto s_closed = average_spin(st, tt, zz);
    std::array<double, 3> p_quad{}, s_quad{};
    for (int k = 0; k < 3; ++k) {
      p_quad[static_cast<std::size_t>(k)] = observable_quadrature(
          st,
          static_cast<OperatorSpec>(
              static_cast<int>(OperatorSpec::MomentumCanonical1) + k),
          tt, zz, grid);
      s_quad[static_cast<std::size_t>(k)] =
          0.5 * observable_quadrature(
                    st,
                    static_cast<OperatorSpec>(
                        static_cast<int>(OperatorSpec::Sigma1) + k),
                    tt, zz, grid);
    }
    t.header = {"t",         "z",         "energy_closed", "energy_quad",
                "p1_closed", "p1_quad",   "p2_closed",     "p2_quad",
                "p3_closed", "p3_quad",   "s1_closed",     "s1_quad",
                "s2_closed", "s2_quad",   "s3_closed",     "s3_quad"};
    t.rows.push_back({tt, zz, e_closed, e_quad, p_closed[0], p_quad[0],
                      p_closed[1], p_quad[1], p_closed[2], p_quad[2],
                      s_closed[0], s_quad[0], s_closed[1], s_quad[1],
                      s_closed[2], s_quad[2]});
    return t;
  }

  if (subcommand == "timeseries") {
    const double t_end =
        rc.t_end != 0.0
            ? rc.t_end
            : (cfg.omega_n > 0.0 ? 2.0 * M_PI / cfg.omega_n : 1.0);
    ObservableSeries s;
    if (rc.kind == StateKind::Ground) {
      const MixedState mix = make_mixed_state(cfg, rc.c_g, rc.c_e2);
      s = mixed_series(mix, rc.t_start, t_end, rc.samples, rc.z);
    } else {
      if (rc.c_e2 != 0.0)
        throw std::domain_error(
            "timeseries: mixed traces pair the ground state with excited2; "
            "set kind = ground");
      const StateSolution st = build_state(rc.kind, cfg);
      s = single_series(st, rc.t_start, t_end, rc.samples, rc.z);
    }
    t.header = {"t"};
    for (const auto& [name, _] : s.columns) t.header.push_back(name);
    for (std::size_t i = 0; i < s.times.size(); ++i) {
      std::vector<double> row{s.times[i]};
      for (const auto& [_, col] : s.columns) row.push_back(col[i]);
      t.rows.push_back(std::move(row));
    }
    return t;
  }

  if (subcommand == "frames") {
    TransformParams par = rc.frame_params;
    const double v_z = fermion_vz(cfg);
    if (!rc.gamma_given) par.gamma = 1.0 / v_z;
    const double p_seed = singular_momentum(rc.kind, cfg);
    const double E_seed =
        singular_root(rc.kind, cfg).real() + cfg.epsilon * p_seed;
    const double quant = quantization_residual(E_seed, p_seed, par);
    const PrimedParameters pr =
        primed_parameters(E_seed, p_seed, par, v_z, cfg.omega_n, cfg.k());
    const auto coefs = phase_identity_coefficients(E_seed, p_seed, par,
                                                   cfg.omega_n, cfg.k(), v_z);
    double phase_max = 0.0;
    const FrameEvent events[] = {{0.3, 1.0, 0.2, 0.1},
                                 {-1.1, 2.0, 0.4, -0.3},
                                 {2.2, 0.5, -0.7, 0.9}};
    for (const FrameEvent& ev : events)
      phase_max = std::max(
          phase_max, std::abs(phase_identity_residual(
                         E_seed, p_seed, par, ev, cfg.omega_n, cfg.k(), v_z)));
    const double con0 = con0_residual(par, cfg, rc.eta);
    const double tau_solved =
        con0_solve_tau(par.lambda_len, par, cfg, rc.eta);
    double E_c = E_seed, p_c = p_seed, q_c = 0.0, ch_c = 0.0;
    if (par.tau != 0.0 || par.lambda_len != 0.0) {
      const CoupledSolution cs = solve_nongalilean_state(rc.kind, cfg, par);
      E_c = cs.E;
      p_c = cs.p;
      q_c = cs.quantization;
      ch_c = cs.characteristic;
    }
    const auto labels = state_integers(rc.kind, par.n);
    t.header = {"v_z",        "E_seed",     "p_seed",   "quant_residual",
                "E_primed",   "p_primed",   "coef_phi", "coef_z",
                "coef_t",     "phase_residual_max",     "con0_residual",
                "tau_solved", "beat_freq",  "freq_ng",  "n",
                "poly_degree", "coupled_E", "coupled_p",
                "coupled_quant_residual", "coupled_char_residual"};
    t.rows.push_back({v_z, E_seed, p_seed, quant, pr.E_primed, pr.p_primed,
                      coefs[0], coefs[1], coefs[2], phase_max, con0,
                      tau_solved, beat_frequency(cfg), frequency_ng(cfg),
                      static_cast<double>(labels.first),
                      static_cast<double>(labels.second), E_c, p_c, q_c,
                      ch_c});
    return t;
  }

  if (subcommand == "sweep") {
    if (rc.sweep_param.empty())
      throw std::domain_error("sweep: sweep_param is required");
    const std::string obs =
        rc.sweep_observable.empty() ? "energy_avg" : rc.sweep_observable;
    t.header = {rc.sweep_param, obs};
    for (int i = 0; i < rc.sweep_steps; ++i) {
      const double x =
          rc.sweep_steps == 1
              ? rc.sweep_start
              : rc.sweep_start +
                    (rc.sweep_end - rc.sweep_start) * i / (rc.sweep_steps - 1);
      NormalizedConfig c2 = cfg;
      if (rc.sweep_param == "e0") c2.e0 = x;
      else if (rc.sweep_param == "h") c2.h = x;
      else if (rc.sweep_param == "omega_n") c2.omega_n = x;
      else
        throw std::domain_error("sweep: sweep_param must be e0|h|omega_n");
      c2.validate();
      double y = 0.0;
      if (obs == "energy_avg") y = (c2.e0 * c2.e0 + 1.0) / c2.e0;
      else if (obs == "singular_root")
        y = singular_root(rc.kind, c2).real();
      else if (obs == "series_error") y = series_vs_root_error(rc.kind, c2);
      else if (obs == "beat_frequency") y = beat_frequency(c2);
      else if (obs == "frequency_ng") y = frequency_ng(c2);
      else if (obs == "resonance_residual") y = resonance_check(c2).residual;
      else
        throw std::domain_error(
            "sweep: sweep_observable must be one of energy_avg, "
            "singular_root, series_error, beat_frequency, frequency_ng, "
            "resonance_residual");
      t.rows.push_back({x, y});
    }
    return t;
  }

  throw std::domain_error("unknown subcommand `" + subcommand +
                          "`; expected solve, expand, state, observables, "
                          "timeseries, frames or sweep");
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

namespace detail {

inline std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

} // namespace detail

namespace detail {
inline void check_rectangular(const EmittedTable& t) {
  for (const auto& row : t.rows)
    if (row.size() != t.header.size())
      throw std::logic_error("EmittedTable: ragged row");
}
} // namespace detail

inline std::string render_csv(const EmittedTable& t) {
  detail::check_rectangular(t);
  std::string out;
  for (const auto& [k, v] : t.metadata) out += "# " + k + " = " + v + "\n";
  for (std::size_t i = 0; i < t.header.size(); ++i)
    out += (i ? "," : "") + t.header[i];
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out += (i ? "," : "") + detail::format_g17(row[i]);
    out += "\n";
  }
  return out;
}

inline std::string render_json(const EmittedTable& t) {
  detail::check_rectangular(t);
  std::string out = "{\n  \"metadata\": {";
  for (std::size_t i = 0; i < t.metadata.size(); ++i) {
    out += i ? ",\n    " : "\n    ";
    out += "\"" + detail::json_escape(t.metadata[i].first) + "\": \"" +
           detail::json_escape(t.metadata[i].second) + "\"";
  }
  out += "\n  },\n  \"columns\": [";
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    out += i ? ", " : "";
    out += "\"" + detail::json_escape(t.header[i]) + "\"";
  }
  out += "],\n  \"rows\": [\n";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    out += "    [";
    for (std::size_t i = 0; i < t.rows[r].size(); ++i)
      out += (i ? ", " : "") + detail::format_g17(t.rows[r][i]);
    out += r + 1 < t.rows.size() ? "],\n" : "]\n";
  }
  out += "  ]\n}\n";
  return out;
}

/// Serialize the table and write it atomically (temp file + rename); an
/// empty path writes to stdout.
inline void emit(const EmittedTable& t, const std::string& format,
                 const std::string& path) {
  if (format != "csv" && format != "json")
    throw std::domain_error("emit: format must be csv|json");
  const std::string payload = format == "csv" ? render_csv(t) : render_json(t);
  if (path.empty()) {
    std::fwrite(payload.data(), 1, payload.size(), stdout);
    return;
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("emit: cannot open `" + tmp + "`");
    out.write(payload.data(),
              static_cast<std::streamsize>(payload.size()));
    if (!out) throw std::runtime_error("emit: short write to `" + tmp + "`");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("emit: cannot rename into `" + path +
                             "`: " + ec.message());
  }
}

} // namespace diracwave
