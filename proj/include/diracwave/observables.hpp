#pragma once

// Closed-form and quadrature averages of energy, momentum and spin for
// single and mixed singular states; resonance condition; beat frequency;
// the non-relativistic Pauli reference; time-series generation.
//
// Closed forms are first-approximation expressions (terms of order h and
// hbar*Omega neglected); the quadrature operator acts on the
// exact wavefunctions and serves as the independent oracle.  The momentum
// closed forms are canonical averages <-i grad>; the kinetic variant is
// exposed as its own operator.

#include <string>
#include <vector>

#include "diracwave/states.hpp"

namespace diracwave {

struct ObservableSeries {
  std::vector<double> times;
  std::vector<std::pair<std::string, std::vector<double>>> columns;
  std::string label;

  void validate() const {
    for (std::size_t i = 1; i < times.size(); ++i)
      if (!(times[i] > times[i - 1]))
        throw std::domain_error("ObservableSeries: times must increase");
    for (const auto& [name, col] : columns)
      if (col.size() != times.size())
        throw std::domain_error("ObservableSeries: ragged column " + name);
  }
};

/// omega_m = mu H / hbar; in natural units h*Omega/2.
inline double precession_frequency(const NormalizedConfig& cfg) {
  return cfg.h * cfg.omega_n / 2.0;
}

/// Beat frequency of the ground/excited-2 mixture.
inline double beat_frequency(const NormalizedConfig& cfg) {
  const double A = cfg.e0 * cfg.e0 + 1.0;
  return 2.0 * cfg.e0 * cfg.e0 * precession_frequency(cfg) /
         std::sqrt(A * A * A);
}

// ---------------------------------------------------------------------------
// Closed forms for single singular states
// ---------------------------------------------------------------------------

namespace detail {
inline void require_default_family(const StateSolution& st, const char* op) {
  if (st.plus_transform)
    throw std::domain_error(std::string(op) +
                            ": closed forms cover the default d-sign family "
                            "only (psi_plus states unsupported)");
}
} // namespace detail

/// E_a = (e0^2+1)/e0 plus the kind's hbar*Omega/2 multiple, in mc^2 units.
inline double average_energy(const StateSolution& st) {
  detail::require_default_family(st, "average_energy");
  const double e0 = st.config.e0;
  double corr = 0.0;
  switch (st.kind) {
    case StateKind::Ground: corr = 0.5; break;
    case StateKind::Excited1: corr = -0.5; break;
    case StateKind::Excited2: corr = 1.5; break;
  }
  return (e0 * e0 + 1.0) / e0 + corr * st.config.omega_n;
}

/// Canonical average momentum components in mc units.
inline std::array<double, 3> average_momentum(const StateSolution& st,
                                              double t, double z) {
  detail::require_default_family(st, "average_momentum");
  const double e0 = st.config.e0;
  const double amp = -branch_sign(st.config.branch) * 0.5 *
                     std::sqrt(e0 * e0 + 1.0);
  const double th = wave_phase(st.config, t, z);
  return {amp * std::cos(th), amp * std::sin(th), st.config.epsilon / e0};
}

/// Average spin components in hbar units (s3 = 0 in first approximation).
inline std::array<double, 3> average_spin(const StateSolution& st, double t,
                                          double z) {
  detail::require_default_family(st, "average_spin");
  const double e0 = st.config.e0;
  const double amp = -branch_sign(st.config.branch) * 0.5 *
                     st.config.epsilon * e0 / std::sqrt(e0 * e0 + 1.0);
  const double th = wave_phase(st.config, t, z);
  return {amp * std::cos(th), amp * std::sin(th), 0.0};
}

// ---------------------------------------------------------------------------
// Quadrature oracle
// ---------------------------------------------------------------------------

enum class OperatorSpec {
  Identity,
  Hamiltonian,
  MomentumCanonical1,
  MomentumCanonical2,
  MomentumCanonical3,
  MomentumKinetic1,
  MomentumKinetic2,
  MomentumKinetic3,
  Sigma1,
  Sigma2,
  Sigma3,
};

namespace detail {

inline double operator_density(OperatorSpec op, const WavefunctionGradient& g,
                               const std::array<double, 3>& eA) {
  const DiracAlgebra& a = algebra();
  const cplx I{0.0, 1.0};
  switch (op) {
    case OperatorSpec::Identity:
      return g.value.norm2();
    case OperatorSpec::Hamiltonian: {
      Vec4 H = a.beta * g.value;
      for (int k = 0; k < 3; ++k)
        H += a.alpha[static_cast<std::size_t>(k)] *
             (g.grad[static_cast<std::size_t>(k)] * (-I) -
              g.value * eA[static_cast<std::size_t>(k)]);
      return dot(g.value, H).real();
    }
    case OperatorSpec::MomentumCanonical1:
    case OperatorSpec::MomentumCanonical2:
    case OperatorSpec::MomentumCanonical3: {
      const int k = static_cast<int>(op) -
                    static_cast<int>(OperatorSpec::MomentumCanonical1);
      return dot(g.value, g.grad[static_cast<std::size_t>(k)] * (-I)).real();
    }
    case OperatorSpec::MomentumKinetic1:
    case OperatorSpec::MomentumKinetic2:
    case OperatorSpec::MomentumKinetic3: {
      const int k = static_cast<int>(op) -
                    static_cast<int>(OperatorSpec::MomentumKinetic1);
      return dot(g.value, g.grad[static_cast<std::size_t>(k)] * (-I) -
                              g.value * eA[static_cast<std::size_t>(k)])
          .real();
    }
    case OperatorSpec::Sigma1:
    case OperatorSpec::Sigma2:
    case OperatorSpec::Sigma3: {
      const int k =
          static_cast<int>(op) - static_cast<int>(OperatorSpec::Sigma1);
      return dot(g.value, a.sigma[static_cast<std::size_t>(k)] * g.value)
          .real();
    }
  }
  throw std::logic_error("operator_density: bad operator");
}

template <class GradFn>
double quadrature_of(GradFn&& gradient, const StateSolution& field_ref,
                     OperatorSpec op, double t, double z,
                     const GridSpec& grid) {
  const double hw =
      grid.half_width_factor / std::sqrt(field_ref.envelope.d);
  const auto center = density_center(field_ref, FrameTag::Initial, t, z);
  const double th = wave_phase(field_ref.config, t, z);
  auto dens = [&](double x, double y) {
    const WavefunctionGradient g = gradient(x, y);
    const auto A2 = vector_potential_eA(field_ref, x, y, th);
    return operator_density(op, g, {A2[0], A2[1], 0.0});
  };
  const double full = tensor_integral(center, hw, grid.points, dens);
  const double coarse =
      tensor_integral(center, hw, (2 * grid.points) / 3, dens);
  if (std::abs(full - coarse) > 1e-7 * std::max(1.0, std::abs(full)))
    throw std::runtime_error("observable_quadrature: not converged");
  return full;
}

} // namespace detail

/// Cross-section expectation value of the operator on a single state.
/// Spin operators return the sigma_k integral; multiply by hbar/2 = 1/2 for
/// the spin vector s_k = (hbar/2) <sigma_k>.
inline double observable_quadrature(const StateSolution& st, OperatorSpec op,
                                    double t, double z,
                                    const GridSpec& grid = {}) {
  auto g = [&](double x, double y) {
    return wavefunction_gradient_at(st, x, y, z, t);
  };
  return detail::quadrature_of(g, st, op, t, z, grid);
}

// ---------------------------------------------------------------------------
// Mixed states
// ---------------------------------------------------------------------------

/// Normalized superposition of the ground and second-excited states at the
/// same momentum.  Opposite-branch mixes are allowed but flagged; their
/// cross terms are suppressed by the Gaussian overlap factor.
struct MixedState {
  cplx c_g{1.0, 0.0};
  cplx c_e2{0.0, 0.0};
  StateSolution ground;
  StateSolution excited2;
  bool opposite_branch = false;

  /// Exact rotating-frame beat E~_e2 - E~_g.
  double beat_delta() const {
    return excited2.rotating_energy() - ground.rotating_energy();
  }
};

inline MixedState make_mixed_state(const NormalizedConfig& cfg_ground,
                                   const NormalizedConfig& cfg_excited2,
                                   cplx c_g, cplx c_e2) {
  MixedState mix;
  mix.c_g = c_g;
  mix.c_e2 = c_e2;
  if (std::abs(std::norm(c_g) + std::norm(c_e2) - 1.0) > 1e-12)
    throw std::domain_error("MixedState: |c_g|^2 + |c_e2|^2 must be 1");
  mix.ground = build_state(StateKind::Ground, cfg_ground);
  mix.excited2 = build_state(StateKind::Excited2, cfg_excited2);
  if (std::abs(mix.ground.p_tilde - mix.excited2.p_tilde) >
      1e-12 * std::max(1.0, std::abs(mix.ground.p_tilde)))
    throw std::domain_error("MixedState: constituent momenta must be equal");
  mix.opposite_branch = cfg_ground.branch != cfg_excited2.branch;
  return mix;
}

inline MixedState make_mixed_state(const NormalizedConfig& cfg, cplx c_g,
                                   cplx c_e2) {
  return make_mixed_state(cfg, cfg, c_g, c_e2);
}

inline Vec4 mixed_wavefunction_at(const MixedState& mix, double x, double y,
                                  double z, double t, FrameTag frame) {
  return mix.c_g * wavefunction_at(mix.ground, x, y, z, t, frame) +
         mix.c_e2 * wavefunction_at(mix.excited2, x, y, z, t, frame);
}

/// Quadrature expectation on the explicitly evolved superposition.
inline double observable_quadrature(const MixedState& mix, OperatorSpec op,
                                    double t, double z,
                                    const GridSpec& grid = {}) {
  auto g = [&](double x, double y) {
    const WavefunctionGradient a =
        wavefunction_gradient_at(mix.ground, x, y, z, t);
    const WavefunctionGradient b =
        wavefunction_gradient_at(mix.excited2, x, y, z, t);
    WavefunctionGradient out;
    out.value = mix.c_g * a.value + mix.c_e2 * b.value;
    for (int k = 0; k < 3; ++k)
      out.grad[static_cast<std::size_t>(k)] =
          mix.c_g * a.grad[static_cast<std::size_t>(k)] +
          mix.c_e2 * b.grad[static_cast<std::size_t>(k)];
    return out;
  };
  return detail::quadrature_of(g, mix.ground, op, t, z, grid);
}

/// Closed-form mixed spin, hbar units.  The beat factor generalizes the
/// canonical real mixes: F(t) = 1 + 2 Re(conj(c_g) c_e2 e^{i b omega t}),
/// b the branch sign, which is 1 +- cos(omega t) at c_g = +-c_e2 = 1/sqrt2
/// and reduces exactly to the single-state trace at c_e2 = 0.
inline std::array<double, 3> mixed_spin(const MixedState& mix, double t,
                                        double z) {
  if (std::abs(mix.ground.p_tilde - mix.excited2.p_tilde) >
      1e-12 * std::max(1.0, std::abs(mix.ground.p_tilde)))
    throw std::domain_error("mixed_spin: constituent momenta differ");
  const NormalizedConfig& cfg = mix.ground.config;
  const double e0 = cfg.e0;
  const double amp = -branch_sign(cfg.branch) * 0.5 * cfg.epsilon * e0 /
                     std::sqrt(e0 * e0 + 1.0);
  const double omega = beat_frequency(cfg);
  const double b = branch_sign(cfg.branch);
  const double F =
      1.0 + 2.0 * (std::conj(mix.c_g) * mix.c_e2 *
                   std::exp(cplx(0.0, b * omega * t)))
                .real();
  const double th = wave_phase(cfg, t, z);
  return {amp * F * std::cos(th), amp * F * std::sin(th), 0.0};
}

/// Gaussian suppression of cross terms between states (log space).
struct OverlapFactor {
  double exact_exponent = 0.0;  // -(d2' - d2'')^2 / (2d)
  double approx_exponent = 0.0; // -(e0^2+1)/(2d), reduced-Compton units
};

inline OverlapFactor overlap_factor(const StateSolution& a,
                                    const StateSolution& b) {
  const double d = a.envelope.d;
  if (std::abs(b.envelope.d - d) > 1e-12 * d)
    throw std::domain_error("overlap_factor: states must share d");
  const cplx diff = a.envelope.d2 - b.envelope.d2;
  OverlapFactor f;
  f.exact_exponent = (-(diff * diff) / (2.0 * d)).real();
  const double e0 = a.config.e0;
  f.approx_exponent = -(e0 * e0 + 1.0) / (2.0 * d);
  return f;
}

/// Non-relativistic Pauli-equation reference trace, hbar units.
inline std::array<double, 3> pauli_reference_spin(double omega_m, double Omega,
                                                  double t) {
  return {0.5 * std::sin(omega_m * t) * std::sin(Omega * t),
          0.5 * std::sin(omega_m * t) * std::cos(Omega * t),
          0.5 * std::cos(omega_m * t)};
}

// ---------------------------------------------------------------------------
// Scans and resonance
// ---------------------------------------------------------------------------

struct EnergyMinimum {
  double argmin_e0 = 0.0;
  double min_energy = 0.0;
};

/// Grid argmin of E_a(e0) = (e0^2+1)/e0 (the omega_n -> 0 limit).
inline EnergyMinimum energy_min_scan(double e0_lo, double e0_hi, int steps) {
  if (!(e0_lo > 0.0) || !(e0_hi > e0_lo) || steps < 2)
    throw std::domain_error("energy_min_scan: need 0 < lo < hi, steps >= 2");
  EnergyMinimum best{0.0, std::numeric_limits<double>::infinity()};
  for (int i = 0; i < steps; ++i) {
    const double e0 = e0_lo + (e0_hi - e0_lo) * i / (steps - 1);
    const double ea = (e0 * e0 + 1.0) / e0;
    if (ea < best.min_energy) best = {e0, ea};
  }
  return best;
}

struct ResonanceCheck {
  double residual = 0.0; // mu H_z - hbar Omega / 2, natural units
  double g_factor = 0.0; // 2 / e0; equals 2 at resonance
};

/// mu H3 = e0 omega_n / 2 against hbar Omega / 2; zero exactly at e0 = 1.
inline ResonanceCheck resonance_check(const NormalizedConfig& cfg) {
  cfg.validate();
  return {(cfg.e0 - 1.0) * cfg.omega_n / 2.0, 2.0 / cfg.e0};
}

// ---------------------------------------------------------------------------
// Series builders
// ---------------------------------------------------------------------------

inline std::vector<double> linspace(double t0, double t1, int n) {
  if (n < 2 || !(t1 > t0))
    throw std::domain_error("linspace: need n >= 2 and t1 > t0");
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    t[static_cast<std::size_t>(i)] = t0 + (t1 - t0) * i / (n - 1);
  return t;
}

/// Closed-form single-state trace with the Pauli reference columns.
inline ObservableSeries single_series(const StateSolution& st, double t0,
                                      double t1, int samples, double z) {
  ObservableSeries s;
  s.times = linspace(t0, t1, samples);
  s.label = to_string(st.kind);
  const double om_m = precession_frequency(st.config);
  std::vector<std::vector<double>> cols(9);
  for (double t : s.times) {
    const auto p = average_momentum(st, t, z);
    const auto sp = average_spin(st, t, z);
    const auto pr = pauli_reference_spin(om_m, st.config.omega_n, t);
    for (int k = 0; k < 3; ++k) {
      cols[static_cast<std::size_t>(k)].push_back(p[static_cast<std::size_t>(k)]);
      cols[static_cast<std::size_t>(k + 3)].push_back(
          sp[static_cast<std::size_t>(k)]);
      cols[static_cast<std::size_t>(k + 6)].push_back(
          pr[static_cast<std::size_t>(k)]);
    }
  }
  const char* names[9] = {"p1", "p2", "p3", "s1", "s2",
                          "s3", "pauli_s1", "pauli_s2", "pauli_s3"};
  for (int k = 0; k < 9; ++k)
    s.columns.emplace_back(names[k], std::move(cols[static_cast<std::size_t>(k)]));
  s.validate();
  return s;
}

/// Closed-form mixed trace with momentum columns (constituent-weighted) and
/// the Pauli reference columns; c_e2 = 0 reproduces the single ground trace
/// bit for bit.
inline ObservableSeries mixed_series(const MixedState& mix, double t0,
                                     double t1, int samples, double z) {
  ObservableSeries s;
  s.times = linspace(t0, t1, samples);
  s.label = "mixed(|c_g|^2=" + std::to_string(std::norm(mix.c_g)) + ")";
  const NormalizedConfig& cfg = mix.ground.config;
  const double om_m = precession_frequency(cfg);
  std::vector<std::vector<double>> cols(9);
  for (double t : s.times) {
    const auto pg = average_momentum(mix.ground, t, z);
    const auto pe = average_momentum(mix.excited2, t, z);
    const auto sp = mixed_spin(mix, t, z);
    const auto pr = pauli_reference_spin(om_m, cfg.omega_n, t);
    const double wg = std::norm(mix.c_g), we = std::norm(mix.c_e2);
    for (int k = 0; k < 3; ++k) {
      cols[static_cast<std::size_t>(k)].push_back(
          wg * pg[static_cast<std::size_t>(k)] +
          we * pe[static_cast<std::size_t>(k)]);
      cols[static_cast<std::size_t>(k + 3)].push_back(
          sp[static_cast<std::size_t>(k)]);
      cols[static_cast<std::size_t>(k + 6)].push_back(
          pr[static_cast<std::size_t>(k)]);
    }
  }
  const char* names[9] = {"p1", "p2", "p3", "s1", "s2",
                          "s3", "pauli_s1", "pauli_s2", "pauli_s3"};
  for (int k = 0; k < 9; ++k)
    s.columns.emplace_back(names[k], std::move(cols[static_cast<std::size_t>(k)]));
  s.validate();
  return s;
}

} // namespace diracwave
