#pragma once

// Unit conventions, dimensionless parametrization and the 4x4 Dirac algebra
// shared by every other header.  All downstream computation is done in
// natural units (hbar = m = c = 1); Gaussian-cgs quantities appear only at
// the normalize/denormalize boundary.

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace diracwave {

using cplx = std::complex<double>;

namespace cgs {
// Gaussian-cgs constants (cm, g, s, statC).
inline constexpr double hbar = 1.054571817e-27;           // erg s
inline constexpr double c = 2.99792458e10;                // cm/s
inline constexpr double electron_mass = 9.1093837015e-28; // g
inline constexpr double elementary_charge = 4.80320471257e-10; // statC
// reduced Compton wavelength of the electron, hbar/(m c) = 3.8616e-11 cm
inline constexpr double electron_compton = hbar / (electron_mass * c);
} // namespace cgs

enum class Branch { Plus, Minus };
enum class DSign { Plus, Minus };

constexpr int branch_sign(Branch b) { return b == Branch::Plus ? +1 : -1; }

/// Lab-frame field configuration in Gaussian-cgs units.
struct PhysicalInput {
  double wave_amplitude_H = 0.0;  // G, amplitude of the circular wave
  double static_field_H3 = 0.0;   // G, constant longitudinal field
  double frequency_Omega = 0.0;   // rad/s, sign encodes polarization
  int propagation_sign_epsilon = +1;
  double mass_m = cgs::electron_mass;
  double charge_e = -cgs::elementary_charge;

  void validate() const {
    if (propagation_sign_epsilon != 1 && propagation_sign_epsilon != -1)
      throw std::domain_error("PhysicalInput: epsilon must be +1 or -1");
    if (static_field_H3 == 0.0)
      throw std::domain_error(
          "PhysicalInput: static_field_H3 = 0 (localization length diverges)");
    if (frequency_Omega == 0.0)
      throw std::domain_error("PhysicalInput: frequency_Omega = 0");
    if (mass_m <= 0.0)
      throw std::domain_error("PhysicalInput: mass_m must be positive");
    if (charge_e == 0.0)
      throw std::domain_error("PhysicalInput: charge_e = 0");
  }
};

/// Dimensionless problem parameters; fully determine a state family.
struct NormalizedConfig {
  double e0 = 1.0;        // singular-point energy, > 0
  double h = 0.0;         // wave strength eH/(k m c^2), >= 0
  double omega_n = 1e-6;  // hbar*Omega/(m c^2)
  int epsilon = +1;
  Branch branch = Branch::Plus;
  DSign d_sign = DSign::Minus;

  void validate() const {
    if (e0 <= 0.0)
      throw std::domain_error("NormalizedConfig: e0 must be positive");
    if (h < 0.0)
      throw std::domain_error("NormalizedConfig: h must be non-negative");
    if (epsilon != 1 && epsilon != -1)
      throw std::domain_error("NormalizedConfig: epsilon must be +1 or -1");
    if (omega_n < 0.0)
      throw std::domain_error("NormalizedConfig: omega_n must be >= 0");
  }

  /// Propagation constant k in natural units.
  double k() const { return epsilon * omega_n; }
};

// ---------------------------------------------------------------------------
// Small fixed-size complex linear algebra.  Value types, no allocation.
// ---------------------------------------------------------------------------

struct Vec4 {
  std::array<cplx, 4> v{};

  cplx& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
  const cplx& operator[](int i) const { return v[static_cast<std::size_t>(i)]; }

  Vec4 operator+(const Vec4& o) const {
    Vec4 r;
    for (int i = 0; i < 4; ++i) r[i] = v[i] + o[i];
    return r;
  }
  Vec4 operator-(const Vec4& o) const {
    Vec4 r;
    for (int i = 0; i < 4; ++i) r[i] = v[i] - o[i];
    return r;
  }
  Vec4 operator*(cplx s) const {
    Vec4 r;
    for (int i = 0; i < 4; ++i) r[i] = v[i] * s;
    return r;
  }
  Vec4& operator+=(const Vec4& o) {
    for (int i = 0; i < 4; ++i) v[i] += o[i];
    return *this;
  }
  double norm2() const {
    double s = 0.0;
    for (const auto& c : v) s += std::norm(c);
    return s;
  }
};

inline Vec4 operator*(cplx s, const Vec4& x) { return x * s; }

/// Four complex amplitudes; no normalization implied at this level.
using Spinor4 = Vec4;

/// Conjugating inner product <a, b> = sum conj(a_i) b_i.
inline cplx dot(const Vec4& a, const Vec4& b) {
  cplx s = 0.0;
  for (int i = 0; i < 4; ++i) s += std::conj(a[i]) * b[i];
  return s;
}

struct Mat4 {
  std::array<cplx, 16> m{};

  cplx& operator()(int i, int j) { return m[static_cast<std::size_t>(4 * i + j)]; }
  const cplx& operator()(int i, int j) const {
    return m[static_cast<std::size_t>(4 * i + j)];
  }

  static Mat4 identity() {
    Mat4 r;
    for (int i = 0; i < 4; ++i) r(i, i) = 1.0;
    return r;
  }
  Mat4 operator*(const Mat4& o) const {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < 4; ++k) {
        const cplx a = (*this)(i, k);
        if (a == cplx{}) continue;
        for (int j = 0; j < 4; ++j) r(i, j) += a * o(k, j);
      }
    return r;
  }
  Vec4 operator*(const Vec4& x) const {
    Vec4 r;
    for (int i = 0; i < 4; ++i) {
      cplx s = 0.0;
      for (int j = 0; j < 4; ++j) s += (*this)(i, j) * x[j];
      r[i] = s;
    }
    return r;
  }
  Mat4 operator+(const Mat4& o) const {
    Mat4 r;
    for (int i = 0; i < 16; ++i) r.m[static_cast<std::size_t>(i)] =
        m[static_cast<std::size_t>(i)] + o.m[static_cast<std::size_t>(i)];
    return r;
  }
  Mat4 operator-(const Mat4& o) const {
    Mat4 r;
    for (int i = 0; i < 16; ++i) r.m[static_cast<std::size_t>(i)] =
        m[static_cast<std::size_t>(i)] - o.m[static_cast<std::size_t>(i)];
    return r;
  }
  Mat4 operator*(cplx s) const {
    Mat4 r;
    for (int i = 0; i < 16; ++i) r.m[static_cast<std::size_t>(i)] =
        m[static_cast<std::size_t>(i)] * s;
    return r;
  }
  Mat4 adjoint() const {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) r(i, j) = std::conj((*this)(j, i));
    return r;
  }
  double max_abs() const {
    double s = 0.0;
    for (const auto& c : m) s = std::max(s, std::abs(c));
    return s;
  }
};

inline Mat4 operator*(cplx s, const Mat4& a) { return a * s; }

/// Dirac matrices in the standard Dirac-Pauli representation, plus the
/// sigma_k = -i alpha_{k+1} alpha_{k+2} spin matrices and the rotation
/// generator alpha1*alpha2 (whose square is -I).
struct DiracAlgebra {
  std::array<Mat4, 3> alpha;
  Mat4 beta;
  std::array<Mat4, 3> sigma;
  Mat4 alpha1_alpha2;
};

inline DiracAlgebra build_algebra() {
  const cplx I{0.0, 1.0};
  std::array<Mat4, 3> pauli{};
  pauli[0](0, 1) = 1.0;
  pauli[0](1, 0) = 1.0;
  pauli[1](0, 1) = -I;
  pauli[1](1, 0) = I;
  pauli[2](0, 0) = 1.0;
  pauli[2](1, 1) = -1.0;

  DiracAlgebra a;
  for (int k = 0; k < 3; ++k) {
    Mat4 m;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        m(i, j + 2) = pauli[static_cast<std::size_t>(k)](i, j);
        m(i + 2, j) = pauli[static_cast<std::size_t>(k)](i, j);
      }
    a.alpha[static_cast<std::size_t>(k)] = m;
  }
  a.beta(0, 0) = 1.0;
  a.beta(1, 1) = 1.0;
  a.beta(2, 2) = -1.0;
  a.beta(3, 3) = -1.0;
  a.sigma[0] = -I * (a.alpha[1] * a.alpha[2]);
  a.sigma[1] = -I * (a.alpha[2] * a.alpha[0]);
  a.sigma[2] = -I * (a.alpha[0] * a.alpha[1]);
  a.alpha1_alpha2 = a.alpha[0] * a.alpha[1];
  return a;
}

/// Shared immutable algebra instance.
inline const DiracAlgebra& algebra() {
  static const DiracAlgebra a = build_algebra();
  return a;
}

// ---------------------------------------------------------------------------
// Normalization boundary
// ---------------------------------------------------------------------------

/// Map lab fields to the dimensionless parameter set.  The requested d_sign
/// must agree with sign(e*H3); branch selects the +- family of the singular
/// expansion used when states are built.
inline NormalizedConfig normalize_input(const PhysicalInput& in, DSign d_sign,
                                        Branch branch) {
  in.validate();
  const double eH3 = in.charge_e * in.static_field_H3;
  const DSign actual = eH3 > 0.0 ? DSign::Plus : DSign::Minus;
  if (actual != d_sign)
    throw std::domain_error(
        "normalize_input: requested d_sign is inconsistent with sign(e*H3)");

  const double d = std::abs(eH3) / (2.0 * cgs::hbar * cgs::c); // 1/cm^2
  const double e0 = 2.0 * d * cgs::hbar / (in.frequency_Omega * in.mass_m);
  if (e0 <= 0.0)
    throw std::domain_error(
        "normalize_input: Omega < 0 gives e0 < 0; the opposite polarization "
        "is reached through the psi_plus family, not a negative e0");
  NormalizedConfig cfg;
  cfg.e0 = e0;
  cfg.h = std::abs(in.charge_e * in.wave_amplitude_H) /
          (std::abs(in.frequency_Omega) / cgs::c * in.mass_m * cgs::c * cgs::c);
  cfg.omega_n = cgs::hbar * in.frequency_Omega / (in.mass_m * cgs::c * cgs::c);
  cfg.epsilon = in.propagation_sign_epsilon;
  cfg.branch = branch;
  cfg.d_sign = d_sign;
  cfg.validate();
  return cfg;
}

/// Inverse of normalize_input for given particle species; reproduces
/// H, H3, Omega to relative 1e-12.
inline PhysicalInput denormalize(const NormalizedConfig& cfg, double mass_m,
                                 double charge_e) {
  cfg.validate();
  if (mass_m <= 0.0 || charge_e == 0.0)
    throw std::domain_error("denormalize: need mass_m > 0 and charge_e != 0");
  PhysicalInput in;
  in.mass_m = mass_m;
  in.charge_e = charge_e;
  in.propagation_sign_epsilon = cfg.epsilon;
  in.frequency_Omega = cfg.omega_n * mass_m * cgs::c * cgs::c / cgs::hbar;
  const double abs_eH3 = cfg.e0 * in.frequency_Omega * mass_m * cgs::c;
  const double want = cfg.d_sign == DSign::Plus ? +1.0 : -1.0;
  in.static_field_H3 = want * abs_eH3 / charge_e;
  in.wave_amplitude_H = cfg.h * in.frequency_Omega * mass_m * cgs::c /
                        std::abs(charge_e);
  return in;
}

/// Characteristic localization size l_c = sqrt(|2 hbar c / (e H3)|), in cm.
inline double localization_length(const PhysicalInput& in) {
  if (in.static_field_H3 == 0.0)
    throw std::domain_error("localization_length: static_field_H3 = 0");
  return std::sqrt(std::abs(2.0 * cgs::hbar * cgs::c /
                            (in.charge_e * in.static_field_H3)));
}

} // namespace diracwave
