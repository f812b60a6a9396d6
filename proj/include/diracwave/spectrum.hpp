#pragma once

// Characteristic (eigenvalue) equations for the three state kinds, exact
// cubic roots, singular momenta and the power-series expansions around the
// singular point e0.
//
// The pole of the characteristic equation is cleared by multiplying through
// by (E - e0), which turns it into the monic cubic
//   (E - e0)(E^2 + Lambda E - 1 - sigma) - E h^2 = 0,
// sigma = 2 omega_n e0 for the second excited kind and 0 otherwise.

#include <algorithm>
#include <complex>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "diracwave/core.hpp"

namespace diracwave {

enum class StateKind { Ground, Excited1, Excited2 };

inline const char* to_string(StateKind k) {
  switch (k) {
    case StateKind::Ground: return "ground";
    case StateKind::Excited1: return "excited1";
    case StateKind::Excited2: return "excited2";
  }
  return "?";
}

/// Degree of the spinor polynomial (the second integer label of a state).
constexpr int polynomial_degree(StateKind k) {
  return k == StateKind::Ground ? 0 : 1;
}

/// Monic cubic c3 E^3 + c2 E^2 + c1 E + c0 with c3 = 1.
struct CharacteristicPoly {
  double c2 = 0.0, c1 = 0.0, c0 = 0.0;

  cplx eval(cplx e) const { return ((e + c2) * e + c1) * e + c0; }
  cplx deriv(cplx e) const { return (3.0 * e + 2.0 * c2) * e + c1; }
};

struct EnergyRoots {
  std::array<cplx, 3> roots{};
  std::array<int, 2> singular_pair{0, 1}; // indices of the pair nearest e0
  int far_root = 2;
  double max_residual = 0.0;
};

/// Truncated expansion E = c0 + c1 h + c2 h^2 around the singular point.
struct SeriesExpansion {
  double c0 = 0.0, c1 = 0.0, c2 = 0.0;
  Branch branch = Branch::Plus;

  double eval(double h) const { return c0 + c1 * h + c2 * h * h; }
};

/// Lambda of the characteristic equation; the kinds differ only in the
/// multiple of omega_n subtracted from 2*eps*p.
inline double lambda_param(StateKind kind, double p_tilde,
                           const NormalizedConfig& cfg) {
  const double base = 2.0 * cfg.epsilon * p_tilde;
  switch (kind) {
    case StateKind::Ground: return base - cfg.omega_n;
    case StateKind::Excited1: return base - 3.0 * cfg.omega_n;
    case StateKind::Excited2: return base + cfg.omega_n;
  }
  throw std::logic_error("lambda_param: bad kind");
}

/// The fixed longitudinal momentum at which singular solutions exist.
inline double singular_momentum(StateKind kind, const NormalizedConfig& cfg) {
  cfg.validate();
  double p = cfg.epsilon *
             (1.0 / (2.0 * cfg.e0) - cfg.e0 / 2.0 + cfg.omega_n / 2.0);
  if (kind == StateKind::Excited1) p += cfg.epsilon * cfg.omega_n;
  return p;
}

/// Extra constant in the excited-2 equation, sigma = 2 omega_n e0.
inline double sigma_shift(StateKind kind, const NormalizedConfig& cfg) {
  return kind == StateKind::Excited2 ? 2.0 * cfg.omega_n * cfg.e0 : 0.0;
}

inline CharacteristicPoly characteristic_poly(StateKind kind,
                                              const NormalizedConfig& cfg,
                                              double lambda) {
  const double sig = sigma_shift(kind, cfg);
  CharacteristicPoly p;
  p.c2 = lambda - cfg.e0;
  p.c1 = -(1.0 + sig) - lambda * cfg.e0 - cfg.h * cfg.h;
  p.c0 = cfg.e0 * (1.0 + sig);
  return p;
}

/// All three roots of the cleared cubic: companion-matrix eigenvalues
/// polished by Newton iteration.  Residuals above 1e-10 relative to the
/// polynomial's evaluation magnitude (sum |c_i| |E|^i, so the bound is the
/// plain 1e-10 for desk-scale coefficients) are a failure.
inline EnergyRoots characteristic_roots(StateKind kind,
                                        const NormalizedConfig& cfg,
                                        double lambda) {
  cfg.validate();
  const CharacteristicPoly p = characteristic_poly(kind, cfg, lambda);
  auto eval_scale = [&](const cplx& e) {
    const double a = std::abs(e);
    return std::max(1.0, ((a + std::abs(p.c2)) * a + std::abs(p.c1)) * a +
                             std::abs(p.c0));
  };

  Eigen::Matrix3d comp = Eigen::Matrix3d::Zero();
  comp(0, 2) = -p.c0;
  comp(1, 2) = -p.c1;
  comp(2, 2) = -p.c2;
  comp(1, 0) = 1.0;
  comp(2, 1) = 1.0;
  const Eigen::EigenSolver<Eigen::Matrix3d> es(comp);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("characteristic_roots: eigensolver failed");

  EnergyRoots out;
  for (int i = 0; i < 3; ++i) {
    cplx r = es.eigenvalues()(i);
    for (int it = 0; it < 60; ++it) {
      const cplx f = p.eval(r);
      const cplx df = p.deriv(r);
      if (std::abs(df) == 0.0) break;
      const cplx step = f / df;
      r -= step;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(r))) break;
    }
    // real roots of a real cubic: drop numerical imaginary dust
    if (std::abs(r.imag()) < 1e-12 * std::max(1.0, std::abs(r.real())) &&
        std::abs(p.eval(cplx(r.real(), 0.0))) <= std::abs(p.eval(r)) + 1e-14)
      r = cplx(r.real(), 0.0);
    out.roots[static_cast<std::size_t>(i)] = r;
    out.max_residual =
        std::max(out.max_residual, std::abs(p.eval(r)) / eval_scale(r));
  }
  if (out.max_residual > 1e-10)
    throw std::runtime_error(
        "characteristic_roots: polish residual " +
        std::to_string(out.max_residual) + " exceeds 1e-10");

  // singular pair: the two roots nearest e0, ties broken toward the pair
  // with the smallest mutual separation
  double best_sum = std::numeric_limits<double>::infinity();
  double best_sep = best_sum;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      const cplx ri = out.roots[static_cast<std::size_t>(i)];
      const cplx rj = out.roots[static_cast<std::size_t>(j)];
      const double sum = std::abs(ri - cfg.e0) + std::abs(rj - cfg.e0);
      const double sep = std::abs(ri - rj);
      const double tie = 1e-12 * std::max(1.0, best_sum);
      if (sum < best_sum - tie ||
          (std::abs(sum - best_sum) <= tie && sep < best_sep)) {
        best_sum = sum;
        best_sep = sep;
        out.singular_pair = {i, j};
        out.far_root = 3 - i - j;
      }
    }
  return out;
}

/// Expansion of the singular root in powers of h.  The excited-2
/// second-order denominator carries the square required by the sigma -> 0
/// limit of the ground expansion.
inline SeriesExpansion singular_series(StateKind kind,
                                       const NormalizedConfig& cfg) {
  cfg.validate();
  const double sig = sigma_shift(kind, cfg);
  const double As = cfg.e0 * cfg.e0 + 1.0 + sig;
  SeriesExpansion s;
  s.c0 = cfg.e0;
  s.branch = cfg.branch;
  s.c1 = branch_sign(cfg.branch) * cfg.e0 / std::sqrt(As);
  s.c2 = cfg.e0 * (1.0 + sig) / (2.0 * As * As);
  return s;
}

/// The exact singular root matching cfg.branch (found via the series seed).
inline cplx singular_root(StateKind kind, const NormalizedConfig& cfg) {
  const double p = singular_momentum(kind, cfg);
  const double lam = lambda_param(kind, p, cfg);
  const EnergyRoots roots = characteristic_roots(kind, cfg, lam);
  const double seed = singular_series(kind, cfg).eval(cfg.h);
  cplx best = roots.roots[0];
  for (const cplx& r : roots.roots)
    if (std::abs(r - seed) < std::abs(best - seed)) best = r;
  return best;
}

/// |exact singular root - 2nd-order series| at the config's h and branch.
inline double series_vs_root_error(StateKind kind,
                                   const NormalizedConfig& cfg) {
  if (cfg.h == 0.0) return 0.0;
  const cplx root = singular_root(kind, cfg);
  return std::abs(root - singular_series(kind, cfg).eval(cfg.h));
}

} // namespace diracwave
