#pragma once

#include <cmath>

#include "npw/refractivity.hpp"

namespace npw {

/// Propagating non-uniform plane-wave state: apparent phase index N,
/// apparent attenuation index K, and the phase/attenuation direction angles
/// theta/psi measured from the interface normal, both in [0, pi/2).
///
/// The directions are stored as (sin, cos) pairs: every consumer needs the
/// direction cosines, not the angles, and deriving sin(theta) from
/// asin-then-sin would round twice. theta()/psi() reconstruct the angles.
struct ApparentWave {
  double N = 1.0;
  double K = 0.0;
  double sin_theta = 0.0, cos_theta = 1.0;
  double sin_psi = 0.0, cos_psi = 1.0;

  static ApparentWave from_angles(double N, double K, double theta, double psi) {
    ApparentWave w;
    w.N = N;
    w.K = K;
    w.sin_theta = std::sin(theta);
    w.cos_theta = std::cos(theta);
    w.sin_psi = std::sin(psi);
    w.cos_psi = std::cos(psi);
    return w;
  }

  /// Uniform wave hosted by medium m: N = n, K = kappa, psi = theta.
  static ApparentWave uniform(const ComplexRefractivity& m, double theta) {
    ApparentWave w = from_angles(m.n, m.kappa, theta, theta);
    w.sin_psi = w.sin_theta;
    w.cos_psi = w.cos_theta;
    return w;
  }

  double theta() const { return std::atan2(sin_theta, cos_theta); }
  double psi() const { return std::atan2(sin_psi, cos_psi); }

  /// cos(theta - psi), the non-uniformity projection. Exactly 1 for a
  /// uniform representation (psi stored equal to theta).
  double cos_alpha() const {
    if (sin_psi == sin_theta && cos_psi == cos_theta) return 1.0;
    return cos_theta * cos_psi + sin_theta * sin_psi;
  }

  /// Tangential components entering the next interface solve.
  double tangential_N() const { return N * sin_theta; }
  double tangential_K() const { return K * sin_psi; }
};

/// K * cos(theta - psi): the attenuation index projected onto the phase
/// direction, which governs path loss along the ray.
inline double effective_attenuation(const ApparentWave& w) { return w.K * w.cos_alpha(); }

/// |(N^2 - K^2) - (n^2 - kappa^2)| against the host medium.
inline double dispersion_residual(const ApparentWave& w, const ComplexRefractivity& m) {
  return std::abs((w.N * w.N - w.K * w.K) - (m.n * m.n - m.kappa * m.kappa));
}

/// |N K cos(theta - psi) - n kappa|, minimised over the two admissible signs
/// of the normal attenuation component. The solvers report psi in [0, pi/2)
/// (the decaying-branch magnitude); the underlying relations constrain only
/// the square of the normal component, so the checker admits both signs.
inline double cross_residual(const ApparentWave& w, const ComplexRefractivity& m) {
  double tang = w.sin_theta * w.sin_psi;
  double norm = w.cos_theta * w.cos_psi;
  double target = m.n * m.kappa;
  double r_plus = std::abs(w.N * w.K * (tang + norm) - target);
  double r_minus = std::abs(w.N * w.K * (tang - norm) - target);
  return std::min(r_plus, r_minus);
}

/// Bound for cross_residual: the stated relative tolerance plus the
/// representation floor of the stored wave (when the tangential and normal
/// products cancel, the rounded fields cannot encode the identity below
/// ~eps * N * K in absolute terms).
inline double cross_residual_tolerance(const ApparentWave& w, const ComplexRefractivity& m) {
  return 1e-10 * std::max(1e-30, m.n * m.kappa) + 16.0 * 2.220446049250313e-16 * w.N * w.K;
}

}  // namespace npw
