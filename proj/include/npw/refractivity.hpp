#pragma once

#include <stdexcept>

namespace npw {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kDbPerNeper = 8.6858896380650366;  // 20/ln(10)

/// Intrinsic medium description at a point: complex refractive index
/// n_tilde = n - j*kappa under the e^{+jwt} time convention.
struct ComplexRefractivity {
  double n = 1.0;      // real refractive index
  double kappa = 0.0;  // extinction coefficient, >= 0

  ComplexRefractivity() = default;
  ComplexRefractivity(double n_, double kappa_) : n(n_), kappa(kappa_) {
    if (!(n >= 0.0) || !(kappa >= 0.0))
      throw std::invalid_argument("ComplexRefractivity: need n >= 0 and kappa >= 0");
  }
};

/// Complex refractivity in N-units: n_tilde = N_tilde*1e-6 + 1.
/// N_im stores the loss part as a positive magnitude (kappa = N_im*1e-6).
struct Refractivity {
  double N_re = 0.0;
  double N_im = 0.0;
};

/// n = 1 + N_re*1e-6, kappa = N_im*1e-6. Rejects N_im < 0 (a negative loss
/// part signals the wrong sign convention in the input).
ComplexRefractivity refractivity_to_index(const Refractivity& N);

/// Exact inverse of refractivity_to_index up to roundoff.
Refractivity index_to_refractivity(const ComplexRefractivity& v);

/// Specific attenuation gamma [dB/km] at frequency f [Hz] to extinction
/// coefficient: kappa = (gamma/1000) * ln(10)/20 / k0 with k0 = 2*pi*f/c.
double attenuation_to_kappa(double gamma_db_per_km, double f_hz);

/// Inverse unit bridge: gamma [dB/km] = kappa * k0 * (20/ln 10) * 1000.
double kappa_to_attenuation(double kappa, double f_hz);

/// Free-space wavenumber [rad/m].
inline double wavenumber(double f_hz) { return 2.0 * 3.141592653589793238 * f_hz / kSpeedOfLight; }

/// Range constraints produced by every atmospheric builder.
inline constexpr double kAtmosphereMaxN = 1.001;
inline constexpr double kAtmosphereMaxKappa = 1e-5;

/// Validating constructor for builder outputs (1 <= n <= 1.001, 0 <= kappa <= 1e-5).
ComplexRefractivity make_atmospheric_index(double n, double kappa);

}  // namespace npw
