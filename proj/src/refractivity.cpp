#include "npw/refractivity.hpp"

#include <cmath>
#include <stdexcept>

namespace npw {

ComplexRefractivity refractivity_to_index(const Refractivity& N) {
  double kappa = N.N_im * 1e-6;
  if (kappa < 0.0)
    throw std::invalid_argument(
        "refractivity_to_index: negative loss part (kappa < 0); expected N_im >= 0");
  return ComplexRefractivity(1.0 + N.N_re * 1e-6, kappa);
}

Refractivity index_to_refractivity(const ComplexRefractivity& v) {
  return Refractivity{(v.n - 1.0) * 1e6, v.kappa * 1e6};
}

double attenuation_to_kappa(double gamma_db_per_km, double f_hz) {
  if (!std::isfinite(gamma_db_per_km) || !std::isfinite(f_hz))
    throw std::invalid_argument("attenuation_to_kappa: non-finite input");
  if (gamma_db_per_km < 0.0 || f_hz <= 0.0)
    throw std::invalid_argument("attenuation_to_kappa: need gamma >= 0 and f > 0");
  return (gamma_db_per_km / 1000.0) / kDbPerNeper / wavenumber(f_hz);
}

double kappa_to_attenuation(double kappa, double f_hz) {
  if (!std::isfinite(kappa) || !std::isfinite(f_hz))
    throw std::invalid_argument("kappa_to_attenuation: non-finite input");
  if (kappa < 0.0 || f_hz <= 0.0)
    throw std::invalid_argument("kappa_to_attenuation: need kappa >= 0 and f > 0");
  return kappa * wavenumber(f_hz) * kDbPerNeper * 1000.0;
}

ComplexRefractivity make_atmospheric_index(double n, double kappa) {
  if (!std::isfinite(n) || !std::isfinite(kappa))
    throw std::invalid_argument("atmospheric index: non-finite value");
  if (n < 1.0 || n > kAtmosphereMaxN)
    throw std::invalid_argument("atmospheric index: n outside [1, 1.001]");
  if (kappa < 0.0 || kappa > kAtmosphereMaxKappa)
    throw std::invalid_argument("atmospheric index: kappa outside [0, 1e-5]");
  return ComplexRefractivity(n, kappa);
}

}  // namespace npw
