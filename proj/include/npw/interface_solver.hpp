#pragma once

#include <complex>
#include <cstdint>

#include "npw/apparent_wave.hpp"
#include "npw/errors.hpp"
#include "npw/refractivity.hpp"

namespace npw {

struct MediumPair {
  ComplexRefractivity m1;
  ComplexRefractivity m2;
};

/// Reduced-quartic coefficients for the transmitted medium:
///   A = Ns^2 + Ks^2,  B = n2^2 - kappa2^2,  D = n2*kappa2 - Ns*Ks.
/// The solved indices satisfy
///   N2^4 - (A+B) N2^2 + [Ns^2 (B + Ks^2) - D^2] = 0
///   K2^4 - (A-B) K2^2 + [Ks^2 (Ns^2 - B) - D^2] = 0
/// (constant terms derived from the dispersion and tangential-matching
/// relations and pinned against the extended-precision wavevector solution).
struct QuarticCoeffs {
  double A = 0.0;
  double B = 0.0;
  double D = 0.0;
  double constant_N() const;  // Ns^2 (B + Ks^2) - D^2
  double constant_K() const;  // Ks^2 (Ns^2 - B) - D^2
  double Ns = 0.0;
  double Ks = 0.0;
};

QuarticCoeffs reduced_quartic_coeffs(double Ns, double Ks, const ComplexRefractivity& m2);

/// Residuals of the reduced quartics at a solved wave (for invariant checks).
double quartic_residual_N(const QuarticCoeffs& q, double N2);
double quartic_residual_K(const QuarticCoeffs& q, double K2);

/// Apparent indices of a wave hosted by medium m with prescribed phase and
/// attenuation directions. Uses the four cancellation-free K1^2 expressions
/// selected by regime (see kBranch* thresholds); kappa = 0 short-circuits to
/// (n, 0). Throws InvalidIncidence when cos(theta - psi) <= 0.
ApparentWave medium1_apparent(const ComplexRefractivity& m, double theta_i, double psi_i);

/// Same solve, but keeping the direction cosines of an existing wave bit for
/// bit (used when a ray slides into a laterally adjacent cell: the medium
/// swaps, the direction does not).
ApparentWave rehost_wave(const ApparentWave& w, const ComplexRefractivity& m);

/// Branch thresholds for medium1_apparent, exposed for the seam tests.
inline constexpr double kBranchRHigh = 1e8;   // r > this: K1^2 ~ a/r^2
inline constexpr double kBranchRLow = 1e-10;  // r < this: K1^2 ~ a/r
inline constexpr double kBranchCMin = 1e-6;   // c-form needs c >= this and r >= 1

/// The individual K1^2 expressions (exposed for the seam-agreement tests).
double k1sq_c_form(double a, double b, double c);
double k1sq_r_form(double a, double r);
double k1sq_asymptotic_large_r(double a, double r);
double k1sq_asymptotic_small_r(double a, double r);

/// Transmitted wave for tangential components (Ns, Ks) entering medium m2,
/// via the reduced quartics evaluated with conjugate-form quadratic roots
/// (stable in standard double precision). Validates the dispersion residual
/// and falls back to the extended-precision oracle on failure.
ApparentWave medium2_apparent_stable(double Ns, double Ks, const ComplexRefractivity& m2);

enum class Precision { Working, Extended };

/// The cancellation-prone formulation: textbook quadratic root for N2^2,
/// then K2 = sqrt(N2^2 - n2^2 + kappa2^2). In Working precision this is
/// expected to break down for small kappa (negative radicands are reported
/// as CancellationUnderflow); in Extended precision (double-double, ~32
/// significant digits) it is a correctness reference.
ApparentWave medium2_apparent_naive(double Ns, double Ks, const ComplexRefractivity& m2,
                                    Precision precision);

/// Independent ground truth: complex tangential wavevector s = Ns - j*Ks,
/// normal component q = sqrt(n2~^2 - s^2) on the decaying branch
/// (Re q >= 0, attenuation normal component taken by magnitude), all in
/// double-double arithmetic, rounded to working precision on return.
ApparentWave medium2_oracle_hp(double Ns, double Ks, const ComplexRefractivity& m2);

/// Tangential-E amplitude Fresnel coefficients for the plane-of-incidence
/// polarization, from complex permittivities e_m = n_m~^2 and complex normal
/// wavevector components q_m:
///   gamma_r = (e1 q2 - e2 q1) / (e1 q2 + e2 q1),   tau = 1 + gamma_r.
/// Matched media give exactly (0, 1); lossless normal incidence 1.0 -> 1.5
/// gives gamma_r = -0.2, tau = 0.8 (the convention lock).
struct FresnelCoeffs {
  std::complex<double> gamma_r;
  std::complex<double> tau;
};
FresnelCoeffs fresnel_npw(const ApparentWave& incident, const MediumPair& pair,
                          const ApparentWave& transmitted);

/// Same computation carried in double-double and rounded on return (used by
/// the extended-precision reference pipeline).
FresnelCoeffs fresnel_npw_hp(const ApparentWave& incident, const MediumPair& pair,
                             const ApparentWave& transmitted);

/// Field update over distance l [m]: amplitude decays by
/// exp(-k0 K cos(theta-psi) l), phase advances by k0 N l.
std::complex<double> propagate_field(std::complex<double> E, const ApparentWave& w, double l_m,
                                     double k0);

/// The same update with the exponent, phase reduction and transcendentals in
/// double-double arithmetic (the extended-precision reference pipeline, where
/// whole-path phase stays accurate to ~1e-26 rad instead of double rounding).
std::complex<double> propagate_field_hp(std::complex<double> E, const ApparentWave& w, double l_m,
                                        double k0);

/// Snapshot of the solver's diagnostic counters.
struct SolverDiagnostics {
  std::uint64_t evaluations = 0;
  std::uint64_t oracle_fallbacks = 0;
  std::uint64_t cancellation_underflows = 0;
};
SolverDiagnostics solver_diagnostics();
void reset_solver_diagnostics();

/// Interface computations selectable at run time.
enum class SolverKind { Uniform, Stable, NaiveWorking, NaiveExtended, Oracle };

SolverKind solver_kind_from_name(const std::string& name);
const char* solver_kind_name(SolverKind kind);

/// One transmitted-side interface crossing solved from an incident wave:
/// transmitted apparent wave, its effective attenuation, and the Fresnel
/// coefficients. Uniform drops the loss terms from refraction (real Snell,
/// psi_t = theta_t, K = kappa2) and uses real-index Fresnel coefficients.
struct InterfaceSolution {
  ApparentWave transmitted;
  double effective_attenuation = 0.0;  // K2 cos(theta_t - psi_t)
  std::complex<double> tau{1.0, 0.0};
  std::complex<double> gamma_r{0.0, 0.0};
};

InterfaceSolution solve_interface(const ApparentWave& incident, const MediumPair& pair,
                                  SolverKind kind);

}  // namespace npw
