#include "npw/interface_solver.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <vector>

#include "npw/dd.hpp"

namespace npw {

namespace {

// Diagnostics are aggregated per thread: the counters sit on the solver's
// hottest path, so each thread bumps plain integers and the query sums the
// live blocks plus whatever exited threads left behind.
struct DiagBlock {
  std::uint64_t evaluations = 0;
  std::uint64_t oracle_fallbacks = 0;
  std::uint64_t cancellation_underflows = 0;
};

std::mutex g_diag_mu;
std::vector<DiagBlock*>& diag_blocks() {
  static std::vector<DiagBlock*> blocks;
  return blocks;
}
DiagBlock& diag_retired() {
  static DiagBlock retired;
  return retired;
}

struct DiagRegistration {
  DiagBlock block;
  DiagRegistration() {
    std::lock_guard<std::mutex> lock(g_diag_mu);
    diag_blocks().push_back(&block);
  }
  ~DiagRegistration() {
    std::lock_guard<std::mutex> lock(g_diag_mu);
    DiagBlock& retired = diag_retired();
    retired.evaluations += block.evaluations;
    retired.oracle_fallbacks += block.oracle_fallbacks;
    retired.cancellation_underflows += block.cancellation_underflows;
    auto& blocks = diag_blocks();
    blocks.erase(std::find(blocks.begin(), blocks.end(), &block));
  }
};

DiagBlock& tl_diag() {
  thread_local DiagRegistration reg;
  return reg.block;
}

inline double sqrt_one_minus_sq(double s) {
  // sqrt(1 - s^2) without cancellation for s near 1.
  return std::sqrt(std::max(0.0, (1.0 - s) * (1.0 + s)));
}

/// Lossless reduction shared by all three solvers: real Snell on the
/// tangential phase component.
ApparentWave real_snell_wave(double Ns, const ComplexRefractivity& m2) {
  if (Ns == m2.n)
    throw SolverError(SolverStatus::GrazingDegenerate,
                      "grazing lossless interface: transmitted direction degenerate");
  if (Ns > m2.n)
    throw SolverError(SolverStatus::TotalInternalReflection,
                      "total internal reflection: Ns exceeds n2");
  ApparentWave w;
  w.N = m2.n;
  w.K = 0.0;
  w.sin_theta = Ns / m2.n;
  w.cos_theta = sqrt_one_minus_sq(w.sin_theta);
  w.sin_psi = w.sin_theta;  // psi unconstrained for K = 0; stored equal to theta
  w.cos_psi = w.cos_theta;
  return w;
}

/// Assemble the transmitted wave from tangential components and the squared
/// normal components u^2 (phase) and v^2 (attenuation).
ApparentWave wave_from_components(double Ns, double Ks, double u2, double v2) {
  ApparentWave w;
  double u = std::sqrt(u2);
  double v = std::sqrt(v2);
  w.N = std::sqrt(Ns * Ns + u2);
  w.K = std::sqrt(Ks * Ks + v2);
  double inv_N = 1.0 / w.N;
  w.sin_theta = Ns * inv_N;
  w.cos_theta = u * inv_N;
  if (w.K > 0.0) {
    double inv_K = 1.0 / w.K;
    w.sin_psi = Ks * inv_K;
    w.cos_psi = v * inv_K;
  } else {
    w.sin_psi = w.sin_theta;
    w.cos_psi = w.cos_theta;
  }
  return w;
}

void require_tangential(double Ns, double Ks) {
  if (!(Ns >= 0.0) || !(Ks >= 0.0))
    throw std::invalid_argument("medium2 solve: tangential components must be >= 0");
}

}  // namespace

double QuarticCoeffs::constant_N() const { return Ns * Ns * (B + Ks * Ks) - D * D; }
double QuarticCoeffs::constant_K() const { return Ks * Ks * (Ns * Ns - B) - D * D; }

QuarticCoeffs reduced_quartic_coeffs(double Ns, double Ks, const ComplexRefractivity& m2) {
  QuarticCoeffs q;
  q.A = Ns * Ns + Ks * Ks;
  q.B = m2.n * m2.n - m2.kappa * m2.kappa;
  q.D = m2.n * m2.kappa - Ns * Ks;
  q.Ns = Ns;
  q.Ks = Ks;
  return q;
}

double quartic_residual_N(const QuarticCoeffs& q, double N2) {
  double x = N2 * N2;
  return x * x - (q.A + q.B) * x + q.constant_N();
}

double quartic_residual_K(const QuarticCoeffs& q, double K2) {
  double y = K2 * K2;
  return y * y - (q.A - q.B) * y + q.constant_K();
}

double k1sq_c_form(double a, double b, double c) {
  double x = 2.0 * b / (a * c);
  return 0.5 * a * x * x / (std::sqrt(1.0 + x * x) + 1.0);
}

double k1sq_r_form(double a, double r) {
  return 2.0 * a / (r * r + r * std::sqrt(r * r + 4.0));
}

double k1sq_asymptotic_large_r(double a, double r) { return a / (r * r); }

double k1sq_asymptotic_small_r(double a, double r) { return a / r; }

namespace {

/// (N1, K1) for a wave hosted by m with non-uniformity projection c.
std::pair<double, double> medium1_indices(const ComplexRefractivity& m, double c) {
  if (!(c > 0.0))
    throw SolverError(SolverStatus::InvalidIncidence,
                      "medium1_apparent: attenuation direction perpendicular or opposing the "
                      "phase direction (cos(theta-psi) <= 0)");
  double a = m.n * m.n - m.kappa * m.kappa;
  double b = m.n * m.kappa;
  double k1sq;
  if (a <= 0.0) {
    // Exotic media (kappa >= n): the direct root is already well conditioned
    // because -a*c^2 and the radical add.
    double disc = std::sqrt(a * a * c * c * c * c + 4.0 * b * b * c * c);
    k1sq = (-a * c * c + disc) / (2.0 * c * c);
  } else {
    double r = a * c / b;
    if (r > kBranchRHigh)
      k1sq = k1sq_asymptotic_large_r(a, r);
    else if (r < kBranchRLow)
      k1sq = k1sq_asymptotic_small_r(a, r);
    else if (r >= 1.0 && c >= kBranchCMin)
      k1sq = k1sq_c_form(a, b, c);
    else
      k1sq = k1sq_r_form(a, r);
  }
  return {std::sqrt(k1sq + a), std::sqrt(k1sq)};
}

}  // namespace

ApparentWave medium1_apparent(const ComplexRefractivity& m, double theta_i, double psi_i) {
  if (m.kappa == 0.0) {
    double c = std::cos(theta_i - psi_i);
    if (!(c > 0.0))
      throw SolverError(SolverStatus::InvalidIncidence,
                        "medium1_apparent: attenuation direction perpendicular or opposing the "
                        "phase direction (cos(theta-psi) <= 0)");
    return ApparentWave::from_angles(m.n, 0.0, theta_i, theta_i);
  }
  auto [N1, K1] = medium1_indices(m, std::cos(theta_i - psi_i));
  return ApparentWave::from_angles(N1, K1, theta_i, psi_i);
}

ApparentWave rehost_wave(const ApparentWave& w, const ComplexRefractivity& m) {
  ApparentWave out = w;
  if (m.kappa == 0.0) {
    out.N = m.n;
    out.K = 0.0;
    out.sin_psi = w.sin_theta;
    out.cos_psi = w.cos_theta;
    return out;
  }
  auto [N1, K1] = medium1_indices(m, w.cos_alpha());
  out.N = N1;
  out.K = K1;
  return out;
}

ApparentWave medium2_apparent_stable(double Ns, double Ks, const ComplexRefractivity& m2) {
  require_tangential(Ns, Ks);
  ++tl_diag().evaluations;
  if (m2.kappa == 0.0 && Ks == 0.0) return real_snell_wave(Ns, m2);

  double B = m2.n * m2.n - m2.kappa * m2.kappa;
  double D = m2.n * m2.kappa - Ns * Ks;
  double P = B - Ns * Ns + Ks * Ks;
  double S = std::sqrt(P * P + 4.0 * D * D);

  // Roots of t^2 - P t - D^2 = 0 in conjugate form: whichever of the two
  // expressions adds like-signed terms is used, never the subtracting one.
  double u2 = (P >= 0.0) ? 0.5 * (P + S) : (2.0 * D * D) / (S - P);
  double v2 = (P <= 0.0) ? 0.5 * (S - P) : (2.0 * D * D) / (S + P);
  if (!(u2 > 0.0))
    throw SolverError(SolverStatus::TotalInternalReflection,
                      "medium2_apparent_stable: no transmitted phase component");

  ApparentWave w = wave_from_components(Ns, Ks, u2, v2);
  if (dispersion_residual(w, m2) > 1e-10 * std::max(1.0, w.N * w.N)) {
    ++tl_diag().oracle_fallbacks;
    ApparentWave o = medium2_oracle_hp(Ns, Ks, m2);
    if (dispersion_residual(o, m2) > 1e-10 * std::max(1.0, o.N * o.N))
      throw SolverError(SolverStatus::NoPhysicalRoot,
                        "medium2 solve: no branch satisfies the dispersion residual");
    return o;
  }
  return w;
}

ApparentWave medium2_apparent_naive(double Ns, double Ks, const ComplexRefractivity& m2,
                                    Precision precision) {
  require_tangential(Ns, Ks);
  ++tl_diag().evaluations;
  if (m2.kappa == 0.0 && Ks == 0.0) return real_snell_wave(Ns, m2);

  if (precision == Precision::Working) {
    QuarticCoeffs q = reduced_quartic_coeffs(Ns, Ks, m2);
    double p = q.A + q.B;
    double disc = p * p - 4.0 * q.constant_N();
    if (disc < 0.0) {
      ++tl_diag().cancellation_underflows;
      throw SolverError(SolverStatus::CancellationUnderflow,
                        "naive medium2 solve: negative discriminant under working precision");
    }
    double N2sq = 0.5 * (p + std::sqrt(disc));
    double rad = N2sq - m2.n * m2.n + m2.kappa * m2.kappa;
    if (rad < 0.0) {
      ++tl_diag().cancellation_underflows;
      throw SolverError(SolverStatus::CancellationUnderflow,
                        "naive medium2 solve: K2^2 radicand went negative under working precision");
    }
    double N2 = std::sqrt(N2sq);
    double K2 = std::sqrt(rad);
    ApparentWave w;
    w.N = N2;
    w.K = K2;
    w.sin_theta = std::min(Ns / N2, 1.0);
    w.cos_theta = sqrt_one_minus_sq(w.sin_theta);
    if (K2 > 0.0) {
      w.sin_psi = Ks / K2;  // may exceed 1 once cancellation has destroyed K2
      w.cos_psi = sqrt_one_minus_sq(std::min(w.sin_psi, 1.0));
    } else {
      w.sin_psi = w.sin_theta;
      w.cos_psi = w.cos_theta;
    }
    return w;
  }

  // Extended precision: the same cancellation-prone formulation carried in
  // double-double arithmetic, which keeps ~32 significant digits through the
  // subtractions.
  DD ns(Ns), ks(Ks), n2(m2.n), k2(m2.kappa);
  DD A = ns * ns + ks * ks;
  DD B = n2 * n2 - k2 * k2;
  DD Dq = n2 * k2 - ns * ks;
  DD CN = ns * ns * (B + ks * ks) - Dq * Dq;
  DD p = A + B;
  DD disc = p * p - DD(4.0) * CN;
  if (disc.hi < 0.0) {
    ++tl_diag().cancellation_underflows;
    throw SolverError(SolverStatus::CancellationUnderflow,
                      "naive medium2 solve: negative discriminant in extended precision");
  }
  DD N2sq = DD(0.5) * (p + dd_sqrt(disc));
  DD rad = N2sq - n2 * n2 + k2 * k2;
  if (rad.hi < 0.0) {
    ++tl_diag().cancellation_underflows;
    throw SolverError(SolverStatus::CancellationUnderflow,
                      "naive medium2 solve: negative K2^2 radicand in extended precision");
  }
  DD N2 = dd_sqrt(N2sq);
  DD K2 = dd_sqrt(rad);
  ApparentWave w;
  w.N = N2.to_double();
  w.K = K2.to_double();
  w.sin_theta = (ns / N2).to_double();
  w.cos_theta = dd_sqrt((DD(1.0) - ns / N2) * (DD(1.0) + ns / N2)).to_double();
  if (w.K > 0.0) {
    w.sin_psi = (ks / K2).to_double();
    w.cos_psi = dd_sqrt((DD(1.0) - ks / K2) * (DD(1.0) + ks / K2)).to_double();
  } else {
    w.sin_psi = w.sin_theta;
    w.cos_psi = w.cos_theta;
  }
  return w;
}

ApparentWave medium2_oracle_hp(double Ns, double Ks, const ComplexRefractivity& m2) {
  require_tangential(Ns, Ks);
  ++tl_diag().evaluations;
  if (m2.kappa == 0.0 && Ks == 0.0) return real_snell_wave(Ns, m2);

  DD ns(Ns), ks(Ks), n2(m2.n), k2(m2.kappa);
  DD P = (n2 * n2 - k2 * k2) - ns * ns + ks * ks;
  DD D = n2 * k2 - ns * ks;
  DDComplex z(P, DD(-2.0) * D);
  if (dd_cabs(z).hi == 0.0)
    throw SolverError(SolverStatus::GrazingDegenerate,
                      "oracle: both normal components vanish (grazing lossless)");
  DDComplex q = dd_csqrt(z);  // principal branch, Re q >= 0
  DD u = q.re;
  DD v = dd_abs(q.im);  // decaying transmitted wave: attenuation component by magnitude
  if (u.hi == 0.0 && u.lo == 0.0)
    throw SolverError(SolverStatus::TotalInternalReflection,
                      "oracle: no transmitted phase component");

  DD N2 = dd_sqrt(ns * ns + u * u);
  DD K2 = dd_sqrt(ks * ks + v * v);
  ApparentWave w;
  w.N = N2.to_double();
  w.K = K2.to_double();
  w.sin_theta = (ns / N2).to_double();
  w.cos_theta = (u / N2).to_double();
  if (K2.hi > 0.0) {
    w.sin_psi = (ks / K2).to_double();
    w.cos_psi = (v / K2).to_double();
  } else {
    w.sin_psi = w.sin_theta;
    w.cos_psi = w.cos_theta;
  }
  return w;
}

FresnelCoeffs fresnel_npw(const ApparentWave& incident, const MediumPair& pair,
                          const ApparentWave& transmitted) {
  using C = std::complex<double>;
  C q1(incident.N * incident.cos_theta, -incident.K * incident.cos_psi);
  C q2(transmitted.N * transmitted.cos_theta, -transmitted.K * transmitted.cos_psi);
  C e1 = C(pair.m1.n, -pair.m1.kappa) * C(pair.m1.n, -pair.m1.kappa);
  C e2 = C(pair.m2.n, -pair.m2.kappa) * C(pair.m2.n, -pair.m2.kappa);
  C a = e1 * q2;
  C b = e2 * q1;
  C den = a + b;
  double den2 = den.real() * den.real() + den.imag() * den.imag();
  double scale2 = std::norm(a) + std::norm(b);  // (|a|+|b|)^2 <= 2*scale2
  if (!(den2 > 2e-28 * scale2))
    throw SolverError(SolverStatus::DegenerateFresnel,
                      "fresnel_npw: e1*q2 + e2*q1 is degenerate");
  // Conjugate division; the finite/degenerate cases are handled above.
  C num = a - b;
  FresnelCoeffs f;
  f.gamma_r = C((num.real() * den.real() + num.imag() * den.imag()) / den2,
                (num.imag() * den.real() - num.real() * den.imag()) / den2);
  f.tau = 1.0 + f.gamma_r;
  return f;
}

FresnelCoeffs fresnel_npw_hp(const ApparentWave& incident, const MediumPair& pair,
                             const ApparentWave& transmitted) {
  DDComplex q1(DD(incident.N) * DD(incident.cos_theta), -(DD(incident.K) * DD(incident.cos_psi)));
  DDComplex q2(DD(transmitted.N) * DD(transmitted.cos_theta),
               -(DD(transmitted.K) * DD(transmitted.cos_psi)));
  DDComplex n1(pair.m1.n, -pair.m1.kappa), n2(pair.m2.n, -pair.m2.kappa);
  DDComplex a = n1 * n1 * q2;
  DDComplex b = n2 * n2 * q1;
  DDComplex den = a + b;
  if (dd_cabs(den).hi <= 1e-14 * (dd_cabs(a).hi + dd_cabs(b).hi))
    throw SolverError(SolverStatus::DegenerateFresnel,
                      "fresnel_npw_hp: e1*q2 + e2*q1 is degenerate");
  DDComplex g = (a - b) / den;
  FresnelCoeffs f;
  f.gamma_r = {g.re.to_double(), g.im.to_double()};
  f.tau = {(DD(1.0) + g.re).to_double(), g.im.to_double()};
  return f;
}

std::complex<double> propagate_field(std::complex<double> E, const ApparentWave& w, double l_m,
                                     double k0) {
  if (!(l_m >= 0.0) || !(k0 > 0.0))
    throw std::invalid_argument("propagate_field: need l >= 0 and k0 > 0");
  double amp = std::exp(-k0 * effective_attenuation(w) * l_m);
  return E * std::polar(amp, -k0 * w.N * l_m);
}

std::complex<double> propagate_field_hp(std::complex<double> E, const ApparentWave& w, double l_m,
                                        double k0) {
  if (!(l_m >= 0.0) || !(k0 > 0.0))
    throw std::invalid_argument("propagate_field_hp: need l >= 0 and k0 > 0");
  DD expo = DD(k0) * DD(effective_attenuation(w)) * DD(l_m);
  DD amp = dd_exp(-expo);
  DD phase = DD(k0) * DD(w.N) * DD(l_m);
  DD s, c;
  dd_sincos(phase, s, c);
  std::complex<double> factor(amp.to_double() * c.to_double(),
                              amp.to_double() * -s.to_double());
  return E * factor;
}

SolverDiagnostics solver_diagnostics() {
  std::lock_guard<std::mutex> lock(g_diag_mu);
  DiagBlock total = diag_retired();
  for (const DiagBlock* b : diag_blocks()) {
    total.evaluations += b->evaluations;
    total.oracle_fallbacks += b->oracle_fallbacks;
    total.cancellation_underflows += b->cancellation_underflows;
  }
  return SolverDiagnostics{total.evaluations, total.oracle_fallbacks,
                           total.cancellation_underflows};
}

void reset_solver_diagnostics() {
  std::lock_guard<std::mutex> lock(g_diag_mu);
  diag_retired() = DiagBlock{};
  for (DiagBlock* b : diag_blocks()) *b = DiagBlock{};
}

SolverKind solver_kind_from_name(const std::string& name) {
  if (name == "uniform") return SolverKind::Uniform;
  if (name == "stable") return SolverKind::Stable;
  if (name == "naive_working") return SolverKind::NaiveWorking;
  if (name == "naive_extended") return SolverKind::NaiveExtended;
  if (name == "oracle") return SolverKind::Oracle;
  throw std::invalid_argument("unknown solver/method name: " + name);
}

const char* solver_kind_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::Uniform: return "uniform";
    case SolverKind::Stable: return "stable";
    case SolverKind::NaiveWorking: return "naive_working";
    case SolverKind::NaiveExtended: return "naive_extended";
    case SolverKind::Oracle: return "oracle";
  }
  return "?";
}

InterfaceSolution solve_interface(const ApparentWave& incident, const MediumPair& pair,
                                  SolverKind kind) {
  InterfaceSolution sol;
  if (pair.m1.n == pair.m2.n && pair.m1.kappa == pair.m2.kappa) {
    // Identical media: the interface is fictitious.
    sol.transmitted = incident;
    sol.effective_attenuation = effective_attenuation(incident);
    return sol;
  }
  if (kind == SolverKind::Uniform) {
    double sin_t = pair.m1.n * incident.sin_theta / pair.m2.n;
    if (sin_t > 1.0)
      throw SolverError(SolverStatus::TotalInternalReflection,
                        "uniform interface: total internal reflection");
    ApparentWave t;
    t.N = pair.m2.n;
    t.K = pair.m2.kappa;
    t.sin_theta = t.sin_psi = sin_t;
    t.cos_theta = t.cos_psi = std::sqrt(std::max(0.0, (1.0 - sin_t) * (1.0 + sin_t)));
    sol.transmitted = t;
    sol.effective_attenuation = pair.m2.kappa;
    // Real-index Fresnel, consistent with the approximation.
    double a = pair.m1.n * pair.m1.n * (t.N * t.cos_theta);
    double b = pair.m2.n * pair.m2.n * (incident.N * incident.cos_theta);
    sol.gamma_r = (a - b) / (a + b);
    sol.tau = 1.0 + sol.gamma_r;
    return sol;
  }

  double Ns = incident.tangential_N();
  double Ks = incident.tangential_K();
  switch (kind) {
    case SolverKind::Stable:
      sol.transmitted = medium2_apparent_stable(Ns, Ks, pair.m2);
      break;
    case SolverKind::NaiveWorking:
      sol.transmitted = medium2_apparent_naive(Ns, Ks, pair.m2, Precision::Working);
      break;
    case SolverKind::NaiveExtended:
      sol.transmitted = medium2_apparent_naive(Ns, Ks, pair.m2, Precision::Extended);
      break;
    case SolverKind::Oracle:
      sol.transmitted = medium2_oracle_hp(Ns, Ks, pair.m2);
      break;
    default:
      break;
  }
  sol.effective_attenuation = effective_attenuation(sol.transmitted);
  FresnelCoeffs f = (kind == SolverKind::NaiveExtended)
                        ? fresnel_npw_hp(incident, pair, sol.transmitted)
                        : fresnel_npw(incident, pair, sol.transmitted);
  sol.gamma_r = f.gamma_r;
  sol.tau = f.tau;
  return sol;
}

}  // namespace npw
