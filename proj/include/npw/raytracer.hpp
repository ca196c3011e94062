#pragma once

#include <string>
#include <vector>

#include "npw/grid.hpp"
#include "npw/interface_solver.hpp"

namespace npw {

/// The three link-analysis methods compared throughout: the uniform
/// plane-wave approximation, the cancellation-prone formulation carried in
/// extended precision, and the stable working-precision solver.
enum class MethodKind { UniformPW, NaiveExtended, StableNPW };

MethodKind method_from_name(const std::string& name);
const char* method_name(MethodKind m);
SolverKind solver_kind_for(MethodKind m);

struct RaySegment {
  double x0_km = 0.0, h0_km = 0.0;
  double x1_km = 0.0, h1_km = 0.0;
  ApparentWave wave;             // wave state along this segment
  double length_m = 0.0;
  double segment_loss_db = 0.0;  // propagation loss over the segment
  double interface_tau_db = 0.0; // |tau| loss of the interface entering it
};

struct RayPath {
  MethodKind method = MethodKind::StableNPW;
  std::vector<RaySegment> segments;
  double landing_x_km = 0.0;
  double total_loss_db = 0.0;
};

struct TraceOptions {
  std::size_t max_segments = 100000;
  bool include_tau = true;  // interface |tau| contributions in total loss
};

/// March a ray downward from (start_x, start_h) with launch angle theta
/// (radians from vertical, signed: positive tips toward +x). Refraction is
/// solved at every h-edge by `method`; the geometric path follows the phase
/// direction; crossing a column boundary swaps the medium without refraction
/// (the wave is re-hosted with its direction angles kept). Terminates at the
/// bottom edge of the grid.
RayPath trace_ray(const RefractivityGrid2D& grid, double start_x_km, double start_h_km,
                  double launch_theta_rad, double f_hz, MethodKind method,
                  const TraceOptions& opts = {});

/// Uniform-approximation interface: real Snell for the angle, kappa2 for the
/// attenuation. Returns (theta_t [rad], kappa_eff).
std::pair<double, double> uniform_interface(const ComplexRefractivity& m1,
                                            const ComplexRefractivity& m2, double theta_i);

struct ShootResult {
  double launch_theta_rad = 0.0;
  RayPath path;
  int iterations = 0;
};

/// Root-find the launch angle so the ray lands at rx_x within tol_m metres:
/// bracket around the geometric angle (+-0.5 deg, widened once to +-1 deg),
/// then Illinois refinement, at most 50 iterations. The iteration polishes
/// well below tol_m so that method-to-method boresight comparisons are not
/// limited by the solver.
ShootResult shoot_to_receiver(const RefractivityGrid2D& grid, double sat_x_km, double sat_h_km,
                              double rx_x_km, double f_hz, MethodKind method, double tol_m = 1.0,
                              const TraceOptions& opts = {});

enum class BoresightConvention {
  LaunchCorrection,   // launch angle required under refraction minus vacuum-geometric
  ArrivalDeviation,   // arrival angle under refraction minus vacuum-geometric
};

/// Signed boresight error in degrees for a satellite at (sat_x, sat_h) and a
/// ground receiver at rx_x.
double boresight_error_deg(const RefractivityGrid2D& grid, double sat_x_km, double sat_h_km,
                           double rx_x_km, double f_hz, MethodKind method,
                           BoresightConvention convention = BoresightConvention::LaunchCorrection,
                           double tol_m = 1.0);

struct LinkResult {
  MethodKind method = MethodKind::StableNPW;
  double theta_inc_deg = 0.0;
  double boresight_deg = 0.0;
  double total_loss_db = 0.0;
  int iterations = 0;
};

/// Per-item outcome: failures are collected, not fatal.
struct LinkOutcome {
  LinkResult result;
  bool ok = false;
  std::string error;
};

/// One downlink solve per (theta_inc, method): the satellite sits at
/// sat_h km altitude at the longitude that makes the geometric incidence
/// angle equal theta_inc, and the ray is steered onto the receiver.
/// Parallelised across items; output order follows the input order.
std::vector<LinkOutcome> link_sweep(const RefractivityGrid2D& grid, double rx_x_km,
                                    double sat_h_km, double f_hz,
                                    const std::vector<double>& thetas_deg,
                                    const std::vector<MethodKind>& methods, int threads = 1,
                                    BoresightConvention convention =
                                        BoresightConvention::LaunchCorrection,
                                    double tol_m = 1.0, const TraceOptions& opts = {});

}  // namespace npw
