#include "npw/raytracer.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace npw {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
const ComplexRefractivity kVacuum{1.0, 0.0};

double tau_db(const std::complex<double>& tau) { return -20.0 * std::log10(std::abs(tau)); }

/// Wave entering a laterally adjacent cell: direction kept bit for bit,
/// apparent indices recomputed for the new host medium.
ApparentWave rehost(const ApparentWave& w, const ComplexRefractivity& m, MethodKind method) {
  if (method == MethodKind::UniformPW) {
    ApparentWave out = w;
    out.N = m.n;
    out.K = m.kappa;
    out.sin_psi = out.sin_theta;
    out.cos_psi = out.cos_theta;
    return out;
  }
  return rehost_wave(w, m);
}

}  // namespace

MethodKind method_from_name(const std::string& name) {
  if (name == "uniform") return MethodKind::UniformPW;
  if (name == "naive_extended") return MethodKind::NaiveExtended;
  if (name == "stable") return MethodKind::StableNPW;
  throw std::invalid_argument("unknown method name: " + name);
}

const char* method_name(MethodKind m) {
  switch (m) {
    case MethodKind::UniformPW: return "uniform";
    case MethodKind::NaiveExtended: return "naive_extended";
    case MethodKind::StableNPW: return "stable";
  }
  return "?";
}

SolverKind solver_kind_for(MethodKind m) {
  switch (m) {
    case MethodKind::UniformPW: return SolverKind::Uniform;
    case MethodKind::NaiveExtended: return SolverKind::NaiveExtended;
    case MethodKind::StableNPW: return SolverKind::Stable;
  }
  return SolverKind::Stable;
}

std::pair<double, double> uniform_interface(const ComplexRefractivity& m1,
                                            const ComplexRefractivity& m2, double theta_i) {
  double sin_t = m1.n * std::sin(theta_i) / m2.n;
  if (sin_t > 1.0)
    throw SolverError(SolverStatus::TotalInternalReflection,
                      "uniform_interface: total internal reflection");
  return {std::asin(sin_t), m2.kappa};
}

RayPath trace_ray(const RefractivityGrid2D& grid, double start_x_km, double start_h_km,
                  double launch_theta_rad, double f_hz, MethodKind method,
                  const TraceOptions& opts) {
  if (!(std::abs(launch_theta_rad) < kPi / 2.0))
    throw std::invalid_argument("trace_ray: |launch angle| must be < 90 deg");
  if (start_h_km < grid.h_top() - 1e-12)
    throw std::invalid_argument("trace_ray: start altitude below the top layer edge");
  const double k0 = wavenumber(f_hz);
  const SolverKind solver = solver_kind_for(method);
  const int dir = launch_theta_rad < 0.0 ? -1 : 1;
  const double th = std::abs(launch_theta_rad);

  RayPath path;
  path.method = method;
  double x = start_x_km;
  double h = start_h_km;
  double pending_tau_db = 0.0;

  auto emit = [&](const ApparentWave& w, double x1, double h1) {
    if (path.segments.size() >= opts.max_segments)
      throw TraceError(TraceStatus::SegmentOverflow, "trace_ray: segment limit exceeded", h);
    RaySegment s;
    s.x0_km = x;
    s.h0_km = h;
    s.x1_km = x1;
    s.h1_km = h1;
    s.wave = w;
    s.length_m = std::hypot(x1 - x, h1 - h) * 1000.0;
    s.segment_loss_db = kDbPerNeper * k0 * effective_attenuation(w) * s.length_m;
    s.interface_tau_db = pending_tau_db;
    pending_tau_db = 0.0;
    path.segments.push_back(s);
    x = x1;
    h = h1;
  };

  ApparentWave wave = ApparentWave::uniform(kVacuum, th);
  if (h > grid.h_top()) {
    double dh = h - grid.h_top();
    emit(wave, x + dir * dh * (wave.sin_theta / wave.cos_theta), grid.h_top());
  }

  ComplexRefractivity m_above = kVacuum;
  std::size_t col = grid.column_of(x);
  // A start exactly on a column edge belongs to the cell in travel direction.
  if (dir < 0 && col > 0 && x == grid.x_edges()[col]) --col;
  const std::size_t nh = grid.nh();
  for (std::size_t jj = 0; jj < nh; ++jj) {
    std::size_t j = nh - 1 - jj;
    const ComplexRefractivity& m2 = grid.cell(col, j);
    InterfaceSolution sol;
    try {
      sol = solve_interface(wave, MediumPair{m_above, m2}, solver);
    } catch (const SolverError& e) {
      if (e.status() == SolverStatus::TotalInternalReflection)
        throw TraceError(TraceStatus::TotalInternalReflection,
                         std::string("trace_ray: total internal reflection at h = ") +
                             std::to_string(h) + " km",
                         h);
      throw;
    }
    wave = sol.transmitted;
    if (opts.include_tau) pending_tau_db = tau_db(sol.tau);

    // March through layer j along the phase direction, splitting at column
    // boundaries (medium swap, no refraction).
    const double h_bot = grid.h_edges()[j];
    for (;;) {
      double tan_th = wave.sin_theta / wave.cos_theta;
      double dh_full = h - h_bot;
      double x_target = x + dir * dh_full * tan_th;
      bool crosses = false;
      double x_edge = 0.0;
      if (dir > 0 && col + 1 < grid.nx() && x_target > grid.x_edges()[col + 1]) {
        crosses = true;
        x_edge = grid.x_edges()[col + 1];
      } else if (dir < 0 && col > 0 && x_target < grid.x_edges()[col]) {
        crosses = true;
        x_edge = grid.x_edges()[col];
      }
      if (!crosses) {
        emit(wave, x_target, h_bot);
        break;
      }
      double dh = (x_edge - x) / (dir * tan_th);
      if (dh > 0.0) emit(wave, x_edge, h - dh);
      col = (dir > 0) ? col + 1 : col - 1;
      wave = rehost(wave, grid.cell(col, j), method);
    }
    m_above = grid.cell(col, j);
  }

  path.landing_x_km = x;
  double total = 0.0;
  for (const auto& s : path.segments) total += s.segment_loss_db + s.interface_tau_db;
  path.total_loss_db = total;
  return path;
}

ShootResult shoot_to_receiver(const RefractivityGrid2D& grid, double sat_x_km, double sat_h_km,
                              double rx_x_km, double f_hz, MethodKind method, double tol_m,
                              const TraceOptions& opts) {
  if (rx_x_km < grid.x_min() || rx_x_km > grid.x_max())
    throw std::invalid_argument("shoot_to_receiver: receiver outside the grid");
  // Polish far below the landing requirement so that method-to-method
  // boresight differences are not dominated by solver slack.
  const double inner_tol_m = std::min(tol_m, 1e-8);

  ShootResult res;
  auto g = [&](double theta) {
    res.path = trace_ray(grid, sat_x_km, sat_h_km, theta, f_hz, method, opts);
    return res.path.landing_x_km - rx_x_km;
  };

  const double theta_g = std::atan2(rx_x_km - sat_x_km, sat_h_km - grid.h_bottom());
  double g0 = g(theta_g);
  if (std::abs(g0) * 1000.0 <= inner_tol_m) {
    res.launch_theta_rad = theta_g;
    res.iterations = 0;
    return res;
  }

  double delta = 0.5 * kPi / 180.0;
  double a = theta_g - delta, b = theta_g + delta;
  double ga = g(a), gb = g(b);
  if ((ga < 0.0) == (gb < 0.0)) {
    delta = 1.0 * kPi / 180.0;  // widen once, then give up
    a = theta_g - delta;
    b = theta_g + delta;
    ga = g(a);
    gb = g(b);
    if ((ga < 0.0) == (gb < 0.0))
      throw TraceError(TraceStatus::NoBracket,
                       "shoot_to_receiver: no sign change within +-1 deg of the geometric angle");
  }

  // Illinois false position.
  const int max_iter = 50;
  double best_theta = std::abs(ga) <= std::abs(gb) ? a : b;
  double best_g = std::abs(ga) <= std::abs(gb) ? ga : gb;
  int iter = 0;
  while (iter < max_iter && ga != gb) {
    double xnew = (ga * b - gb * a) / (ga - gb);
    double gx = g(xnew);
    ++iter;
    if (std::abs(gx) < std::abs(best_g)) {
      best_theta = xnew;
      best_g = gx;
    }
    if (std::abs(gx) * 1000.0 <= inner_tol_m || std::abs(b - a) <= 1e-16) break;
    if ((gx < 0.0) == (gb < 0.0)) {
      b = xnew;
      gb = gx;
      ga *= 0.5;
    } else {
      a = b;
      ga = gb;
      b = xnew;
      gb = gx;
    }
  }
  if (std::abs(best_g) * 1000.0 > tol_m)
    throw TraceError(TraceStatus::NonConvergence,
                     "shoot_to_receiver: landing error " + std::to_string(std::abs(best_g) * 1000.0) +
                         " m after " + std::to_string(iter) + " iterations");
  g(best_theta);  // leave res.path consistent with the returned angle
  res.launch_theta_rad = best_theta;
  res.iterations = iter;
  return res;
}

double boresight_error_deg(const RefractivityGrid2D& grid, double sat_x_km, double sat_h_km,
                           double rx_x_km, double f_hz, MethodKind method,
                           BoresightConvention convention, double tol_m) {
  ShootResult r = shoot_to_receiver(grid, sat_x_km, sat_h_km, rx_x_km, f_hz, method, tol_m);
  double theta_g = std::atan2(rx_x_km - sat_x_km, sat_h_km - grid.h_bottom());
  if (convention == BoresightConvention::LaunchCorrection)
    return (r.launch_theta_rad - theta_g) * 180.0 / kPi;
  const RaySegment& last = r.path.segments.back();
  int dir = r.launch_theta_rad < 0.0 ? -1 : 1;
  double arrival = dir * last.wave.theta();
  return (arrival - theta_g) * 180.0 / kPi;
}

std::vector<LinkOutcome> link_sweep(const RefractivityGrid2D& grid, double rx_x_km,
                                    double sat_h_km, double f_hz,
                                    const std::vector<double>& thetas_deg,
                                    const std::vector<MethodKind>& methods, int threads,
                                    BoresightConvention convention, double tol_m,
                                    const TraceOptions& opts) {
  struct Item {
    double theta_deg;
    MethodKind method;
  };
  std::vector<Item> items;
  for (double t : thetas_deg)
    for (MethodKind m : methods) items.push_back({t, m});
  std::vector<LinkOutcome> out(items.size());

  auto run_item = [&](std::size_t idx) {
    const Item& it = items[idx];
    LinkOutcome& o = out[idx];
    o.result.method = it.method;
    o.result.theta_inc_deg = it.theta_deg;
    try {
      double theta = it.theta_deg * kPi / 180.0;
      double sat_x = rx_x_km - (sat_h_km - grid.h_bottom()) * std::tan(theta);
      ShootResult r =
          shoot_to_receiver(grid, sat_x, sat_h_km, rx_x_km, f_hz, it.method, tol_m, opts);
      double theta_g = std::atan2(rx_x_km - sat_x, sat_h_km - grid.h_bottom());
      if (convention == BoresightConvention::LaunchCorrection) {
        o.result.boresight_deg = (r.launch_theta_rad - theta_g) * 180.0 / kPi;
      } else {
        int dir = r.launch_theta_rad < 0.0 ? -1 : 1;
        o.result.boresight_deg = (dir * r.path.segments.back().wave.theta() - theta_g) * 180.0 / kPi;
      }
      o.result.total_loss_db = r.path.total_loss_db;
      o.result.iterations = r.iterations;
      o.ok = true;
    } catch (const std::exception& e) {
      o.ok = false;
      o.error = e.what();
    }
  };

  int nworkers = std::max(1, threads);
  if (nworkers <= 1 || items.size() <= 1) {
    for (std::size_t i = 0; i < items.size(); ++i) run_item(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::size_t count = std::min<std::size_t>(nworkers, items.size());
  pool.reserve(count);
  for (std::size_t w = 0; w < count; ++w)
    pool.emplace_back([&]() {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= items.size()) return;
        run_item(i);
      }
    });
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace npw
