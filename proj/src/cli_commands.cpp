#include "npw/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "npw/config.hpp"
#include "npw/dd.hpp"
#include "npw/errors.hpp"
#include "npw/field_builder.hpp"
#include "npw/grid.hpp"
#include "npw/interface_solver.hpp"
#include "npw/raytracer.hpp"
#include "npw/synthetic.hpp"

namespace npw::cli {

namespace {

namespace fs = std::filesystem;
constexpr double kPi = 3.141592653589793238462643383279502884;

struct GlobalOpts {
  std::string config_path;
  std::string out_dir;
  int threads = 0;  // 0: keep the config's value
  std::string method_list;  // overrides the config's `methods`
  std::uint64_t seed = 0;
  bool seed_set = false;
};

KeyValueFile load_scenario(const GlobalOpts& g) {
  if (g.config_path.empty()) throw ConfigError("missing --config PATH");
  KeyValueFile kv = KeyValueFile::load(g.config_path);
  if (!g.out_dir.empty()) kv.set("out.dir", g.out_dir);
  if (!g.method_list.empty()) kv.set("methods", g.method_list);
  if (g.threads > 0) kv.set("threads", std::to_string(g.threads));
  if (g.seed_set) kv.set("seed", std::to_string(g.seed));
  return kv;
}

fs::path ensure_out_dir(const KeyValueFile& kv) {
  fs::path dir = kv.get_string("out.dir", "out");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string());
  return dir;
}

double frequency_hz(const KeyValueFile& kv) {
  double f = kv.get_double("frequency_ghz", 18.0) * 1e9;
  if (!(f > 0.0)) throw ConfigError("frequency_ghz must be > 0");
  return f;
}

SyntheticParams synthetic_params(const KeyValueFile& kv) {
  SyntheticParams p;
  p.x_min_km = kv.get_double("grid.x_min_km", p.x_min_km);
  p.x_max_km = kv.get_double("grid.x_max_km", p.x_max_km);
  p.nx = static_cast<std::size_t>(kv.get_int("grid.nx", static_cast<long long>(p.nx)));
  p.h_top_km = kv.get_double("grid.h_top_km", p.h_top_km);
  p.nh = static_cast<std::size_t>(kv.get_int("grid.nh", static_cast<long long>(p.nh)));
  p.n0 = kv.get_double("grid.n0", p.n0);
  p.scale_height_km = kv.get_double("grid.scale_height_km", p.scale_height_km);
  p.kappa0 = kv.get_double("grid.kappa0", p.kappa0);
  p.rain_x0_km = kv.get_double("grid.rain.x0_km", p.x_min_km);
  p.rain_x1_km = kv.get_double("grid.rain.x1_km", p.x_max_km);
  p.rain_h0_km = kv.get_double("grid.rain.h0_km", p.rain_h0_km);
  p.rain_h1_km = kv.get_double("grid.rain.h1_km", p.rain_h1_km);
  p.rain_kappa = kv.get_double("grid.rain.kappa", p.rain_kappa);
  p.layer_n1 = kv.get_double("grid.layer.n1", p.layer_n1);
  p.layer_kappa1 = kv.get_double("grid.layer.kappa1", p.layer_kappa1);
  p.layer_n2 = kv.get_double("grid.layer.n2", p.layer_n2);
  p.layer_kappa2 = kv.get_double("grid.layer.kappa2", p.layer_kappa2);
  return p;
}

RefractivityGrid2D grid_from_config(const KeyValueFile& kv) {
  std::string kind = kv.get_string("grid.kind", "synthetic");
  if (kind == "file") return load_grid(kv.get_string("grid.file"));
  if (kind != "synthetic") throw ConfigError("grid.kind must be 'synthetic' or 'file'");
  return synthetic_scenario(synthetic_kind_from_name(kv.get_string("grid.synthetic")),
                            synthetic_params(kv));
}

std::vector<MethodKind> methods_from(const KeyValueFile& kv) {
  std::vector<MethodKind> out;
  for (const auto& name :
       kv.get_string_list("methods", {"uniform", "stable", "naive_extended"}))
    out.push_back(method_from_name(name));
  if (out.empty()) throw ConfigError("methods: empty list");
  return out;
}

std::string csv_num(double v) { return format_double(v); }

// ---------------------------------------------------------------------------
// single-interface

int cmd_single_interface(const KeyValueFile& kv, std::ostream& out) {
  fs::path dir = ensure_out_dir(kv);
  double n1 = kv.get_double("single.n1", 1.0001);
  double kappa1 = kv.get_double("single.kappa1", 1e-8);
  double n2 = kv.get_double("single.n2", 1.0002);
  double kappa2_min = kv.get_double("single.kappa2_min", 1e-9);
  double kappa2_max = kv.get_double("single.kappa2_max", 1e-7);
  long long points = kv.get_int("single.kappa2_points", 200);
  double alpha_deg = kv.get_double("single.alpha_i_deg", 10.0);
  std::vector<double> thetas =
      kv.get_double_list("single.thetas_deg", {15, 25, 35, 45, 55, 65, 75, 85});
  std::vector<std::string> kinds = kv.get_string_list(
      "single.methods", {"uniform", "stable", "naive_working", "naive_extended", "oracle"});
  if (points < 1) throw ConfigError("single.kappa2_points must be >= 1");
  if (!(kappa2_min > 0.0) || !(kappa2_max >= kappa2_min))
    throw ConfigError("single.kappa2_min/max must be positive and ordered");
  for (double t : thetas)
    if (t < alpha_deg)
      throw ConfigError("single.thetas_deg: theta_i = " + std::to_string(t) +
                        " is below single.alpha_i_deg (psi_i would be negative)");

  fs::path csv_path = dir / "single_interface.csv";
  std::ofstream csv(csv_path);
  if (!csv) throw IoError("cannot write " + csv_path.string());
  csv << "theta_deg,kappa2,method,N2,K2,alpha_t_deg,K2cos_alpha,ratio_to_kappa2\n";

  const ComplexRefractivity m1(n1, kappa1);
  for (double theta_deg : thetas) {
    double theta = theta_deg * kPi / 180.0;
    double psi = (theta_deg - alpha_deg) * kPi / 180.0;
    ApparentWave incident = medium1_apparent(m1, theta, psi);
    for (long long k = 0; k < points; ++k) {
      double t = points == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(points - 1);
      double kappa2 = kappa2_min * std::pow(kappa2_max / kappa2_min, t);
      const ComplexRefractivity m2(n2, kappa2);
      for (const auto& kind_name : kinds) {
        SolverKind kind = solver_kind_from_name(kind_name);
        double N2 = std::nan(""), K2 = std::nan(""), alpha_t = std::nan(""),
               eff = std::nan(""), ratio = std::nan("");
        try {
          InterfaceSolution sol = solve_interface(incident, MediumPair{m1, m2}, kind);
          N2 = sol.transmitted.N;
          K2 = sol.transmitted.K;
          alpha_t = (sol.transmitted.theta() - sol.transmitted.psi()) * 180.0 / kPi;
          eff = sol.effective_attenuation;
          ratio = eff / kappa2;
        } catch (const SolverError&) {
          // CancellationUnderflow and friends become NaN rows; the sweep
          // itself keeps going.
        }
        csv << csv_num(theta_deg) << ',' << csv_num(kappa2) << ',' << kind_name << ','
            << csv_num(N2) << ',' << csv_num(K2) << ',' << csv_num(alpha_t) << ','
            << csv_num(eff) << ',' << csv_num(ratio) << '\n';
      }
    }
  }
  out << "single-interface sweep written to " << csv_path.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// link

int cmd_link(const KeyValueFile& kv, std::ostream& out) {
  fs::path dir = ensure_out_dir(kv);
  RefractivityGrid2D grid = grid_from_config(kv);
  double f = frequency_hz(kv);
  double rx_x = kv.get_double("receiver.x_km", 0.0);
  double sat_h = kv.get_double("satellite.h_km", 10.0);
  double tol_m = kv.get_double("shoot.tol_m", 1.0);
  int threads = static_cast<int>(kv.get_int("threads", 1));
  std::vector<double> thetas = kv.get_double_list("sweep.thetas_deg", {});
  std::vector<MethodKind> methods = methods_from(kv);
  BoresightConvention conv = kv.get_string("boresight.convention", "launch") == "arrival"
                                 ? BoresightConvention::ArrivalDeviation
                                 : BoresightConvention::LaunchCorrection;
  TraceOptions opts;
  opts.include_tau = kv.get_bool("trace.include_tau", true);

  auto outcomes = link_sweep(grid, rx_x, sat_h, f, thetas, methods, threads, conv, tol_m, opts);

  fs::path csv_path = dir / "link.csv";
  std::ofstream csv(csv_path);
  if (!csv) throw IoError("cannot write " + csv_path.string());
  csv << "theta_inc_deg,method,loss_db,boresight_deg,iterations,error\n";
  std::size_t successes = 0;
  for (const auto& o : outcomes) {
    csv << csv_num(o.result.theta_inc_deg) << ',' << method_name(o.result.method) << ',';
    if (o.ok) {
      ++successes;
      csv << csv_num(o.result.total_loss_db) << ',' << csv_num(o.result.boresight_deg) << ','
          << o.result.iterations << ",\n";
    } else {
      std::string msg = o.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      csv << "nan,nan,0," << msg << '\n';
    }
  }

  // Max inter-method deviations vs the stable solver, per theta.
  double max_loss_dev_uniform = 0.0, max_bore_dev_uniform = 0.0;
  double max_loss_dev_naive = 0.0, max_bore_dev_naive = 0.0;
  for (double t : thetas) {
    const LinkOutcome *st = nullptr, *un = nullptr, *nv = nullptr;
    for (const auto& o : outcomes) {
      if (!o.ok || o.result.theta_inc_deg != t) continue;
      if (o.result.method == MethodKind::StableNPW) st = &o;
      if (o.result.method == MethodKind::UniformPW) un = &o;
      if (o.result.method == MethodKind::NaiveExtended) nv = &o;
    }
    if (!st) continue;
    auto rel = [](double a, double b) {
      double scale = std::max(std::abs(a), std::abs(b));
      return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
    };
    if (un) {
      max_loss_dev_uniform = std::max(max_loss_dev_uniform,
                                      rel(st->result.total_loss_db, un->result.total_loss_db));
      max_bore_dev_uniform = std::max(
          max_bore_dev_uniform, std::abs(st->result.boresight_deg - un->result.boresight_deg));
    }
    if (nv) {
      max_loss_dev_naive =
          std::max(max_loss_dev_naive, rel(st->result.total_loss_db, nv->result.total_loss_db));
      max_bore_dev_naive = std::max(
          max_bore_dev_naive, std::abs(st->result.boresight_deg - nv->result.boresight_deg));
    }
  }

  nlohmann::ordered_json summary;
  summary["frequency_ghz"] = f / 1e9;
  summary["receiver_x_km"] = rx_x;
  summary["satellite_h_km"] = sat_h;
  summary["thetas"] = thetas.size();
  summary["rows"] = outcomes.size();
  summary["failures"] = outcomes.size() - successes;
  summary["max_loss_rel_dev_uniform_vs_stable"] = max_loss_dev_uniform;
  summary["max_boresight_absdev_deg_uniform_vs_stable"] = max_bore_dev_uniform;
  summary["max_loss_rel_dev_naive_vs_stable"] = max_loss_dev_naive;
  summary["max_boresight_absdev_deg_naive_vs_stable"] = max_bore_dev_naive;
  fs::path json_path = dir / "link_summary.json";
  std::ofstream js(json_path);
  if (!js) throw IoError("cannot write " + json_path.string());
  js << summary.dump(2) << '\n';

  out << "link sweep: " << successes << "/" << outcomes.size() << " items converged; results in "
      << csv_path.string() << "\n";
  if (!outcomes.empty() && successes == 0) return kExitNumericalError;
  return kExitOk;
}

// ---------------------------------------------------------------------------
// trace

int cmd_trace(const KeyValueFile& kv, std::ostream& out) {
  fs::path dir = ensure_out_dir(kv);
  RefractivityGrid2D grid = grid_from_config(kv);
  double f = frequency_hz(kv);
  double x0 = kv.get_double("trace.x_km", 0.0);
  std::vector<double> thetas =
      kv.get_double_list("trace.thetas_deg", {-60, -40, -20, 0, 20, 40, 60});
  std::vector<MethodKind> methods = methods_from(kv);

  // kappa field dump for overlaying the ray fan.
  {
    fs::path map_path = dir / "kappa_map.csv";
    std::ofstream map(map_path);
    if (!map) throw IoError("cannot write " + map_path.string());
    map << "i,j,x0_km,x1_km,h0_km,h1_km,n,kappa\n";
    for (std::size_t i = 0; i < grid.nx(); ++i)
      for (std::size_t j = 0; j < grid.nh(); ++j) {
        const auto& c = grid.cell(i, j);
        map << i << ',' << j << ',' << csv_num(grid.x_edges()[i]) << ','
            << csv_num(grid.x_edges()[i + 1]) << ',' << csv_num(grid.h_edges()[j]) << ','
            << csv_num(grid.h_edges()[j + 1]) << ',' << csv_num(c.n) << ',' << csv_num(c.kappa)
            << '\n';
      }
  }

  TraceOptions opts;
  opts.include_tau = kv.get_bool("trace.include_tau", true);
  for (MethodKind m : methods) {
    for (std::size_t k = 0; k < thetas.size(); ++k) {
      RayPath path = trace_ray(grid, x0, grid.h_top(), thetas[k] * kPi / 180.0, f, m, opts);
      fs::path ray_path =
          dir / ("ray_" + std::string(method_name(m)) + "_" + std::to_string(k) + ".csv");
      std::ofstream csv(ray_path);
      if (!csv) throw IoError("cannot write " + ray_path.string());
      csv << "seg,x0_km,h0_km,x1_km,h1_km,N,K,theta_deg,psi_deg,seg_loss_db\n";
      for (std::size_t s = 0; s < path.segments.size(); ++s) {
        const RaySegment& seg = path.segments[s];
        csv << s << ',' << csv_num(seg.x0_km) << ',' << csv_num(seg.h0_km) << ','
            << csv_num(seg.x1_km) << ',' << csv_num(seg.h1_km) << ',' << csv_num(seg.wave.N)
            << ',' << csv_num(seg.wave.K) << ',' << csv_num(seg.wave.theta() * 180.0 / kPi) << ','
            << csv_num(seg.wave.psi() * 180.0 / kPi) << ',' << csv_num(seg.segment_loss_db)
            << '\n';
      }
      out << "ray " << method_name(m) << " theta=" << thetas[k]
          << " deg: landing_x = " << path.landing_x_km
          << " km, loss = " << path.total_loss_db << " dB, " << path.segments.size()
          << " segments -> " << ray_path.string() << "\n";
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bench

struct BenchInput {
  ComplexRefractivity m1, m2;
  ApparentWave incident_uniform;  // the state a uniform tracer carries
  ApparentWave incident_npw;      // the state the NPW tracers carry
  double dh_km;                   // layer thickness ahead of the interface
};

std::vector<BenchInput> bench_inputs(std::uint64_t seed, std::size_t batch) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> un(1.0, 1.0005);
  std::uniform_real_distribution<double> ulogk(std::log(1e-9), std::log(2.24e-7));
  std::uniform_real_distribution<double> uth(5.0, 85.0);
  std::uniform_real_distribution<double> ual(0.0, 10.0);
  std::uniform_real_distribution<double> udh(0.1, 0.5);
  std::vector<BenchInput> v(batch);
  for (auto& b : v) {
    b.m1 = ComplexRefractivity(un(rng), std::exp(ulogk(rng)));
    b.m2 = ComplexRefractivity(un(rng), std::exp(ulogk(rng)));
    double theta_deg = uth(rng);
    double alpha_deg = std::min(ual(rng), theta_deg);  // keep psi >= 0
    double theta = theta_deg * kPi / 180.0;
    double psi = (theta_deg - alpha_deg) * kPi / 180.0;
    b.incident_uniform = ApparentWave::uniform(b.m1, theta);
    b.incident_npw = medium1_apparent(b.m1, theta, psi);
    b.dh_km = udh(rng);
  }
  return v;
}

/// One full interface evaluation, mirroring the tracer's per-interface work:
/// transmitted-wave solve, Fresnel coefficients, segment geometry, and the
/// field carried through the next layer. The NaiveExtended pipeline runs its
/// solve, Fresnel and field update in double-double.
double bench_evaluate(SolverKind kind, const std::vector<BenchInput>& inputs, double k0) {
  double sink = 0.0;
  std::complex<double> E(1.0, 0.0);
  for (const auto& b : inputs) {
    const ApparentWave& inc =
        (kind == SolverKind::Uniform) ? b.incident_uniform : b.incident_npw;
    InterfaceSolution sol = solve_interface(inc, MediumPair{b.m1, b.m2}, kind);
    const ApparentWave& t = sol.transmitted;
    double tan_th = t.sin_theta / t.cos_theta;
    double dx_km = b.dh_km * tan_th;
    double l_m = std::hypot(dx_km, b.dh_km) * 1000.0;
    double tau_db = -20.0 * std::log10(std::abs(sol.tau));
    std::complex<double> Et = (kind == SolverKind::NaiveExtended)
                                  ? propagate_field_hp(E, t, l_m, k0)
                                  : propagate_field(E, t, l_m, k0);
    sink += std::abs(Et) + kDbPerNeper * k0 * sol.effective_attenuation * l_m + tau_db + dx_km;
  }
  return sink;
}

std::string cpu_model() {
  std::ifstream in("/proc/cpuinfo");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("model name", 0) == 0) {
      std::size_t colon = line.find(':');
      if (colon != std::string::npos) {
        std::size_t start = line.find_first_not_of(" \t", colon + 1);
        return start == std::string::npos ? "unknown" : line.substr(start);
      }
    }
  }
  return "unknown";
}

int cmd_bench(const KeyValueFile& kv, std::ostream& out) {
  fs::path dir = ensure_out_dir(kv);
  long long reps = kv.get_int("bench.repetitions", 1000);
  long long batch = kv.get_int("bench.batch", 256);
  std::uint64_t seed = static_cast<std::uint64_t>(kv.get_int("seed", 42));
  double f = frequency_hz(kv);
  if (reps < 100) throw ConfigError("bench.repetitions must be >= 100");
  if (batch < 1) throw ConfigError("bench.batch must be >= 1");

  const double k0 = wavenumber(f);
  const auto inputs = bench_inputs(seed, static_cast<std::size_t>(batch));
  const std::vector<SolverKind> kinds = {SolverKind::Uniform, SolverKind::Stable,
                                         SolverKind::NaiveExtended};

  volatile double sink = 0.0;
  nlohmann::ordered_json report;
  report["repetitions"] = reps;
  report["batch"] = batch;
  report["seed"] = seed;
  report["frequency_ghz"] = f / 1e9;
  report["cpu_model"] = cpu_model();

  // Methods are interleaved per repetition so that load drift on the host
  // spreads evenly instead of biasing whichever method ran last.
  std::vector<std::vector<double>> rep_ms(kinds.size());
  for (auto& v : rep_ms) v.reserve(static_cast<std::size_t>(reps));
  for (int w = 0; w < 100; ++w)
    for (SolverKind kind : kinds) sink = sink + bench_evaluate(kind, inputs, k0);  // warm-up
  for (long long rep = 0; rep < reps; ++rep) {
    for (std::size_t ki = 0; ki < kinds.size(); ++ki) {
      auto t0 = std::chrono::steady_clock::now();
      sink = sink + bench_evaluate(kinds[ki], inputs, k0);
      auto t1 = std::chrono::steady_clock::now();
      rep_ms[ki].push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
  }
  // Raw mean/stddev are reported as measured; the headline ratios use 5%
  // trimmed means so that stray scheduler preemptions inside single
  // repetitions do not dominate them.
  double trimmed_by_kind[3] = {0, 0, 0};
  for (std::size_t ki = 0; ki < kinds.size(); ++ki) {
    const auto& v = rep_ms[ki];
    double sum = 0.0, sumsq = 0.0;
    for (double ms : v) {
      sum += ms;
      sumsq += ms * ms;
    }
    double mean = sum / static_cast<double>(v.size());
    double var = std::max(0.0, sumsq / static_cast<double>(v.size()) - mean * mean);
    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    std::size_t cut = sorted.size() / 20;
    double tsum = 0.0;
    for (std::size_t i = cut; i < sorted.size() - cut; ++i) tsum += sorted[i];
    double trimmed = tsum / static_cast<double>(sorted.size() - 2 * cut);
    trimmed_by_kind[ki] = trimmed;
    nlohmann::ordered_json m;
    m["mean_ms"] = mean;
    m["stddev_ms"] = std::sqrt(var);
    m["trimmed_mean_ms"] = trimmed;
    m["mean_us_per_interface"] = mean * 1000.0 / static_cast<double>(batch);
    report["methods"][solver_kind_name(kinds[ki])] = m;
    if (mean * 1e6 < 100.0)
      out << "warning: mean evaluation time below 100 ns; clock resolution may dominate\n";
  }
  report["ratio_basis"] = "trimmed_mean_ms (5% tails dropped)";
  report["ratio_stable_over_uniform"] = trimmed_by_kind[1] / trimmed_by_kind[0];
  report["ratio_extended_over_stable"] = trimmed_by_kind[2] / trimmed_by_kind[1];

  fs::path json_path = dir / "bench.json";
  std::ofstream js(json_path);
  if (!js) throw IoError("cannot write " + json_path.string());
  js << report.dump(2) << '\n';

  out << "benchmark (" << reps << " repetitions x " << batch << " interface evaluations)\n";
  out << "  cpu: " << report["cpu_model"].get<std::string>() << "\n";
  for (std::size_t ki = 0; ki < kinds.size(); ++ki) {
    const auto& m = report["methods"][solver_kind_name(kinds[ki])];
    char buf[160];
    std::snprintf(buf, sizeof(buf), "  %-15s mean %10.4f ms   stddev %10.4f ms",
                  solver_kind_name(kinds[ki]), m["mean_ms"].get<double>(),
                  m["stddev_ms"].get<double>());
    out << buf << "\n";
  }
  out << "  stable/uniform ratio:   " << report["ratio_stable_over_uniform"].get<double>() << "\n";
  out << "  extended/stable ratio:  " << report["ratio_extended_over_stable"].get<double>() << "\n";
  out << "  report: " << json_path.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// field

int cmd_field_build(const KeyValueFile& kv, std::ostream& out) {
  fs::path dir = ensure_out_dir(kv);
  std::string source = kv.get_string("field.source", "weather");
  SyntheticParams geom = synthetic_params(kv);  // reuse the grid.* geometry keys
  std::vector<double> x_edges(geom.nx + 1), h_edges(geom.nh + 1);
  for (std::size_t k = 0; k <= geom.nx; ++k)
    x_edges[k] = geom.x_min_km +
                 (geom.x_max_km - geom.x_min_km) * static_cast<double>(k) / static_cast<double>(geom.nx);
  for (std::size_t k = 0; k <= geom.nh; ++k)
    h_edges[k] = geom.h_top_km * static_cast<double>(k) / static_cast<double>(geom.nh);

  fs::path grid_path = kv.get_string("field.out_grid", (dir / "field.grid").string());
  if (source == "weather") {
    auto columns = load_weather_csv(kv.get_string("field.weather_csv"));
    auto coeffs = load_coefficients(kv.get_string("field.coefficients"));
    BuilderOptions opt;
    opt.literal_pressure_factor = kv.get_bool("field.literal_pressure_factor", false);
    RefractivityGrid2D grid =
        build_from_weather(columns, coeffs, frequency_hz(kv), h_edges, x_edges, opt);
    save_grid(grid, grid_path.string());
  } else if (source == "stations") {
    auto stations = load_station_csv(kv.get_string("field.stations_csv"));
    RefractivityGrid2D grid = build_from_stations(stations, h_edges, x_edges,
                                                  kv.get_double("field.idw_power", 2.0));
    save_grid(grid, grid_path.string());
  } else {
    throw ConfigError("field.source must be 'weather' or 'stations'");
  }
  out << "field written to " << grid_path.string() << "\n";
  return kExitOk;
}

int cmd_field_inspect(const KeyValueFile& kv, std::ostream& out) {
  std::string path = kv.has("field.grid") ? kv.get_string("field.grid")
                                          : kv.get_string("grid.file");
  RefractivityGrid2D grid = load_grid(path);
  double n_min = 1e300, n_max = -1e300, k_min = 1e300, k_max = -1e300;
  for (const auto& c : grid.cells()) {
    n_min = std::min(n_min, c.n);
    n_max = std::max(n_max, c.n);
    k_min = std::min(k_min, c.kappa);
    k_max = std::max(k_max, c.kappa);
  }
  out << "grid " << path << ": " << grid.nx() << " x " << grid.nh() << " cells, x ["
      << grid.x_min() << ", " << grid.x_max() << "] km, h [" << grid.h_bottom() << ", "
      << grid.h_top() << "] km\n";
  out << "  n     in [" << format_double(n_min) << ", " << format_double(n_max) << "]\n";
  out << "  kappa in [" << format_double(k_min) << ", " << format_double(k_max) << "]\n";

  auto histogram = [&](auto value_of, double lo, double hi, const char* label) {
    constexpr int kBins = 10;
    std::size_t bins[kBins] = {};
    double width = hi > lo ? (hi - lo) / kBins : 1.0;
    for (const auto& c : grid.cells()) {
      int b = hi > lo ? std::min(kBins - 1, static_cast<int>((value_of(c) - lo) / width)) : 0;
      bins[b]++;
    }
    out << "  " << label << " histogram:";
    for (int b = 0; b < kBins; ++b) out << ' ' << bins[b];
    out << '\n';
  };
  histogram([](const ComplexRefractivity& c) { return c.n; }, n_min, n_max, "n");
  histogram([](const ComplexRefractivity& c) { return c.kappa; }, k_min, k_max, "kappa");
  return kExitOk;
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"npwray: non-uniform plane-wave ray tracing for stratified lossy atmospheres"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--config", g.config_path, "scenario config file")->envname("NPWRAY_CONFIG");
  app.add_option("--out", g.out_dir, "output directory (overrides out.dir)");
  app.add_option("--threads", g.threads, "worker threads for sweeps");
  app.add_option("--method", g.method_list, "comma-separated method list (overrides methods)");
  auto* seed_opt = app.add_option("--seed", g.seed, "seed for randomized sweeps");

  auto* single = app.add_subcommand("single-interface", "single-interface stability sweeps");
  auto* link = app.add_subcommand("link", "downlink boresight/loss sweep");
  auto* trace = app.add_subcommand("trace", "ray fan traces over the kappa map");
  auto* bench = app.add_subcommand("bench", "per-evaluation timing benchmark");
  auto* field = app.add_subcommand("field", "refractivity field construction/inspection");
  field->require_subcommand(1);
  auto* field_build = field->add_subcommand("build", "build a grid from weather or stations");
  auto* field_inspect = field->add_subcommand("inspect", "print grid statistics");
  // Global flags may follow the subcommand name.
  for (CLI::App* sub : {single, link, trace, bench, field, field_build, field_inspect})
    sub->fallthrough();

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  g.seed_set = seed_opt->count() > 0;

  try {
    KeyValueFile kv = load_scenario(g);
    if (single->parsed()) return cmd_single_interface(kv, out);
    if (link->parsed()) return cmd_link(kv, out);
    if (trace->parsed()) return cmd_trace(kv, out);
    if (bench->parsed()) return cmd_bench(kv, out);
    if (field->parsed()) {
      if (field_build->parsed()) return cmd_field_build(kv, out);
      if (field_inspect->parsed()) return cmd_field_inspect(kv, out);
    }
    err << "error: no subcommand\n";
    return kExitConfigError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const SolverError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumericalError;
  } catch (const TraceError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumericalError;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace npw::cli
