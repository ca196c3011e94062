// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion pins its tolerances in code.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "npw/apparent_wave.hpp"
#include "npw/cli.hpp"
#include "npw/interface_solver.hpp"
#include "npw/raytracer.hpp"
#include "npw/synthetic.hpp"

using namespace npw;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kF = 18e9;
double deg(double d) { return d * kPi / 180.0; }

int g_failures = 0;

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("%s  [%d] %-28s %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
  if (!pass) ++g_failures;
}

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Criterion 1: stable solver tracks the >=32-digit oracle across the
// kappa2 sweep (>= 200 points) to 1e-6 while the naive working-precision
// solver breaks down; runtime <= 5 s.
void criterion1() {
  Timer timer;
  const ComplexRefractivity m1(1.0001, 1e-8);
  const double n2 = 1.0002;
  const int points = 200;
  double worst_stable = 0.0;
  int naive_breakdowns = 0;
  long checked = 0;
  for (double theta_deg : {15.0, 30.0, 45.0, 60.0, 75.0, 85.0}) {
    ApparentWave inc = medium1_apparent(m1, deg(theta_deg), deg(theta_deg - 10.0));
    double Ns = inc.tangential_N(), Ks = inc.tangential_K();
    for (int k = 0; k < points; ++k) {
      double kappa2 = 1e-9 * std::pow(100.0, static_cast<double>(k) / (points - 1));
      ComplexRefractivity m2(n2, kappa2);
      ApparentWave o = medium2_oracle_hp(Ns, Ks, m2);
      ApparentWave s = medium2_apparent_stable(Ns, Ks, m2);
      worst_stable = std::max({worst_stable, rel_err(s.K, o.K),
                               rel_err(effective_attenuation(s), effective_attenuation(o))});
      ++checked;
      try {
        ApparentWave nv = medium2_apparent_naive(Ns, Ks, m2, Precision::Working);
        if (!std::isfinite(nv.K) || rel_err(nv.K, o.K) > 0.1) ++naive_breakdowns;
      } catch (const SolverError&) {
        ++naive_breakdowns;
      }
    }
  }
  double secs = timer.seconds();
  bool pass = worst_stable <= 1e-6 && naive_breakdowns >= 1 && secs <= 5.0;
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "stable worst rel err %.2e (<=1e-6); naive breakdowns %d/%ld (>=1); %.2f s (<=5)",
                worst_stable, naive_breakdowns, checked, secs);
  report(1, "stability reproduction", pass, buf);
}

// Criterion 2: compensation law K2 cos(alpha_t) ~ kappa2 for kappa2 >= kappa1
// in >= 99.9% of 1e4 draws, plus the two reference pairs.
void criterion2() {
  std::mt19937_64 rng(20240811);
  std::uniform_real_distribution<double> un(1.0, 1.0005);
  std::uniform_real_distribution<double> ulogk(std::log(1e-10), std::log(1e-6));
  std::uniform_real_distribution<double> uth(0.0, 89.0);
  std::uniform_real_distribution<double> ual(0.0, 15.0);
  const int draws = 10000;
  int within = 0;
  for (int i = 0; i < draws; ++i) {
    double k_a = std::exp(ulogk(rng)), k_b = std::exp(ulogk(rng));
    double kappa1 = std::min(k_a, k_b), kappa2 = std::max(k_a, k_b);
    double theta = uth(rng), alpha = std::min(ual(rng), theta);
    ComplexRefractivity m1(un(rng), kappa1), m2(un(rng), kappa2);
    ApparentWave inc = medium1_apparent(m1, deg(theta), deg(theta - alpha));
    ApparentWave t = medium2_apparent_stable(inc.tangential_N(), inc.tangential_K(), m2);
    if (std::abs(effective_attenuation(t) / kappa2 - 1.0) <= 1e-3) ++within;
  }
  double frac = static_cast<double>(within) / draws;

  auto pair_ratio = [&](double kappa1, double kappa2) {
    ApparentWave inc = medium1_apparent(ComplexRefractivity(1.0001, kappa1), deg(30), deg(30));
    ApparentWave t = medium2_apparent_stable(inc.tangential_N(), inc.tangential_K(),
                                             ComplexRefractivity(1.0002, kappa2));
    return effective_attenuation(t) / kappa2;
  };
  double r_detuned = pair_ratio(1.94e-10, 3.58e-11);  // kappa2 < kappa1: no compensation
  double r_matched = pair_ratio(1.54e-8, 1.32e-8);    // comparable losses

  bool pass = frac >= 0.999 && std::abs(r_detuned - 1.0) > 1e-3 && r_matched >= 0.999 &&
              r_matched <= 1.001;
  char buf[220];
  std::snprintf(buf, sizeof(buf),
                "|ratio-1|<=1e-3 in %.2f%% (>=99.9%%); detuned pair ratio %.3f (!=1); "
                "matched pair ratio %.6f (in [0.999,1.001])",
                100.0 * frac, r_detuned, r_matched);
  report(2, "compensation law", pass, buf);
}

// Criterion 3: 1e5 random lossless interfaces: all three solvers agree with
// real Snell in sin(theta_t) to 1e-14.
void criterion3() {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> un(1.0, 1.0005);
  std::uniform_real_distribution<double> uth(0.0, 89.0);
  const int draws = 100000;
  double worst = 0.0;
  int tir_consistent = 0, tir_total = 0;
  for (int i = 0; i < draws; ++i) {
    ComplexRefractivity m1(un(rng), 0.0), m2(un(rng), 0.0);
    double theta = deg(uth(rng));
    double Ns = m1.n * std::sin(theta);
    if (Ns >= m2.n) {
      ++tir_total;
      int thrown = 0;
      for (int which = 0; which < 3; ++which) {
        try {
          if (which == 0) medium2_apparent_stable(Ns, 0.0, m2);
          if (which == 1) medium2_apparent_naive(Ns, 0.0, m2, Precision::Working);
          if (which == 2) medium2_oracle_hp(Ns, 0.0, m2);
        } catch (const SolverError&) {
          ++thrown;
        }
      }
      if (thrown == 3) ++tir_consistent;
      continue;
    }
    double sin_ref = Ns / m2.n;
    ApparentWave s = medium2_apparent_stable(Ns, 0.0, m2);
    ApparentWave n = medium2_apparent_naive(Ns, 0.0, m2, Precision::Working);
    ApparentWave o = medium2_oracle_hp(Ns, 0.0, m2);
    worst = std::max({worst, std::abs(s.sin_theta - sin_ref), std::abs(n.sin_theta - sin_ref),
                      std::abs(o.sin_theta - sin_ref)});
  }
  bool pass = worst <= 1e-14 && tir_consistent == tir_total;
  char buf[200];
  std::snprintf(buf, sizeof(buf), "worst |sin dev| %.2e (<=1e-14); TIR consistent %d/%d",
                worst, tir_consistent, tir_total);
  report(3, "lossless oracle equivalence", pass, buf);
}

// Criterion 4: invariant suite on 1e5 random lossy interfaces; runtime <= 60 s.
void criterion4() {
  Timer timer;
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> un(1.0, 1.0005);
  std::uniform_real_distribution<double> ulogk(std::log(1e-12), std::log(1e-6));
  std::uniform_real_distribution<double> uth(0.0, 89.0);
  std::uniform_real_distribution<double> ual(0.0, 15.0);
  const int draws = 100000;
  long violations = 0;
  std::string first;
  for (int i = 0; i < draws; ++i) {
    double theta = uth(rng), alpha = std::min(ual(rng), theta);
    ComplexRefractivity m1(un(rng), std::exp(ulogk(rng)));
    ComplexRefractivity m2(un(rng), std::exp(ulogk(rng)));
    ApparentWave inc = medium1_apparent(m1, deg(theta), deg(theta - alpha));
    double Ns = inc.tangential_N(), Ks = inc.tangential_K();
    ApparentWave t = medium2_apparent_stable(Ns, Ks, m2);
    QuarticCoeffs q = reduced_quartic_coeffs(Ns, Ks, m2);
    double qscale = std::max(1.0, q.A * q.A + q.B * q.B + q.D * q.D);

    auto fail = [&](const char* what) {
      ++violations;
      if (first.empty()) first = what;
    };
    if (!(t.N >= m2.n * (1.0 - 1e-13))) fail("N >= n2");
    if (!(t.K >= m2.kappa * (1.0 - 1e-13))) fail("K >= kappa2");
    if (!(t.N >= Ns * (1.0 - 1e-13))) fail("N >= Ns");
    if (!(t.K >= Ks * (1.0 - 1e-13))) fail("K >= Ks");
    if (!(rel_err(t.N * t.sin_theta, Ns) <= 1e-12)) fail("phase matching");
    if (Ks > 0.0 && !(std::abs(t.K * t.sin_psi - Ks) <= 1e-9 * std::max(Ks, 1e-30)))
      fail("attenuation matching");
    if (!(dispersion_residual(t, m2) <= 1e-10 * std::max(1.0, t.N * t.N))) fail("dispersion");
    if (!(cross_residual(t, m2) <= cross_residual_tolerance(t, m2))) fail("cross");
    if (!(std::abs(quartic_residual_N(q, t.N)) <= 1e-8 * qscale)) fail("quartic N");
    if (!(std::abs(quartic_residual_K(q, t.K)) <= 1e-8 * qscale)) fail("quartic K");
  }
  double secs = timer.seconds();
  bool pass = violations == 0 && secs <= 60.0;
  char buf[200];
  std::snprintf(buf, sizeof(buf), "%ld violations in %d draws%s%s; %.2f s (<=60)", violations,
                draws, first.empty() ? "" : "; first: ", first.c_str(), secs);
  report(4, "invariant suite", pass, buf);
}

// Criterion 5: method agreement at link level on the heavy-rain grid.
void criterion5() {
  SyntheticParams p;
  p.x_min_km = -200.0;
  p.x_max_km = 200.0;
  p.rain_x0_km = -200.0;
  p.rain_x1_km = 200.0;
  p.rain_kappa = 2.24e-7;
  RefractivityGrid2D grid = synthetic_scenario(SyntheticKind::RainCell, p);
  std::vector<double> thetas = {0.0, 30.0, -30.0, 60.0, -60.0, 80.0, -80.0};
  auto out = link_sweep(grid, 0.0, 10.0, kF, thetas,
                        {MethodKind::UniformPW, MethodKind::StableNPW, MethodKind::NaiveExtended});
  double max_loss_uni = 0.0, max_bore_uni = 0.0, max_loss_nve = 0.0;
  bool all_ok = true;
  for (std::size_t t = 0; t < thetas.size(); ++t) {
    const auto& uni = out[3 * t + 0];
    const auto& stb = out[3 * t + 1];
    const auto& nve = out[3 * t + 2];
    if (!uni.ok || !stb.ok || !nve.ok) {
      all_ok = false;
      continue;
    }
    max_loss_uni = std::max(max_loss_uni,
                            rel_err(uni.result.total_loss_db, stb.result.total_loss_db));
    max_bore_uni = std::max(max_bore_uni,
                            std::abs(uni.result.boresight_deg - stb.result.boresight_deg));
    max_loss_nve = std::max(max_loss_nve,
                            rel_err(nve.result.total_loss_db, stb.result.total_loss_db));
  }
  bool pass = all_ok && max_loss_uni <= 1e-3 && max_bore_uni <= 1e-6 && max_loss_nve <= 1e-6;
  char buf[220];
  std::snprintf(buf, sizeof(buf),
                "uniform-vs-stable: loss dev %.2e (<=1e-3), boresight dev %.2e deg (<=1e-6); "
                "naive-vs-stable loss dev %.2e (<=1e-6)",
                max_loss_uni, max_bore_uni, max_loss_nve);
  report(5, "link-level method agreement", pass, buf);
}

// Criterion 6: performance ordering via cmd_bench with 1000 repetitions;
// runtime <= 30 s.
void criterion6() {
  Timer timer;
  fs::path dir = fs::temp_directory_path() / "npw_acceptance" / "bench";
  fs::create_directories(dir);
  fs::path cfg = dir / "bench.cfg";
  std::ofstream(cfg) << "bench.repetitions = 1000\nbench.batch = 256\nseed = 42\nout.dir = "
                     << (dir / "out").string() << "\n";
  std::ostringstream out, err;
  int rc = npw::cli::run({"bench", "--config", cfg.string()}, out, err);
  double ratio_su = 0.0, ratio_es = 0.0;
  if (rc == 0) {
    auto report_json = nlohmann::json::parse(slurp(dir / "out" / "bench.json"));
    ratio_su = report_json["ratio_stable_over_uniform"].get<double>();
    ratio_es = report_json["ratio_extended_over_stable"].get<double>();
  }
  double secs = timer.seconds();
  bool pass = rc == 0 && ratio_su <= 1.5 && ratio_es >= 5.0 && secs <= 30.0;
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "stable/uniform %.3f (<=1.5); extended/stable %.1f (>=5); %.1f s (<=30)",
                ratio_su, ratio_es, secs);
  report(6, "performance ordering", pass, buf);
}

// Criterion 7: |boresight| nondecreasing in |theta| on the clear fixture.
void criterion7() {
  SyntheticParams p;
  p.x_min_km = -250.0;
  p.x_max_km = 250.0;
  RefractivityGrid2D grid = synthetic_scenario(SyntheticKind::ExponentialClear, p);
  std::vector<double> thetas = {0.0, 20.0, 40.0, 60.0, 75.0, 85.0};
  bool monotone = true;
  double prev = -1.0;
  std::string vals;
  for (double t : thetas) {
    double sat_x = -10.0 * std::tan(deg(t));
    double b =
        std::abs(boresight_error_deg(grid, sat_x, 10.0, 0.0, kF, MethodKind::StableNPW));
    char num[32];
    std::snprintf(num, sizeof(num), " %.2e", b);
    vals += num;
    if (b < prev) monotone = false;
    prev = b;
  }
  report(7, "grazing-incidence monotonicity", monotone, "|boresight(theta)| deg:" + vals);
}

// Criterion 8: save/load bit-exactness and byte-identical reruns of the
// non-bench subcommands.
void criterion8() {
  fs::path dir = fs::temp_directory_path() / "npw_acceptance" / "determinism";
  fs::create_directories(dir);
  bool pass = true;
  std::string detail;

  // Grid round trip, bit exact.
  RefractivityGrid2D g = synthetic_scenario(SyntheticKind::RainCell, {});
  fs::path gp = dir / "grid_a.grid", gp2 = dir / "grid_b.grid";
  save_grid(g, gp.string());
  RefractivityGrid2D back = load_grid(gp.string());
  save_grid(back, gp2.string());
  if (slurp(gp) != slurp(gp2)) {
    pass = false;
    detail += "grid round trip differs; ";
  }
  for (std::size_t k = 0; k < g.cells().size(); ++k)
    if (back.cells()[k].n != g.cells()[k].n || back.cells()[k].kappa != g.cells()[k].kappa) {
      pass = false;
      detail += "grid cells differ; ";
      break;
    }

  // Byte-identical reruns of every non-bench subcommand.
  fs::path stations = dir / "stations.csv";
  std::ofstream(stations) << "x_km,h_m,N_re,N_im\n0,0,320,0.02\n0,5000,200,0.01\n"
                             "0,10000,120,0.005\n90,0,310,0.08\n90,5000,195,0.05\n"
                             "90,10000,118,0.02\n";
  fs::path cfg = dir / "scenario.cfg";
  std::ofstream(cfg) << "grid.kind = synthetic\ngrid.synthetic = rain_cell\n"
                        "grid.x_min_km = -150\ngrid.x_max_km = 150\n"
                        "grid.rain.x0_km = -150\ngrid.rain.x1_km = 150\n"
                        "sweep.thetas_deg = 0, 30, -60\n"
                        "single.thetas_deg = 30, 60\nsingle.kappa2_points = 50\n"
                        "trace.thetas_deg = -30, 0, 30\n"
                        "field.source = stations\nfield.stations_csv = " << stations.string()
                     << "\nfield.out_grid = " << (dir / "built.grid").string()
                     << "\nfield.grid = " << (dir / "built.grid").string() << "\n";

  auto run_into = [&](const std::string& sub, const std::string& sub2, const fs::path& outdir) {
    std::ostringstream out, err;
    std::vector<std::string> args = {sub};
    if (!sub2.empty()) args.push_back(sub2);
    args.insert(args.end(), {"--config", cfg.string(), "--out", outdir.string()});
    int rc = npw::cli::run(args, out, err);
    if (rc != 0) {
      pass = false;
      detail += sub + (sub2.empty() ? "" : " " + sub2) + " rc=" + std::to_string(rc) + "; ";
    }
    return out.str();
  };
  auto dir_bytes = [&](const fs::path& d) {
    std::string all;
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(d))
      if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) all += f.filename().string() + "\x01" + slurp(f) + "\x02";
    return all;
  };

  struct Sub {
    const char* a;
    const char* b;
  };
  for (const Sub& s : {Sub{"single-interface", ""}, Sub{"link", ""}, Sub{"trace", ""},
                       Sub{"field", "build"}, Sub{"field", "inspect"}}) {
    fs::path out_a = dir / (std::string(s.a) + (s.b ? s.b : "") + "_a");
    fs::path out_b = dir / (std::string(s.a) + (s.b ? s.b : "") + "_b");
    fs::create_directories(out_a);
    fs::create_directories(out_b);
    std::string stdout_a = run_into(s.a, s.b ? s.b : "", out_a);
    std::string stdout_b = run_into(s.a, s.b ? s.b : "", out_b);
    // stdout carries the out dir path; compare only the artifacts except for
    // field build/inspect, whose artifacts live at fixed paths.
    std::string bytes_a = dir_bytes(out_a), bytes_b = dir_bytes(out_b);
    if (bytes_a != bytes_b) {
      pass = false;
      detail += std::string(s.a) + " artifacts differ across reruns; ";
    }
    if (std::string(s.a) == "field" && std::string(s.b ? s.b : "") == "inspect" &&
        stdout_a != stdout_b) {
      pass = false;
      detail += "field inspect output differs; ";
    }
  }
  if (detail.empty()) detail = "grid round trip bit-exact; reruns byte-identical";
  report(8, "round-trip and determinism", pass, detail);
}

}  // namespace

int main() {
  std::printf("acceptance suite (frequency %.0f GHz)\n", kF / 1e9);
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  if (g_failures == 0) {
    std::printf("all criteria passed\n");
    return 0;
  }
  std::printf("%d criterion(s) failed\n", g_failures);
  return 1;
}
