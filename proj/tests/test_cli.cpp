#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "npw/cli.hpp"
#include "npw/config.hpp"
#include "npw/errors.hpp"
#include "npw/grid.hpp"

namespace fs = std::filesystem;
using npw::KeyValueFile;

namespace {

fs::path temp_dir(const char* name) {
  fs::path dir = fs::temp_directory_path() / "npw_cli_tests" / name;
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& body) {
  fs::path p = dir / "scenario.cfg";
  std::ofstream(p) << body;
  return p;
}

int run(const std::vector<std::string>& args, std::string* out_text = nullptr,
        std::string* err_text = nullptr) {
  std::ostringstream out, err;
  int rc = npw::cli::run(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return rc;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_CASE("key-value config parsing") {
  KeyValueFile kv = KeyValueFile::parse(
      "a = 1.5\nlist = 1, 2,3\nname = hello world  # trailing comment\nflag = true\n");
  CHECK(kv.get_double("a") == 1.5);
  CHECK(kv.get_double_list("list", {}) == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(kv.get_string("name") == "hello world");
  CHECK(kv.get_bool("flag", false));
  CHECK(kv.get_int("missing", 7) == 7);
  CHECK_THROWS_AS(kv.get_double("name"), npw::ConfigError);
  CHECK_THROWS_AS(KeyValueFile::parse("no equals sign"), npw::ConfigError);
}

TEST_CASE("exit codes") {
  SUBCASE("missing config is a config error") {
    std::string err;
    CHECK(run({"link"}, nullptr, &err) == npw::kExitConfigError);
    CHECK(err.find("config") != std::string::npos);
  }
  SUBCASE("missing grid file is an i/o error") {
    fs::path dir = temp_dir("exit_io");
    fs::path cfg = write_config(dir, "grid.kind = file\ngrid.file = /no/such.grid\n"
                                     "sweep.thetas_deg = 0\nout.dir = " + (dir / "out").string() + "\n");
    CHECK(run({"link", "--config", cfg.string()}) == npw::kExitIoError);
  }
  SUBCASE("unknown subcommand") {
    CHECK(run({"frobnicate"}) == npw::kExitConfigError);
  }
  SUBCASE("help exits cleanly") {
    std::string out;
    CHECK(run({"--help"}, &out) == npw::kExitOk);
    CHECK(out.find("single-interface") != std::string::npos);
  }
}

TEST_CASE("single-interface: golden header and empty sweep") {
  fs::path dir = temp_dir("single_empty");
  fs::path cfg = write_config(dir, "single.thetas_deg =\nout.dir = " + (dir / "out").string() + "\n");
  CHECK(run({"single-interface", "--config", cfg.string()}) == npw::kExitOk);
  std::string csv = slurp(dir / "out" / "single_interface.csv");
  CHECK(csv == "theta_deg,kappa2,method,N2,K2,alpha_t_deg,K2cos_alpha,ratio_to_kappa2\n");
}

TEST_CASE("single-interface: stability sweep artifacts") {
  fs::path dir = temp_dir("single_sweep");
  fs::path cfg = write_config(dir,
                              "single.thetas_deg = 30\n"
                              "single.kappa2_points = 40\n"
                              "out.dir = " + (dir / "out").string() + "\n");
  CHECK(run({"single-interface", "--config", cfg.string()}) == npw::kExitOk);
  std::string csv = slurp(dir / "out" / "single_interface.csv");
  CHECK(first_line(csv) == "theta_deg,kappa2,method,N2,K2,alpha_t_deg,K2cos_alpha,ratio_to_kappa2");
  // stable rows are all finite; the naive working-precision rows are not.
  std::istringstream ss(csv);
  std::string line;
  std::getline(ss, line);
  int naive_nan = 0, stable_nonfinite = 0, rows = 0;
  while (std::getline(ss, line)) {
    ++rows;
    if (line.find(",stable,") != std::string::npos && line.find("nan") != std::string::npos)
      ++stable_nonfinite;
    if (line.find(",naive_working,") != std::string::npos &&
        line.find("nan") != std::string::npos)
      ++naive_nan;
  }
  CHECK(rows == 40 * 5);
  CHECK(stable_nonfinite == 0);
  CHECK(naive_nan > 0);
}

TEST_CASE("link: golden header, empty sweep, determinism") {
  fs::path dir = temp_dir("link");
  std::string base =
      "grid.kind = synthetic\ngrid.synthetic = rain_cell\n"
      "grid.x_min_km = -120\ngrid.x_max_km = 120\n"
      "grid.rain.x0_km = -120\ngrid.rain.x1_km = 120\n"
      "grid.nh = 20\n"
      "receiver.x_km = 0\nsatellite.h_km = 10\n";

  SUBCASE("empty sweep: header-only CSV, exit 0") {
    fs::path cfg = write_config(dir, base + "sweep.thetas_deg =\nout.dir = " +
                                         (dir / "out_empty").string() + "\n");
    CHECK(run({"link", "--config", cfg.string()}) == npw::kExitOk);
    CHECK(slurp(dir / "out_empty" / "link.csv") ==
          "theta_inc_deg,method,loss_db,boresight_deg,iterations,error\n");
  }

  SUBCASE("repeated runs are byte-identical") {
    fs::path cfg = write_config(dir, base + "sweep.thetas_deg = 0, 30, -45\nout.dir = " +
                                         (dir / "out_a").string() + "\n");
    CHECK(run({"link", "--config", cfg.string()}) == npw::kExitOk);
    std::string csv_a = slurp(dir / "out_a" / "link.csv");
    std::string json_a = slurp(dir / "out_a" / "link_summary.json");
    CHECK(run({"link", "--config", cfg.string(), "--out", (dir / "out_b").string()}) ==
          npw::kExitOk);
    CHECK(slurp(dir / "out_b" / "link.csv") == csv_a);
    CHECK(slurp(dir / "out_b" / "link_summary.json") == json_a);
    CHECK(csv_a.find("uniform") != std::string::npos);
    CHECK(csv_a.find("stable") != std::string::npos);
    CHECK(csv_a.find("naive_extended") != std::string::npos);
  }

  SUBCASE("TIR rows are flagged, not fatal") {
    // A grid whose lower layer is rarer: grazing items fail, steep ones pass.
    fs::path grid_path = dir / "tir.grid";
    std::ofstream(grid_path) << "NPWGRID v1\n1 2\n-500 500\n0 5 10\n0 0 0.999 0\n0 1 1.0005 0\n";
    fs::path cfg = write_config(dir, "grid.kind = file\ngrid.file = " + grid_path.string() +
                                         "\nsweep.thetas_deg = 0, 88\nmethods = stable\n"
                                         "out.dir = " + (dir / "out_tir").string() + "\n");
    CHECK(run({"link", "--config", cfg.string()}) == npw::kExitOk);
    std::string csv = slurp(dir / "out_tir" / "link.csv");
    CHECK(csv.find("reflection") != std::string::npos);
  }

  SUBCASE("a sweep with zero successes exits with the numerical-failure code") {
    fs::path grid_path = dir / "tir2.grid";
    std::ofstream(grid_path) << "NPWGRID v1\n1 2\n-500 500\n0 5 10\n0 0 0.999 0\n0 1 1.0005 0\n";
    fs::path cfg = write_config(dir, "grid.kind = file\ngrid.file = " + grid_path.string() +
                                         "\nsweep.thetas_deg = 88, -88\nmethods = stable\n"
                                         "out.dir = " + (dir / "out_allfail").string() + "\n");
    CHECK(run({"link", "--config", cfg.string()}) == npw::kExitNumericalError);
  }

  SUBCASE("interface tau contributions can be disabled") {
    fs::path cfg_on = write_config(dir, base + "sweep.thetas_deg = 40\nmethods = stable\n"
                                            "out.dir = " + (dir / "out_tau_on").string() + "\n");
    CHECK(run({"link", "--config", cfg_on.string()}) == npw::kExitOk);
    fs::path cfg_off = write_config(dir, base + "sweep.thetas_deg = 40\nmethods = stable\n"
                                             "trace.include_tau = false\n"
                                             "out.dir = " + (dir / "out_tau_off").string() + "\n");
    CHECK(run({"link", "--config", cfg_off.string()}) == npw::kExitOk);
    // Loss values differ only by the tiny per-interface amplitude terms.
    CHECK(slurp(dir / "out_tau_on" / "link.csv") != slurp(dir / "out_tau_off" / "link.csv"));
  }
}

TEST_CASE("trace: vacuum fan is straight and row counts match segments") {
  fs::path dir = temp_dir("trace");
  fs::path cfg = write_config(dir,
                              "grid.kind = synthetic\ngrid.synthetic = exponential_clear\n"
                              "grid.n0 = 0\ngrid.kappa0 = 0\ngrid.nh = 8\n"
                              "trace.thetas_deg = 0, 30\nmethods = stable\n"
                              "out.dir = " + (dir / "out").string() + "\n");
  std::string out;
  CHECK(run({"trace", "--config", cfg.string()}, &out) == npw::kExitOk);
  std::string ray = slurp(dir / "out" / "ray_stable_1.csv");
  CHECK(first_line(ray) == "seg,x0_km,h0_km,x1_km,h1_km,N,K,theta_deg,psi_deg,seg_loss_db");
  // 8 layers, no column crossings: 8 segment rows + header
  int lines = 0;
  for (char c : ray)
    if (c == '\n') ++lines;
  CHECK(lines == 9);
  CHECK(slurp(dir / "out" / "kappa_map.csv").find("i,j,x0_km") == 0);
}

TEST_CASE("bench: smoke run with the mandatory floor on repetitions") {
  fs::path dir = temp_dir("bench");
  SUBCASE("repetitions below 100 are rejected") {
    fs::path cfg = write_config(dir, "bench.repetitions = 10\nout.dir = " +
                                         (dir / "out").string() + "\n");
    CHECK(run({"bench", "--config", cfg.string()}) == npw::kExitConfigError);
  }
  SUBCASE("the report echoes the configuration and carries positive timings") {
    fs::path cfg = write_config(dir,
                                "bench.repetitions = 100\nbench.batch = 8\nseed = 7\n"
                                "out.dir = " + (dir / "out").string() + "\n");
    std::string out;
    CHECK(run({"bench", "--config", cfg.string()}, &out) == npw::kExitOk);
    auto report = nlohmann::json::parse(slurp(dir / "out" / "bench.json"));
    CHECK(report["repetitions"] == 100);
    CHECK(report["batch"] == 8);
    CHECK(report["methods"]["uniform"]["mean_ms"].get<double>() > 0.0);
    CHECK(report["methods"]["stable"]["stddev_ms"].get<double>() >= 0.0);
    CHECK(report["ratio_extended_over_stable"].get<double>() > 1.0);
    CHECK(out.find("stable/uniform") != std::string::npos);
  }
}

TEST_CASE("field build and inspect") {
  fs::path dir = temp_dir("field");
  fs::path stations = dir / "stations.csv";
  std::ofstream(stations) << "x_km,h_m,N_re,N_im\n"
                             "0,0,320,0.02\n0,5000,200,0.01\n0,10000,120,0.005\n"
                             "90,0,310,0.08\n90,5000,195,0.05\n90,10000,118,0.02\n";
  fs::path cfg = write_config(dir,
                              "field.source = stations\n"
                              "field.stations_csv = " + stations.string() + "\n"
                              "grid.nx = 4\ngrid.nh = 10\ngrid.x_min_km = -50\n"
                              "grid.x_max_km = 150\n"
                              "field.out_grid = " + (dir / "built.grid").string() + "\n"
                              "field.grid = " + (dir / "built.grid").string() + "\n"
                              "out.dir = " + (dir / "out").string() + "\n");
  CHECK(run({"field", "build", "--config", cfg.string()}) == npw::kExitOk);
  std::string out;
  CHECK(run({"field", "inspect", "--config", cfg.string()}, &out) == npw::kExitOk);
  CHECK(out.find("kappa in [") != std::string::npos);
  CHECK(out.find("histogram") != std::string::npos);

  // The built field's extinction stays within the light-to-heavy-rain range.
  npw::RefractivityGrid2D g = npw::load_grid((dir / "built.grid").string());
  for (const auto& c : g.cells()) {
    CHECK(c.kappa >= 4.79e-10);
    CHECK(c.kappa <= 2.24e-7);
    CHECK(c.n >= 1.0);
    CHECK(c.n <= 1.001);
  }
}
