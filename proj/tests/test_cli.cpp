#include "cli.hpp"
#include "oracles.hpp"

#include "shapeflow/mesh_io.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

using namespace shapeflow;
using json = nlohmann::json;

namespace {

int run_cli(std::vector<std::string> args) { return cli::run(args); }

json load_json(const std::string& path) {
  std::ifstream in(path);
  return json::parse(in);
}

/// CSV rows split into columns, header excluded.
std::vector<std::vector<std::string>> csv_rows(const std::string& path) {
  std::istringstream in(oracle::slurp(path));
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> cols;
    std::istringstream row(line);
    for (std::string tok; std::getline(row, tok, ',');) cols.push_back(tok);
    rows.push_back(cols);
  }
  return rows;
}

/// Trace CSV with the wall-time column dropped.
std::string trace_without_runtime(const std::string& path) {
  std::string out;
  for (auto row : csv_rows(path)) {
    row.pop_back();
    for (const auto& c : row) out += c + ",";
    out += "\n";
  }
  return out;
}

}  // namespace

TEST_CASE("phantom command") {
  oracle::TempDir dir("cli_phantom");
  REQUIRE(run_cli({"phantom", "--shape", "sphere", "-o", dir / "s.sdf"}) == 0);
  const ScalarGrid g = read_sdf1(dir / "s.sdf");
  CHECK(g.spec() == GridSpec::standard());
  // Nearest nodes to the centre sit half a cell off each axis.
  const double h = 5.0 / 63.0;
  CHECK(g.at(31, 31, 31) == doctest::Approx(3 * (h / 2) * (h / 2) - 1).epsilon(1e-12));
  CHECK(g.at(31, 31, 31) == doctest::Approx(-1.0).epsilon(0.01));

  REQUIRE(run_cli({"phantom", "--shape", "sphere", "--n", "65", "-o", dir / "odd.sdf"}) == 0);
  CHECK(read_sdf1(dir / "odd.sdf").at(32, 32, 32) == doctest::Approx(-1.0).epsilon(1e-15));

  const std::vector<std::string> noisy{"phantom", "--shape", "sphere", "--noise", "gaussian", "--snr", "44.5",
                                       "--seed", "7", "-o"};
  auto with_out = [&](std::string p) {
    auto a = noisy;
    a.push_back(p);
    return a;
  };
  REQUIRE(run_cli(with_out(dir / "n1.sdf")) == 0);
  REQUIRE(run_cli(with_out(dir / "n2.sdf")) == 0);
  CHECK(oracle::slurp(dir / "n1.sdf") == oracle::slurp(dir / "n2.sdf"));
  const ScalarGrid n = read_sdf1(dir / "n1.sdf");
  double sig = 0.0, err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    sig += g.values()[i] * g.values()[i];
    err += std::pow(n.values()[i] - g.values()[i], 2);
  }
  CHECK(std::abs(10 * std::log10(sig / err) - 44.5) <= 0.5);
  const json m = load_json(dir / "n1.sdf.manifest");
  CHECK(m["noise"]["seed"] == 7);
  CHECK(std::abs(m["noise"]["empirical_snr_db"].get<double>() - 44.5) <= 0.5);

  CHECK(run_cli({"phantom", "--shape", "torus", "-o", dir / "t.sdf"}) == 2);
  CHECK(run_cli({"phantom", "--shape", "sphere", "--noise", "pink", "-o", dir / "t.sdf"}) == 2);
  CHECK(run_cli({"phantom", "--shape", "sphere", "--n", "1", "-o", dir / "t.sdf"}) == 2);
  CHECK(run_cli({"phantom", "--shape", "sphere"}) == 2);
  CHECK(run_cli({"phantom", "--shape", "sphere", "-o", dir / "no/such/dir/x.sdf"}) == 3);
  CHECK(run_cli({}) == 2);
  CHECK(run_cli({"bogus"}) == 2);
}

TEST_CASE("evolve command") {
  oracle::TempDir dir("cli_evolve");
  const std::string out = dir / "run";
  REQUIRE(run_cli({"evolve", "--analytic", "sphere", "--alpha", "5", "--beta", "1", "--dt", "1e-3", "--iters", "100",
               "--out", out}) == 0);
  for (const char* ext : {".obj", ".curv.ply", ".energy.csv", ".manifest"})
    CHECK(std::filesystem::exists(out + ext));

  const auto rows = csv_rows(out + ".energy.csv");
  REQUIRE(rows.size() == 100);
  CHECK(std::stod(rows.back()[5]) <= 0.05);
  // Near the surface phi shrinks by (1 - 8 alpha dt) per step, so the energy
  // ratio between steps tends to (1 - 8 alpha dt)^2.
  const double asymptote = 1 - std::pow(1 - 8 * 5 * 1e-3, 2);
  CHECK(std::stod(rows.back()[4]) == doctest::Approx(asymptote).epsilon(0.05));

  const TriMesh m = read_obj(out + ".obj");
  CHECK(m.vertex_count() == 2562);
  const PlyMesh ply = read_ply(out + ".curv.ply");
  double mean_H = 0.0;
  for (double q : ply.quality) mean_H += q;
  CHECK(mean_H / ply.quality.size() == doctest::Approx(1.0).epsilon(0.1));

  const json man = load_json(out + ".manifest");
  CHECK(man["config"]["alpha"] == 5.0);
  CHECK(man["config"]["max_iters"] == 100);
  CHECK(man["config"]["subdiv"] == 4);
  CHECK(man["config"]["initial_radius"] == 2.0);
  CHECK(man["source"]["kind"] == "analytic");
  CHECK(man["termination"] == "max_iters");

  // Re-running from the manifest reproduces the outputs.
  const std::string again = dir / "again";
  REQUIRE(run_cli({"evolve", "--manifest", out + ".manifest", "--out", again}) == 0);
  CHECK(oracle::slurp(out + ".obj") == oracle::slurp(again + ".obj"));
  CHECK(oracle::slurp(out + ".curv.ply") == oracle::slurp(again + ".curv.ply"));
  CHECK(trace_without_runtime(out + ".energy.csv") == trace_without_runtime(again + ".energy.csv"));

  // Same outputs under a different thread count and kernel variant.
  const std::string serial = dir / "serial";
  REQUIRE(run_cli({"--threads", "1", "--simd", "scalar", "evolve", "--manifest", out + ".manifest", "--out", serial}) == 0);
  CHECK(oracle::slurp(out + ".obj") == oracle::slurp(serial + ".obj"));
  CHECK(run_cli({"--simd", "sse9", "evolve", "--analytic", "sphere", "--out", dir / "x"}) == 2);
}

TEST_CASE("evolve argument and runtime errors") {
  oracle::TempDir dir("cli_evolve_err");
  CHECK(run_cli({"evolve", "--analytic", "sphere", "--iters", "0", "--out", dir / "a"}) == 2);
  CHECK(run_cli({"evolve", "--analytic", "sphere", "--dt", "-1", "--out", dir / "a"}) == 2);
  CHECK(run_cli({"evolve", "--out", dir / "a"}) == 2);
  CHECK(run_cli({"evolve", "--analytic", "sphere", "--grid", "g.sdf", "--out", dir / "a"}) == 2);
  CHECK(run_cli({"evolve", "--analytic", "cube", "--out", dir / "a"}) == 2);
  CHECK(run_cli({"evolve", "--grid", dir / "missing.sdf", "--out", dir / "a"}) == 3);
  CHECK(run_cli({"evolve", "--manifest", dir / "missing.manifest", "--out", dir / "a"}) == 3);

  // Initial sphere outside a small grid: numerical abort, trace and manifest still written.
  REQUIRE(run_cli({"phantom", "--shape", "sphere", "--n", "33", "--min", "-1.5", "--max", "1.5", "-o", dir / "small.sdf"}) == 0);
  CHECK(run_cli({"evolve", "--grid", dir / "small.sdf", "--iters", "5", "--out", dir / "ab"}) == 4);
  CHECK(std::filesystem::exists(dir / "ab.energy.csv"));
  CHECK(load_json(dir / "ab.manifest")["termination"] == "aborted");
}

TEST_CASE("evolve snapshots and thread override") {
  oracle::TempDir dir("cli_snap");
  ::setenv("SHAPEFLOW_THREADS", "3", 1);
  const int rc = run_cli({"--threads", "1", "evolve", "--analytic", "ellipsoid", "--iters", "4", "--subdiv", "2",
                      "--export-every", "2", "--out", dir / "e"});
  ::unsetenv("SHAPEFLOW_THREADS");
  REQUIRE(rc == 0);
  CHECK(load_json(dir / "e.manifest")["threads"] == 3);
  for (const char* it : {"0000", "0002", "0004"}) CHECK(std::filesystem::exists(dir / ("e.iter" + std::string(it) + ".obj")));
  CHECK_FALSE(std::filesystem::exists(dir / "e.iter0001.obj"));
  CHECK(read_obj(dir / "e.iter0004.obj").vertex_count() == 162);
}

TEST_CASE("mcubes command") {
  oracle::TempDir dir("cli_mc");
  REQUIRE(run_cli({"phantom", "--shape", "sphere", "-o", dir / "s.sdf"}) == 0);
  REQUIRE(run_cli({"mcubes", "--grid", dir / "s.sdf", "-o", dir / "s.obj", "--report", dir / "s.json"}) == 0);
  const TriMesh m = read_obj(dir / "s.obj");
  CHECK(m.is_closed());
  const json r = load_json(dir / "s.json");
  CHECK(r["vertex_count"] == m.vertex_count());
  CHECK(r["closed"] == true);
  CHECK(r["mean_dist"].get<double>() <= 0.01);
  CHECK(std::filesystem::exists(dir / "s.obj.manifest"));

  REQUIRE(run_cli({"mcubes", "--grid", dir / "s.sdf", "--iso", "3", "-o", dir / "s3.obj", "--report", dir / "s3.json"}) == 0);
  const TriMesh m3 = read_obj(dir / "s3.obj");
  double mean_r = 0.0;
  for (const Vec3& p : m3.vertices()) mean_r += p.norm();
  CHECK(mean_r / m3.vertex_count() == doctest::Approx(2.0).epsilon(0.01));
  CHECK(load_json(dir / "s3.json")["mean_dist"].get<double>() <= 0.01);

  CHECK(run_cli({"mcubes", "--grid", dir / "missing.sdf", "-o", dir / "x.obj"}) == 3);

  // No sign change: success with an empty mesh.
  REQUIRE(run_cli({"phantom", "--shape", "sphere", "--n", "8", "--min", "1.5", "--max", "2.5", "-o", dir / "far.sdf"}) == 0);
  CHECK(run_cli({"mcubes", "--grid", dir / "far.sdf", "-o", dir / "far.obj"}) == 0);
  CHECK(oracle::slurp(dir / "far.obj").empty());
}

TEST_CASE("curvature and metrics commands") {
  oracle::TempDir dir("cli_metrics");
  write_obj(icosphere(1.0, 4), dir / "ico.obj");
  REQUIRE(run_cli({"curvature", "--mesh", dir / "ico.obj", "-o", dir / "ico.ply"}) == 0);
  const PlyMesh ply = read_ply(dir / "ico.ply");
  REQUIRE(ply.quality.size() == 2562);
  for (double q : ply.quality) CHECK(q == doctest::Approx(1.0).epsilon(0.05));

  REQUIRE(run_cli({"phantom", "--shape", "sphere", "-o", dir / "s.sdf"}) == 0);
  REQUIRE(run_cli({"metrics", "--mesh", dir / "ico.obj", "--grid", dir / "s.sdf", "-o", dir / "m.json"}) == 0);
  const json j = load_json(dir / "m.json");
  std::set<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.insert(k);
  CHECK(keys == std::set<std::string>{"vertex_count", "face_count", "mean_dist", "max_dist", "H", "G",
                                      "min_triangle_angle_deg"});
  std::set<std::string> hk, gk;
  for (const auto& [k, v] : j["H"].items()) hk.insert(k);
  for (const auto& [k, v] : j["G"].items()) gk.insert(k);
  CHECK(hk == std::set<std::string>{"mean", "std", "p95"});
  CHECK(gk == std::set<std::string>{"mean", "std"});
  CHECK(j["vertex_count"] == 2562);
  CHECK(j["face_count"] == 5120);
  CHECK(j["mean_dist"].get<double>() <= 2e-3);
  CHECK(j["max_dist"].get<double>() >= j["mean_dist"].get<double>());
  CHECK(j["H"]["mean"].get<double>() == doctest::Approx(1.0).epsilon(0.05));

  REQUIRE(run_cli({"metrics", "--mesh", dir / "ico.obj", "--analytic", "sphere", "-o", dir / "a.json"}) == 0);
  CHECK(load_json(dir / "a.json")["mean_dist"].get<double>() <= 1e-12);

  std::ofstream(dir / "open.obj") << "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n";
  CHECK(run_cli({"metrics", "--mesh", dir / "open.obj", "--analytic", "sphere", "-o", dir / "o.json"}) == 3);
  CHECK(run_cli({"curvature", "--mesh", dir / "open.obj", "-o", dir / "o.ply"}) == 3);
  CHECK(run_cli({"metrics", "--mesh", dir / "ico.obj", "-o", dir / "o.json"}) == 2);
}
