#include "cli.hpp"

#include "shapeflow/curvature.hpp"
#include "shapeflow/errors.hpp"
#include "shapeflow/field.hpp"
#include "shapeflow/flow.hpp"
#include "shapeflow/implicit.hpp"
#include "shapeflow/kernels.hpp"
#include "shapeflow/mcubes.hpp"
#include "shapeflow/mesh_io.hpp"
#include "shapeflow/noise.hpp"
#include "shapeflow/parallel.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

namespace shapeflow::cli {

namespace {

using json = nlohmann::ordered_json;

/// Thrown for argument combinations CLI11 cannot express.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_json(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON in '") + path.string() + "': " + e.what(), 0);
  }
}

Phantom phantom_arg(const std::string& name) {
  auto p = parse_phantom(name);
  if (!p) throw UsageError("unknown shape '" + name + "' (expected sphere, ellipsoid, fused or cylinder)");
  return *p;
}

void apply_runtime(unsigned threads, const std::string& simd) {
  if (const char* env = std::getenv("SHAPEFLOW_THREADS")) {
    char* end = nullptr;
    const unsigned long n = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0') threads = static_cast<unsigned>(n);
  }
  set_thread_count(threads);
  if (simd != "auto") {
    auto isa = kernels::parse_isa(simd);
    if (!isa) throw UsageError("unknown --simd value '" + simd + "'");
    kernels::set_active_isa(*isa);
  }
}

json stats_json(const SummaryStats& s, bool with_p95) {
  json j;
  j["mean"] = s.mean;
  j["std"] = s.std;
  if (with_p95) j["p95"] = s.p95_abs;
  return j;
}

std::vector<double> mean_curvature_or_zero(const TriMesh& mesh, std::size_t* missing) {
  const auto normals = vertex_normals_partial(mesh);
  const auto curv = curvature_field_partial(mesh, normals);
  std::vector<double> H(curv.size(), 0.0);
  std::size_t miss = 0;
  for (std::size_t i = 0; i < curv.size(); ++i) {
    if (curv[i]) {
      H[i] = curv[i]->H;
    } else {
      ++miss;
    }
  }
  if (missing) *missing = miss;
  return H;
}

// ---------------------------------------------------------------------------
// phantom

struct PhantomArgs {
  std::string shape;
  int n = 64;
  double lo = -2.5;
  double hi = 2.5;
  std::string noise;
  double snr = 44.5;
  std::uint64_t seed = 0;
  bool ascii = false;
  std::string out;
};

int cmd_phantom(const PhantomArgs& a) {
  const Phantom shape = phantom_arg(a.shape);
  if (a.n < 2) throw UsageError("--n must be >= 2");
  if (!(a.hi > a.lo)) throw UsageError("--max must exceed --min");
  const GridSpec spec = GridSpec::cube(a.n, a.lo, a.hi);
  ScalarGrid grid = rasterize(shape, spec);

  json manifest;
  manifest["tool"] = "shapeflow";
  manifest["version"] = kVersion;
  manifest["command"] = "phantom";
  manifest["shape"] = std::string(to_string(shape));
  manifest["grid"] = {{"n", a.n}, {"min", a.lo}, {"max", a.hi}};
  if (!a.noise.empty()) {
    auto model = parse_noise_model(a.noise);
    if (!model) throw UsageError("unknown --noise model '" + a.noise + "'");
    if (!std::isfinite(a.snr)) throw UsageError("--snr must be finite");
    const NoiseSpec ns{*model, a.snr, a.seed};
    const ScalarGrid clean = grid;
    grid = add_noise(clean, ns);
    manifest["noise"] = {{"model", a.noise}, {"snr_db", a.snr}, {"seed", a.seed},
                         {"empirical_snr_db", empirical_snr_db(clean, grid)}};
  } else {
    manifest["noise"] = nullptr;
  }
  manifest["encoding"] = a.ascii ? "ascii" : "le64";
  manifest["output"] = a.out;
  write_sdf1(grid, a.out, a.ascii ? Sdf1Encoding::Ascii : Sdf1Encoding::Le64);
  write_json(manifest, a.out + ".manifest");
  return kOk;
}

// ---------------------------------------------------------------------------
// evolve

struct EvolveArgs {
  std::string grid;
  std::string analytic;
  std::string manifest;
  FlowConfig config;
  std::optional<double> energy_threshold;
  std::string out;
};

json config_json(const FlowConfig& c) {
  json j;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["dt"] = c.dt;
  j["max_iters"] = c.max_iters;
  j["rel_energy_tol"] = c.rel_energy_tol;
  j["initial_radius"] = c.initial_radius;
  j["subdiv"] = c.subdiv;
  j["export_every"] = c.export_every;
  j["energy_threshold"] = c.energy_threshold ? json(*c.energy_threshold) : json(nullptr);
  j["rel_eps"] = c.rel_eps;
  j["grad_eps"] = c.grad_eps;
  return j;
}

FlowConfig config_from_json(const json& j) {
  FlowConfig c;
  try {
    c.alpha = j.at("alpha").get<double>();
    c.beta = j.at("beta").get<double>();
    c.dt = j.at("dt").get<double>();
    c.max_iters = j.at("max_iters").get<int>();
    c.rel_energy_tol = j.at("rel_energy_tol").get<double>();
    c.initial_radius = j.at("initial_radius").get<double>();
    c.subdiv = j.at("subdiv").get<int>();
    c.export_every = j.at("export_every").get<int>();
    if (j.contains("energy_threshold") && !j["energy_threshold"].is_null()) {
      c.energy_threshold = j["energy_threshold"].get<double>();
    }
    if (j.contains("rel_eps")) c.rel_eps = j["rel_eps"].get<double>();
    if (j.contains("grad_eps")) c.grad_eps = j["grad_eps"].get<double>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("manifest config: ") + e.what(), 0);
  }
  return c;
}

int cmd_evolve(EvolveArgs a) {
  if (!a.manifest.empty()) {
    const json m = read_json(a.manifest);
    if (!m.contains("config") || !m.contains("source")) throw ParseError("manifest lacks config or source", 0);
    a.config = config_from_json(m["config"]);
    const json& src = m["source"];
    if (src.value("kind", "") == "analytic") {
      a.analytic = src.value("shape", "");
      a.grid.clear();
    } else {
      a.grid = src.value("path", "");
      a.analytic.clear();
    }
  } else if (a.energy_threshold) {
    a.config.energy_threshold = a.energy_threshold;
  }
  if (a.grid.empty() == a.analytic.empty()) throw UsageError("exactly one of --grid or --analytic is required");
  try {
    a.config.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }

  std::unique_ptr<FieldSource> src;
  json source;
  if (!a.analytic.empty()) {
    const Phantom shape = phantom_arg(a.analytic);
    src = std::make_unique<AnalyticField>(shape);
    source = {{"kind", "analytic"}, {"shape", std::string(to_string(shape))}};
  } else {
    src = std::make_unique<GridField>(read_sdf1(a.grid));
    source = {{"kind", "grid"}, {"path", a.grid}};
  }

  const std::string prefix = a.out;
  FlowHooks hooks;
  if (a.config.export_every > 0) {
    hooks.snapshot = [&prefix](int iter, const TriMesh& mesh) {
      char name[32];
      std::snprintf(name, sizeof name, ".iter%04d.obj", iter);
      write_obj(mesh, prefix + name);
    };
  }
  const FlowResult result = run(a.config, *src, hooks);

  json manifest;
  manifest["tool"] = "shapeflow";
  manifest["version"] = kVersion;
  manifest["command"] = "evolve";
  manifest["config"] = config_json(a.config);
  manifest["source"] = source;
  manifest["threads"] = thread_count();
  manifest["simd"] = std::string(kernels::to_string(kernels::active_isa()));
  manifest["outputs"] = {{"mesh", prefix + ".obj"},
                         {"curvature", prefix + ".curv.ply"},
                         {"trace", prefix + ".energy.csv"},
                         {"manifest", prefix + ".manifest"}};
  manifest["termination"] = std::string(to_string(result.termination));
  manifest["iterations"] = result.trace.size();
  manifest["initial_energy"] = result.initial_energy.total;
  if (!result.diagnostic.empty()) manifest["diagnostic"] = result.diagnostic;

  write_trace_csv(result.trace, prefix + ".energy.csv");
  write_json(manifest, prefix + ".manifest");
  if (!result.mesh.empty()) {
    write_obj(result.mesh, prefix + ".obj");
    std::size_t missing = 0;
    const auto H = mean_curvature_or_zero(result.mesh, &missing);
    if (missing) std::cerr << "warning: curvature unavailable at " << missing << " vertices (written as 0)\n";
    write_ply(result.mesh, H, prefix + ".curv.ply");
  }
  if (result.termination == Termination::Aborted) {
    std::cerr << "evolution aborted: " << result.diagnostic << '\n';
    return kNumericalAbort;
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// mcubes

struct McubesArgs {
  std::string grid;
  double iso = 0.0;
  std::string out;
  std::string report;
};

int cmd_mcubes(const McubesArgs& a) {
  ScalarGrid grid = read_sdf1(a.grid);
  const TriMesh mesh = marching_cubes(grid, a.iso);
  if (mesh.empty()) std::cerr << "warning: no sign change across iso " << a.iso << "; writing an empty mesh\n";
  write_obj(mesh, a.out);
  if (!a.report.empty()) {
    // Shift so the report measures distance to the extracted level.
    for (double& v : grid.values()) v -= a.iso;
    const GridField field(std::move(grid));
    const McReport r = mc_report(mesh, field);
    json j;
    j["vertex_count"] = r.vertex_count;
    j["face_count"] = r.face_count;
    j["closed"] = mesh.is_closed();
    j["mean_dist"] = r.mean_dist;
    j["max_dist"] = r.max_dist;
    j["curvature_vertices"] = r.curvature_vertices;
    j["H"] = r.H ? stats_json(*r.H, true) : json(nullptr);
    j["G"] = r.G ? stats_json(*r.G, false) : json(nullptr);
    write_json(j, a.report);
  }
  json manifest;
  manifest["tool"] = "shapeflow";
  manifest["version"] = kVersion;
  manifest["command"] = "mcubes";
  manifest["grid"] = a.grid;
  manifest["iso"] = a.iso;
  manifest["output"] = a.out;
  manifest["report"] = a.report.empty() ? json(nullptr) : json(a.report);
  write_json(manifest, a.out + ".manifest");
  return kOk;
}

// ---------------------------------------------------------------------------
// curvature / metrics

int cmd_curvature(const std::string& mesh_path, const std::string& out) {
  const TriMesh mesh = read_obj(mesh_path);
  const auto H = mean_curvature_or_zero(mesh, nullptr);
  write_ply(mesh, H, out);
  return kOk;
}

int cmd_metrics(const std::string& mesh_path, const std::string& grid_path, const std::string& analytic,
                const std::string& out) {
  if (grid_path.empty() == analytic.empty()) throw UsageError("exactly one of --grid or --analytic is required");
  const TriMesh mesh = read_obj(mesh_path);
  std::unique_ptr<FieldSource> src;
  if (!analytic.empty()) {
    src = std::make_unique<AnalyticField>(phantom_arg(analytic));
  } else {
    src = std::make_unique<GridField>(read_sdf1(grid_path));
  }
  const DistanceStats d = distance_stats(mesh, *src);
  const auto normals = vertex_normals_partial(mesh);
  const auto curv = curvature_field_partial(mesh, normals);
  std::vector<double> H, G;
  for (const auto& c : curv) {
    if (!c) continue;
    H.push_back(c->H);
    G.push_back(c->G);
  }
  json j;
  j["vertex_count"] = mesh.vertex_count();
  j["face_count"] = mesh.face_count();
  j["mean_dist"] = d.mean_dist;
  j["max_dist"] = d.max_dist;
  j["H"] = stats_json(summarize(H), true);
  j["G"] = stats_json(summarize(G), false);
  j["min_triangle_angle_deg"] = min_triangle_angle_deg(mesh);
  write_json(j, out);
  return kOk;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Level-set surface reconstruction by shape-gradient flow"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  unsigned threads = 0;
  std::string simd = "auto";
  app.add_option("--threads", threads, "Worker threads (0 = hardware; SHAPEFLOW_THREADS overrides)");
  app.add_option("--simd", simd, "Kernel variant: auto, scalar or avx2");

  PhantomArgs ph;
  auto* phantom = app.add_subcommand("phantom", "Rasterize a phantom to an SDF1 grid");
  phantom->add_option("--shape", ph.shape, "sphere | ellipsoid | fused | cylinder")->required();
  phantom->add_option("--n", ph.n, "Nodes per axis");
  phantom->add_option("--min", ph.lo, "Lower domain bound");
  phantom->add_option("--max", ph.hi, "Upper domain bound");
  phantom->add_option("--noise", ph.noise, "gaussian | uniform");
  phantom->add_option("--snr", ph.snr, "Noise SNR in dB");
  phantom->add_option("--seed", ph.seed, "Noise seed");
  phantom->add_flag("--ascii", ph.ascii, "Write an ascii payload instead of le64");
  phantom->add_option("-o,--output", ph.out, "Output SDF1 path")->required();

  EvolveArgs ev;
  auto* evolve = app.add_subcommand("evolve", "Evolve a sphere onto the zero level set");
  evolve->add_option("--grid", ev.grid, "Input SDF1 grid");
  evolve->add_option("--analytic", ev.analytic, "Analytic phantom instead of a grid");
  evolve->add_option("--manifest", ev.manifest, "Re-run the configuration recorded in a manifest");
  evolve->add_option("--alpha", ev.config.alpha, "Weight of the phi^2 term");
  evolve->add_option("--beta", ev.config.beta, "Weight of the tangential term");
  evolve->add_option("--dt", ev.config.dt, "Step size");
  evolve->add_option("--iters", ev.config.max_iters, "Maximum iterations");
  evolve->add_option("--subdiv", ev.config.subdiv, "Icosphere subdivision level");
  evolve->add_option("--radius", ev.config.initial_radius, "Initial sphere radius");
  evolve->add_option("--tol", ev.config.rel_energy_tol, "Relative energy change stopping tolerance");
  evolve->add_option("--energy-threshold", ev.energy_threshold, "Also stop once E falls below this value");
  evolve->add_option("--export-every", ev.config.export_every, "Write <out>.iterNNNN.obj every N iterations");
  evolve->add_option("--out", ev.out, "Output prefix")->required();

  McubesArgs mc;
  auto* mcubes = app.add_subcommand("mcubes", "Marching Cubes baseline");
  mcubes->add_option("--grid", mc.grid, "Input SDF1 grid")->required();
  mcubes->add_option("--iso", mc.iso, "Iso value");
  mcubes->add_option("-o,--output", mc.out, "Output OBJ")->required();
  mcubes->add_option("--report", mc.report, "Optional JSON report");

  std::string curv_mesh, curv_out;
  auto* curvature_cmd = app.add_subcommand("curvature", "Per-vertex mean curvature as PLY quality");
  curvature_cmd->add_option("--mesh", curv_mesh, "Input OBJ")->required();
  curvature_cmd->add_option("-o,--output", curv_out, "Output PLY")->required();

  std::string met_mesh, met_grid, met_analytic, met_out;
  auto* metrics = app.add_subcommand("metrics", "Distance and curvature metrics as JSON");
  metrics->add_option("--mesh", met_mesh, "Input OBJ")->required();
  metrics->add_option("--grid", met_grid, "SDF1 grid to measure against");
  metrics->add_option("--analytic", met_analytic, "Analytic phantom to measure against");
  metrics->add_option("-o,--output", met_out, "Output JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadArgs;
  }

  try {
    apply_runtime(threads, simd);
    if (*phantom) return cmd_phantom(ph);
    if (*evolve) return cmd_evolve(ev);
    if (*mcubes) return cmd_mcubes(mc);
    if (*curvature_cmd) return cmd_curvature(curv_mesh, curv_out);
    if (*metrics) return cmd_metrics(met_mesh, met_grid, met_analytic, met_out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadArgs;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadArgs;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIoError;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kIoError;
  } catch (const ValidationError& e) {
    std::cerr << "invalid mesh: " << e.what() << '\n';
    return kIoError;
  } catch (const Error& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumericalAbort;
  }
  return kBadArgs;
}

int run(const std::vector<std::string>& args) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("shapeflow");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace shapeflow::cli
