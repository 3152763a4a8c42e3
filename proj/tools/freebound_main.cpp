#include <atomic>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <unistd.h>

#include "freebound/exact.hpp"
#include "freebound/expr.hpp"
#include "freebound/mesh.hpp"
#include "freebound/report_io.hpp"
#include "freebound/solver.hpp"
#include "freebound/surface.hpp"
#include "freebound/types.hpp"
#include "freebound/verify.hpp"

using namespace freebound;

namespace {

const std::vector<std::string> kAllChecks = {
    "graph-laplacian", "v2-identity",        "u2-identity",
    "q-inequality",    "simons",             "boundary-relations",
    "normal-derivative-a2", "isoperimetric", "curvature-gap",
    "killing-zeros"};

// Reciprocal-graph checks blow up as s_V -> 0, so the CLI runs them on the
// sub-grid where the surface is comfortably graphical.
constexpr double kBandCutoff = 0.25;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string out_root(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("FREEBOUND_OUT_DIR"); env && *env) return env;
  return ".";
}

std::string fmt6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

struct SurfaceArgs {
  std::string name = "catenoid";
  int dim = 0;  // 0 = default per surface (disk 2, rotational 3)
  double cap_height = 0.5;
};

ParametricHypersurface make_surface(const SurfaceArgs& a) {
  if (a.name == "disk") return equatorial_disk(a.dim ? a.dim : 2);
  if (a.name == "catenoid") return critical_catenoid();
  if (a.name == "rotational") return rotational_minimal(a.dim ? a.dim : 3);
  if (a.name == "cap") return spherical_cap(a.cap_height);
  throw ParseError("unknown surface \"" + a.name +
                   "\" (expected disk, catenoid, rotational, cap)");
}

Json surface_json(const SurfaceArgs& a, const ParametricHypersurface& s) {
  Json j;
  j["name"] = a.name;
  j["id"] = s.id;
  j["dim"] = s.dim;
  if (a.name == "cap") j["height"] = a.cap_height;
  return j;
}

// Token forms tx..tz / rx..rz, the plane names rxy/rxz/ryz, or an explicit
// "B00,B01,...,b0,b1,..." list (ambient^2 skew entries then the translation).
KillingField make_killing(const std::string& spec, int ambient) {
  if (spec.find(',') != std::string::npos) {
    const auto parts = split_list(spec);
    const std::size_t want = static_cast<std::size_t>(ambient) * ambient + ambient;
    if (parts.size() != want)
      throw ParseError("explicit Killing field needs " + std::to_string(want) +
                       " comma-separated numbers for ambient dimension " +
                       std::to_string(ambient) + ", got " + std::to_string(parts.size()));
    std::vector<double> v;
    v.reserve(parts.size());
    for (const auto& p : parts) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(p, &used));
        if (used != p.size()) throw std::invalid_argument(p);
      } catch (const std::exception&) {
        throw ParseError("cannot parse \"" + p + "\" as a number in --killing");
      }
    }
    Eigen::MatrixXd B(ambient, ambient);
    for (int i = 0; i < ambient; ++i)
      for (int j = 0; j < ambient; ++j) B(i, j) = v[static_cast<std::size_t>(i) * ambient + j];
    Eigen::VectorXd b(ambient);
    for (int i = 0; i < ambient; ++i) b[i] = v[static_cast<std::size_t>(ambient) * ambient + i];
    try {
      KillingField f(B, b);
      f.name = "custom";
      return f;
    } catch (const Error& e) {
      throw ParseError(std::string("invalid --killing matrix: ") + e.what());
    }
  }
  std::string token = spec;
  // Rotation about an axis acts in the complementary coordinate plane.
  if (token == "rx") token = "ryz";
  else if (token == "ry") token = "rxz";
  else if (token == "rz") token = "rxy";
  return killing_by_name(token, ambient);
}

struct VerifyArgs {
  SurfaceArgs surf;
  std::string checks = "all";
  std::string killing = "tz";
  int grid = 24;
  double h = 1e-3;
  int quad = 64;
  int jobs = 1;
  std::string out;
};

SampleGrid graphical_band(const ParametricHypersurface& s, const KillingField& V,
                          const SampleGrid& grid) {
  SampleGrid band;
  band.description = grid.description + ", |s_V| >= " + fmt6(kBandCutoff);
  const JetOptions jets;
  for (const auto& p : grid.points)
    if (std::fabs(sample_at(s, p, jets, &V).s_v) >= kBandCutoff) band.points.push_back(p);
  if (band.points.empty())
    throw PreconditionViolation("no samples with |s_V| >= " + fmt6(kBandCutoff) +
                                " for field " + V.name + " on " + s.id +
                                "; the surface is nowhere graphical at this cutoff");
  return band;
}

Json failure_record(const std::string& check, const std::string& surface,
                    const std::string& why) {
  Json j;
  j["report_version"] = kReportVersion;
  j["kind"] = "identity-check";
  j["check"] = check;
  j["surface"] = surface;
  j["grid"] = "";
  j["passed"] = false;
  j["notes"] = "not run: " + why;
  return j;
}

int run_verify(const VerifyArgs& a, bool grid_explicit) {
  const ParametricHypersurface s = make_surface(a.surf);
  const KillingField V = make_killing(a.killing, s.dim + 1);

  std::vector<std::string> tokens =
      a.checks == "all" ? kAllChecks : split_list(a.checks);
  if (tokens.empty()) throw ParseError("no checks requested");
  std::vector<std::string> order;
  for (const auto& t : tokens) {
    bool known = false;
    for (const auto& k : kAllChecks) known |= (k == t);
    if (!known) throw ParseError("unknown check \"" + t + "\"");
    bool seen = false;
    for (const auto& k : order) seen |= (k == t);
    if (!seen) order.push_back(t);
  }

  const SampleGrid igrid = interior_sample_grid(s, a.grid);
  const BoundaryGrid bgrid = boundary_sample_grid(s, a.grid);
  const int zeros_per_axis = grid_explicit ? a.grid : 64;

  auto run_one = [&](const std::string& t) -> Json {
    try {
      if (t == "graph-laplacian") return to_json(check_graph_laplacian(s, V, igrid, a.h));
      if (t == "v2-identity")
        return to_json(check_v2_identity(s, V, graphical_band(s, V, igrid), a.h));
      if (t == "u2-identity") return to_json(check_u2_identity(s, igrid, a.h));
      if (t == "q-inequality")
        return to_json(check_q_inequality(s, V, graphical_band(s, V, igrid), a.h));
      if (t == "simons") return to_json(check_simons(s, igrid, a.h));
      if (t == "boundary-relations") return to_json(check_boundary_relations(s, bgrid, a.h));
      if (t == "normal-derivative-a2")
        return to_json(check_normal_derivative_A2(s, bgrid, a.h));
      if (t == "isoperimetric") return to_json(check_isoperimetric(s, a.quad));
      if (t == "curvature-gap")
        return to_json(curvature_gap_report(s, igrid, 64, a.quad, a.h));
      return to_json(killing_zero_search(s, V, zeros_per_axis, a.h));
    } catch (const Error& e) {
      return failure_record(t, s.id, e.what());
    }
  };

  std::vector<Json> records(order.size());
  const int jobs = std::max(1, a.jobs);
  if (jobs == 1 || order.size() == 1) {
    for (std::size_t i = 0; i < order.size(); ++i) records[i] = run_one(order[i]);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i; (i = next.fetch_add(1)) < order.size();)
        records[i] = run_one(order[i]);
    };
    std::vector<std::thread> pool;
    const int extra = std::min<int>(jobs, static_cast<int>(order.size())) - 1;
    pool.reserve(extra);
    for (int k = 0; k < extra; ++k) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
  }

  const std::string dir = out_root(a.out);
  const std::string base = dir + "/verify-" + a.surf.name;
  Json arr = Json::array();
  for (const auto& r : records) arr.push_back(r);
  const std::string table = summary_markdown(records);
  write_json_atomic(base + ".json", arr);
  write_text_atomic(base + ".md", table);

  RunManifest man;
  man.command = "verify";
  man.surface = surface_json(a.surf, s);
  man.parameters = Json{{"checks", order},
                        {"killing", V.name},
                        {"grid", a.grid},
                        {"h", a.h},
                        {"quad_points", a.quad},
                        {"jobs", jobs}};
  man.output_paths = {base + ".json", base + ".md"};
  man.timestamp = utc_timestamp();
  write_json_atomic(base + ".manifest.json", to_json(man));

  std::cout << table << "reports written to " << base << ".{json,md,manifest.json}\n";

  bool all_passed = true;
  for (const auto& r : records) {
    if (r.at("passed").get<bool>()) continue;
    all_passed = false;
    const char* key =
        r.at("kind").get<std::string>() == "curvature-gap" ? "flux_residual" : "residual_max";
    std::string residual = "n/a";
    if (r.contains(key) && r.at(key).is_number()) residual = fmt6(r.at(key).get<double>());
    std::string tol = "n/a";
    if (r.contains("tolerance") && r.at("tolerance").is_number())
      tol = fmt6(r.at("tolerance").get<double>());
    std::cerr << "FAIL " << r.at("check").get<std::string>() << ": residual " << residual
              << " vs tolerance " << tol << "\n  " << r.at("notes").get<std::string>() << "\n";
  }
  return all_passed ? 0 : 1;
}

struct SolveArgs {
  std::string init = "graph";
  std::string height = "0.2*(1-r^2)";
  int res = 32;
  double perturb = 0.0;
  std::string drift = "full";
  std::string out;
};

int run_solve(const SolveArgs& a) {
  TriMesh mesh;
  if (a.init == "graph") {
    const HeightExpression he = HeightExpression::parse(a.height);
    mesh = init_graph_disk(a.res, [he](double x, double y) { return he(x, y); });
  } else if (a.init == "flat") {
    mesh = init_graph_disk(a.res, [](double, double) { return 0.0; });
  } else if (a.init == "annulus") {
    mesh = build_annulus_catenoid(a.res, a.perturb);
  } else {
    throw ParseError("unknown init \"" + a.init + "\" (expected graph, flat, annulus)");
  }

  SolverConfig cfg;
  if (a.drift == "none") cfg.drift_projection = DriftProjection::none;
  else if (a.drift == "translations") cfg.drift_projection = DriftProjection::translations;
  else if (a.drift == "full") cfg.drift_projection = DriftProjection::full;
  else throw ParseError("unknown drift mode \"" + a.drift + "\" (none, translations, full)");

  const SolveResult r = minimize(mesh, cfg);

  const std::string dir = out_root(a.out);
  const std::string base = dir + "/solve-" + a.init + "-res" + std::to_string(a.res);
  {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const std::string tmp = base + ".obj.tmp." + std::to_string(::getpid());
    write_obj(r.mesh, tmp);
    fs::rename(tmp, base + ".obj");
  }
  write_text_atomic(base + "-trace.csv", trace_csv(r.trace));

  Json fj = to_json(flatness_metrics(r.mesh));
  fj["converged"] = r.converged;
  fj["iterations"] = r.iterations;
  fj["area"] = r.area;
  fj["grad_max"] = r.grad_max;
  fj["boundary_orthogonality"] = r.boundary_orthogonality;
  fj["isoperimetric_residual"] = discrete_isoperimetric_residual(r.mesh);
  fj["stop_reason"] = r.stop_reason;
  fj["remeshed"] = r.remeshed;
  write_json_atomic(base + "-flatness.json", fj);

  RunManifest man;
  man.command = "solve";
  man.parameters = Json{{"init", a.init}, {"res", a.res}, {"drift", a.drift}};
  if (a.init == "graph") man.parameters["height"] = a.height;
  if (a.init == "annulus") man.parameters["perturb"] = a.perturb;
  man.output_paths = {base + ".obj", base + "-trace.csv", base + "-flatness.json"};
  man.timestamp = utc_timestamp();
  write_json_atomic(base + ".manifest.json", to_json(man));

  std::cout << (r.converged ? "converged" : "DID NOT CONVERGE") << " after " << r.iterations
            << " iterations: area " << fmt6(r.area) << ", grad_max " << fmt6(r.grad_max)
            << ", boundary orthogonality " << fmt6(r.boundary_orthogonality) << " ("
            << r.stop_reason << ")\noutputs written to " << base << "*\n";
  return r.converged ? 0 : 1;
}

struct ReportArgs {
  std::vector<std::string> inputs;
  std::string out;
};

int run_report(const ReportArgs& a) {
  try {
    std::vector<Json> records;
    for (const auto& path : a.inputs) {
      Json j = read_json(path);
      if (j.is_array())
        for (auto& e : j) records.push_back(std::move(e));
      else
        records.push_back(std::move(j));
    }
    const std::string csv = summary_csv(records);
    const std::string md = summary_markdown(records);
    const std::string dir = out_root(a.out);
    write_text_atomic(dir + "/report-summary.csv", csv);
    write_text_atomic(dir + "/report-summary.md", md);

    RunManifest man;
    man.command = "report";
    man.parameters = Json{{"inputs", a.inputs}};
    man.output_paths = {dir + "/report-summary.csv", dir + "/report-summary.md"};
    man.timestamp = utc_timestamp();
    write_json_atomic(dir + "/report-summary.manifest.json", to_json(man));

    std::cout << md;
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

struct ExportArgs {
  SurfaceArgs surf;
  int res = 64;
  std::string out;
};

int run_export(const ExportArgs& a) {
  const ParametricHypersurface s = make_surface(a.surf);
  const std::string dir = out_root(a.out);
  const std::string base = dir + "/surface-" + a.surf.name;
  write_text_atomic(base + ".csv", surface_point_csv(s, a.res));
  std::vector<std::string> outs = {base + ".csv"};
  if (s.dim == 2) {
    write_text_atomic(base + ".obj", surface_obj(s, a.res));
    outs.push_back(base + ".obj");
  }

  RunManifest man;
  man.command = "export";
  man.surface = surface_json(a.surf, s);
  man.parameters = Json{{"res", a.res}};
  man.output_paths = outs;
  man.timestamp = utc_timestamp();
  write_json_atomic(base + ".manifest.json", to_json(man));

  for (const auto& o : outs) std::cout << "wrote " << o << "\n";
  return 0;
}

void add_surface_flags(CLI::App* cmd, SurfaceArgs& s, bool required) {
  auto* opt = cmd->add_option("--surface", s.name, "disk | catenoid | rotational | cap");
  if (required) opt->required();
  cmd->add_option("--dim", s.dim,
                  "surface dimension n (disk: 2 or 3, rotational: 2 or 3; others fixed at 2)");
  cmd->add_option("--cap-height", s.cap_height, "apex height of the spherical cap control");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"freebound: numerical laboratory for free-boundary minimal "
               "hypersurfaces in the unit ball"};
  // -h is taken by the finite-difference step flag --h, so help is long-form only.
  app.set_help_flag("--help", "print help and exit");
  app.require_subcommand(1);

  VerifyArgs va;
  CLI::App* verify = app.add_subcommand(
      "verify", "run identity and inequality checks on an exact surface");
  verify->set_help_flag("--help", "print help and exit");
  add_surface_flags(verify, va.surf, true);
  verify->add_option("--checks", va.checks,
                     "comma-separated checks or 'all' (graph-laplacian, v2-identity, "
                     "u2-identity, q-inequality, simons, boundary-relations, "
                     "normal-derivative-a2, isoperimetric, curvature-gap, killing-zeros)");
  verify->add_option("--killing", va.killing,
                     "tx|ty|tz|rx|ry|rz, a plane name like rxy, or an explicit "
                     "skew-matrix + translation as comma-separated numbers");
  auto* grid_opt = verify->add_option(
      "--grid", va.grid, "samples per chart axis (interior and boundary grids)");
  verify->add_option("--h", va.h, "finite-difference step, relative to the chart box");
  verify->add_option("--quad-points", va.quad, "Gauss-Legendre points per axis for integrals");
  verify->add_option("--jobs", va.jobs, "run checks concurrently up to this many threads");
  verify->add_option("--out", va.out, "output directory (default $FREEBOUND_OUT_DIR or .)");

  SolveArgs sa;
  CLI::App* solve = app.add_subcommand(
      "solve", "discrete area minimization with boundary on the unit sphere");
  solve->set_help_flag("--help", "print help and exit");
  solve->add_option("--init", sa.init, "graph | flat | annulus");
  solve->add_option("--height", sa.height,
                    "height expression over the unit disk for --init graph "
                    "(vars r, x, y; ops + - * / ^ and cos, sin, exp)");
  solve->add_option("--res", sa.res, "mesh resolution (rings for disk, segments for annulus)");
  solve->add_option("--perturb", sa.perturb,
                    "relative radial perturbation for --init annulus");
  solve->add_option("--drift", sa.drift,
                    "saddle-stabilization mode: none | translations | full");
  solve->add_option("--out", sa.out, "output directory (default $FREEBOUND_OUT_DIR or .)");

  ReportArgs ra;
  CLI::App* report = app.add_subcommand(
      "report", "aggregate report JSON files into a summary table");
  report->set_help_flag("--help", "print help and exit");
  report->add_option("inputs", ra.inputs, "report JSON files (records or arrays)")
      ->required()
      ->check(CLI::ExistingFile);
  report->add_option("--out", ra.out, "output directory (default $FREEBOUND_OUT_DIR or .)");

  ExportArgs ea;
  CLI::App* exp = app.add_subcommand(
      "export", "sample an exact surface to a CSV point grid and an OBJ mesh");
  exp->set_help_flag("--help", "print help and exit");
  add_surface_flags(exp, ea.surf, true);
  exp->add_option("--res", ea.res, "lattice cells per chart axis");
  exp->add_option("--out", ea.out, "output directory (default $FREEBOUND_OUT_DIR or .)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help/version exit clean, usage errors exit 2
  }

  try {
    if (verify->parsed()) return run_verify(va, grid_opt->count() > 0);
    if (solve->parsed()) return run_solve(sa);
    if (report->parsed()) return run_report(ra);
    if (exp->parsed()) return run_export(ea);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
