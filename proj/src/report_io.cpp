#include "freebound/report_io.hpp"

#include <atomic>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <Eigen/Geometry>
#include <unistd.h>

namespace freebound {

namespace {

Json to_array(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

std::string fmt6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

}  // namespace

Json to_json(const VerificationReport& r) {
  Json j;
  j["report_version"] = kReportVersion;
  j["kind"] = "identity-check";
  j["check"] = r.check_name;
  j["surface"] = r.surface_id;
  j["grid"] = r.grid;
  j["residual_max"] = r.residual_max;
  j["residual_l2"] = r.residual_l2;
  j["tolerance"] = r.tolerance;
  j["h"] = r.h_used;
  j["passed"] = r.passed;
  j["notes"] = r.notes;
  return j;
}

Json to_json(const CurvatureGapReport& r) {
  Json j;
  j["report_version"] = kReportVersion;
  j["kind"] = "curvature-gap";
  j["check"] = "curvature-gap";
  j["surface"] = r.surface_id;
  j["grid"] = r.grid;
  j["sup_interior_a2"] = r.sup_interior_A2;
  j["inf_boundary_a2"] = r.inf_boundary_A2;
  j["gap"] = r.gap;
  j["flux_residual"] = r.flux_residual;
  if (r.chain_residual)
    j["chain_residual"] = *r.chain_residual;
  else
    j["chain_residual"] = nullptr;
  j["tolerance"] = r.tolerance;
  j["h"] = r.h_used;
  j["passed"] = r.passed;
  j["notes"] = r.notes;
  return j;
}

Json to_json(const KillingZeroReport& r) {
  Json j;
  j["report_version"] = kReportVersion;
  j["kind"] = "killing-zeros";
  j["check"] = "killing-zeros";
  j["surface"] = r.surface_id;
  j["field"] = r.field_name;
  j["grid"] = r.grid;
  j["zero_count"] = r.zeros.size();
  Json zeros = Json::array();
  for (const auto& z : r.zeros) {
    Json e;
    e["parameter"] = to_array(z.parameter);
    e["position"] = to_array(z.position);
    zeros.push_back(std::move(e));
  }
  j["zeros"] = std::move(zeros);
  j["vanishes_identically"] = r.vanishes_identically;
  j["certified_sign_definite"] = r.certified_sign_definite;
  j["min_s_v"] = r.min_s_v;
  j["max_s_v"] = r.max_s_v;
  j["min_abs_s_v"] = r.min_abs_s_v;
  // The search always concludes: it either lists crossings, certifies a sign
  // at lattice resolution, or flags an identically vanishing field.
  j["passed"] = true;
  j["notes"] = r.notes;
  return j;
}

Json to_json(const FlatnessMetrics& m) {
  Json j;
  j["report_version"] = kReportVersion;
  j["kind"] = "flatness-metrics";
  j["plane_deviation"] = m.plane_deviation;
  j["max_a2"] = m.max_a2;
  j["min_s_e3"] = m.min_s;
  j["plane_normal"] = Json::array({m.plane_normal.x(), m.plane_normal.y(), m.plane_normal.z()});
  return j;
}

Json to_json(const RunManifest& m) {
  Json j;
  j["manifest_version"] = kReportVersion;
  j["tool_version"] = m.tool_version;
  j["command"] = m.command;
  j["surface"] = m.surface.is_null() ? Json(nullptr) : m.surface;
  j["parameters"] = m.parameters;
  j["outputs"] = m.output_paths;
  j["timestamp"] = m.timestamp;
  return j;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
    if (ec) throw Error("cannot create directory " + target.parent_path().string() +
                        ": " + ec.message());
  }
  static std::atomic<unsigned> counter{0};
  const fs::path tmp = target.parent_path() /
                       (target.filename().string() + ".tmp." +
                        std::to_string(::getpid()) + "." +
                        std::to_string(counter.fetch_add(1)));
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open " + tmp.string() + " for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    if (!f.good()) throw Error("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot move " + tmp.string() + " into place: " + ec.message());
  }
}

void write_json_atomic(const std::string& path, const Json& j) {
  write_text_atomic(path, j.dump(2) + "\n");
}

Json read_json(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path);
  try {
    return Json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw Error("cannot parse " + path + ": " + e.what());
  }
}

namespace {

struct SummaryRow {
  std::string check, surface, grid;
  std::string residual_max, residual_l2, tolerance, h, passed;
};

std::string require_string(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string())
    throw Error("report record is missing the \"" + std::string(key) + "\" field");
  return j.at(key).get<std::string>();
}

std::string number_or_empty(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) return "";
  return fmt6(j.at(key).get<double>());
}

SummaryRow row_from(const Json& j) {
  if (!j.contains("report_version") || !j.at("report_version").is_number_integer())
    throw Error("report record has no report_version");
  const int v = j.at("report_version").get<int>();
  if (v != kReportVersion)
    throw Error("report_version " + std::to_string(v) + " does not match the supported version " +
                std::to_string(kReportVersion));

  const std::string kind = require_string(j, "kind");
  SummaryRow row;
  row.surface = j.contains("surface") && j.at("surface").is_string()
                    ? j.at("surface").get<std::string>()
                    : "";
  row.grid = j.contains("grid") && j.at("grid").is_string() ? j.at("grid").get<std::string>() : "";
  if (j.contains("passed") && j.at("passed").is_boolean())
    row.passed = j.at("passed").get<bool>() ? "true" : "false";

  if (kind == "identity-check") {
    row.check = require_string(j, "check");
    row.residual_max = number_or_empty(j, "residual_max");
    row.residual_l2 = number_or_empty(j, "residual_l2");
    row.tolerance = number_or_empty(j, "tolerance");
    row.h = number_or_empty(j, "h");
  } else if (kind == "curvature-gap") {
    row.check = "curvature-gap";
    row.residual_max = number_or_empty(j, "flux_residual");
    row.residual_l2 = number_or_empty(j, "chain_residual");
    row.tolerance = number_or_empty(j, "tolerance");
    row.h = number_or_empty(j, "h");
  } else if (kind == "killing-zeros") {
    row.check = "killing-zeros(" + require_string(j, "field") + ")";
    row.residual_max = number_or_empty(j, "min_abs_s_v");
  } else if (kind == "flatness-metrics") {
    row.check = "flatness-metrics";
    row.residual_max = number_or_empty(j, "plane_deviation");
    row.residual_l2 = number_or_empty(j, "max_a2");
  } else {
    throw Error("unknown report kind \"" + kind + "\"");
  }
  return row;
}

constexpr const char* kColumns[] = {"check",     "surface",   "grid", "residual_max",
                                    "residual_l2", "tolerance", "h",    "passed"};

std::vector<std::string> cells_of(const SummaryRow& r) {
  return {r.check,       r.surface,   r.grid, r.residual_max,
          r.residual_l2, r.tolerance, r.h,    r.passed};
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string md_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string summary_csv(const std::vector<Json>& reports) {
  std::ostringstream out;
  for (std::size_t i = 0; i < std::size(kColumns); ++i)
    out << (i ? "," : "") << kColumns[i];
  out << '\n';
  for (const auto& j : reports) {
    const auto cells = cells_of(row_from(j));
    for (std::size_t i = 0; i < cells.size(); ++i)
      out << (i ? "," : "") << csv_escape(cells[i]);
    out << '\n';
  }
  return out.str();
}

std::string summary_markdown(const std::vector<Json>& reports) {
  std::ostringstream out;
  out << '|';
  for (const char* c : kColumns) out << ' ' << c << " |";
  out << "\n|";
  for (std::size_t i = 0; i < std::size(kColumns); ++i) out << "---|";
  out << '\n';
  for (const auto& j : reports) {
    out << '|';
    for (const auto& cell : cells_of(row_from(j))) out << ' ' << md_escape(cell) << " |";
    out << '\n';
  }
  return out.str();
}

namespace {

// Full chart lattice: endpoints included on non-periodic axes, periodic axes
// carry per_axis columns that wrap.
std::vector<std::vector<double>> export_axes(const ParametricHypersurface& s, int per_axis) {
  std::vector<std::vector<double>> axes(s.dim);
  for (int i = 0; i < s.dim; ++i) {
    const double lo = s.box.lo[i], hi = s.box.hi[i];
    const int count = s.box.periodic[i] ? per_axis : per_axis + 1;
    const double step = (hi - lo) / per_axis;
    axes[i].reserve(count);
    for (int k = 0; k < count; ++k) axes[i].push_back(lo + k * step);
  }
  return axes;
}

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

std::string surface_point_csv(const ParametricHypersurface& s, int per_axis) {
  if (per_axis < 1) throw Error("surface_point_csv needs per_axis >= 1");
  const auto axes = export_axes(s, per_axis);
  const int d = s.dim;

  Eigen::VectorXd p(d);
  for (int i = 0; i < d; ++i) p[i] = axes[i].front();
  const int ambient = static_cast<int>(s.eval(p).size());

  std::ostringstream out;
  for (int i = 0; i < d; ++i) out << (i ? "," : "") << 'p' << i;
  for (int i = 0; i < ambient; ++i) out << ",f" << i;
  out << '\n';

  std::vector<int> idx(d, 0);
  for (;;) {
    for (int i = 0; i < d; ++i) p[i] = axes[i][idx[i]];
    const Eigen::VectorXd f = s.eval(p);
    for (int i = 0; i < d; ++i) out << (i ? "," : "") << fmt17(p[i]);
    for (int i = 0; i < ambient; ++i) out << ',' << fmt17(f[i]);
    out << '\n';
    int axis = 0;
    while (axis < d && ++idx[axis] == static_cast<int>(axes[axis].size())) idx[axis++] = 0;
    if (axis == d) break;
  }
  return out.str();
}

std::string surface_obj(const ParametricHypersurface& s, int per_axis) {
  if (s.dim != 2) throw Error("surface_obj exports 2-dimensional surfaces only");
  if (per_axis < 2) throw Error("surface_obj needs per_axis >= 2");
  const auto axes = export_axes(s, per_axis);
  const int c0 = static_cast<int>(axes[0].size());
  const int c1 = static_cast<int>(axes[1].size());

  std::vector<Eigen::Vector3d> pos;
  pos.reserve(static_cast<std::size_t>(c0) * c1);
  Eigen::VectorXd p(2);
  for (int j = 0; j < c1; ++j)
    for (int i = 0; i < c0; ++i) {
      p << axes[0][i], axes[1][j];
      const Eigen::VectorXd f = s.eval(p);
      if (f.size() != 3) throw Error("surface_obj needs ambient dimension 3");
      pos.emplace_back(f[0], f[1], f[2]);
    }

  std::ostringstream out;
  out << "# " << s.id << ", chart lattice " << c0 << "x" << c1 << "\n";
  for (const auto& v : pos)
    out << "v " << fmt17(v.x()) << ' ' << fmt17(v.y()) << ' ' << fmt17(v.z()) << '\n';

  auto vid = [&](int i, int j) { return j * c0 + i; };
  auto emit = [&](int a, int b, int c) {
    const Eigen::Vector3d ab = pos[b] - pos[a], ac = pos[c] - pos[a];
    if (ab.cross(ac).norm() < 1e-14) return;  // polar-axis slivers
    out << "f " << a + 1 << ' ' << b + 1 << ' ' << c + 1 << '\n';
  };
  const int cells0 = s.box.periodic[0] ? c0 : c0 - 1;
  const int cells1 = s.box.periodic[1] ? c1 : c1 - 1;
  for (int j = 0; j < cells1; ++j)
    for (int i = 0; i < cells0; ++i) {
      const int i1 = (i + 1) % c0, j1 = (j + 1) % c1;
      emit(vid(i, j), vid(i1, j), vid(i1, j1));
      emit(vid(i, j), vid(i1, j1), vid(i, j1));
    }
  return out.str();
}

std::string trace_csv(const std::vector<TraceRow>& trace) {
  std::ostringstream out;
  out << "iteration,area,grad_max,boundary_orthogonality\n";
  out.precision(17);
  for (const auto& row : trace)
    out << row.iteration << ',' << row.area << ',' << row.grad_max << ','
        << row.boundary_orthogonality << '\n';
  return out.str();
}

}  // namespace freebound
