#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "freebound/mesh.hpp"
#include "freebound/solver.hpp"
#include "freebound/surface.hpp"
#include "freebound/types.hpp"
#include "freebound/verify.hpp"

namespace freebound {

// All report files carry this schema version; aggregation refuses mixed or
// unknown versions rather than guessing at key meanings.
inline constexpr int kReportVersion = 1;

// Insertion-ordered JSON so serialized records keep their semantic key order
// and golden files stay byte-stable.
using Json = nlohmann::ordered_json;

Json to_json(const VerificationReport& r);
Json to_json(const CurvatureGapReport& r);
Json to_json(const KillingZeroReport& r);
Json to_json(const FlatnessMetrics& m);

// Provenance record serialized alongside every output file. The timestamp is
// the only wall-clock-dependent field anywhere in the tool's outputs;
// everything else is a pure function of the inputs.
struct RunManifest {
  std::string command;
  Json surface;      // name + construction parameters, null when not surface-based
  Json parameters;   // grid, h, quadrature, resolution, ... as given
  std::vector<std::string> output_paths;
  std::string tool_version = std::string(kToolVersion);
  std::string timestamp;  // ISO-8601 UTC, see utc_timestamp()
};
Json to_json(const RunManifest& m);

std::string utc_timestamp();

// Writes land in a temp file next to the target and are renamed into place,
// so concurrent jobs never expose half-written files.
void write_text_atomic(const std::string& path, const std::string& content);
void write_json_atomic(const std::string& path, const Json& j);

Json read_json(const std::string& path);  // throws Error on IO or parse failure

// Summary tables over report records, one row per record, stable column
// order: check, surface, grid, residual_max, residual_l2, tolerance, h,
// passed. Curvature-gap records map their flux/chain residuals onto the two
// residual columns; killing-zero records put the field name in the check
// column and their |s_V| margin in residual_max. Numbers print with 6
// significant digits; fields a record does not carry stay empty. Throws
// Error on a report_version mismatch or a record missing required keys.
std::string summary_csv(const std::vector<Json>& reports);
std::string summary_markdown(const std::vector<Json>& reports);

// Inspection exports for parametric surfaces over the chart lattice
// (per_axis cells per axis; non-periodic axes include their endpoints,
// periodic axes wrap). The OBJ export is for 2-dimensional surfaces and
// drops the degenerate triangles a polar chart produces at its axis.
std::string surface_point_csv(const ParametricHypersurface& s, int per_axis);
std::string surface_obj(const ParametricHypersurface& s, int per_axis);

// Same rows as write_trace_csv, returned as a string for atomic writing.
std::string trace_csv(const std::vector<TraceRow>& trace);

}  // namespace freebound
