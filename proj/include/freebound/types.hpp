#pragma once

#include <stdexcept>
#include <string>

namespace freebound {

// Base for everything thrown by this library, so callers can catch one type.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Chart metric is singular (or nearly so) at the requested parameter point.
struct DegenerateChartError : Error {
  using Error::Error;
};

// A finite-difference stencil would need samples outside the parameter box
// along a non-periodic axis.
struct StencilOutOfDomainError : Error {
  using Error::Error;
};

// An operation whose mathematical hypothesis is not met was requested, e.g.
// an identity check that only holds on minimal surfaces applied to a surface
// that is not minimal.
struct PreconditionViolation : Error {
  using Error::Error;
};

// The Killing-field graph quantity vanishes where a 1/s_V quantity is needed.
struct ZeroGraphQuantityError : Error {
  using Error::Error;
};

// A surface claimed to be graphical over a region fails the graphicality test.
struct GraphicalityViolation : Error {
  using Error::Error;
};

// Shooting solver could not bracket a sign change of the boundary functional.
struct ShootingBracketError : Error {
  using Error::Error;
};

// Boundary-adapted frame could not be built: a chart face direction is
// (numerically) degenerate at the requested boundary point.
struct FrameConstructionError : Error {
  using Error::Error;
};

// Mesh fails a structural or quality requirement (non-manifold edge,
// degenerate triangle, insufficient neighborhood for a local fit, ...).
struct MeshQualityError : Error {
  using Error::Error;
};

// Malformed input: expression syntax, report schema, CLI arguments.
struct ParseError : Error {
  using Error::Error;
};

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace freebound
