#pragma once
// Reference limits n∞, p∞: exact mesa indicators, exact stationary profiles,
// and large-stiffness numerical surrogates.

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "stiffpress/core.hpp"
#include "stiffpress/shapes.hpp"
#include "stiffpress/solver.hpp"

namespace stiffpress {

struct LimitReference {
  enum class Kind { ExactIndicator, ExactStationary, Surrogate };

  Kind kind = Kind::ExactIndicator;
  double parameter = 0.0;  // γ_ref or ε_ref for surrogates
  Point center{0.0, 0.0};
  Point half_width{0.0, 0.0};  // interval half width (1D) or disc radius (2D)
  Field stationary_density;    // time-independent references
  Trajectory trajectory;       // Surrogate

  bool time_independent() const { return kind != Kind::Surrogate; }

  Field density(double t) const {
    if (time_independent()) return stationary_density;
    return trajectory.at(t).density;
  }

  Field pressure(double t) const {
    if (time_independent()) return Field(stationary_density.grid, 0.0);
    return trajectory.at(t).pressure;
  }
};

inline std::string to_string(LimitReference::Kind k) {
  switch (k) {
    case LimitReference::Kind::ExactIndicator: return "mesa_indicator";
    case LimitReference::Kind::ExactStationary: return "stationary";
    case LimitReference::Kind::Surrogate: return "surrogate";
  }
  return "unknown";
}

/// Indicator of mass M with unit height: interval of length M in 1D, disc of
/// area M in 2D, as exact volume fractions.
inline LimitReference mesa_indicator(const Grid& g, double M, Point center = {0.0, 0.0}) {
  if (!(M > 0.0)) fail(ErrorCode::InvalidArgument, "mesa mass must be positive");
  LimitReference ref;
  ref.kind = LimitReference::Kind::ExactIndicator;
  ref.center = center;
  const double r = g.dim == 1 ? 0.5 * M : std::sqrt(M / std::numbers::pi);
  ref.half_width = {r, g.dim == 2 ? r : 0.0};
  for (int a = 0; a < g.dim; ++a)
    if (center[a] - r < g.lo[a] || center[a] + r > g.hi[a])
      fail(ErrorCode::InvalidArgument, "mesa indicator does not fit in the box");
  ref.stationary_density =
      g.dim == 1 ? indicator_interval(g, center[0], r) : indicator_disc(g, center, r);
  return ref;
}

/// Any closed-form time-independent limit profile, sampled by cell averages.
inline LimitReference stationary_reference(const Grid& g, const std::function<double(Point)>& n) {
  LimitReference ref;
  ref.kind = LimitReference::Kind::ExactStationary;
  ref.stationary_density = sample_cell_average(g, n, 4);
  return ref;
}

/// Solves `tmpl` at stiffness `value` (γ or ε) and wraps the trajectory.
inline LimitReference surrogate_limit(const SimConfig& tmpl, double value) {
  LimitReference ref;
  ref.kind = LimitReference::Kind::Surrogate;
  ref.parameter = value;
  ref.trajectory = solve(with_stiffness(tmpl, value));
  return ref;
}

}  // namespace stiffpress
