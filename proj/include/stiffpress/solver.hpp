#pragma once
// Explicit finite-volume integration of
//
//   ∂t n = ΔA(n) + ∇·(n∇V) + n g
//
// Diffusion uses the compact Laplacian of A(n), drift is first-order upwind on
// the face velocity u = -∇V, reaction is explicit. dt adapts to the CFL bound
// and lands exactly on the snapshot times.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "stiffpress/barenblatt.hpp"
#include "stiffpress/core.hpp"
#include "stiffpress/metrics.hpp"
#include "stiffpress/pressure.hpp"
#include "stiffpress/shapes.hpp"

namespace stiffpress {

struct DriftSpec {
  std::string name = "custom";
  std::function<double(Point)> V;
  std::optional<double> lambda;  // claimed semiconvexity constant

  /// V finite at every cell centre and, if λ is claimed, D²V - ½ tr(D²V) I >= λ I
  /// on a coarse sample (finite-difference Hessian).
  void check(const Grid& g) const {
    if (!V) fail(ErrorCode::InvalidArgument, "drift has no potential");
    for (std::size_t i = 0; i < g.size(); ++i)
      if (!std::isfinite(V(g.center_of(i))))
        fail(ErrorCode::InvalidArgument, "drift potential is not finite on the box");
    if (!lambda) return;
    const int samples = 9;
    const double L = g.hi[0] - g.lo[0];
    const double d = 1e-3 * L;
    auto at = [&](int k) { return g.lo[0] + L * (k + 0.5) / samples; };
    for (int a = 0; a < samples; ++a)
      for (int b = 0; b < (g.dim == 2 ? samples : 1); ++b) {
        const Point x{at(a), g.dim == 2 ? g.lo[1] + (at(b) - g.lo[0]) : 0.0};
        const double v0 = V(x);
        const double vxx = (V({x[0] + d, x[1]}) - 2 * v0 + V({x[0] - d, x[1]})) / (d * d);
        double min_eig = 0.0;
        if (g.dim == 1) {
          min_eig = 0.5 * vxx;
        } else {
          const double vyy = (V({x[0], x[1] + d}) - 2 * v0 + V({x[0], x[1] - d})) / (d * d);
          const double vxy = (V({x[0] + d, x[1] + d}) - V({x[0] + d, x[1] - d}) -
                              V({x[0] - d, x[1] + d}) + V({x[0] - d, x[1] - d})) /
                             (4 * d * d);
          // eigenvalues of H - ½ tr(H) I are ±√(((vxx - vyy)/2)² + vxy²)
          const double r = std::hypot(0.5 * (vxx - vyy), vxy);
          min_eig = -r;
        }
        if (min_eig < *lambda - 1e-6 * std::max(1.0, std::abs(*lambda)))
          fail(ErrorCode::InvalidArgument, "drift violates the claimed semiconvexity bound");
      }
  }
};

inline DriftSpec quadratic_drift(double a, Point center = {0.0, 0.0}) {
  DriftSpec d;
  d.name = "quadratic";
  d.V = [a, center](Point x) {
    const double dx = x[0] - center[0], dy = x[1] - center[1];
    return 0.5 * a * (dx * dx + dy * dy);
  };
  return d;
}

struct ReactionSpec {
  std::string name = "custom";
  std::function<double(double, Point)> g;
  double g_plus_max = 0.0;
  bool subharmonic = false;  // declares Δg >= 0; spot-checked on the grid

  void check(const Grid& grid, double T) const {
    if (!g) fail(ErrorCode::InvalidArgument, "reaction has no rate function");
    if (!(g_plus_max >= 0.0) || !std::isfinite(g_plus_max))
      fail(ErrorCode::InvalidArgument, "reaction g_plus_max must be finite and >= 0");
    for (double t : {0.0, 0.5 * T, T})
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = g(t, grid.center_of(i));
        if (!std::isfinite(v) || v > g_plus_max + 1e-12)
          fail(ErrorCode::InvalidArgument, "reaction rate exceeds g_plus_max");
      }
    if (!subharmonic) return;
    const double h = grid.h();
    for (double t : {0.0, 0.5 * T, T})
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const Point x = grid.center_of(i);
        const double g0 = g(t, x);
        double lap = (g(t, {x[0] + h, x[1]}) - 2 * g0 + g(t, {x[0] - h, x[1]})) / (h * h);
        if (grid.dim == 2) lap += (g(t, {x[0], x[1] + h}) - 2 * g0 + g(t, {x[0], x[1] - h})) / (h * h);
        if (lap < -1e-8 * (1.0 + std::abs(g0) / (h * h)))
          fail(ErrorCode::InvalidArgument, "reaction declared subharmonic but has negative Laplacian");
      }
  }
};

inline ReactionSpec constant_reaction(double r) {
  ReactionSpec s;
  s.name = "constant";
  s.g = [r](double, Point) { return r; };
  s.g_plus_max = std::max(0.0, r);
  s.subharmonic = true;
  return s;
}

struct InitialDatum {
  enum class Kind { Barenblatt, Indicator, Bump, Constant, Annulus };

  Kind kind = Kind::Barenblatt;
  double gamma = 2.0;        // Barenblatt exponent
  bool gamma_auto = false;   // follow the power law's γ
  double mass = 1.0;   // Barenblatt mass
  double t0 = 1.0;     // Barenblatt time
  Point center{0.0, 0.0};
  double radius = 0.5;        // half width (1D) or radius (2D); outer radius for Annulus
  double inner_radius = 0.2;  // Annulus only
  double height = 1.0;
  double value = 0.5;  // Constant

  Field sample(const Grid& g) const {
    switch (kind) {
      case Kind::Barenblatt:
        return Barenblatt(gamma, mass, g.dim).sample(g, t0, center);
      case Kind::Indicator:
        return g.dim == 1 ? indicator_interval(g, center[0], radius, height)
                          : indicator_disc(g, center, radius, height);
      case Kind::Annulus: {
        if (!(inner_radius < radius))
          fail(ErrorCode::InvalidArgument, "annulus needs inner_radius < radius");
        if (g.dim == 1) {
          return indicator_interval(g, center[0], radius, height) -
                 indicator_interval(g, center[0], inner_radius, height);
        }
        Field f = indicator_disc(g, center, radius, height) -
                  indicator_disc(g, center, inner_radius, height);
        for (double& v : f.values) v = std::max(0.0, v);
        return f;
      }
      case Kind::Bump: {
        const double R = radius, H = height;
        const Point c = center;
        const int dim = g.dim;
        return sample_cell_average(
            g,
            [R, H, c, dim](Point x) {
              const double dx = x[0] - c[0], dy = dim == 2 ? x[1] - c[1] : 0.0;
              const double s = 1.0 - (dx * dx + dy * dy) / (R * R);
              return s > 0.0 ? H * s * s * s : 0.0;
            },
            4);
      }
      case Kind::Constant:
        return Field(g, value);
    }
    return Field(g);
  }
};

struct SimConfig {
  Grid grid;
  PressureLaw law;
  std::optional<DriftSpec> drift;
  std::optional<ReactionSpec> reaction;
  double T = 1.0;
  double cfl = 0.4;
  std::vector<double> snapshot_times;  // empty: 11 uniform times
  InitialDatum init;
  std::optional<Field> init_field;  // overrides `init` when set
  double dt_max = 0.0;              // 0: T / 1000
  std::size_t max_steps = 100'000'000;
  std::size_t diagnostics_stride = 1;
  bool p_max_auto = false;  // p_max taken from the initial datum

  double effective_dt_max() const { return dt_max > 0.0 ? dt_max : T / 1000.0; }

  std::vector<double> times() const {
    if (!snapshot_times.empty()) return snapshot_times;
    if (T == 0.0) return {0.0};
    std::vector<double> ts;
    for (int k = 0; k <= 10; ++k) ts.push_back(T * k / 10.0);
    ts.back() = T;
    return ts;
  }

  Field initial_state() const { return init_field ? *init_field : init.sample(grid); }

  void validate() const {
    grid.validate();
    law.validate();
    if (!(T >= 0.0) || !std::isfinite(T)) fail(ErrorCode::InvalidArgument, "T must be >= 0");
    if (!(cfl > 0.0 && cfl <= 1.0)) fail(ErrorCode::InvalidArgument, "cfl must lie in (0, 1]");
    if (dt_max < 0.0) fail(ErrorCode::InvalidArgument, "dt_max must be >= 0");
    if (diagnostics_stride == 0) fail(ErrorCode::InvalidArgument, "diagnostics stride must be >= 1");
    const auto ts = times();
    for (std::size_t i = 0; i < ts.size(); ++i) {
      if (!(ts[i] >= 0.0 && ts[i] <= T))
        fail(ErrorCode::InvalidArgument, "snapshot times must lie in [0, T]");
      if (i > 0 && !(ts[i] > ts[i - 1]))
        fail(ErrorCode::InvalidArgument, "snapshot times must be strictly increasing");
    }
    if (init_field && !(init_field->grid == grid))
      fail(ErrorCode::InvalidArgument, "initial field lives on a different grid");
    if (drift) drift->check(grid);
    if (reaction) reaction->check(grid, T);
  }
};

struct Snapshot {
  double t = 0.0;
  Field density;
  Field pressure;
  double bv = 0.0;
};

struct StepRecord {
  std::size_t step = 0;
  double t = 0.0;
  double dt = 0.0;
  double mass = 0.0;
  double min = 0.0;
  double max = 0.0;
  double max_pressure = 0.0;
};

struct Trajectory {
  std::vector<Snapshot> snapshots;
  std::vector<StepRecord> diagnostics;
  std::size_t steps = 0;
  double max_pressure = 0.0;  // running max over every step

  const Snapshot& at(double t) const {
    for (const auto& s : snapshots)
      if (s.t == t) return s;
    fail(ErrorCode::InvalidArgument, "no snapshot at the requested time");
  }
};

/// Applies the `auto` settings: Barenblatt γ following the law, p_max from
/// the initial pressure.
inline SimConfig resolve(SimConfig cfg) {
  if (cfg.init.kind == InitialDatum::Kind::Barenblatt && cfg.init.gamma_auto) {
    if (!cfg.law.is_power())
      fail(ErrorCode::InvalidArgument, "init gamma=auto needs a power law");
    cfg.init.gamma = cfg.law.gamma;
  }
  if (cfg.p_max_auto) {
    const Field n0 = cfg.initial_state();
    if (!cfg.law.is_power() && n0.max() >= 1.0 - 1e-12)
      fail(ErrorCode::DomainViolation, "singular initial density must stay below 1");
    double pm = 0.0;
    for (double v : n0.values) pm = std::max(pm, pressure(cfg.law, std::max(0.0, v)));
    cfg.law.p_max = pm > 0.0 ? pm : 1.0;
  }
  return cfg;
}

/// Copy of `cfg` with the stiffness parameter replaced: γ for the power law,
/// ε for the singular law.
inline SimConfig with_stiffness(SimConfig cfg, double value) {
  if (cfg.law.is_power()) cfg.law.gamma = value;
  else cfg.law.epsilon = value;
  cfg.law.validate();
  return resolve(std::move(cfg));
}

inline Field pressure_field(const PressureLaw& law, const Field& n) {
  return map(n, [&](double v) { return pressure(law, v); });
}

/// ΔV at cell centres from the potential by centred differences at spacing h.
inline Field drift_laplacian(const Grid& g, const DriftSpec& drift) {
  const double h = g.h();
  return sample_centers(g, [&](Point x) {
    const double v0 = drift.V(x);
    double s = (drift.V({x[0] + h, x[1]}) - 2 * v0 + drift.V({x[0] - h, x[1]})) / (h * h);
    if (g.dim == 2) s += (drift.V({x[0], x[1] + h}) - 2 * v0 + drift.V({x[0], x[1] - h})) / (h * h);
    return s;
  });
}

/// Face velocities u = -∇V from V at the two neighbouring cell centres. Ghost
/// centres wrap on periodic grids and are evaluated in place otherwise.
inline VectorField face_velocity(const Grid& g, const DriftSpec& drift) {
  const double h = g.h();
  const int n = g.n;
  const bool periodic = g.bc == Boundary::Periodic;
  auto coord = [&](int axis, int i) {
    if (periodic) i = (i + n) % n;
    return g.lo[axis] + (i + 0.5) * h;
  };
  VectorField u(g);
  if (g.dim == 1) {
    for (int f = 0; f <= n; ++f)
      u.comp[0][f] = -(drift.V({coord(0, f), 0.0}) - drift.V({coord(0, f - 1), 0.0})) / h;
    return u;
  }
  for (int f = 0; f <= n; ++f)
    for (int j = 0; j < n; ++j) {
      const double y = coord(1, j), x = coord(0, j);
      u.comp[0][u.face_index(0, f, j)] =
          -(drift.V({coord(0, f), y}) - drift.V({coord(0, f - 1), y})) / h;
      u.comp[1][u.face_index(1, f, j)] =
          -(drift.V({x, coord(1, f)}) - drift.V({x, coord(1, f - 1)})) / h;
    }
  return u;
}

namespace detail {

inline double max_abs(const VectorField& v) {
  double m = 0.0;
  for (int a = 0; a < v.grid.dim; ++a)
    for (double x : v.comp[a]) m = std::max(m, std::abs(x));
  return m;
}

inline double max_diffusivity(const PressureLaw& law, const Field& n) {
  if (!law.is_power() && n.max() >= 1.0)
    fail(ErrorCode::DomainViolation, "singular density reached 1; diffusivity is infinite");
  double m = 0.0;
  for (double v : n.values) m = std::max(m, flux_potential_derivative(law, std::max(0.0, v)));
  if (!std::isfinite(m)) fail(ErrorCode::DomainViolation, "infinite diffusivity");
  return m;
}

inline double stable_dt_raw(const PressureLaw& law, const Field& n, double max_velocity,
                            double g_plus_max, double cfl, double dt_cap) {
  const Grid& g = n.grid;
  const double h = g.h();
  double dt = dt_cap;
  const double diff = max_diffusivity(law, n);
  if (diff > 0.0) dt = std::min(dt, cfl * h * h / (2.0 * g.dim * diff));
  if (max_velocity > 0.0) dt = std::min(dt, cfl * h / (2.0 * max_velocity));
  if (g_plus_max > 0.0) dt = std::min(dt, cfl * 0.5 / g_plus_max);
  return dt;
}

}  // namespace detail

/// cfl · min(h²/(2d max A′), h/(2 max|∇V|), 0.5/g₊), capped at dt_max; terms
/// for absent drift, reaction or zero diffusivity are dropped.
inline double stable_dt(const Field& state, const SimConfig& cfg) {
  const double vel = cfg.drift ? detail::max_abs(face_velocity(state.grid, *cfg.drift)) : 0.0;
  const double gp = cfg.reaction ? cfg.reaction->g_plus_max : 0.0;
  return detail::stable_dt_raw(cfg.law, state, vel, gp, cfg.cfl, cfg.effective_dt_max());
}

/// Holds per-configuration caches (face velocities) for repeated steps.
class Stepper {
 public:
  static constexpr double kUndershootTol = 1e-14;
  static constexpr double kSingularMargin = 1e-12;
  static constexpr double kBoundaryThreshold = 1e-10;
  static constexpr int kBoundaryCells = 2;

  explicit Stepper(const SimConfig& cfg) : cfg_(cfg) {
    if (cfg_.drift) {
      velocity_ = face_velocity(cfg_.grid, *cfg_.drift);
      max_velocity_ = detail::max_abs(*velocity_);
    }
  }

  double stable_dt(const Field& n) const {
    const double gp = cfg_.reaction ? cfg_.reaction->g_plus_max : 0.0;
    return detail::stable_dt_raw(cfg_.law, n, max_velocity_, gp, cfg_.cfl,
                                 cfg_.effective_dt_max());
  }

  /// Explicit Euler step; `n` must satisfy the state checks.
  Field step(const Field& n, double t, double dt) const {
    const Grid& g = n.grid;
    Field a = map(n, [&](double v) { return flux_potential(cfg_.law, v); });
    Field rhs = laplacian(a);
    if (velocity_) {
      const Field drift = divergence(upwind_flux(n));
      for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] -= drift[i];
    }
    if (cfg_.reaction) {
      for (std::size_t i = 0; i < rhs.size(); ++i)
        rhs[i] += n[i] * cfg_.reaction->g(t, g.center_of(i));
    }
    Field out(g);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = n[i] + dt * rhs[i];
    enforce(out);
    return out;
  }

  /// NaN, undershoot, singular-domain and boundary-margin checks; clips
  /// undershoots below kUndershootTol to 0.
  void enforce(Field& n) const {
    for (double& v : n.values) {
      if (!std::isfinite(v)) fail(ErrorCode::NonFiniteState, "non-finite density");
      if (v < 0.0) {
        if (v < -kUndershootTol)
          fail(ErrorCode::NegativeUndershoot, "negative density undershoot beyond tolerance");
        v = 0.0;
      }
      if (!cfg_.law.is_power() && v >= 1.0 - kSingularMargin)
        fail(ErrorCode::DomainViolation, "singular density reached 1");
    }
    if (n.grid.bc == Boundary::DirichletZero && touches_boundary(n))
      fail(ErrorCode::BoundaryTouched, "density reached the box margin");
  }

  static bool touches_boundary(const Field& n) {
    const Grid& g = n.grid;
    const int N = g.n;
    auto near = [N](int i) { return i < kBoundaryCells || i >= N - kBoundaryCells; };
    for (std::size_t idx = 0; idx < n.size(); ++idx) {
      if (n[idx] <= kBoundaryThreshold) continue;
      const int i = g.dim == 1 ? int(idx) : int(idx / N);
      const int j = g.dim == 1 ? kBoundaryCells : int(idx % N);
      if (near(i) || near(j)) return true;
    }
    return false;
  }

 private:
  VectorField upwind_flux(const Field& n) const {
    const VectorField& u = *velocity_;
    const Grid& g = n.grid;
    VectorField F(g);
    if (g.dim == 1) {
      for (int f = 0; f <= g.n; ++f) {
        const double v = u.comp[0][f];
        F.comp[0][f] = v * (v > 0.0 ? detail::at(n, f - 1, 0) : detail::at(n, f, 0));
      }
      return F;
    }
    for (int f = 0; f <= g.n; ++f)
      for (int j = 0; j < g.n; ++j) {
        const std::size_t ix = F.face_index(0, f, j), iy = F.face_index(1, f, j);
        const double vx = u.comp[0][ix], vy = u.comp[1][iy];
        F.comp[0][ix] = vx * (vx > 0.0 ? detail::at(n, f - 1, j) : detail::at(n, f, j));
        F.comp[1][iy] = vy * (vy > 0.0 ? detail::at(n, j, f - 1) : detail::at(n, j, f));
      }
    return F;
  }

  const SimConfig& cfg_;
  std::optional<VectorField> velocity_;
  double max_velocity_ = 0.0;
};

/// One explicit step. Convenience wrapper; solve() reuses a single Stepper.
inline Field step(const Field& state, double t, double dt, const SimConfig& cfg) {
  return Stepper(cfg).step(state, t, dt);
}

inline Snapshot make_snapshot(const PressureLaw& law, double t, const Field& n) {
  Snapshot s;
  s.t = t;
  s.density = n;
  s.pressure = pressure_field(law, n);
  s.bv = bv_seminorm(n);
  return s;
}

/// Marches 0 → T, landing exactly on every snapshot time.
inline Trajectory solve(const SimConfig& cfg) {
  cfg.validate();
  Stepper stepper(cfg);
  Field n = cfg.initial_state();
  if (!(n.grid == cfg.grid)) fail(ErrorCode::InvalidArgument, "initial datum grid mismatch");
  if (!cfg.law.is_power() && n.max() >= 1.0 - Stepper::kSingularMargin)
    fail(ErrorCode::DomainViolation, "singular initial density must stay below 1");
  stepper.enforce(n);

  const auto times = cfg.times();
  Trajectory tr;
  auto record = [&](std::size_t k, double t, double dt, double maxp) {
    tr.max_pressure = std::max(tr.max_pressure, maxp);
    if (k % cfg.diagnostics_stride != 0 && !(t == cfg.T)) return;
    tr.diagnostics.push_back({k, t, dt, mass(n), n.min(), n.max(), maxp});
  };
  auto max_p = [&]() { return pressure(cfg.law, std::max(0.0, n.max())); };

  double t = 0.0;
  std::size_t k = 0;
  record(0, 0.0, 0.0, max_p());
  for (double target : times) {
    while (t < target) {
      if (k >= cfg.max_steps) fail(ErrorCode::TimeoutExceeded, "step budget exceeded");
      double dt = stepper.stable_dt(n);
      const bool last = t + dt >= target;
      if (last) dt = target - t;
      n = stepper.step(n, t, dt);
      t = last ? target : t + dt;
      ++k;
      record(k, t, dt, max_p());
    }
    tr.snapshots.push_back(make_snapshot(cfg.law, target, n));
  }
  tr.steps = k;
  return tr;
}

}  // namespace stiffpress
