#pragma once
// Seeded property suite: discrete calculus identities, pressure-law
// properties, norm axioms, the W₂/Ḣ⁻¹ sandwich, interpolation-ratio stability
// and the solver's conservation / maximum-principle / domain invariants.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "stiffpress/harness.hpp"

namespace stiffpress {

struct PropertyResult {
  std::string name;
  bool pass = false;
  double value = 0.0;      // worst observed quantity
  double threshold = 0.0;  // bound it is compared against
  std::string detail;
};

struct ValidateOptions {
  std::uint64_t seed = 0;
  std::string mutant = "none";  // "laplacian_sign" flips the Laplacian under test
  int samples = 10000;          // s^γ(1-s) <= s/γ samples
  int sandwich_pairs = 100;
  int interpolation_fields = 200;
};

struct ValidateReport {
  std::vector<PropertyResult> results;
  bool all_pass() const {
    for (const auto& r : results)
      if (!r.pass) return false;
    return !results.empty();
  }
};

namespace detail {

inline double max_abs_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(const Field& a) {
  double m = 0.0;
  for (double v : a.values) m = std::max(m, std::abs(v));
  return m;
}

inline Field random_field(const Grid& g, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> U(lo, hi);
  Field f(g);
  for (double& v : f.values) v = U(rng);
  return f;
}

inline VectorField random_vector_field(const Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  VectorField F(g);
  for (int a = 0; a < g.dim; ++a)
    for (double& v : F.comp[a]) v = U(rng);
  if (g.bc == Boundary::Periodic) {
    // face n duplicates face 0
    const int n = g.n;
    for (int a = 0; a < g.dim; ++a) {
      if (g.dim == 1) {
        F.comp[0][n] = F.comp[0][0];
      } else {
        for (int j = 0; j < n; ++j) F.comp[a][F.face_index(a, n, j)] = F.comp[a][F.face_index(a, 0, j)];
      }
    }
  }
  return F;
}

/// Sum of random interval indicators defined in the continuum, so the same
/// draw can be sampled exactly at any resolution.
struct IntervalFamily {
  std::vector<std::array<double, 3>> pieces;  // centre, half width, height

  static IntervalFamily draw(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    IntervalFamily f;
    const int k = 1 + int(U(rng) * 5.0);
    for (int i = 0; i < k; ++i)
      f.pieces.push_back({0.2 + 0.6 * U(rng), 0.02 + 0.15 * U(rng), 0.1 + U(rng)});
    return f;
  }

  Field sample(const Grid& g) const {
    Field f(g);
    for (const auto& p : pieces) f = f + indicator_interval(g, p[0], p[1], p[2]);
    return f;
  }
};

}  // namespace detail

inline ValidateReport run_validation(const ValidateOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  ValidateReport rep;
  auto add = [&](std::string name, bool pass, double value, double threshold, std::string detail = "") {
    rep.results.push_back({std::move(name), pass, value, threshold, std::move(detail)});
  };
  const bool flip = opt.mutant == "laplacian_sign";
  if (opt.mutant != "none" && !flip) fail(ErrorCode::Config, "unknown validate.mutant: " + opt.mutant);
  auto lap = [flip](const Field& f) { return flip ? -1.0 * laplacian(f) : laplacian(f); };

  const Grid p1 = make_grid_1d(0.0, 1.0, 64, Boundary::Periodic);
  const Grid p2 = make_grid_2d({0.0, 0.0}, {1.0, 1.0}, 32, Boundary::Periodic);
  const Grid d1 = make_grid_1d(0.0, 1.0, 64, Boundary::DirichletZero);

  // --- core ---------------------------------------------------------------
  {
    double worst = 0.0;
    for (const Grid& g : {p1, p2, d1}) {
      const Field f = detail::random_field(g, rng);
      worst = std::max(worst, detail::max_abs_diff(divergence(gradient(f)), lap(f)) /
                                  std::max(1.0, detail::max_abs(laplacian(f))));
    }
    add("core.div_grad_is_laplacian", worst <= 1e-12, worst, 1e-12);
  }
  {
    double worst = 0.0;
    for (const Grid& g : {p1, p2}) {
      const Field f = detail::random_field(g, rng);
      const VectorField F = detail::random_vector_field(g, rng);
      const double a = dot(f, divergence(F)), b = dot(gradient(f), F);
      worst = std::max(worst, std::abs(a + b) / std::max({1e-300, std::abs(a), std::abs(b)}));
    }
    add("core.integration_by_parts", worst <= 1e-12, worst, 1e-12);
  }
  {
    const double h = p1.h();
    const Field s = sample_centers(p1, [](Point x) { return std::sin(2 * std::numbers::pi * x[0]); });
    const double mu = -(2.0 / (h * h)) * (1.0 - std::cos(2 * std::numbers::pi * h));
    const double err = detail::max_abs_diff(lap(s), mu * s) / std::abs(mu);
    add("core.laplacian_eigenvalue", err <= 1e-12, err, 1e-12);
  }
  {
    double worst = 0.0;
    for (const Grid& g : {p1, p2, d1}) {
      const Field f = detail::random_field(g, rng), k = detail::random_field(g, rng);
      const double a = U(rng) * 4 - 2, b = U(rng) * 4 - 2;
      const Field lhs = lap(a * f + b * k);
      const Field rhs = a * lap(f) + b * lap(k);
      worst = std::max(worst, detail::max_abs_diff(lhs, rhs) / std::max(1.0, detail::max_abs(lhs)));
    }
    add("core.linearity", worst <= 1e-12, worst, 1e-12);
  }

  // --- pressure -----------------------------------------------------------
  {
    bool mono = true;
    for (const PressureLaw& law : {PressureLaw::power(2.0), PressureLaw::power(40.0),
                                   PressureLaw::singular(0.1), PressureLaw::singular(1.0)}) {
      double pp = -1.0, pa = -1.0;
      for (int i = 1; i < 2000; ++i) {
        const double n = (law.is_power() ? 1.2 : 0.999) * i / 2000.0;
        const double p = pressure(law, n), a = flux_potential(law, n);
        if (!(p > pp) || !(a > pa)) mono = false;
        pp = p;
        pa = a;
      }
    }
    add("pressure.strictly_increasing", mono, 0.0, 0.0);
  }
  {
    double worst = -1.0;
    for (int i = 0; i < opt.samples; ++i) {
      const double s = U(rng);
      const double g = 1.0 + std::exp(U(rng) * std::log(1e4));
      const double lhs = std::exp(g * std::log(std::max(s, 1e-300))) * (1.0 - s);
      worst = std::max(worst, lhs - s / g);
    }
    add("pressure.s_gamma_bound", worst <= 0.0, worst, 0.0,
        std::to_string(opt.samples) + " random (s, gamma)");
  }
  {
    double worst = 0.0;
    for (const PressureLaw& law : {PressureLaw::power(3.0), PressureLaw::power(20.0),
                                   PressureLaw::singular(0.1)}) {
      for (double n : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const double d = 1e-6;
        const double fd = (flux_potential(law, n + d) - flux_potential(law, n - d)) / (2 * d);
        const double ex = flux_potential_derivative(law, n);
        worst = std::max(worst, std::abs(fd - ex) / std::max(1e-12, std::abs(ex)));
      }
    }
    add("pressure.derivative_matches_fd", worst <= 1e-6, worst, 1e-6);
  }
  {
    bool ok = true;
    for (int i = 0; i < 1000; ++i) {
      const double g = 1.0 + 100.0 * U(rng) + 1e-3, pm = 0.1 + 5 * U(rng);
      const PressureLaw law = PressureLaw::power(g, pm);
      const double n = density_from_pressure(law, pm * U(rng));
      if (n > density_cap(law) * (1 + 1e-12)) ok = false;
    }
    add("pressure.density_cap", ok, 0.0, 0.0);
  }

  // --- metrics ------------------------------------------------------------
  {
    double worst = 0.0;
    for (const Grid& g : {p1, d1}) {
      Field f = detail::random_field(g, rng), k = detail::random_field(g, rng);
      if (g.bc == Boundary::Periodic) {
        const double mf = mean(f), mk = mean(k);
        for (double& v : f.values) v -= mf;
        for (double& v : k.values) v -= mk;
      }
      const double a = U(rng) * 6 - 3;
      const double h1 = hminus1_norm(f);
      worst = std::max(worst, std::abs(hminus1_norm(a * f) - std::abs(a) * h1) / h1);
      const double tri = hminus1_norm(f + k) - (h1 + hminus1_norm(k));
      worst = std::max(worst, std::max(0.0, tri));
    }
    add("metrics.hminus1_norm_axioms", worst <= 1e-12, worst, 1e-12);
  }
  {
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const Field f = detail::random_field(d1, rng), k = detail::random_field(d1, rng);
      for (double p : {1.0, 4.0 / 3.0, 2.0, 5.0}) {
        worst = std::max(worst, lp_norm(f + k, p) - lp_norm(f, p) - lp_norm(k, p));
      }
    }
    add("metrics.lp_triangle", worst <= 1e-12, worst, 1e-12);
  }
  {
    AppendixOptions ao;
    ao.pairs = opt.sandwich_pairs;
    ao.run_2d = false;
    const AppendixReport ar = appendix_suites(rng(), ao);
    int bad = 0;
    for (const auto& r : ar.sandwich) bad += !(r.result.left_ok && r.result.right_ok);
    add("metrics.sandwich", ar.sandwich_pass, bad, 0.0,
        std::to_string(ao.pairs) + " random pairs in [0.5, 1]");
  }
  {
    std::vector<detail::IntervalFamily> fam;
    for (int i = 0; i < opt.interpolation_fields; ++i) fam.push_back(detail::IntervalFamily::draw(rng));
    std::vector<double> maxima;
    for (int N : {128, 256, 512}) {
      const Grid g = make_grid_1d(0.0, 1.0, N, Boundary::DirichletZero);
      double m = 0.0;
      for (const auto& f : fam) m = std::max(m, interpolation_ratio(f.sample(g)));
      maxima.push_back(m);
    }
    const double worst = std::max(maxima[1], maxima[2]) / maxima[0];
    add("metrics.interpolation_ratio_bounded", std::isfinite(worst) && worst <= 1.1, worst, 1.1,
        "max ratio at N=128: " + detail::fmt(maxima[0]));
  }

  // --- solver -------------------------------------------------------------
  {
    SimConfig c;
    c.grid = make_grid_1d(0.0, 1.0, 128, Boundary::Periodic);
    c.law = PressureLaw::power(3.0);
    c.init_field = sample_centers(c.grid, [](Point x) {
      return 0.5 + 0.4 * std::sin(2 * std::numbers::pi * x[0]);
    });
    c.T = 0.05;
    const Trajectory tr = solve(c);
    const double m0 = mass(tr.snapshots.front().density), m1 = mass(tr.snapshots.back().density);
    const double rel = std::abs(m1 - m0) / m0;
    add("solver.mass_conservation", rel <= 1e-10, rel, 1e-10);
  }
  {
    SimConfig c;
    c.grid = make_grid_1d(-1.5, 1.5, 256, Boundary::DirichletZero);
    c.law = PressureLaw::power(20.0);
    c.init.gamma = 20.0;
    c.p_max_auto = true;
    c.T = 0.5;
    c = resolve(c);
    const Trajectory tr = solve(c);
    const double excess = tr.max_pressure - c.law.p_max;
    add("solver.maximum_principle", excess <= 1e-10, excess, 1e-10);
  }
  {
    SimConfig c;
    c.grid = make_grid_1d(-1.5, 1.5, 256, Boundary::DirichletZero);
    c.law = PressureLaw::singular(0.05);
    c.init.kind = InitialDatum::Kind::Indicator;
    c.init.radius = 0.5;
    c.init.height = 0.95;
    c.drift = quadratic_drift(2.0);
    c.T = 0.2;
    double top = 0.0;
    bool ok = true;
    try {
      const Trajectory tr = solve(c);
      for (const auto& r : tr.diagnostics) top = std::max(top, r.max);
    } catch (const Error&) {
      ok = false;
    }
    add("solver.singular_below_one", ok && top < 1.0, top, 1.0);
  }
  return rep;
}

}  // namespace stiffpress
