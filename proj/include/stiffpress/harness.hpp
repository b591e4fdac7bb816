#pragma once
// Stiffness sweeps: solve at each γ (or ε), measure errors against a limit
// reference, fit log-log rates and turn the rate statements into verdicts.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "stiffpress/limits.hpp"
#include "stiffpress/metrics.hpp"
#include "stiffpress/solver.hpp"

namespace stiffpress {

// ---------------------------------------------------------------------------
// Fitting.

struct Fit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
};

/// Least squares on (ln x, ln y).
inline Fit fit_rate(const std::vector<std::pair<double, double>>& pts) {
  if (pts.size() < 2) fail(ErrorCode::InvalidArgument, "fit_rate needs at least 2 points");
  std::vector<double> lx, ly;
  for (auto [x, y] : pts) {
    if (!(x > 0.0) || !(y > 0.0)) fail(ErrorCode::InvalidArgument, "fit_rate needs x, y > 0");
    lx.push_back(std::log(x));
    ly.push_back(std::log(y));
  }
  const double k = double(pts.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) fail(ErrorCode::InvalidArgument, "fit_rate needs distinct x values");
  Fit f;
  f.points = pts.size();
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (f.intercept + f.slope * lx[i]);
    ssr += r * r;
  }
  f.r2 = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  return f;
}

/// Lp rate exponent: ‖n_γ - n∞‖_{Lᵖ} = O(γ^{-α(p)}).
inline double corollary_exponent(double p) {
  if (!(p > 1.0)) fail(ErrorCode::InvalidArgument, "corollary exponent needs p > 1");
  return p <= 4.0 / 3.0 ? (p - 1.0) / p : 1.0 / (3.0 * p);
}

// ---------------------------------------------------------------------------
// Plans and reports.

struct NormSpec {
  enum class Kind { HMinus1, L1, L43, Lp, W2 };
  Kind kind = Kind::HMinus1;
  double p = 2.0;  // Lp only

  std::string name() const {
    switch (kind) {
      case Kind::HMinus1: return "hminus1";
      case Kind::L1: return "l1";
      case Kind::L43: return "l43";
      case Kind::Lp: {
        std::string s = std::to_string(p);
        s.erase(s.find_last_not_of('0') + 1);
        if (!s.empty() && s.back() == '.') s.pop_back();
        return "lp" + s;
      }
      case Kind::W2: return "w2";
    }
    return "unknown";
  }

  /// Rate exponent promised by the theory, if any.
  std::optional<double> expected_exponent() const {
    switch (kind) {
      case Kind::HMinus1: return 0.5;
      case Kind::L43: return 0.25;
      case Kind::Lp:
        if (p > 1.0) return corollary_exponent(p);
        return std::nullopt;
      default: return std::nullopt;
    }
  }

  double measure(const Field& n, const Field& ref) const {
    switch (kind) {
      case Kind::HMinus1: return hminus1_norm(n - ref);
      case Kind::L1: return lp_norm(n - ref, 1.0);
      case Kind::L43: return lp_norm(n - ref, 4.0 / 3.0);
      case Kind::Lp: return lp_norm(n - ref, p);
      case Kind::W2: return w2_distance_1d(n, ref);
    }
    return 0.0;
  }
};

inline NormSpec parse_norm(const std::string& s) {
  NormSpec n;
  if (s == "hminus1") n.kind = NormSpec::Kind::HMinus1;
  else if (s == "l1") n.kind = NormSpec::Kind::L1;
  else if (s == "l43") n.kind = NormSpec::Kind::L43;
  else if (s == "w2" || s == "w2_1d") n.kind = NormSpec::Kind::W2;
  else if (s.rfind("lp", 0) == 0) {
    n.kind = NormSpec::Kind::Lp;
    try {
      n.p = std::stod(s.substr(2));
    } catch (const std::exception&) {
      fail(ErrorCode::Config, "bad norm name: " + s);
    }
    if (!(n.p >= 1.0)) fail(ErrorCode::Config, "lp norm needs p >= 1: " + s);
  } else {
    fail(ErrorCode::Config, "unknown norm: " + s);
  }
  return n;
}

using SolveFn = std::function<Trajectory(const SimConfig&)>;

struct SweepPlan {
  enum class Reference { Mesa, Surrogate };

  SimConfig base;
  std::vector<double> parameters;  // γ increasing (power) or ε decreasing (singular)
  Reference reference = Reference::Mesa;
  double reference_parameter = 0.0;  // γ_ref or ε_ref
  double mesa_mass = 1.0;
  Point mesa_center{0.0, 0.0};
  std::vector<NormSpec> norms{{NormSpec::Kind::HMinus1}, {NormSpec::Kind::L43}};
  std::uint64_t seed = 0;
  double slope_tol = 0.15;
  double r2_min = 0.95;
  double relation_ratio = 0.25;         // relation(last) < ratio * relation(first)
  double complementarity_ratio = 0.5;   // complementarity(last) < ratio * first
  bool theorem3 = true;
  bool rate_verdicts = true;  // off for presets whose reference is not the true limit
  int threads = 1;

  bool power_axis() const { return base.law.is_power(); }

  /// Stiffness on the fitting axis: γ, or 1/ε.
  double axis(double parameter) const { return power_axis() ? parameter : 1.0 / parameter; }

  void validate() const {
    base.validate();
    if (parameters.size() < 2) fail(ErrorCode::Config, "sweep needs at least 2 parameters");
    for (std::size_t i = 1; i < parameters.size(); ++i) {
      const bool ok = power_axis() ? parameters[i] > parameters[i - 1]
                                   : parameters[i] < parameters[i - 1];
      if (!ok)
        fail(ErrorCode::Config, power_axis() ? "gamma list must be strictly increasing"
                                             : "epsilon list must be strictly decreasing");
    }
    for (double p : parameters) {
      if (power_axis() && !(p > 1.0)) fail(ErrorCode::Config, "gamma values must exceed 1");
      if (!power_axis() && !(p > 0.0)) fail(ErrorCode::Config, "epsilon values must be positive");
    }
    if (reference == Reference::Surrogate) {
      const double stiff_max = axis(parameters.back());
      if (!(axis(reference_parameter) >= 4.0 * stiff_max * (1.0 - 1e-12)))
        fail(ErrorCode::Config, "surrogate stiffness must be at least 4x the sweep maximum");
    }
    if (norms.empty()) fail(ErrorCode::Config, "sweep needs at least one norm");
    for (const auto& nm : norms)
      if (nm.kind == NormSpec::Kind::W2 && base.grid.dim != 1)
        fail(ErrorCode::Config, "w2 norm needs a 1D grid");
    if (!(slope_tol >= -1.0 && slope_tol <= 1.0)) fail(ErrorCode::Config, "slope_tol out of range");
  }
};

struct NormRecord {
  std::string norm;
  std::vector<double> errors;  // per snapshot
  double sup = 0.0;
  double e0 = 0.0;
  double t_of_sup = 0.0;
};

struct SweepRecord {
  double parameter = 0.0;
  double axis = 0.0;
  bool ok = true;
  std::string error_tag;
  std::string message;
  std::vector<double> times;
  std::vector<NormRecord> norms;
  double hminus1_e0 = 0.0;  // Ḣ⁻¹ data term, used by the L^{4/3} bound
  double relation_raw = 0.0;
  double relation_abs = 0.0;
  double complementarity = 0.0;
  double max_pressure = 0.0;
  double bv_max = 0.0;
  std::size_t steps = 0;

  const NormRecord* find(const std::string& name) const {
    for (const auto& n : norms)
      if (n.norm == name) return &n;
    return nullptr;
  }
};

struct NormFit {
  std::string norm;
  std::optional<double> expected;  // expected decay exponent (positive)
  std::optional<Fit> raw;
  std::optional<Fit> adjusted;
  std::optional<double> slope_without_last;  // adjusted fit minus the stiffest point
  double C = 0.0;                             // envelope max (sup - e0)₊ · x^expected
  bool degenerate = false;                    // every adjusted error is exactly 0
};

struct Verdict {
  std::string name;
  bool pass = false;
  bool degenerate = false;
  double margin = 0.0;  // positive means room to spare
  std::string detail;
};

struct RateReport {
  std::vector<SweepRecord> records;
  std::vector<NormFit> fits;
  std::vector<Verdict> verdicts;
  std::string axis_name;  // "gamma" or "1/epsilon"

  const NormFit* fit(const std::string& norm) const {
    for (const auto& f : fits)
      if (f.norm == norm) return &f;
    return nullptr;
  }
  const Verdict* verdict(const std::string& name) const {
    for (const auto& v : verdicts)
      if (v.name == name) return &v;
    return nullptr;
  }
  bool all_pass() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
  }
};

// ---------------------------------------------------------------------------
// Mock solver.

/// Produces (1 - s) ref + s shift(ref) with s chosen so that the Ḣ⁻¹ error at
/// t = T is exactly c · x^(-exponent) (x = γ or 1/ε); zero error at t = 0.
inline SolveFn mock_solver(const LimitReference& ref, double c, double exponent = 0.5,
                           int shift_cells = 8) {
  return [ref, c, exponent, shift_cells](const SimConfig& cfg) {
    const double x = cfg.law.is_power() ? cfg.law.gamma : 1.0 / cfg.law.epsilon;
    Trajectory tr;
    for (double t : cfg.times()) {
      const Field r = ref.density(t);
      Field shifted(r.grid);
      const Grid& g = r.grid;
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (g.dim == 1) {
          const int j = int(i) - shift_cells;
          shifted[i] = detail::at(r, j, 0);
        } else {
          const int a = int(i) / g.n - shift_cells, b = int(i) % g.n;
          shifted[i] = detail::at(r, a, b);
        }
      }
      const Field delta = shifted - r;
      const double unit = hminus1_norm(delta);
      double s = 0.0;
      if (unit > 0.0 && cfg.T > 0.0) s = c * std::pow(x, -exponent) / unit * (t / cfg.T);
      if (s > 1.0) fail(ErrorCode::InvalidArgument, "mock amplitude too large");
      Field n = r + s * delta;
      for (double& v : n.values) v = std::max(0.0, v);
      tr.snapshots.push_back({t, n, Field(g, 0.0), bv_seminorm(n)});
    }
    return tr;
  };
}

// ---------------------------------------------------------------------------
// Sweep.

namespace detail {

template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(count, threads));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  for (auto& th : pool) th.join();
}

inline LimitReference build_reference(const SweepPlan& plan) {
  if (plan.reference == SweepPlan::Reference::Mesa)
    return mesa_indicator(plan.base.grid, plan.mesa_mass, plan.mesa_center);
  return surrogate_limit(plan.base, plan.reference_parameter);
}

inline SweepRecord measure_entry(const SweepPlan& plan, const LimitReference& ref,
                                 const SolveFn& solver, double parameter) {
  SweepRecord rec;
  rec.parameter = parameter;
  rec.axis = plan.axis(parameter);
  try {
    const SimConfig cfg = with_stiffness(plan.base, parameter);
    const Trajectory tr = solver(cfg);
    rec.steps = tr.steps;
    rec.max_pressure = tr.max_pressure;
    const Field n0 = cfg.initial_state();
    const Field r0 = ref.density(0.0);
    rec.hminus1_e0 = hminus1_norm(n0 - r0);
    for (const auto& nm : plan.norms) {
      NormRecord nr;
      nr.norm = nm.name();
      nr.e0 = nm.measure(n0, r0);
      nr.sup = -1.0;
      for (const auto& s : tr.snapshots) {
        const double e = nm.measure(s.density, ref.density(s.t));
        nr.errors.push_back(e);
        if (e > nr.sup) {
          nr.sup = e;
          nr.t_of_sup = s.t;
        }
      }
      rec.norms.push_back(std::move(nr));
    }
    for (const auto& s : tr.snapshots) {
      rec.times.push_back(s.t);
      rec.bv_max = std::max(rec.bv_max, s.bv);
    }
    if (plan.theorem3) {
      const Snapshot& last = tr.snapshots.back();
      const RelationResidual rr = relation_residual(last.density, last.pressure);
      rec.relation_raw = rr.raw;
      rec.relation_abs = rr.absolute;
      std::optional<Field> lap_v, g;
      if (cfg.drift) lap_v = drift_laplacian(cfg.grid, *cfg.drift);
      if (cfg.reaction)
        g = sample_centers(cfg.grid, [&](Point x) { return cfg.reaction->g(last.t, x); });
      rec.complementarity = complementarity_residual(
          last.density, last.pressure, lap_v, g,
          cfg.law.is_power() ? ComplementarityVariant::Power : ComplementarityVariant::Singular);
    }
  } catch (const Error& e) {
    rec.ok = false;
    rec.error_tag = std::string(tag(e.code()));
    rec.message = e.what();
  }
  return rec;
}

inline NormFit fit_norm(const NormSpec& nm, const std::vector<SweepRecord>& recs) {
  NormFit nf;
  nf.norm = nm.name();
  nf.expected = nm.expected_exponent();
  std::vector<std::pair<double, double>> raw, adj;
  bool all_zero = true;
  for (const auto& r : recs) {
    if (!r.ok) continue;
    const NormRecord* e = r.find(nf.norm);
    if (!e) continue;
    const double a = std::max(0.0, e->sup - e->e0);
    if (a > 0.0) all_zero = false;
    if (e->sup > 0.0) raw.emplace_back(r.axis, e->sup);
    if (a > 0.0) adj.emplace_back(r.axis, a);
    if (nf.expected) nf.C = std::max(nf.C, a * std::pow(r.axis, *nf.expected));
  }
  nf.degenerate = all_zero;
  if (raw.size() >= 2) nf.raw = fit_rate(raw);
  if (adj.size() >= 2) nf.adjusted = fit_rate(adj);
  if (adj.size() >= 3) {
    auto trimmed = adj;
    trimmed.pop_back();
    nf.slope_without_last = fit_rate(trimmed).slope;
  }
  return nf;
}

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace detail

/// Ḣ⁻¹ rate verdict: adjusted slope <= -expected + tol, R² >= r2_min, and one
/// constant C with error <= C x^(-1/2) + e0 at every point.
inline Verdict rate_verdict(const std::string& name, const NormFit& nf, double tol, double r2_min,
                            const std::vector<SweepRecord>& recs) {
  Verdict v;
  v.name = name;
  const double target = -*nf.expected + tol;
  if (nf.degenerate) {
    v.pass = true;
    v.degenerate = true;
    v.detail = "all adjusted errors are zero";
    return v;
  }
  if (!nf.adjusted) {
    v.detail = "fewer than two positive adjusted errors";
    return v;
  }
  bool bound = true;
  for (const auto& r : recs) {
    if (!r.ok) continue;
    const NormRecord* e = r.find(nf.norm);
    if (e && e->sup > nf.C * std::pow(r.axis, -*nf.expected) + e->e0 + 1e-14 * (1.0 + e->sup))
      bound = false;
  }
  v.margin = target - nf.adjusted->slope;
  v.pass = nf.adjusted->slope <= target && nf.adjusted->r2 >= r2_min && bound;
  v.detail = "slope " + detail::fmt(nf.adjusted->slope) + " vs " + detail::fmt(target) + ", R2 " +
             detail::fmt(nf.adjusted->r2) + ", C " + detail::fmt(nf.C);
  return v;
}

/// L^{4/3} verdict: slope <= -1/4 + tol, or the bound error <= C x^(-1/4) +
/// e0_H^{1/2} at every point with C anchored at the least stiff point.
inline Verdict l43_verdict(const NormFit& nf, double tol, const std::vector<SweepRecord>& recs) {
  Verdict v;
  v.name = "theorem2_l43";
  if (nf.degenerate) {
    v.pass = v.degenerate = true;
    v.detail = "all adjusted errors are zero";
    return v;
  }
  const double target = -0.25 + tol;
  const bool slope_ok = nf.adjusted && nf.adjusted->slope <= target;
  std::optional<double> C;
  bool bound = true;
  for (const auto& r : recs) {
    if (!r.ok) continue;
    const NormRecord* e = r.find(nf.norm);
    if (!e) continue;
    const double data = std::sqrt(r.hminus1_e0);
    if (!C) {
      C = std::max(0.0, e->sup - data) * std::pow(r.axis, 0.25);
      continue;
    }
    if (e->sup > *C * std::pow(r.axis, -0.25) + data + 1e-12) bound = false;
  }
  v.pass = slope_ok || (C && bound);
  v.margin = nf.adjusted ? target - nf.adjusted->slope : 0.0;
  v.detail = "slope " + (nf.adjusted ? detail::fmt(nf.adjusted->slope) : std::string("n/a")) +
             " vs " + detail::fmt(target) + ", anchored bound " + (bound ? "holds" : "fails");
  return v;
}

/// Limit-relation verdicts on the final snapshots: relation residual positive,
/// strictly decreasing and small relative to the first; complementarity
/// residual of the stiffest run below a fraction of the softest.
inline std::vector<Verdict> theorem3_verdicts(const SweepPlan& plan,
                                              const std::vector<SweepRecord>& recs) {
  std::vector<const SweepRecord*> ok;
  for (const auto& r : recs)
    if (r.ok) ok.push_back(&r);
  Verdict rel, comp;
  rel.name = "theorem3_relation";
  comp.name = "complementarity";
  if (ok.size() < 2) {
    rel.detail = comp.detail = "fewer than two successful runs";
    return {rel, comp};
  }
  bool positive = true, decreasing = true;
  for (std::size_t i = 0; i < ok.size(); ++i) {
    if (!(ok[i]->relation_raw > 0.0)) positive = false;
    if (i > 0 && !(ok[i]->relation_raw < ok[i - 1]->relation_raw)) decreasing = false;
  }
  const double first = ok.front()->relation_raw, last = ok.back()->relation_raw;
  rel.margin = plan.relation_ratio * first - last;
  rel.pass = positive && decreasing && last < plan.relation_ratio * first;
  rel.degenerate = first == 0.0 && last == 0.0;
  if (rel.degenerate) rel.pass = true;
  rel.detail = "ratio " + detail::fmt(first > 0 ? last / first : 0.0) + (positive ? "" : ", not positive") +
               (decreasing ? "" : ", not decreasing");
  const double c0 = ok.front()->complementarity, c1 = ok.back()->complementarity;
  comp.margin = plan.complementarity_ratio * c0 - c1;
  comp.degenerate = c0 == 0.0 && c1 == 0.0;
  comp.pass = comp.degenerate || c1 < plan.complementarity_ratio * c0;
  comp.detail = "ratio " + detail::fmt(c0 > 0 ? c1 / c0 : 0.0);
  return {rel, comp};
}

/// Runs every sweep entry (optionally in parallel, merged in parameter order),
/// fits the rates and evaluates the verdicts.
inline RateReport run_sweep(const SweepPlan& plan, const SolveFn& solver = solve,
                            std::optional<LimitReference> reference = std::nullopt) {
  plan.validate();
  const LimitReference ref = reference ? *reference : detail::build_reference(plan);
  RateReport rep;
  rep.axis_name = plan.power_axis() ? "gamma" : "1/epsilon";
  rep.records.resize(plan.parameters.size());
  detail::parallel_for(plan.parameters.size(), plan.threads, [&](std::size_t i) {
    rep.records[i] = detail::measure_entry(plan, ref, solver, plan.parameters[i]);
  });
  for (const auto& nm : plan.norms) rep.fits.push_back(detail::fit_norm(nm, rep.records));

  for (const auto& nf : rep.fits) {
    if (!plan.rate_verdicts) break;
    if (nf.norm == "hminus1")
      rep.verdicts.push_back(rate_verdict(plan.power_axis() ? "theorem1_hminus1" : "singular_hminus1",
                                          nf, plan.slope_tol, plan.r2_min, rep.records));
  }
  for (const auto& nf : rep.fits)
    if (plan.rate_verdicts && nf.norm == "l43" && plan.power_axis())
      rep.verdicts.push_back(l43_verdict(nf, plan.slope_tol, rep.records));
  for (std::size_t k = 0; k < plan.norms.size(); ++k) {
    const NormSpec& nm = plan.norms[k];
    if (!plan.rate_verdicts || nm.kind != NormSpec::Kind::Lp || !(nm.p > 1.0) || !plan.power_axis())
      continue;
    const NormFit& nf = rep.fits[k];
    Verdict v;
    v.name = "corollary_" + nf.norm;
    const double target = -corollary_exponent(nm.p) + plan.slope_tol;
    if (nf.degenerate) {
      v.pass = v.degenerate = true;
    } else if (nf.adjusted) {
      v.margin = target - nf.adjusted->slope;
      v.pass = nf.adjusted->slope <= target;
      v.detail = "slope " + detail::fmt(nf.adjusted->slope) + " vs " + detail::fmt(target);
    } else {
      v.detail = "fewer than two positive adjusted errors";
    }
    rep.verdicts.push_back(v);
  }
  if (plan.theorem3)
    for (auto& v : theorem3_verdicts(plan, rep.records)) rep.verdicts.push_back(v);
  for (const auto& r : rep.records)
    if (!r.ok) rep.verdicts.push_back({"run_" + detail::fmt(r.parameter), false, false, 0.0,
                                       r.error_tag + ": " + r.message});
  return rep;
}

struct Theorem3Row {
  double parameter = 0.0;
  double relation_residual = 0.0;
  double relation_abs = 0.0;
  double complementarity_residual = 0.0;
};

inline std::vector<Theorem3Row> theorem3_rows(const RateReport& rep) {
  std::vector<Theorem3Row> rows;
  for (const auto& r : rep.records)
    if (r.ok) rows.push_back({r.parameter, r.relation_raw, r.relation_abs, r.complementarity});
  return rows;
}

inline std::vector<Theorem3Row> theorem3_sweep(SweepPlan plan, const SolveFn& solver = solve) {
  plan.theorem3 = true;
  return theorem3_rows(run_sweep(plan, solver));
}

// ---------------------------------------------------------------------------
// Sandwich and 2D diagnostics suites.

struct SandwichRow {
  int index = 0;
  SandwichResult result;
};

struct Diagnostics2DRow {
  double t = 0.0;
  Diagnostics2D diag;
};

struct AppendixOptions {
  int pairs = 100;
  int n_1d = 256;
  double n_lower = 0.5;
  int quantile_nodes = 10000;
  // 2D run
  bool run_2d = true;
  int n_2d = 64;
  double gamma_2d = 4.0;
  double drift_strength = 0.5;  // V = a|x|²/2, semiconvex with λ = 0 in d = 2
  double bump_radius = 0.6;
  double T_2d = 1.0;
};

struct AppendixReport {
  std::uint64_t seed = 0;
  std::vector<SandwichRow> sandwich;
  bool sandwich_pass = false;
  std::vector<Diagnostics2DRow> diagnostics;
  double second_moment_bound = 0.0;  // M2(0) + 2d M p_M T
  double entropy_bound = 0.0;        // S(0) + T M max(ΔV)₊
  double second_moment_max = 0.0;
  double entropy_max = 0.0;
  bool moments_pass = false;
  bool log_hls_pass = false;

  bool all_pass() const { return sandwich_pass && moments_pass && log_hls_pass; }
};

/// Random 1D density in [n_lower, 1] around the midpoint level with zero-mean
/// perturbation; all pairs therefore share the same mass.
inline Field random_sandwich_density(const Grid& g, double n_lower, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  Field f(g);
  const int style = int(U(rng) * 3.0);
  if (style == 0) {  // random Fourier modes
    const int modes = 1 + int(U(rng) * 6.0);
    for (int m = 0; m < modes; ++m) {
      const double k = 1 + std::floor(U(rng) * 12.0), ph = 2 * std::numbers::pi * U(rng);
      const double a = U(rng) / (1.0 + m);
      for (int i = 0; i < g.n; ++i) f[i] += a * std::sin(2 * std::numbers::pi * k * (i + 0.5) / g.n + ph);
    }
  } else if (style == 1) {  // random steps
    const int steps = 2 + int(U(rng) * 10.0);
    for (int s = 0; s < steps; ++s) {
      const int a = int(U(rng) * g.n), b = int(U(rng) * g.n);
      const double v = U(rng) - 0.5;
      for (int i = std::min(a, b); i < std::max(a, b); ++i) f[i] += v;
    }
  } else {  // cellwise noise
    for (int i = 0; i < g.n; ++i) f[i] = U(rng) - 0.5;
  }
  const double m = mean(f);
  double amp = 0.0;
  for (double& v : f.values) {
    v -= m;
    amp = std::max(amp, std::abs(v));
  }
  const double mid = 0.5 * (1.0 + n_lower), half = 0.5 * (1.0 - n_lower);
  const double scale = amp > 0.0 ? half * U(rng) / amp : 0.0;
  for (double& v : f.values) v = std::clamp(mid + scale * v, n_lower, 1.0);
  return f;
}

inline AppendixReport appendix_suites(std::uint64_t seed, const AppendixOptions& opt = {}) {
  AppendixReport rep;
  rep.seed = seed;
  std::mt19937_64 rng(seed);
  const Grid g1 = make_grid_1d(0.0, 1.0, opt.n_1d, Boundary::DirichletZero);
  rep.sandwich_pass = true;
  for (int k = 0; k < opt.pairs; ++k) {
    Field f = random_sandwich_density(g1, opt.n_lower, rng);
    Field g = random_sandwich_density(g1, opt.n_lower, rng);
    // clamping can move the mass by rounding; restore it exactly on g's mean level
    const double dm = (mass(f) - mass(g)) / (g1.hi[0] - g1.lo[0]);
    for (double& v : g.values) v = std::clamp(v + dm, opt.n_lower, 1.0);
    SandwichRow row{k, sandwich_check(f, g, opt.n_lower, opt.quantile_nodes)};
    rep.sandwich_pass = rep.sandwich_pass && row.result.left_ok && row.result.right_ok;
    rep.sandwich.push_back(row);
  }
  if (!opt.run_2d) {
    rep.moments_pass = rep.log_hls_pass = true;
    return rep;
  }
  SimConfig cfg;
  cfg.grid = make_grid_2d({-1.5, -1.5}, {1.5, 1.5}, opt.n_2d, Boundary::DirichletZero);
  cfg.law = PressureLaw::power(opt.gamma_2d);
  cfg.drift = quadratic_drift(opt.drift_strength);
  cfg.drift->lambda = 0.0;
  cfg.T = opt.T_2d;
  cfg.init.kind = InitialDatum::Kind::Bump;
  cfg.init.radius = opt.bump_radius;
  cfg.init.height = 1.0;
  cfg.p_max_auto = true;
  cfg = resolve(cfg);
  const Trajectory tr = solve(cfg);
  const double lap_v = 2.0 * opt.drift_strength;  // ΔV in d = 2
  rep.log_hls_pass = true;
  for (const auto& s : tr.snapshots) {
    Diagnostics2DRow row{s.t, diagnostics_2d(s.density)};
    rep.log_hls_pass = rep.log_hls_pass && row.diag.log_hls_ok;
    rep.second_moment_max = std::max(rep.second_moment_max, row.diag.second_moment);
    rep.entropy_max = rep.diagnostics.empty() ? row.diag.entropy
                                              : std::max(rep.entropy_max, row.diag.entropy);
    rep.diagnostics.push_back(row);
  }
  const Diagnostics2D& d0 = rep.diagnostics.front().diag;
  rep.second_moment_bound = d0.second_moment + 2.0 * 2.0 * d0.mass * cfg.law.p_max * cfg.T;
  rep.entropy_bound = d0.entropy + cfg.T * d0.mass * std::max(0.0, lap_v);
  const double tol = 1e-6 * (1.0 + std::abs(d0.entropy));
  rep.moments_pass = std::isfinite(rep.second_moment_max) && std::isfinite(rep.entropy_max) &&
                     rep.second_moment_max <= rep.second_moment_bound + tol &&
                     rep.entropy_max <= rep.entropy_bound + tol;
  return rep;
}

}  // namespace stiffpress
