#pragma once
// Norms, distances and inequality checks used to measure convergence:
// Ḣ⁻¹ through the lifted Laplacian, Lᵖ, BV, 1D W₂, the W₂/Ḣ⁻¹ sandwich, the
// L^{4/3} interpolation ratio, limit-relation and complementarity residuals,
// and the 2D moment/entropy/log-HLS diagnostics.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "stiffpress/core.hpp"
#include "stiffpress/poisson.hpp"

namespace stiffpress {

// ---------------------------------------------------------------------------
// Norms.

/// ‖f‖_{Ḣ⁻¹} = ‖∇φ‖_{L²} with -Δφ = f on the grid's boundary condition.
inline double hminus1_norm(const Field& f) {
  const PoissonSolution sol = solve_poisson(f);
  return std::sqrt(std::max(0.0, dot(sol.grad_phi, sol.grad_phi)));
}

/// Whole-line Ḣ⁻¹ norm of a zero-mass 1D field: the L² norm of its
/// cumulative mass, integrated exactly for piecewise-constant data.
inline double hminus1_norm_free_1d(const Field& f) {
  if (f.grid.dim != 1) fail(ErrorCode::InvalidArgument, "free-space Ḣ⁻¹ needs d = 1");
  const double h = f.grid.h();
  double F = 0.0, acc = 0.0, scale = 0.0;
  for (double v : f.values) {
    const double next = F + h * v;
    acc += (F * F + F * next + next * next) / 3.0;
    F = next;
    scale += h * std::abs(v);
  }
  if (std::abs(F) > 1e-10 * std::max(1.0, scale))
    fail(ErrorCode::NonZeroMean, "free-space Ḣ⁻¹ needs a zero-mass field");
  return std::sqrt(h * acc);
}

inline double lp_norm(const Field& f, double p) {
  if (!(p >= 1.0)) fail(ErrorCode::InvalidArgument, "lp_norm needs p >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
  }
  double s = 0.0;
  for (double v : f.values) s += std::pow(std::abs(v), p);
  return std::pow(f.grid.cell_volume() * s, 1.0 / p);
}

/// Anisotropic total variation h^(d-1) Σ_faces |jump|, ghost cells included.
inline double bv_seminorm(const Field& f) {
  const VectorField g = gradient(f);
  const Grid& grid = f.grid;
  const bool periodic = grid.bc == Boundary::Periodic;
  double s = 0.0;
  for (int ax = 0; ax < grid.dim; ++ax)
    for (int k = 0; k <= grid.n; ++k) {
      if (periodic && k == grid.n) continue;
      if (grid.dim == 1) {
        s += std::abs(g.comp[0][k]);
      } else {
        for (int j = 0; j < grid.n; ++j) s += std::abs(g.comp[ax][g.face_index(ax, k, j)]);
      }
    }
  return s * grid.cell_volume();
}

/// Isotropic total variation h^d Σ |∇f| with cell-averaged face gradients;
/// approximates the perimeter of a set from its volume-fraction field.
inline double isotropic_tv(const Field& f) {
  const VectorField g = gradient(f);
  const Grid& grid = f.grid;
  const int n = grid.n;
  double s = 0.0;
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    double q = 0.0;
    if (grid.dim == 1) {
      const int i = int(idx);
      const double gx = 0.5 * (g.comp[0][i] + g.comp[0][i + 1]);
      q = gx * gx;
    } else {
      const int i = int(idx / n), j = int(idx % n);
      const double gx = 0.5 * (g.comp[0][g.face_index(0, i, j)] + g.comp[0][g.face_index(0, i + 1, j)]);
      const double gy = 0.5 * (g.comp[1][g.face_index(1, j, i)] + g.comp[1][g.face_index(1, j + 1, i)]);
      q = gx * gx + gy * gy;
    }
    s += std::sqrt(q);
  }
  return s * grid.cell_volume();
}

// ---------------------------------------------------------------------------
// One-dimensional Wasserstein distance.

namespace detail {

inline void require_w2_inputs(const Field& f, const Field& g) {
  require_same_grid(f, g);
  if (f.grid.dim != 1) fail(ErrorCode::InvalidArgument, "w2_distance_1d needs d = 1");
  if (f.min() < 0.0 || g.min() < 0.0)
    fail(ErrorCode::InvalidArgument, "w2_distance_1d needs non-negative densities");
  const double mf = mass(f), mg = mass(g);
  if (std::abs(mf - mg) > 1e-10 * std::max(1.0, mf))
    fail(ErrorCode::MassMismatch, "w2_distance_1d needs equal masses");
  if (!(mf > 0.0)) fail(ErrorCode::InvalidArgument, "w2_distance_1d needs positive mass");
}

/// Pseudo-inverse of the piecewise-linear CDF of a cell-constant density.
class Quantile {
 public:
  explicit Quantile(const Field& f) : lo_(f.grid.lo[0]), h_(f.grid.h()), values_(f.values) {
    cdf_.resize(values_.size() + 1, 0.0);
    for (std::size_t i = 0; i < values_.size(); ++i) cdf_[i + 1] = cdf_[i] + h_ * values_[i];
  }
  double total() const { return cdf_.back(); }

  /// Smallest x with CDF(x) >= m.
  double operator()(double m) const {
    auto it = std::lower_bound(cdf_.begin() + 1, cdf_.end(), m);
    if (it == cdf_.end()) --it;
    const std::size_t i = std::size_t(it - cdf_.begin()) - 1;
    const double a = lo_ + double(i) * h_;
    if (values_[i] <= 0.0) return a + h_;
    return a + std::clamp((m - cdf_[i]) / values_[i], 0.0, h_);
  }

 private:
  double lo_, h_;
  std::vector<double> values_;
  std::vector<double> cdf_;
};

inline double w2_midpoint(const Field& f, const Field& g, int nodes) {
  const Quantile qf(f), qg(g);
  const double M = qf.total();
  double acc = 0.0;
  for (int j = 0; j < nodes; ++j) {
    const double m = M * (j + 0.5) / nodes;
    const double d = qf(m * qf.total() / M) - qg(m * qg.total() / M);
    acc += d * d;
  }
  return std::sqrt(M * acc / nodes);
}

}  // namespace detail

struct W2Result {
  double value = 0.0;
  double resolution_error = 0.0;  // |W(nodes) - W(nodes/2)|
};

/// W₂ between equal-mass cell-constant densities via quantile functions at
/// `nodes` midpoint quantile levels; W₂² = M ∫₀¹ |Q_f - Q_g|² dq.
inline W2Result w2_distance_1d_with_error(const Field& f, const Field& g, int nodes = 10000) {
  detail::require_w2_inputs(f, g);
  if (nodes < 2) fail(ErrorCode::InvalidArgument, "w2 needs at least 2 quantile nodes");
  W2Result r;
  r.value = detail::w2_midpoint(f, g, nodes);
  r.resolution_error = std::abs(r.value - detail::w2_midpoint(f, g, nodes / 2));
  return r;
}

inline double w2_distance_1d(const Field& f, const Field& g, int nodes = 10000) {
  detail::require_w2_inputs(f, g);
  return detail::w2_midpoint(f, g, nodes);
}

// ---------------------------------------------------------------------------
// W₂ versus Ḣ⁻¹.

struct SandwichResult {
  double w2 = 0.0;
  double hm1 = 0.0;
  double tol = 0.0;
  bool left_ok = false;   // hm1 <= w2 + tol
  bool right_ok = false;  // w2 <= (2/√n_lower) hm1 + tol
};

/// Checks ‖f - g‖_{Ḣ⁻¹} <= W₂(f, g) <= (2/√n_lower) ‖f - g‖_{Ḣ⁻¹} for 1D
/// densities bounded by 1 with g >= n_lower. Ḣ⁻¹ is the whole-line norm.
inline SandwichResult sandwich_check(const Field& f, const Field& g, double n_lower,
                                     int nodes = 10000) {
  if (!(n_lower > 0.0)) fail(ErrorCode::InvalidArgument, "sandwich_check needs n_lower > 0");
  detail::require_w2_inputs(f, g);
  if (g.min() < n_lower)
    fail(ErrorCode::InvalidArgument, "sandwich_check needs min(g) >= n_lower");
  if (f.max() > 1.0 + 1e-12 || g.max() > 1.0 + 1e-12)
    fail(ErrorCode::InvalidArgument, "sandwich_check needs densities bounded by 1");
  const W2Result w = w2_distance_1d_with_error(f, g, nodes);
  SandwichResult r;
  r.w2 = w.value;
  r.hm1 = hminus1_norm_free_1d(f - g);
  r.tol = 1e-6 + w.resolution_error;
  r.left_ok = r.hm1 <= r.w2 + r.tol;
  r.right_ok = r.w2 <= 2.0 / std::sqrt(n_lower) * r.hm1 + r.tol;
  return r;
}

// ---------------------------------------------------------------------------
// Interpolation inequality ‖n‖_{4/3} <= C |n|_BV^{1/2} ‖∇φ‖^{1/2}.

inline double interpolation_ratio(const Field& f) {
  if (f.min() < 0.0) fail(ErrorCode::InvalidArgument, "interpolation_ratio needs f >= 0");
  if (f.max() <= 0.0) fail(ErrorCode::InvalidArgument, "interpolation_ratio of the zero field");
  Field src = f;
  if (f.grid.bc == Boundary::Periodic) {
    const double m = mean(f);
    for (double& v : src.values) v -= m;
  }
  const double bv = bv_seminorm(f);
  const double hm1 = hminus1_norm(src);
  if (!(bv > 0.0) || !(hm1 > 0.0))
    fail(ErrorCode::InvalidArgument, "interpolation_ratio undefined for constant fields");
  return lp_norm(f, 4.0 / 3.0) / (std::sqrt(bv) * std::sqrt(hm1));
}

// ---------------------------------------------------------------------------
// Limit relation and complementarity residuals.

struct RelationResidual {
  double raw = 0.0;       // h^d Σ p (1 - n)
  double absolute = 0.0;  // h^d Σ |p (1 - n)|
};

inline RelationResidual relation_residual(const Field& n, const Field& p) {
  require_same_grid(n, p);
  RelationResidual r;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double v = p[i] * (1.0 - n[i]);
    r.raw += v;
    r.absolute += std::abs(v);
  }
  const double vol = n.grid.cell_volume();
  r.raw *= vol;
  r.absolute *= vol;
  return r;
}

enum class ComplementarityVariant { Power, Singular };

/// Smooth compactly supported test function ψ(x) = Π_a b((x_a - c_a)/w) with
/// b(s) = exp(1 - 1/(1 - s²)) on |s| < 1.
struct TestBump {
  Point center{0.0, 0.0};
  double width = 1.0;

  static double b(double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
  }
  static double b2(double s) {  // b''(s)
    if (std::abs(s) >= 1.0) return 0.0;
    const double u = 1.0 - s * s;
    return b(s) * (4.0 * s * s / (u * u * u * u) - 2.0 / (u * u) - 8.0 * s * s / (u * u * u));
  }

  double value(Point x, int dim) const {
    double v = b((x[0] - center[0]) / width);
    if (dim == 2) v *= b((x[1] - center[1]) / width);
    return v;
  }
  double laplacian(Point x, int dim) const {
    const double sx = (x[0] - center[0]) / width;
    const double w2 = width * width;
    if (dim == 1) return b2(sx) / w2;
    const double sy = (x[1] - center[1]) / width;
    return (b2(sx) * b(sy) + b(sx) * b2(sy)) / w2;
  }
};

/// The fixed dictionary of eight test functions, placed relative to the box.
inline std::vector<TestBump> test_dictionary(const Grid& g) {
  // (centre fraction x, centre fraction y, width fraction) of the box length.
  static constexpr std::array<std::array<double, 3>, 8> k1d{{{0.5, 0.5, 0.10},
                                                             {0.5, 0.5, 0.20},
                                                             {0.5, 0.5, 0.30},
                                                             {0.42, 0.5, 0.08},
                                                             {0.58, 0.5, 0.08},
                                                             {0.36, 0.5, 0.12},
                                                             {0.64, 0.5, 0.12},
                                                             {0.5, 0.5, 0.45}}};
  static constexpr std::array<std::array<double, 3>, 8> k2d{{{0.5, 0.5, 0.20},
                                                             {0.5, 0.5, 0.35},
                                                             {0.4, 0.5, 0.15},
                                                             {0.6, 0.5, 0.15},
                                                             {0.5, 0.4, 0.15},
                                                             {0.5, 0.6, 0.15},
                                                             {0.35, 0.35, 0.25},
                                                             {0.65, 0.65, 0.25}}};
  const auto& table = g.dim == 1 ? k1d : k2d;
  const double L = g.hi[0] - g.lo[0];
  std::vector<TestBump> out;
  for (const auto& e : table) {
    TestBump tb;
    tb.center = {g.lo[0] + e[0] * L, g.dim == 2 ? g.lo[1] + e[1] * L : 0.0};
    tb.width = e[2] * L;
    out.push_back(tb);
  }
  return out;
}

/// max over the dictionary of |⟨p^k (Δp + ΔV + g), ψ⟩| in weak form, with the
/// Laplacian of p moved onto ψ:
///   k = 1:  ½⟨p², Δψ⟩ - ⟨ψ, |∇p|²⟩ + ⟨ψ p, ΔV + g⟩
///   k = 2:  ⅓⟨p³, Δψ⟩ - 2⟨ψ p, |∇p|²⟩ + ⟨ψ p², ΔV + g⟩
/// `lap_v` and `g` are optional cell fields (ΔV and the growth rate).
inline double complementarity_residual(const Field& n, const Field& p,
                                       const std::optional<Field>& lap_v,
                                       const std::optional<Field>& g,
                                       ComplementarityVariant variant) {
  require_same_grid(n, p);
  const Grid& grid = p.grid;
  if (lap_v) require_same_grid(p, *lap_v);
  if (g) require_same_grid(p, *g);
  const VectorField gp = gradient(p);
  const int nn = grid.n;
  std::vector<double> grad_sq(p.size(), 0.0);
  for (std::size_t idx = 0; idx < p.size(); ++idx) {
    if (grid.dim == 1) {
      const int i = int(idx);
      grad_sq[idx] = 0.5 * (gp.comp[0][i] * gp.comp[0][i] + gp.comp[0][i + 1] * gp.comp[0][i + 1]);
    } else {
      const int i = int(idx / nn), j = int(idx % nn);
      const double a = gp.comp[0][gp.face_index(0, i, j)], b = gp.comp[0][gp.face_index(0, i + 1, j)];
      const double c = gp.comp[1][gp.face_index(1, j, i)], d = gp.comp[1][gp.face_index(1, j + 1, i)];
      grad_sq[idx] = 0.5 * (a * a + b * b) + 0.5 * (c * c + d * d);
    }
  }
  const bool singular = variant == ComplementarityVariant::Singular;
  double worst = 0.0;
  for (const TestBump& psi : test_dictionary(grid)) {
    double acc = 0.0;
    for (std::size_t idx = 0; idx < p.size(); ++idx) {
      const Point x = grid.center_of(idx);
      const double pv = p[idx];
      const double w = psi.value(x, grid.dim);
      const double lw = psi.laplacian(x, grid.dim);
      const double source = (lap_v ? (*lap_v)[idx] : 0.0) + (g ? (*g)[idx] : 0.0);
      if (!singular) {
        acc += 0.5 * pv * pv * lw - w * grad_sq[idx] + w * pv * source;
      } else {
        acc += pv * pv * pv * lw / 3.0 - 2.0 * w * pv * grad_sq[idx] + w * pv * pv * source;
      }
    }
    worst = std::max(worst, std::abs(acc * grid.cell_volume()));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Two-dimensional diagnostics.

struct Diagnostics2D {
  double mass = 0.0;
  double second_moment = 0.0;
  double entropy = 0.0;
  double log_hls_lhs = 0.0;
  double log_hls_bound = 0.0;  // -C(M) = -M (1 + ln π - ln M)
  bool log_hls_ok = false;
};

/// Second moment, entropy and the log-HLS left-hand side
/// ∫ n ln n + (2/M) ∬ n(x) n(y) ln|x - y| (direct O(N⁴) pair sum, x ≠ y).
inline Diagnostics2D diagnostics_2d(const Field& f, double tol = 1e-9) {
  const Grid& g = f.grid;
  if (g.dim != 2) fail(ErrorCode::InvalidArgument, "diagnostics_2d needs d = 2");
  if (f.min() < 0.0) fail(ErrorCode::InvalidArgument, "diagnostics_2d needs f >= 0");
  Diagnostics2D d;
  d.mass = mass(f);
  if (!(d.mass > 0.0)) fail(ErrorCode::InvalidArgument, "diagnostics_2d needs positive mass");
  const double vol = g.cell_volume();
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double v = f[i];
    if (v <= 0.0) continue;
    support.push_back(i);
    const Point x = g.center_of(i);
    d.second_moment += (x[0] * x[0] + x[1] * x[1]) * v;
    d.entropy += v * std::log(v);
  }
  d.second_moment *= vol;
  d.entropy *= vol;
  double pair = 0.0;
  for (std::size_t a = 0; a < support.size(); ++a) {
    const Point xa = g.center_of(support[a]);
    const double va = f[support[a]];
    double row = 0.0;
    for (std::size_t b = a + 1; b < support.size(); ++b) {
      const Point xb = g.center_of(support[b]);
      const double dx = xa[0] - xb[0], dy = xa[1] - xb[1];
      row += f[support[b]] * 0.5 * std::log(dx * dx + dy * dy);
    }
    pair += 2.0 * va * row;  // each unordered pair counted twice
  }
  d.log_hls_lhs = d.entropy + 2.0 / d.mass * vol * vol * pair;
  d.log_hls_bound = -d.mass * (1.0 + std::log(std::numbers::pi) - std::log(d.mass));
  d.log_hls_ok = d.log_hls_lhs >= d.log_hls_bound - tol;
  return d;
}

}  // namespace stiffpress
