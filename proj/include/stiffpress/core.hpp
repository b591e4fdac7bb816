#pragma once
// Uniform cell-centred grids, fields and the discrete calculus shared by every
// other module.
//
// Layout: values are stored row-major with axis 0 slowest, i.e. cell (i, j) of
// a 2D grid lives at index i * n + j.  Fluxes and gradients live on faces:
// along axis a there are n + 1 faces, face f separating cells f - 1 and f.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "stiffpress/error.hpp"

namespace stiffpress {

enum class Boundary { Periodic, DirichletZero };

inline std::string to_string(Boundary bc) {
  return bc == Boundary::Periodic ? "periodic" : "dirichlet";
}

using Point = std::array<double, 2>;

struct Grid {
  int dim = 1;
  Point lo{0.0, 0.0};
  Point hi{1.0, 1.0};
  int n = 4;  // cells per axis
  Boundary bc = Boundary::DirichletZero;

  double h() const { return (hi[0] - lo[0]) / n; }
  double cell_volume() const { return std::pow(h(), dim); }
  std::size_t size() const { return dim == 1 ? std::size_t(n) : std::size_t(n) * n; }

  /// Number of face values stored per axis component.
  std::size_t face_count() const {
    return dim == 1 ? std::size_t(n) + 1 : (std::size_t(n) + 1) * n;
  }

  double center(int axis, int i) const { return lo[axis] + (i + 0.5) * h(); }

  Point center_of(std::size_t idx) const {
    if (dim == 1) return {center(0, int(idx)), 0.0};
    return {center(0, int(idx / n)), center(1, int(idx % n))};
  }

  bool operator==(const Grid& o) const {
    if (dim != o.dim || n != o.n || bc != o.bc) return false;
    for (int a = 0; a < dim; ++a)
      if (lo[a] != o.lo[a] || hi[a] != o.hi[a]) return false;
    return true;
  }

  void validate() const {
    if (dim != 1 && dim != 2) fail(ErrorCode::InvalidGrid, "grid dim must be 1 or 2");
    if (n < 4) fail(ErrorCode::InvalidGrid, "grid needs at least 4 cells per axis");
    for (int a = 0; a < dim; ++a) {
      if (!std::isfinite(lo[a]) || !std::isfinite(hi[a]) || !(hi[a] > lo[a]))
        fail(ErrorCode::InvalidGrid, "grid requires finite hi > lo on every axis");
    }
    if (dim == 2) {
      const double w0 = hi[0] - lo[0], w1 = hi[1] - lo[1];
      if (std::abs(w0 - w1) > 1e-12 * std::max(w0, w1))
        fail(ErrorCode::InvalidGrid, "cell width must be identical on all axes");
    }
  }
};

inline Grid make_grid_1d(double lo, double hi, int n, Boundary bc) {
  Grid g{1, {lo, 0.0}, {hi, 0.0}, n, bc};
  g.validate();
  return g;
}

inline Grid make_grid_2d(Point lo, Point hi, int n, Boundary bc) {
  Grid g{2, lo, hi, n, bc};
  g.validate();
  return g;
}

/// Cell-averaged scalar on a grid.
struct Field {
  Grid grid;
  std::vector<double> values;

  Field() = default;
  explicit Field(const Grid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
  Field(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size())
      fail(ErrorCode::InvalidArgument, "field size does not match grid");
  }

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }

  double max() const { return *std::max_element(values.begin(), values.end()); }
  double min() const { return *std::min_element(values.begin(), values.end()); }
  bool all_finite() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
  }
};

/// Face-located vector field, one component per axis.
struct VectorField {
  Grid grid;
  std::array<std::vector<double>, 2> comp;

  VectorField() = default;
  explicit VectorField(const Grid& g, double fill = 0.0) : grid(g) {
    for (int a = 0; a < g.dim; ++a) comp[a].assign(g.face_count(), fill);
  }

  /// Index of face f along `axis` at transverse cell index j (2D only).
  std::size_t face_index(int axis, int f, int j) const {
    const int n = grid.n;
    if (grid.dim == 1) return std::size_t(f);
    return axis == 0 ? std::size_t(f) * n + j : std::size_t(j) * (n + 1) + f;
  }
};

inline void require_same_grid(const Field& a, const Field& b) {
  if (!(a.grid == b.grid)) fail(ErrorCode::InvalidArgument, "fields live on different grids");
}

// ---------------------------------------------------------------------------
// Element-wise helpers.

inline Field operator+(const Field& a, const Field& b) {
  require_same_grid(a, b);
  Field r(a.grid);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Field operator-(const Field& a, const Field& b) {
  require_same_grid(a, b);
  Field r(a.grid);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Field operator*(double s, const Field& a) {
  Field r(a.grid);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

template <class F>
Field map(const Field& a, F&& fn) {
  Field r(a.grid);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = fn(a[i]);
  return r;
}

// ---------------------------------------------------------------------------
// Sampling.

/// Point values at cell centres.
inline Field sample_centers(const Grid& g, const std::function<double(Point)>& fn) {
  Field r(g);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = fn(g.center_of(i));
  return r;
}

/// Cell averages by tensor Gauss-Legendre quadrature with `sub` sub-cells per
/// axis. Fine for smooth data; discontinuous data should use exact samplers.
inline Field sample_cell_average(const Grid& g, const std::function<double(Point)>& fn,
                                 int sub = 2) {
  using Rule = boost::math::quadrature::gauss<double, 8>;
  const auto& abs = Rule::abscissa();
  const auto& wts = Rule::weights();
  // Expand the symmetric half-rule into full nodes on [-1, 1].
  std::vector<double> x, w;
  for (std::size_t k = 0; k < abs.size(); ++k) {
    x.push_back(abs[k]);
    w.push_back(wts[k]);
    if (abs[k] != 0.0) {
      x.push_back(-abs[k]);
      w.push_back(wts[k]);
    }
  }
  const double h = g.h();
  const double hs = h / sub;
  Field r(g);
  for (std::size_t idx = 0; idx < r.size(); ++idx) {
    const Point c = g.center_of(idx);
    double acc = 0.0;
    if (g.dim == 1) {
      for (int s = 0; s < sub; ++s) {
        const double mid = c[0] - 0.5 * h + (s + 0.5) * hs;
        for (std::size_t k = 0; k < x.size(); ++k)
          acc += 0.5 * w[k] * fn({mid + 0.5 * hs * x[k], 0.0});
      }
      r[idx] = acc / sub;
    } else {
      for (int s = 0; s < sub; ++s)
        for (int t = 0; t < sub; ++t) {
          const double mx = c[0] - 0.5 * h + (s + 0.5) * hs;
          const double my = c[1] - 0.5 * h + (t + 0.5) * hs;
          for (std::size_t k = 0; k < x.size(); ++k)
            for (std::size_t l = 0; l < x.size(); ++l)
              acc += 0.25 * w[k] * w[l] * fn({mx + 0.5 * hs * x[k], my + 0.5 * hs * x[l]});
        }
      r[idx] = acc / (sub * sub);
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Discrete calculus.

namespace detail {

/// Value of f at cell (i, j) honouring the boundary condition for indices one
/// cell outside the box.
inline double at(const Field& f, int i, int j) {
  const Grid& g = f.grid;
  const int n = g.n;
  if (g.bc == Boundary::Periodic) {
    i = (i + n) % n;
    j = (j + n) % n;
  } else if (i < 0 || i >= n || (g.dim == 2 && (j < 0 || j >= n))) {
    return 0.0;
  }
  return g.dim == 1 ? f.values[std::size_t(i)] : f.values[std::size_t(i) * n + j];
}

}  // namespace detail

/// Face-centred differences: component a at face f is (f_c - f_{c-1}) / h.
inline VectorField gradient(const Field& f) {
  const Grid& g = f.grid;
  const double inv_h = 1.0 / g.h();
  const int n = g.n;
  VectorField r(g);
  if (g.dim == 1) {
    for (int k = 0; k <= n; ++k)
      r.comp[0][k] = (detail::at(f, k, 0) - detail::at(f, k - 1, 0)) * inv_h;
    return r;
  }
  for (int k = 0; k <= n; ++k)
    for (int j = 0; j < n; ++j) {
      r.comp[0][r.face_index(0, k, j)] = (detail::at(f, k, j) - detail::at(f, k - 1, j)) * inv_h;
      r.comp[1][r.face_index(1, k, j)] = (detail::at(f, j, k) - detail::at(f, j, k - 1)) * inv_h;
    }
  return r;
}

/// Negative adjoint of `gradient`: cell value is the net outward face flux / h.
/// On periodic grids face n is identified with face 0.
inline Field divergence(const VectorField& F) {
  const Grid& g = F.grid;
  const double inv_h = 1.0 / g.h();
  const int n = g.n;
  const bool periodic = g.bc == Boundary::Periodic;
  Field r(g);
  auto right = [&](int c) { return periodic && c + 1 == n ? 0 : c + 1; };
  if (g.dim == 1) {
    for (int c = 0; c < n; ++c) r[c] = (F.comp[0][right(c)] - F.comp[0][c]) * inv_h;
    return r;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double dx = F.comp[0][F.face_index(0, right(i), j)] - F.comp[0][F.face_index(0, i, j)];
      const double dy = F.comp[1][F.face_index(1, right(j), i)] - F.comp[1][F.face_index(1, j, i)];
      r[std::size_t(i) * n + j] = (dx + dy) * inv_h;
    }
  return r;
}

/// Compact (2d+1)-point Laplacian, defined as divergence(gradient(f)).
inline Field laplacian(const Field& f) { return divergence(gradient(f)); }

/// Discrete L² inner product of face fields over the distinct faces.
inline double dot(const VectorField& a, const VectorField& b) {
  const Grid& g = a.grid;
  const int n = g.n;
  const bool periodic = g.bc == Boundary::Periodic;
  double s = 0.0;
  for (int ax = 0; ax < g.dim; ++ax)
    for (int k = 0; k <= n; ++k) {
      if (periodic && k == n) continue;
      if (g.dim == 1) {
        s += a.comp[0][k] * b.comp[0][k];
      } else {
        for (int j = 0; j < n; ++j) {
          const std::size_t idx = a.face_index(ax, k, j);
          s += a.comp[ax][idx] * b.comp[ax][idx];
        }
      }
    }
  return s * g.cell_volume();
}

/// Discrete L² inner product of cell fields.
inline double dot(const Field& a, const Field& b) {
  require_same_grid(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s * a.grid.cell_volume();
}

inline double sum(const Field& f) {
  return std::accumulate(f.values.begin(), f.values.end(), 0.0);
}

/// Total mass h^d * sum(values).
inline double mass(const Field& f) { return f.grid.cell_volume() * sum(f); }

inline double mean(const Field& f) { return sum(f) / double(f.size()); }

}  // namespace stiffpress
