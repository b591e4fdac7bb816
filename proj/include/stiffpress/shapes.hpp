#pragma once
// Exact volume-fraction samplers for intervals and discs.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "stiffpress/core.hpp"

namespace stiffpress {

inline double interval_overlap(double a, double b, double lo, double hi) {
  return std::max(0.0, std::min(b, hi) - std::max(a, lo));
}

/// Area of the disc of radius R centred at the origin intersected with the
/// rectangle [x0, x1] × [y0, y1], integrated exactly column by column.
inline double disc_rect_area(double R, double x0, double x1, double y0, double y1) {
  const double a = std::max(x0, -R), b = std::min(x1, R);
  if (!(b > a) || !(y1 > y0)) return 0.0;
  auto s = [R](double x) { return std::sqrt(std::max(0.0, R * R - x * x)); };
  auto S = [R](double x) {
    const double xc = std::clamp(x, -R, R);
    return 0.5 * (xc * std::sqrt(std::max(0.0, R * R - xc * xc)) + R * R * std::asin(xc / R));
  };
  std::vector<double> cuts{a, b};
  for (double y : {y0, y1}) {
    if (std::abs(y) < R) {
      const double xb = std::sqrt(R * R - y * y);
      for (double c : {-xb, xb})
        if (c > a && c < b) cuts.push_back(c);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double u = cuts[i], v = cuts[i + 1];
    if (!(v > u)) continue;
    const double mid = 0.5 * (u + v);
    const double sm = s(mid);
    const bool top_is_circle = sm < y1;
    const bool bottom_is_circle = -sm > y0;
    const double top = top_is_circle ? sm : y1;
    const double bottom = bottom_is_circle ? -sm : y0;
    if (top <= bottom) continue;
    const double circle = S(v) - S(u);
    double piece = 0.0;
    piece += top_is_circle ? circle : y1 * (v - u);
    piece -= bottom_is_circle ? -circle : y0 * (v - u);
    area += piece;
  }
  return area;
}

/// Indicator of [center - half_width, center + half_width] as exact cell fractions.
inline Field indicator_interval(const Grid& g, double center, double half_width,
                                double height = 1.0) {
  if (g.dim != 1) fail(ErrorCode::InvalidArgument, "indicator_interval needs a 1D grid");
  Field f(g);
  const double h = g.h();
  for (int i = 0; i < g.n; ++i) {
    const double a = g.lo[0] + i * h;
    const double lo = center - half_width, hi = center + half_width;
    // whole cells get the exact height; (a + h) - a is not always h
    f[i] = a >= lo && a + h <= hi ? height
                                  : height * std::min(1.0, interval_overlap(a, a + h, lo, hi) / h);
  }
  return f;
}

/// Indicator of the disc |x - center| < R as exact cell area fractions.
inline Field indicator_disc(const Grid& g, Point center, double R, double height = 1.0) {
  if (g.dim != 2) fail(ErrorCode::InvalidArgument, "indicator_disc needs a 2D grid");
  Field f(g);
  const double h = g.h();
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      const double x0 = g.lo[0] + i * h - center[0];
      const double y0 = g.lo[1] + j * h - center[1];
      const double fx = std::max(std::abs(x0), std::abs(x0 + h));
      const double fy = std::max(std::abs(y0), std::abs(y0 + h));
      f[std::size_t(i) * g.n + j] =
          fx * fx + fy * fy <= R * R
              ? height
              : height * std::clamp(disc_rect_area(R, x0, x0 + h, y0, y0 + h) / (h * h), 0.0, 1.0);
    }
  return f;
}

}  // namespace stiffpress
