#pragma once
// Barenblatt self-similar solution of ∂t U = Δ U^γ in d = 1, 2:
//
//   U(t, x) = t^(-α) (C - k |x|² t^(-2α/d))₊^(1/(γ-1)),
//   α = d / (d(γ-1) + 2),   k = α(γ-1) / (2dγ).
//
// C is found by bisection on the mass integral. The mass integral and the 1D
// cell averages both use the substitution |x| = r sin θ, which turns the
// profile into C^m cos^(2m) θ and removes the edge singularity.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "stiffpress/core.hpp"

namespace stiffpress {

class Barenblatt {
 public:
  Barenblatt(double gamma, double mass, int dim)
      : gamma_(gamma), mass_(mass), dim_(dim) {
    if (!(gamma > 1.0)) fail(ErrorCode::InvalidArgument, "barenblatt requires gamma > 1");
    if (!(mass > 0.0)) fail(ErrorCode::InvalidArgument, "barenblatt requires mass > 0");
    if (dim != 1 && dim != 2) fail(ErrorCode::InvalidArgument, "barenblatt supports d = 1, 2");
    m_ = 1.0 / (gamma - 1.0);
    alpha_ = dim / (dim * (gamma - 1.0) + 2.0);
    k_ = alpha_ * (gamma - 1.0) / (2.0 * dim * gamma);
    build_table();
    C_ = solve_normalization();
  }

  double gamma() const { return gamma_; }
  double mass() const { return mass_; }
  int dim() const { return dim_; }
  double alpha() const { return alpha_; }
  double k() const { return k_; }
  double C() const { return C_; }
  double exponent() const { return m_; }

  /// Support radius at time t.
  double radius(double t = 1.0) const {
    check_time(t);
    return std::sqrt(C_ / k_) * std::pow(t, alpha_ / dim_);
  }

  double operator()(double t, Point x) const {
    check_time(t);
    const double r2 = dim_ == 1 ? x[0] * x[0] : x[0] * x[0] + x[1] * x[1];
    const double base = C_ - k_ * r2 * std::pow(t, -2.0 * alpha_ / dim_);
    if (base <= 0.0) return 0.0;
    return std::pow(t, -alpha_) * std::exp(m_ * std::log(base));
  }

  double operator()(double t, double x) const { return (*this)(t, Point{x, 0.0}); }

  /// Mass as a function of the free constant; increasing in C.
  double mass_for(double C) const {
    const double r = std::sqrt(C / k_);
    const double cm = std::exp(m_ * std::log(C));
    if (dim_ == 1) return cm * r * 2.0 * G(std::numbers::pi / 2);
    return 2.0 * std::numbers::pi * r * r * cm * radial_integral();
  }

  /// Exact cell average over [a, b] (1D) at time t, centred at `center`.
  double cell_average_1d(double t, double a, double b, double center = 0.0) const {
    return integral_1d(t, a - center, b - center) / (b - a);
  }

  /// Cell averages on a grid. 1D is exact to quadrature accuracy and the cell
  /// masses telescope so the total equals the normalised mass.
  Field sample(const Grid& g, double t, Point center = {0.0, 0.0}) const {
    check_time(t);
    if (g.dim != dim_) fail(ErrorCode::InvalidArgument, "barenblatt grid dimension mismatch");
    if (dim_ == 1) {
      Field f(g);
      const double h = g.h();
      for (int i = 0; i < g.n; ++i) {
        const double a = g.lo[0] + i * h;
        f[i] = integral_1d(t, a - center[0], a + h - center[0]) / h;
      }
      return f;
    }
    return sample_cell_average(
        g, [&](Point x) { return (*this)(t, Point{x[0] - center[0], x[1] - center[1]}); }, 6);
  }

 private:
  static constexpr int kPanels = 512;
  using Rule = boost::math::quadrature::gauss<double, 10>;

  double integrand(double theta) const {
    const double c = std::cos(theta);
    if (c <= 0.0) return 0.0;
    return std::exp((2.0 * m_ + 1.0) * std::log(c));
  }

  double panel(double a, double b) const {
    return Rule::integrate([this](double th) { return integrand(th); }, a, b);
  }

  void build_table() {
    const double w = std::numbers::pi / 2 / kPanels;
    cumulative_.assign(kPanels + 1, 0.0);
    for (int p = 0; p < kPanels; ++p)
      cumulative_[p + 1] = cumulative_[p] + panel(p * w, (p + 1) * w);
  }

  /// G(θ) = ∫₀^θ cos^(2m+1), odd in θ.
  double G(double theta) const {
    if (theta < 0.0) return -G(-theta);
    const double half_pi = std::numbers::pi / 2;
    if (theta >= half_pi) return cumulative_.back();
    const double w = half_pi / kPanels;
    const int p = std::min(int(theta / w), kPanels - 1);
    return cumulative_[p] + panel(p * w, theta);
  }

  /// ∫₀^{π/2} cos^(2m+1) θ sin θ dθ, the 2D radial factor.
  double radial_integral() const {
    const double w = std::numbers::pi / 2 / kPanels;
    double acc = 0.0;
    for (int p = 0; p < kPanels; ++p)
      acc += Rule::integrate([this](double th) { return integrand(th) * std::sin(th); }, p * w,
                             (p + 1) * w);
    return acc;
  }

  /// ∫_a^b U(t, x) dx in 1D: U(t, x) = t^(-α) U(1, x t^(-α)).
  double integral_1d(double t, double a, double b) const {
    const double s = std::pow(t, -alpha_);
    const double r = std::sqrt(C_ / k_);
    auto theta = [r](double y) { return std::asin(std::clamp(y / r, -1.0, 1.0)); };
    const double cm = std::exp(m_ * std::log(C_));
    return cm * r * (G(theta(b * s)) - G(theta(a * s)));
  }

  double solve_normalization() const {
    // Bisection in log C; mass_for is monotone increasing.
    double lo = -600.0, hi = 600.0;
    for (int it = 0; it < 400 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mass_for(std::exp(mid)) < mass_) lo = mid;
      else hi = mid;
    }
    return std::exp(0.5 * (lo + hi));
  }

  void check_time(double t) const {
    if (!(t > 0.0)) fail(ErrorCode::Domain, "barenblatt evaluated at t <= 0");
  }

  double gamma_, mass_;
  int dim_;
  double m_ = 1.0, alpha_ = 0.0, k_ = 0.0, C_ = 0.0;
  std::vector<double> cumulative_;
};

}  // namespace stiffpress
