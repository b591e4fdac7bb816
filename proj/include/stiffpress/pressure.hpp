#pragma once
// Constitutive pressure laws p(n) and the nonlinearities built from them.
//
//   power(γ):     p = γ/(γ-1) n^(γ-1),   A(n) = n^γ
//   singular(ε):  p = ε n/(1-n),         A(n) = ε n/(1-n) + ε ln(1-n)
//
// A(n) = ∫₀ⁿ s p'(s) ds is the flux potential with ΔA(n) = ∇·(n∇p).

#include <cmath>
#include <limits>
#include <string>

#include "stiffpress/error.hpp"

namespace stiffpress {

struct PressureLaw {
  enum class Kind { Power, Singular };

  Kind kind = Kind::Power;
  double gamma = 2.0;    // Power only
  double epsilon = 1.0;  // Singular only
  double p_max = 1.0;    // a-priori pressure bound, supplied by configuration

  static PressureLaw power(double gamma, double p_max = 1.0) {
    PressureLaw law{Kind::Power, gamma, 1.0, p_max};
    law.validate();
    return law;
  }
  static PressureLaw singular(double epsilon, double p_max = 1.0) {
    PressureLaw law{Kind::Singular, 2.0, epsilon, p_max};
    law.validate();
    return law;
  }

  bool is_power() const { return kind == Kind::Power; }

  /// Stiffness parameter on the γ axis (1/ε for the singular law).
  double stiffness() const { return is_power() ? gamma : 1.0 / epsilon; }

  void validate() const {
    if (is_power() && !(gamma > 1.0 && std::isfinite(gamma)))
      fail(ErrorCode::InvalidArgument, "power law requires gamma > 1");
    if (!is_power() && !(epsilon > 0.0 && std::isfinite(epsilon)))
      fail(ErrorCode::InvalidArgument, "singular law requires epsilon > 0");
    if (!(p_max > 0.0 && std::isfinite(p_max)))
      fail(ErrorCode::InvalidArgument, "p_max must be positive and finite");
  }

  std::string describe() const {
    return is_power() ? "power(gamma=" + std::to_string(gamma) + ")"
                      : "singular(epsilon=" + std::to_string(epsilon) + ")";
  }
};

namespace detail {

inline void check_density(const PressureLaw& law, double n) {
  if (!(n >= 0.0)) fail(ErrorCode::Domain, "density must be non-negative");
  if (!law.is_power() && !(n < 1.0))
    fail(ErrorCode::Domain, "singular pressure law evaluated at n >= 1");
}

/// n^a for n >= 0, a > 0, via exp(a ln n) so large exponents underflow cleanly.
inline double safe_pow(double n, double a) {
  if (n == 0.0) return 0.0;
  return std::exp(a * std::log(n));
}

}  // namespace detail

inline double pressure(const PressureLaw& law, double n) {
  detail::check_density(law, n);
  if (law.is_power()) {
    const double g = law.gamma;
    return g / (g - 1.0) * detail::safe_pow(n, g - 1.0);
  }
  return law.epsilon * n / (1.0 - n);
}

inline double flux_potential(const PressureLaw& law, double n) {
  detail::check_density(law, n);
  if (law.is_power()) return detail::safe_pow(n, law.gamma);
  // ε [n/(1-n) + ln(1-n)]; log1p keeps the small-n cancellation accurate.
  if (n < 1e-4) {
    // Series n²/2 + 2n³/3 + 3n⁴/4 avoids catastrophic cancellation.
    return law.epsilon * n * n * (0.5 + n * (2.0 / 3.0 + n * 0.75));
  }
  return law.epsilon * (n / (1.0 - n) + std::log1p(-n));
}

/// A'(n) = n p'(n), the nonlinear diffusivity.
inline double flux_potential_derivative(const PressureLaw& law, double n) {
  detail::check_density(law, n);
  if (law.is_power()) return law.gamma * detail::safe_pow(n, law.gamma - 1.0);
  const double m = 1.0 - n;
  return law.epsilon * n / (m * m);
}

/// ((γ-1)/γ)^(1/(γ-1)) p_max^(1/(γ-1)), the density bound implied by p <= p_max.
inline double c_gamma(double gamma, double p_max) {
  if (!(gamma > 1.0)) fail(ErrorCode::InvalidArgument, "c_gamma requires gamma > 1");
  const double e = 1.0 / (gamma - 1.0);
  return std::exp(e * (std::log((gamma - 1.0) / gamma) + std::log(p_max)));
}

inline double density_cap(const PressureLaw& law) {
  return law.is_power() ? c_gamma(law.gamma, law.p_max) : 1.0;
}

/// Inverse of the pressure law on its domain.
inline double density_from_pressure(const PressureLaw& law, double p) {
  if (!(p >= 0.0)) fail(ErrorCode::Domain, "pressure must be non-negative");
  if (law.is_power()) {
    const double g = law.gamma;
    return detail::safe_pow((g - 1.0) / g * p, 1.0 / (g - 1.0));
  }
  return p / (law.epsilon + p);
}

}  // namespace stiffpress
