#pragma once
// Spectral solve of -Δφ = f for the discrete compact Laplacian.
//
// Periodic grids are diagonalised by the DFT, DirichletZero grids (zero ghost
// cell) by the type-I sine transform. Both solves are exact for the discrete
// operator up to rounding.

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "stiffpress/core.hpp"

namespace stiffpress {

struct PoissonSolution {
  Field phi;
  VectorField grad_phi;
  double residual_norm = 0.0;  // ‖-Δφ - f‖₂ / ‖f‖₂ (0 for f = 0)
};

namespace detail {

// The FFTW planner is not re-entrant; execution of distinct plans is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <class T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
  return FftwBuffer<T>(static_cast<T*>(fftw_malloc(sizeof(T) * n)));
}

class FftwPlan {
 public:
  explicit FftwPlan(fftw_plan p) : plan_(p) {
    if (!plan_) fail(ErrorCode::InvalidArgument, "FFTW planning failed");
  }
  FftwPlan(const FftwPlan&) = delete;
  FftwPlan& operator=(const FftwPlan&) = delete;
  ~FftwPlan() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan_);
  }
  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

/// Eigenvalue of the 1D operator -D² for mode k.
inline double symbol(double h, double theta) { return 2.0 * (1.0 - std::cos(theta)) / (h * h); }

inline Field solve_dirichlet(const Field& f) {
  const Grid& g = f.grid;
  const int n = g.n;
  const std::size_t N = g.size();
  auto buf = fftw_buffer<double>(N);
  std::copy(f.values.begin(), f.values.end(), buf.get());
  std::unique_ptr<FftwPlan> plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_plan p = g.dim == 1
                      ? fftw_plan_r2r_1d(n, buf.get(), buf.get(), FFTW_RODFT00, FFTW_ESTIMATE)
                      : fftw_plan_r2r_2d(n, n, buf.get(), buf.get(), FFTW_RODFT00, FFTW_RODFT00,
                                         FFTW_ESTIMATE);
    plan = std::make_unique<FftwPlan>(p);
  }
  plan->execute();
  const double h = g.h();
  const double scale = std::pow(2.0 * (n + 1), g.dim);
  for (std::size_t idx = 0; idx < N; ++idx) {
    double mu = 0.0;
    if (g.dim == 1) {
      mu = symbol(h, std::numbers::pi * double(idx + 1) / (n + 1));
    } else {
      const std::size_t i = idx / n, j = idx % n;
      mu = symbol(h, std::numbers::pi * double(i + 1) / (n + 1)) +
           symbol(h, std::numbers::pi * double(j + 1) / (n + 1));
    }
    buf[idx] /= mu * scale;
  }
  plan->execute();  // RODFT00 is its own inverse up to the scale above
  return Field(g, std::vector<double>(buf.get(), buf.get() + N));
}

inline Field solve_periodic(const Field& f) {
  const Grid& g = f.grid;
  const int n = g.n;
  const std::size_t N = g.size();
  const std::size_t last = std::size_t(n / 2 + 1);
  const std::size_t M = g.dim == 1 ? last : std::size_t(n) * last;
  auto real = fftw_buffer<double>(N);
  auto spec = fftw_buffer<fftw_complex>(M);
  std::copy(f.values.begin(), f.values.end(), real.get());
  std::unique_ptr<FftwPlan> fwd, bwd;
  {
    std::lock_guard lock(fftw_planner_mutex());
    if (g.dim == 1) {
      fwd = std::make_unique<FftwPlan>(
          fftw_plan_dft_r2c_1d(n, real.get(), spec.get(), FFTW_ESTIMATE));
      bwd = std::make_unique<FftwPlan>(
          fftw_plan_dft_c2r_1d(n, spec.get(), real.get(), FFTW_ESTIMATE));
    } else {
      fwd = std::make_unique<FftwPlan>(
          fftw_plan_dft_r2c_2d(n, n, real.get(), spec.get(), FFTW_ESTIMATE));
      bwd = std::make_unique<FftwPlan>(
          fftw_plan_dft_c2r_2d(n, n, spec.get(), real.get(), FFTW_ESTIMATE));
    }
  }
  fwd->execute();
  const double h = g.h();
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t idx = 0; idx < M; ++idx) {
    double mu = 0.0;
    if (g.dim == 1) {
      mu = symbol(h, two_pi * double(idx) / n);
    } else {
      const std::size_t i = idx / last, j = idx % last;
      mu = symbol(h, two_pi * double(i) / n) + symbol(h, two_pi * double(j) / n);
    }
    const double s = mu > 0.0 ? 1.0 / (mu * double(N)) : 0.0;
    spec[idx][0] *= s;
    spec[idx][1] *= s;
  }
  bwd->execute();
  return Field(g, std::vector<double>(real.get(), real.get() + N));
}

}  // namespace detail

/// Solves -Δφ = f. Periodic grids require a mean-zero source.
inline PoissonSolution solve_poisson(const Field& f) {
  const Grid& g = f.grid;
  if (g.bc == Boundary::Periodic) {
    double scale = 1.0;
    for (double v : f.values) scale = std::max(scale, std::abs(v));
    if (std::abs(mean(f)) > 1e-12 * scale)
      fail(ErrorCode::NonZeroMean, "periodic Poisson source must have zero mean");
  }
  PoissonSolution sol;
  sol.phi = g.bc == Boundary::Periodic ? detail::solve_periodic(f) : detail::solve_dirichlet(f);
  sol.grad_phi = gradient(sol.phi);
  const Field res = divergence(sol.grad_phi) + f;  // -Δφ - f = -(Δφ + f)
  const double fn = std::sqrt(dot(f, f));
  sol.residual_norm = fn > 0.0 ? std::sqrt(dot(res, res)) / fn : 0.0;
  return sol;
}

}  // namespace stiffpress
