#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "stiffpress/barenblatt.hpp"
#include "stiffpress/metrics.hpp"
#include "stiffpress/pressure.hpp"
#include "stiffpress/shapes.hpp"

using namespace stiffpress;

namespace {

const double kPi = std::numbers::pi;

// Ḣ⁻¹ in 1D from the face flux G with G_{c+1} - G_c = -h f_c and Σ G = 0
// (the discrete gradient of any φ sums to zero on both boundary types).
double hminus1_by_cumsum(const Field& f) {
  const Grid& g = f.grid;
  const double h = g.h();
  const int nf = g.bc == Boundary::Periodic ? g.n : g.n + 1;
  std::vector<double> G(nf, 0.0);
  for (int k = 1; k < nf; ++k) G[k] = G[k - 1] - h * f[k - 1];
  double m = 0.0;
  for (double v : G) m += v;
  m /= nf;
  double s = 0.0;
  for (double v : G) s += (v - m) * (v - m);
  return std::sqrt(h * s);
}

Field random_zero_mean(const Grid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  Field f(g);
  for (double& v : f.values) v = N(rng);
  const double m = mean(f);
  for (double& v : f.values) v -= m;
  return f;
}

}  // namespace

TEST(HMinus1, SineModeMatchesContinuum) {
  for (int n : {64, 128, 256}) {
    const Grid g = make_grid_1d(0.0, 1.0, n, Boundary::Periodic);
    const Field f = sample_centers(g, [](Point x) { return std::sin(2 * kPi * x[0]); });
    const double h = g.h();
    const double cont = 1.0 / (2 * kPi * std::sqrt(2.0));
    EXPECT_NEAR(hminus1_norm(f), cont, 2.0 * h * h);
    // discrete symbol: ‖f‖ / sqrt(μ)
    const double mu = 2.0 * (1.0 - std::cos(2 * kPi * h)) / (h * h);
    EXPECT_NEAR(hminus1_norm(f), std::sqrt(0.5 / mu), 1e-12);
  }
}

TEST(HMinus1, MatchesCumulativeSumOracle) {
  std::mt19937_64 rng(17);
  for (Boundary bc : {Boundary::Periodic, Boundary::DirichletZero}) {
    for (int n : {16, 63, 200}) {
      const Grid g = make_grid_1d(-1.0, 2.0, n, bc);
      Field f = random_zero_mean(g, rng);
      if (bc == Boundary::DirichletZero) f[0] += 0.7;  // any mass on Dirichlet
      EXPECT_NEAR(hminus1_norm(f), hminus1_by_cumsum(f), 1e-11 * hminus1_by_cumsum(f));
    }
  }
}

TEST(HMinus1, ZeroAndHomogeneity) {
  const Grid g = make_grid_2d({0.0, 0.0}, {1.0, 1.0}, 32, Boundary::Periodic);
  EXPECT_EQ(hminus1_norm(Field(g)), 0.0);
  std::mt19937_64 rng(1);
  const Field f = random_zero_mean(g, rng);
  EXPECT_NEAR(hminus1_norm(-3.5 * f), 3.5 * hminus1_norm(f), 1e-13 * hminus1_norm(f));
}

TEST(HMinus1, TriangleInequality) {
  std::mt19937_64 rng(4);
  const Grid g = make_grid_2d({0.0, 0.0}, {1.0, 1.0}, 16, Boundary::DirichletZero);
  for (int k = 0; k < 20; ++k) {
    const Field a = random_zero_mean(g, rng), b = random_zero_mean(g, rng);
    EXPECT_LE(hminus1_norm(a + b), hminus1_norm(a) + hminus1_norm(b) + 1e-12);
  }
}

TEST(HMinus1, PeriodicRejectsNonZeroMean) {
  const Grid g = make_grid_1d(0.0, 1.0, 32, Boundary::Periodic);
  try {
    hminus1_norm(Field(g, 1.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonZeroMean);
  }
}

TEST(HMinus1, PoissonResidualIsSmall) {
  std::mt19937_64 rng(2);
  for (Boundary bc : {Boundary::Periodic, Boundary::DirichletZero}) {
    const Grid g = make_grid_2d({0.0, 0.0}, {1.0, 1.0}, 32, bc);
    const Field f = random_zero_mean(g, rng);
    const PoissonSolution s = solve_poisson(f);
    EXPECT_LT(s.residual_norm, 1e-10);
    const Field r = laplacian(s.phi) + f;
    EXPECT_LT(std::sqrt(dot(r, r)), 1e-10 * std::sqrt(dot(f, f)));
  }
}

TEST(HMinus1, FreeSpaceFormula) {
  // f = 1 on [0, 1/2), -1 on [1/2, 1): F is a tent of height 1/2, ∫F² = 1/12
  const Grid g = make_grid_1d(0.0, 1.0, 64, Boundary::DirichletZero);
  const Field f = indicator_interval(g, 0.25, 0.25) - indicator_interval(g, 0.75, 0.25);
  EXPECT_NEAR(hminus1_norm_free_1d(f), std::sqrt(1.0 / 12.0), 1e-14);
  EXPECT_THROW(hminus1_norm_free_1d(indicator_interval(g, 0.5, 0.1)), Error);
}

TEST(Lp, IndicatorMeasure) {
  const Grid g = make_grid_1d(0.0, 1.0, 64, Boundary::DirichletZero);
  const Field f = indicator_interval(g, 0.5, 0.125);
  for (double p : {1.0, 4.0 / 3.0, 2.0, 7.0}) EXPECT_NEAR(lp_norm(f, p), std::pow(0.25, 1.0 / p), 1e-14);
  EXPECT_EQ(lp_norm(f, INFINITY), 1.0);
  EXPECT_THROW(lp_norm(f, 0.5), Error);
}

TEST(Lp, BarenblattQuadrature) {
  const Barenblatt B(2.0, 1.0, 1);
  const double R = B.radius(1.0);
  boost::math::quadrature::tanh_sinh<double> q;
  const double p = 4.0 / 3.0;
  const double ref = std::pow(q.integrate([&](double x) { return std::pow(B(1.0, x), p); }, -R, R), 1 / p);
  const Grid g = make_grid_1d(-4.0, 4.0, 2048, Boundary::DirichletZero);
  EXPECT_NEAR(lp_norm(B.sample(g, 1.0), p), ref, 1e-3);
}

TEST(Lp, TriangleInequality) {
  std::mt19937_64 rng(6);
  const Grid g = make_grid_1d(0.0, 1.0, 100, Boundary::Periodic);
  for (int k = 0; k < 50; ++k) {
    const Field a = random_zero_mean(g, rng), b = random_zero_mean(g, rng);
    for (double p : {1.0, 4.0 / 3.0, 3.0})
      EXPECT_LE(lp_norm(a + b, p), lp_norm(a, p) + lp_norm(b, p) + 1e-12);
  }
}

TEST(BV, IndicatorConstantSine) {
  const Grid g = make_grid_1d(0.0, 1.0, 128, Boundary::DirichletZero);
  EXPECT_NEAR(bv_seminorm(indicator_interval(g, 0.5, 0.2)), 2.0, 1e-14);
  const Grid gp = make_grid_1d(0.0, 1.0, 128, Boundary::Periodic);
  EXPECT_EQ(bv_seminorm(Field(gp, 0.3)), 0.0);
  for (int n : {64, 128, 256}) {
    const Grid gs = make_grid_1d(0.0, 1.0, n, Boundary::Periodic);
    const Field s = sample_centers(gs, [](Point x) { return std::sin(2 * kPi * x[0]); });
    const double h = gs.h();
    EXPECT_NEAR(bv_seminorm(s), 4.0, 40.0 * h * h);
  }
}

TEST(W2, TranslationAndIdentity) {
  const Grid g = make_grid_1d(-2.0, 2.0, 400, Boundary::DirichletZero);
  const Barenblatt B(3.0, 1.0, 1);
  const Field f = B.sample(g, 1.0);
  const Field s = B.sample(g, 1.0, {0.3, 0.0});  // 30 cells
  const W2Result r = w2_distance_1d_with_error(f, s);
  EXPECT_NEAR(r.value, 0.3, 1e-6 + r.resolution_error);
  EXPECT_EQ(w2_distance_1d(f, f), 0.0);
}

TEST(W2, UniformStretch) {
  const Grid g = make_grid_1d(0.0, 2.0, 200, Boundary::DirichletZero);
  const Field a = indicator_interval(g, 0.5, 0.5), b = indicator_interval(g, 1.0, 1.0, 0.5);
  const W2Result r = w2_distance_1d_with_error(a, b);
  EXPECT_NEAR(r.value, 1.0 / std::sqrt(3.0), 1e-6 + r.resolution_error);
}

TEST(W2, RejectsBadInputs) {
  const Grid g = make_grid_1d(0.0, 1.0, 32, Boundary::DirichletZero);
  try {
    w2_distance_1d(Field(g, 1.0), Field(g, 0.5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MassMismatch);
  }
  Field neg(g, 1.0);
  neg[3] = -0.1;
  neg[4] = 1.1;
  EXPECT_THROW(w2_distance_1d(neg, Field(g, 1.0)), Error);
  const Grid g2 = make_grid_2d({0.0, 0.0}, {1.0, 1.0}, 8, Boundary::DirichletZero);
  EXPECT_THROW(w2_distance_1d(Field(g2, 1.0), Field(g2, 1.0)), Error);
}

TEST(Sandwich, IdenticalDensities) {
  const Grid g = make_grid_1d(0.0, 1.0, 64, Boundary::DirichletZero);
  const SandwichResult r = sandwich_check(Field(g, 0.8), Field(g, 0.8), 0.5);
  EXPECT_TRUE(r.left_ok && r.right_ok);
  EXPECT_EQ(r.w2, 0.0);
  EXPECT_EQ(r.hm1, 0.0);
}

TEST(Sandwich, SinePerturbation) {
  const Grid g = make_grid_1d(0.0, 1.0, 256, Boundary::DirichletZero);
  // 1 + 0.1 sin mapped affinely from [0.9, 1.1] onto [0.5, 1]
  const Field f = sample_cell_average(g, [](Point x) { return 0.75 + 0.25 * std::sin(2 * kPi * x[0]); });
  const Field c(g, 0.75);
  const SandwichResult r = sandwich_check(f, c, 0.5);
  EXPECT_TRUE(r.left_ok);
  EXPECT_TRUE(r.right_ok);
  EXPECT_GT(r.hm1, 0.0);
  EXPECT_LT(r.hm1, r.w2);
}

TEST(Sandwich, RandomPairsBothDirections) {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const Grid g = make_grid_1d(0.0, 1.0, 200, Boundary::DirichletZero);
  for (int k = 0; k < 100; ++k) {
    Field a(g), b(g);
    for (int i = 0; i < g.n; ++i) {
      a[i] = U(rng);
      b[i] = U(rng);
    }
    // equal mean 0.75, values in [0.5, 1]
    for (Field* f : {&a, &b}) {
      const double m = mean(*f);
      double amp = 0.0;
      for (double v : f->values) amp = std::max(amp, std::abs(v - m));
      for (double& v : f->values) v = 0.75 + 0.25 * (v - m) / amp;
    }
    const SandwichResult r = sandwich_check(a, b, 0.5);
    EXPECT_TRUE(r.left_ok) << k;
    EXPECT_TRUE(r.right_ok) << k;
  }
}

TEST(Sandwich, Preconditions) {
  const Grid g = make_grid_1d(0.0, 1.0, 64, Boundary::DirichletZero);
  EXPECT_THROW(sandwich_check(Field(g, 0.4), Field(g, 0.4), 0.5), Error);
  EXPECT_THROW(sandwich_check(Field(g, 0.8), Field(g, 0.8), 0.0), Error);
}

TEST(Interpolation, ScaleInvariantAndFinite) {
  const Grid g = make_grid_1d(-1.0, 1.0, 256, Boundary::DirichletZero);
  const Field f = indicator_interval(g, 0.1, 0.3);
  const double r = interpolation_ratio(f);
  EXPECT_TRUE(std::isfinite(r));
  EXPECT_GT(r, 0.0);
  EXPECT_NEAR(interpolation_ratio(7.0 * f), r, 1e-12 * r);
  EXPECT_THROW(interpolation_ratio(Field(g)), Error);
}

TEST(Interpolation, BoundedAcrossResolutions) {
  // same random step functions sampled at each resolution
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  struct Step {
    double c, w, a;
  };
  std::vector<std::vector<Step>> family(200);
  for (auto& f : family) {
    const int k = 1 + int(U(rng) * 5);
    for (int j = 0; j < k; ++j) f.push_back({-0.6 + 1.2 * U(rng), 0.02 + 0.3 * U(rng), 0.1 + U(rng)});
  }
  std::vector<double> worst;
  for (int n : {128, 256, 512}) {
    const Grid g = make_grid_1d(-1.0, 1.0, n, Boundary::DirichletZero);
    double m = 0.0;
    for (const auto& steps : family) {
      Field f(g);
      for (const Step& s : steps) f = f + indicator_interval(g, s.c, s.w, s.a);
      m = std::max(m, interpolation_ratio(f));
    }
    worst.push_back(m);
  }
  EXPECT_LE(worst[1], 1.1 * worst[0]);
  EXPECT_LE(worst[2], 1.1 * worst[0]);
}

TEST(Relation, VanishingPressureAndSaturation) {
  const Grid g = make_grid_1d(-1.0, 1.0, 64, Boundary::DirichletZero);
  const Field n = indicator_interval(g, 0.0, 0.5);
  EXPECT_EQ(relation_residual(n, Field(g)).raw, 0.0);
  EXPECT_EQ(complementarity_residual(n, Field(g), std::nullopt, std::nullopt, ComplementarityVariant::Power), 0.0);
  EXPECT_EQ(complementarity_residual(n, Field(g), std::nullopt, std::nullopt, ComplementarityVariant::Singular), 0.0);
  Field p(g);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = n[i] == 1.0 ? 2.0 + std::sin(double(i)) : 0.0;
  EXPECT_EQ(relation_residual(n, p).raw, 0.0);
}

TEST(Relation, RawAndAbsolute) {
  const Grid g = make_grid_1d(0.0, 1.0, 4, Boundary::DirichletZero);
  const Field n(g, {0.5, 1.5, 1.0, 0.0});
  const Field p(g, {1.0, 1.0, 3.0, 0.0});
  EXPECT_DOUBLE_EQ(relation_residual(n, p).raw, 0.25 * (0.5 - 0.5));
  EXPECT_DOUBLE_EQ(relation_residual(n, p).absolute, 0.25 * (0.5 + 0.5));
}

TEST(Relation, SingularBoundByEpsilonMassOverDelta) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const Grid g = make_grid_1d(0.0, 1.0, 128, Boundary::DirichletZero);
  for (double eps : {0.3, 0.01}) {
    const PressureLaw law = PressureLaw::singular(eps);
    for (double delta : {0.5, 0.1, 0.01}) {
      Field n(g);
      for (double& v : n.values) v = (1.0 - delta) * U(rng);
      Field p(g);
      for (std::size_t i = 0; i < n.size(); ++i) p[i] = pressure(law, n[i]);
      const double r = relation_residual(n, p).raw;
      EXPECT_GE(r, 0.0);
      EXPECT_LE(r, eps * mass(n) / delta * (1 + 1e-12));
      EXPECT_NEAR(r, eps * mass(n), 1e-12);  // p (1 - n) = ε n
    }
  }
}

TEST(Complementarity, ExactSolutionOfObstacleProblemHasSmallResidual) {
  // p = (1 - x²)₊/2 solves -Δp = 1 on its support: p(Δp + g) = 0 with g = 1
  const double R = 0.4;
  std::vector<double> res;
  double last_off = 0.0;
  for (int n : {128, 256, 512, 1024}) {
    const Grid g = make_grid_1d(-1.0, 1.0, n, Boundary::DirichletZero);
    const Field p = sample_centers(g, [R](Point x) { return std::max(0.0, (R * R - x[0] * x[0]) / 2); });
    const Field one(g, 1.0);
    res.push_back(complementarity_residual(p, p, std::nullopt, one, ComplementarityVariant::Power));
    last_off = complementarity_residual(p, p, std::nullopt, std::nullopt, ComplementarityVariant::Power);
  }
  // the kink at the free boundary leaves an O(h)-ish floor
  EXPECT_GT(res[0], res[2]);
  EXPECT_LT(res[2], 0.01 * last_off);
  EXPECT_LT(res[3], 0.01 * last_off);
}

TEST(Complementarity, DictionaryHasEightBumpsInsideBox) {
  for (const Grid& g : {make_grid_1d(-1.5, 1.5, 64, Boundary::DirichletZero),
                        make_grid_2d({-1.0, -1.0}, {1.0, 1.0}, 16, Boundary::DirichletZero)}) {
    const auto d = test_dictionary(g);
    ASSERT_EQ(d.size(), 8u);
    for (const auto& b : d)
      for (int a = 0; a < g.dim; ++a) {
        EXPECT_GE(b.center[a] - b.width, g.lo[a]);
        EXPECT_LE(b.center[a] + b.width, g.hi[a]);
      }
  }
}

TEST(Complementarity, BumpLaplacianMatchesFiniteDifference) {
  TestBump b;
  b.center = {0.1, -0.2};
  b.width = 0.5;
  const double d = 1e-4;
  for (Point x : {Point{0.1, -0.2}, Point{0.3, 0.0}, Point{-0.2, -0.4}}) {
    const double fd1 = (b.value({x[0] + d, 0}, 1) - 2 * b.value({x[0], 0}, 1) + b.value({x[0] - d, 0}, 1)) / (d * d);
    EXPECT_NEAR(b.laplacian({x[0], 0}, 1), fd1, 1e-5 * (1 + std::abs(fd1)));
    const double fd2 = (b.value({x[0] + d, x[1]}, 2) + b.value({x[0] - d, x[1]}, 2) + b.value({x[0], x[1] + d}, 2) +
                        b.value({x[0], x[1] - d}, 2) - 4 * b.value(x, 2)) / (d * d);
    EXPECT_NEAR(b.laplacian(x, 2), fd2, 1e-5 * (1 + std::abs(fd2)));
  }
}

TEST(Diagnostics2D, UniformSquareMoment) {
  const Grid g = make_grid_2d({-1.0, -1.0}, {1.0, 1.0}, 64, Boundary::DirichletZero);
  const double M = 0.8;
  const Field f = sample_centers(g, [M](Point x) {
    return std::abs(x[0]) < 0.5 && std::abs(x[1]) < 0.5 ? M : 0.0;
  });
  const Diagnostics2D d = diagnostics_2d(f);
  EXPECT_NEAR(d.mass, M, 1e-12);
  // midpoint rule of |x|² on the 32x32 covering cells: M/6 - M h²/6
  EXPECT_NEAR(d.second_moment, M / 6.0, 1e-3);
}

TEST(Diagnostics2D, IndicatorEntropyIsZero) {
  const Grid g = make_grid_2d({-1.0, -1.0}, {1.0, 1.0}, 32, Boundary::DirichletZero);
  const Field f = sample_centers(g, [](Point x) { return x[0] * x[0] + x[1] * x[1] < 0.25 ? 1.0 : 0.0; });
  EXPECT_EQ(diagnostics_2d(f).entropy, 0.0);
}

TEST(Diagnostics2D, GaussianLogHls) {
  const Grid g = make_grid_2d({-3.0, -3.0}, {3.0, 3.0}, 48, Boundary::DirichletZero);
  const Field raw = sample_centers(g, [](Point x) { return std::exp(-(x[0] * x[0] + x[1] * x[1]) / 0.5); });
  const Field f = (1.0 / mass(raw)) * raw;
  const Diagnostics2D d = diagnostics_2d(f);
  EXPECT_NEAR(d.log_hls_bound, -(1.0 + std::log(kPi)), 1e-12);
  EXPECT_TRUE(d.log_hls_ok);
  EXPECT_GE(d.log_hls_lhs, -(1.0 + std::log(kPi)));
}

TEST(Diagnostics2D, RejectsOneDimensional) {
  const Grid g = make_grid_1d(0.0, 1.0, 8, Boundary::DirichletZero);
  EXPECT_THROW(diagnostics_2d(Field(g, 1.0)), Error);
}
