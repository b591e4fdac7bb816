#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "stiffpress/core.hpp"
#include "stiffpress/barenblatt.hpp"
#include "stiffpress/shapes.hpp"

using namespace stiffpress;

namespace {

const double kPi = std::numbers::pi;

Field random_field(const Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Field f(g);
  for (double& v : f.values) v = U(rng);
  return f;
}

// Face field consistent with a periodic grid (face n equals face 0).
VectorField random_periodic_faces(const Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  VectorField F(g);
  for (int a = 0; a < g.dim; ++a)
    for (double& v : F.comp[a]) v = U(rng);
  for (int a = 0; a < g.dim; ++a) {
    if (g.dim == 1) F.comp[0][g.n] = F.comp[0][0];
    else
      for (int j = 0; j < g.n; ++j) F.comp[a][F.face_index(a, g.n, j)] = F.comp[a][F.face_index(a, 0, j)];
  }
  return F;
}

}  // namespace

TEST(Grid, RejectsBadGeometry) {
  EXPECT_THROW(make_grid_1d(0.0, 1.0, 3, Boundary::Periodic), Error);
  EXPECT_THROW(make_grid_1d(1.0, 1.0, 8, Boundary::Periodic), Error);
  EXPECT_THROW(make_grid_2d({0.0, 0.0}, {1.0, 2.0}, 8, Boundary::Periodic), Error);
  EXPECT_NO_THROW(make_grid_2d({-1.0, 0.0}, {1.0, 2.0}, 8, Boundary::Periodic));
  try {
    make_grid_1d(0.0, 1.0, 2, Boundary::Periodic);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidGrid);
  }
}

TEST(Grid, RowMajorLayout) {
  const Grid g = make_grid_2d({0.0, 0.0}, {1.0, 1.0}, 4, Boundary::Periodic);
  const Point c = g.center_of(1 * 4 + 2);
  EXPECT_DOUBLE_EQ(c[0], 0.375);
  EXPECT_DOUBLE_EQ(c[1], 0.625);
}

TEST(Laplacian, ConstantIsHarmonicOnPeriodic) {
  for (const Grid& g : {make_grid_1d(0.0, 1.0, 16, Boundary::Periodic),
                        make_grid_2d({0.0, 0.0}, {1.0, 1.0}, 16, Boundary::Periodic)}) {
    const Field L = laplacian(Field(g, 3.7));
    for (double v : L.values) EXPECT_EQ(v, 0.0);
  }
}

TEST(Laplacian, SineIsDiscreteEigenfunction) {
  const double L = 2.0;
  const int n = 64;
  const Grid g = make_grid_1d(0.0, L, n, Boundary::Periodic);
  const double h = g.h();
  const Field s = sample_centers(g, [&](Point x) { return std::sin(2 * kPi * x[0] / L); });
  const double mu = -(2.0 / (h * h)) * (1.0 - std::cos(2 * kPi * h / L));
  const Field lap = laplacian(s);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(lap[i], mu * s[i], 1e-12 * std::abs(mu));
  // and O(h²) close to the continuum eigenvalue
  const double cont = -std::pow(2 * kPi / L, 2);
  EXPECT_LT(std::abs(mu - cont), 2.0 * h * h * std::pow(2 * kPi / L, 4) / 12.0);
}

TEST(Laplacian, QuadraticExactOnDirichletInterior) {
  const double L = 1.0;
  const Grid g = make_grid_1d(0.0, L, 32, Boundary::DirichletZero);
  const Field f = sample_centers(g, [&](Point x) { return x[0] * (L - x[0]); });
  const Field lap = laplacian(f);
  for (int i = 1; i + 1 < g.n; ++i) EXPECT_NEAR(lap[i], -2.0, 1e-9);
}

TEST(Laplacian, TwoDimensionalQuadratic) {
  const Grid g = make_grid_2d({0.0, 0.0}, {1.0, 1.0}, 16, Boundary::DirichletZero);
  const Field f = sample_centers(g, [](Point x) { return x[0] * x[0] + 3 * x[1] * x[1]; });
  const Field lap = laplacian(f);
  for (int i = 1; i < 15; ++i)
    for (int j = 1; j < 15; ++j) EXPECT_NEAR(lap[i * 16 + j], 8.0, 1e-9);
}

TEST(Gradient, ConstantGivesZero) {
  const Grid g = make_grid_2d({0.0, 0.0}, {1.0, 1.0}, 8, Boundary::Periodic);
  const VectorField G = gradient(Field(g, 2.0));
  for (int a = 0; a < 2; ++a)
    for (double v : G.comp[a]) EXPECT_EQ(v, 0.0);
}

TEST(Gradient, LinearExactInInterior) {
  const Grid g = make_grid_1d(0.0, 1.0, 20, Boundary::DirichletZero);
  const Field f = sample_centers(g, [](Point x) { return 2.5 * x[0]; });
  const VectorField G = gradient(f);
  for (int k = 1; k < g.n; ++k) EXPECT_NEAR(G.comp[0][k], 2.5, 1e-12);
}

TEST(Gradient, SineMatchesCosineToSecondOrder) {
  for (int n : {32, 64, 128}) {
    const Grid g = make_grid_1d(0.0, 1.0, n, Boundary::Periodic);
    const double h = g.h();
    const Field s = sample_centers(g, [](Point x) { return std::sin(2 * kPi * x[0]); });
    const VectorField G = gradient(s);
    for (int k = 0; k < n; ++k) {
      const double face = g.lo[0] + k * h;  // face k sits between cells k-1 and k
      EXPECT_NEAR(G.comp[0][k], 2 * kPi * std::cos(2 * kPi * face), std::pow(2 * kPi, 3) / 24.0 * h * h * 1.01);
    }
  }
}

TEST(Divergence, ConstantFieldIsSolenoidalOnPeriodic) {
  const Grid g = make_grid_2d({0.0, 0.0}, {1.0, 1.0}, 8, Boundary::Periodic);
  const VectorField F(g, 1.25);
  for (double v : divergence(F).values) EXPECT_EQ(v, 0.0);
}

TEST(Divergence, IntegrationByPartsOnPeriodic) {
  std::mt19937_64 rng(11);
  for (const Grid& g : {make_grid_1d(0.0, 1.0, 37, Boundary::Periodic),
                        make_grid_2d({0.0, 0.0}, {2.0, 2.0}, 24, Boundary::Periodic)}) {
    for (int rep = 0; rep < 5; ++rep) {
      const Field f = random_field(g, rng);
      const VectorField F = random_periodic_faces(g, rng);
      // brute-force sums written out independently of dot()
      double a = 0.0, b = 0.0;
      const Field d = divergence(F);
      for (std::size_t i = 0; i < f.size(); ++i) a += f[i] * d[i];
      const VectorField G = gradient(f);
      for (int ax = 0; ax < g.dim; ++ax)
        for (std::size_t k = 0; k < G.comp[ax].size(); ++k) {
          const int face = g.dim == 1 ? int(k) : (ax == 0 ? int(k) / g.n : int(k) % (g.n + 1));
          if (face == g.n) continue;
          b += G.comp[ax][k] * F.comp[ax][k];
        }
      EXPECT_LE(std::abs(a + b), 1e-12 * std::max(std::abs(a), std::abs(b)));
    }
  }
}

TEST(Divergence, IntegrationByPartsOnDirichletWithGhostZeros) {
  std::mt19937_64 rng(5);
  const Grid g = make_grid_1d(0.0, 1.0, 40, Boundary::DirichletZero);
  const Field f = random_field(g, rng), k = random_field(g, rng);
  // ⟨f, Δk⟩ = -⟨∇f, ∇k⟩ with the ghost zero cells
  EXPECT_NEAR(dot(f, laplacian(k)), -dot(gradient(f), gradient(k)), 1e-10);
}

TEST(Divergence, DivGradEqualsLaplacianBitwise) {
  std::mt19937_64 rng(3);
  const Grid g = make_grid_2d({0.0, 0.0}, {1.0, 1.0}, 16, Boundary::Periodic);
  const Field f = random_field(g, rng);
  EXPECT_EQ(divergence(gradient(f)).values, laplacian(f).values);
}

TEST(Operators, AreLinear) {
  std::mt19937_64 rng(8);
  const Grid g = make_grid_2d({0.0, 0.0}, {1.0, 1.0}, 12, Boundary::DirichletZero);
  const Field f = random_field(g, rng), k = random_field(g, rng);
  const double a = 1.7, b = -0.3;
  const Field lhs = laplacian(a * f + b * k), rhs = a * laplacian(f) + b * laplacian(k);
  for (std::size_t i = 0; i < lhs.size(); ++i) EXPECT_NEAR(lhs[i], rhs[i], 1e-12 * 1e3);
  const VectorField G1 = gradient(a * f + b * k), Gf = gradient(f), Gk = gradient(k);
  for (int ax = 0; ax < 2; ++ax)
    for (std::size_t i = 0; i < G1.comp[ax].size(); ++i)
      EXPECT_NEAR(G1.comp[ax][i], a * Gf.comp[ax][i] + b * Gk.comp[ax][i], 1e-11);
}

TEST(Mass, IndicatorOfHalfInterval) {
  const Grid g = make_grid_1d(0.0, 1.0, 8, Boundary::Periodic);
  EXPECT_DOUBLE_EQ(mass(indicator_interval(g, 0.25, 0.25)), 0.5);
  EXPECT_EQ(mass(Field(g)), 0.0);
}

TEST(Mass, BarenblattSampleIsUnitMass) {
  const Grid g = make_grid_1d(-1.5, 1.5, 1024, Boundary::DirichletZero);
  const Barenblatt B(3.0, 1.0, 1);
  EXPECT_NEAR(mass(B.sample(g, 1.0)), 1.0, 1e-3);
}

TEST(SampleCellAverage, PolynomialIsExact) {
  const Grid g = make_grid_2d({0.0, 0.0}, {1.0, 1.0}, 4, Boundary::Periodic);
  const Field f = sample_cell_average(g, [](Point x) { return x[0] * x[0] * x[1]; });
  // cell [0, .25]²: ∫∫ x² y = (.25³/3)(.25²/2) / .25²
  EXPECT_NEAR(f[0], std::pow(0.25, 3) / 3.0 * 0.5, 1e-15);
}
