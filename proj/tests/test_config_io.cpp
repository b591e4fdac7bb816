#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <random>

#include "stiffpress/config.hpp"
#include "stiffpress/io.hpp"

using namespace stiffpress;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "stiffpress_test_config_io";
  fs::create_directories(dir);
  return dir / name;
}

std::optional<ErrorCode> code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace

TEST(Snapshots, RoundTripIsBitExact1D) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1e3, 1e3);
  const Grid g = make_grid_1d(-1.5, 2.25, 37, Boundary::DirichletZero);
  std::vector<TimedField> snaps;
  for (int k = 0; k < 4; ++k) {
    Field f(g);
    for (double& v : f.values) v = U(rng);
    f[3] = std::numeric_limits<double>::denorm_min();
    f[4] = -0.0;
    snaps.push_back({0.1 * k + 1e-17, f});
  }
  const auto path = scratch("a.stpr").string();
  write_snapshots(path, snaps);
  const auto back = read_snapshots(path);
  ASSERT_EQ(back.size(), snaps.size());
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    EXPECT_EQ(back[k].t, snaps[k].t);
    EXPECT_TRUE(back[k].field.grid == g);
    EXPECT_EQ(std::memcmp(back[k].field.values.data(), snaps[k].field.values.data(),
                          g.size() * sizeof(double)),
              0);
  }
}

TEST(Snapshots, RoundTrip2DPeriodic) {
  const Grid g = make_grid_2d({0.0, -1.0}, {2.0, 1.0}, 8, Boundary::Periodic);
  Field f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = double(i) / 7.0;
  const auto path = scratch("b.stpr").string();
  write_snapshots(path, {{0.5, f}});
  const auto back = read_snapshots(path);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_TRUE(back[0].field.grid == g);
  EXPECT_EQ(back[0].field.values, f.values);
}

TEST(Snapshots, HeaderLayout) {
  const Grid g = make_grid_1d(0.0, 1.0, 5, Boundary::Periodic);
  const auto path = scratch("c.stpr").string();
  write_snapshots(path, {{0.0, Field(g, 1.0)}, {1.0, Field(g, 2.0)}});
  // magic 5 + dim 4 + n 4 + lo 8 + hi 8 + bc 1 + count 4 + 2 × (8 + 5·8)
  EXPECT_EQ(fs::file_size(path), 5u + 4 + 4 + 8 + 8 + 1 + 4 + 2 * (8 + 40));
  std::ifstream is(path, std::ios::binary);
  char magic[5];
  is.read(magic, 5);
  EXPECT_EQ(std::string(magic, 5), "STPR1");
}

TEST(Snapshots, RejectsGarbageAndTruncation) {
  const auto bad = scratch("bad.stpr").string();
  std::ofstream(bad) << "hello world";
  EXPECT_EQ(code_of([&] { read_snapshots(bad); }), ErrorCode::Io);
  EXPECT_EQ(code_of([&] { read_snapshots(scratch("missing.stpr").string()); }), ErrorCode::Io);

  const Grid g = make_grid_1d(0.0, 1.0, 16, Boundary::DirichletZero);
  const auto good = scratch("trunc.stpr").string();
  write_snapshots(good, {{0.0, Field(g, 1.0)}});
  fs::resize_file(good, fs::file_size(good) - 3);
  EXPECT_EQ(code_of([&] { read_snapshots(good); }), ErrorCode::Io);
}

TEST(Snapshots, RejectsMixedGrids) {
  const Grid a = make_grid_1d(0.0, 1.0, 16, Boundary::DirichletZero);
  const Grid b = make_grid_1d(0.0, 1.0, 32, Boundary::DirichletZero);
  EXPECT_THROW(write_snapshots(scratch("m.stpr").string(), {{0.0, Field(a)}, {1.0, Field(b)}}), Error);
  EXPECT_THROW(write_snapshots(scratch("e.stpr").string(), {}), Error);
}

TEST(Hash, Sha1KnownVectors) {
  EXPECT_EQ(detail::sha1_hex(""), "da39a3ee5e6b4b0d3255bfef95601890afd80709");
  EXPECT_EQ(detail::sha1_hex("abc"), "a9993e364706816aba3e25717850c26c9cd0d89d");
  EXPECT_EQ(detail::sha1_hex(std::string(1000000, 'a')), "34aa973cd4c4daa4f61eeb2bdbad27316534016f");
}

TEST(Hash, MatchesGitBlobIds) {
  EXPECT_EQ(git_blob_hash(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  EXPECT_EQ(git_blob_hash("hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST(Hash, MatchesGitHashObjectOnCanonicalText) {
  if (std::system("git --version > /dev/null 2>&1") != 0) GTEST_SKIP() << "git not available";
  const Config c = Config::from_string("[law]\nkind = power\ngamma = 20\n[grid]\nn = 64\n");
  const auto path = scratch("canon.txt");
  std::ofstream(path, std::ios::binary) << c.canonical();
  FILE* p = popen(("git hash-object " + path.string()).c_str(), "r");
  ASSERT_NE(p, nullptr);
  char buf[64] = {};
  ASSERT_NE(std::fgets(buf, sizeof buf, p), nullptr);
  pclose(p);
  EXPECT_EQ(std::string(buf, 40), c.hash());
}

TEST(Config, CanonicalFormIsOrderAndWhitespaceIndependent) {
  const Config a = Config::from_string("[law]\ngamma=20\nkind=power\n[grid]\nn=64\n");
  const Config b = Config::from_string("; comment\n[grid]\n  n =   64\n\n[law]\nkind = power\ngamma = 20\n");
  EXPECT_EQ(a.canonical(), "grid.n=64\nlaw.gamma=20\nlaw.kind=power\n");
  EXPECT_EQ(a.canonical(), b.canonical());
  EXPECT_EQ(a.hash(), b.hash());
  const Config c = Config::from_string("[law]\ngamma=21\nkind=power\n[grid]\nn=64\n");
  EXPECT_NE(a.hash(), c.hash());
}

TEST(Config, OverridesApplyAndAreHashed) {
  Config c = Config::from_string("[law]\nkind = power\ngamma = 20\n");
  const std::string before = c.hash();
  c.set("law.gamma=40");
  c.set("grid.n = 128");
  EXPECT_EQ(c.num("law.gamma"), 40.0);
  EXPECT_EQ(c.grid().n, 128);
  EXPECT_NE(c.hash(), before);
  EXPECT_EQ(code_of([&] { c.set("law.bogus=1"); }), ErrorCode::Config);
  EXPECT_EQ(code_of([&] { c.set("nosection=1"); }), ErrorCode::Config);
  EXPECT_EQ(code_of([&] { c.set("law.gamma"); }), ErrorCode::Config);
}

TEST(Config, SchemaRejections) {
  EXPECT_EQ(code_of([] { Config::from_string("[weird]\nx=1\n"); }), ErrorCode::Config);
  EXPECT_EQ(code_of([] { Config::from_string("[law]\ngama=2\n"); }), ErrorCode::Config);
  EXPECT_EQ(code_of([] { Config::from_string("[law\nkind=power\n"); }), ErrorCode::Config);
  EXPECT_EQ(code_of([] { Config::load("/nonexistent/x.ini"); }), ErrorCode::Config);
}

TEST(Config, ValueErrors) {
  auto sim_code = [](const std::string& text) {
    return code_of([&] { Config::from_string(text).sim(); });
  };
  EXPECT_EQ(sim_code("[law]\ngamma=abc\n"), ErrorCode::Config);
  EXPECT_EQ(sim_code("[law]\ngamma=1\n"), ErrorCode::Config);
  EXPECT_EQ(sim_code("[law]\nkind=singular\nepsilon=-1\n"), ErrorCode::Config);
  EXPECT_EQ(sim_code("[grid]\nn=2\n"), ErrorCode::Config);
  EXPECT_EQ(sim_code("[grid]\nbc=neumann\n"), ErrorCode::Config);
  EXPECT_EQ(sim_code("[grid]\ndim=3\n"), ErrorCode::Config);
  EXPECT_EQ(sim_code("[init]\nkind=blob\n"), ErrorCode::Config);
  EXPECT_EQ(sim_code("[time]\ncfl=0\n"), ErrorCode::Config);
  EXPECT_EQ(sim_code("[time]\nmax_steps=0\n"), ErrorCode::Config);
  EXPECT_EQ(code_of([] { Config::from_string("[sweep]\nparameters=10,5\n").sweep(); }),
            ErrorCode::Config);
  EXPECT_EQ(code_of([] { Config::from_string("[sweep]\nparameters=10,20\nnorms=h2\n").sweep(); }),
            ErrorCode::Config);
}

TEST(Config, Defaults) {
  const SimConfig c = Config::from_string("").sim();
  EXPECT_EQ(c.grid.dim, 1);
  EXPECT_EQ(c.grid.bc, Boundary::DirichletZero);
  EXPECT_EQ(c.cfl, 0.4);
  EXPECT_EQ(c.T, 1.0);
  EXPECT_EQ(c.times().size(), 11u);
  EXPECT_TRUE(c.law.is_power());
}

class Presets : public ::testing::TestWithParam<std::string> {};

TEST_P(Presets, Translate) {
  const std::string name = GetParam();
  const Config c = Config::load(std::string(STIFFPRESS_CONFIGS) + "/" + name + ".ini");
  EXPECT_EQ(c.hash().size(), 40u);
  if (name == "appendix") {
    const AppendixOptions o = c.appendix();
    EXPECT_EQ(o.pairs, 100);
    EXPECT_EQ(o.n_2d, 64);
  } else if (name == "validate" || name == "metrics") {
    EXPECT_TRUE(c.has(name + ".norms") || c.has(name + ".mutant"));
  } else if (c.has("sweep.parameters")) {
    const SweepPlan p = c.sweep();
    EXPECT_GE(p.parameters.size(), 4u);
    EXPECT_NO_THROW(p.validate());
  } else {
    EXPECT_NO_THROW(c.sim().validate());
  }
}

INSTANTIATE_TEST_SUITE_P(All, Presets,
                         ::testing::Values("appendix", "barenblatt_run", "drift_sweep", "focusing_2d",
                                           "gamma_sweep", "metrics", "mock_sweep", "singular_sweep",
                                           "validate"));

TEST(Presets, GammaSweepContents) {
  const SweepPlan p = Config::load(std::string(STIFFPRESS_CONFIGS) + "/gamma_sweep.ini").sweep();
  EXPECT_EQ(p.parameters, (std::vector<double>{10, 20, 40, 80, 160}));
  EXPECT_EQ(p.base.grid.n, 1024);
  EXPECT_EQ(p.norms.size(), 4u);
  EXPECT_TRUE(p.base.init.gamma_auto);
  EXPECT_TRUE(p.base.p_max_auto);
}

TEST(Io, SweepCsvAndJsonShape) {
  SweepPlan plan;
  plan.base.grid = make_grid_1d(-1.5, 1.5, 64, Boundary::DirichletZero);
  plan.base.init.kind = InitialDatum::Kind::Indicator;
  plan.parameters = {10, 20, 40};
  plan.norms = {parse_norm("hminus1"), parse_norm("l1")};
  const LimitReference ref = mesa_indicator(plan.base.grid, 1.0);
  const RateReport rep = run_sweep(plan, mock_solver(ref, 0.01), ref);
  const std::string csv = sweep_csv(rep);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 3 * 2);
  const auto j = report_json(rep);
  EXPECT_EQ(j["records"].size(), 3u);
  EXPECT_TRUE(j.contains("verdicts"));
  EXPECT_TRUE(j.contains("fits"));
}

TEST(Io, TrajectoryFiles) {
  SimConfig c;
  c.grid = make_grid_1d(-4.0, 4.0, 128, Boundary::DirichletZero);
  c.law = PressureLaw::power(2.0);
  c.init.gamma_auto = true;
  c.T = 0.05;
  c.p_max_auto = true;
  const Trajectory tr = solve(resolve(c));
  const fs::path dir = scratch("traj");
  fs::create_directories(dir);
  write_trajectory(dir.string(), tr);
  const auto d = read_snapshots((dir / "density.stpr").string());
  ASSERT_EQ(d.size(), tr.snapshots.size());
  EXPECT_EQ(d.back().field.values, tr.snapshots.back().density.values);
  std::ifstream is(dir / "diagnostics.csv");
  std::string header;
  std::getline(is, header);
  EXPECT_EQ(header, "step,t,dt,mass,min,max,max_pressure");
}
