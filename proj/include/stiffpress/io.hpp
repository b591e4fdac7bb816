#pragma once
// Binary snapshot files, diagnostics and sweep CSVs, and JSON reports.
//
// Snapshot file layout (little-endian):
//   "STPR1" | dim u32 | n_cells u32 × dim | lo f64 × dim | hi f64 × dim |
//   bc u8 (0 periodic, 1 dirichlet) | count u32 |
//   count × ( t f64 | values f64 × n_cells^dim, row-major )

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "stiffpress/harness.hpp"

namespace stiffpress {

static_assert(std::endian::native == std::endian::little, "snapshot io assumes a little-endian host");

struct TimedField {
  double t = 0.0;
  Field field;
};

namespace detail {

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T)))
    fail(ErrorCode::Io, "truncated snapshot file");
  return v;
}

inline std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace detail

inline void write_snapshots(const std::string& path, const std::vector<TimedField>& snaps) {
  if (snaps.empty()) fail(ErrorCode::InvalidArgument, "no snapshots to write");
  const Grid& g = snaps.front().field.grid;
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorCode::Io, "cannot open for writing: " + path);
  os.write("STPR1", 5);
  detail::put<std::uint32_t>(os, std::uint32_t(g.dim));
  for (int a = 0; a < g.dim; ++a) detail::put<std::uint32_t>(os, std::uint32_t(g.n));
  for (int a = 0; a < g.dim; ++a) detail::put<double>(os, g.lo[a]);
  for (int a = 0; a < g.dim; ++a) detail::put<double>(os, g.hi[a]);
  detail::put<std::uint8_t>(os, g.bc == Boundary::Periodic ? 0 : 1);
  detail::put<std::uint32_t>(os, std::uint32_t(snaps.size()));
  for (const auto& s : snaps) {
    if (!(s.field.grid == g)) fail(ErrorCode::InvalidArgument, "snapshots on different grids");
    detail::put<double>(os, s.t);
    os.write(reinterpret_cast<const char*>(s.field.values.data()),
             std::streamsize(s.field.values.size() * sizeof(double)));
  }
  if (!os) fail(ErrorCode::Io, "write failed: " + path);
}

inline std::vector<TimedField> read_snapshots(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCode::Io, "cannot open snapshot file: " + path);
  char magic[5];
  if (!is.read(magic, 5) || std::memcmp(magic, "STPR1", 5) != 0)
    fail(ErrorCode::Io, "not a snapshot file: " + path);
  Grid g;
  g.dim = int(detail::get<std::uint32_t>(is));
  if (g.dim != 1 && g.dim != 2) fail(ErrorCode::Io, "bad snapshot dimension");
  for (int a = 0; a < g.dim; ++a) {
    const int n = int(detail::get<std::uint32_t>(is));
    if (a > 0 && n != g.n) fail(ErrorCode::Io, "snapshot grids must be square");
    g.n = n;
  }
  for (int a = 0; a < g.dim; ++a) g.lo[a] = detail::get<double>(is);
  for (int a = 0; a < g.dim; ++a) g.hi[a] = detail::get<double>(is);
  if (g.dim == 1) g.lo[1] = 0.0, g.hi[1] = 0.0;
  const auto bc = detail::get<std::uint8_t>(is);
  if (bc > 1) fail(ErrorCode::Io, "bad boundary tag in snapshot file");
  g.bc = bc == 0 ? Boundary::Periodic : Boundary::DirichletZero;
  try {
    g.validate();
  } catch (const Error& e) {
    fail(ErrorCode::Io, std::string("bad snapshot grid: ") + e.what());
  }
  const std::uint32_t count = detail::get<std::uint32_t>(is);
  std::vector<TimedField> out;
  for (std::uint32_t k = 0; k < count; ++k) {
    TimedField s;
    s.t = detail::get<double>(is);
    s.field = Field(g);
    if (!is.read(reinterpret_cast<char*>(s.field.values.data()),
                 std::streamsize(s.field.values.size() * sizeof(double))))
      fail(ErrorCode::Io, "truncated snapshot file");
    out.push_back(std::move(s));
  }
  return out;
}

inline void write_trajectory(const std::string& dir, const Trajectory& tr) {
  std::vector<TimedField> dens, pres;
  for (const auto& s : tr.snapshots) {
    dens.push_back({s.t, s.density});
    pres.push_back({s.t, s.pressure});
  }
  write_snapshots(dir + "/density.stpr", dens);
  write_snapshots(dir + "/pressure.stpr", pres);
  std::ofstream os(dir + "/diagnostics.csv");
  if (!os) fail(ErrorCode::Io, "cannot write diagnostics.csv");
  os << "step,t,dt,mass,min,max,max_pressure\n";
  for (const auto& r : tr.diagnostics)
    os << r.step << ',' << detail::num(r.t) << ',' << detail::num(r.dt) << ','
       << detail::num(r.mass) << ',' << detail::num(r.min) << ',' << detail::num(r.max) << ','
       << detail::num(r.max_pressure) << '\n';
}

/// One row per (parameter, norm).
inline std::string sweep_csv(const RateReport& rep) {
  std::ostringstream os;
  os << "parameter,norm,sup_error,e0,t_of_sup\n";
  for (const auto& r : rep.records)
    for (const auto& n : r.norms)
      os << detail::num(r.parameter) << ',' << n.norm << ',' << detail::num(n.sup) << ','
         << detail::num(n.e0) << ',' << detail::num(n.t_of_sup) << '\n';
  return os.str();
}

inline nlohmann::ordered_json fit_json(const std::optional<Fit>& f) {
  if (!f) return nullptr;
  return {{"slope", f->slope}, {"intercept", f->intercept}, {"r2", f->r2}, {"points", f->points}};
}

inline nlohmann::ordered_json verdict_json(const Verdict& v) {
  return {{"name", v.name},
          {"pass", v.pass},
          {"degenerate", v.degenerate},
          {"margin", v.margin},
          {"detail", v.detail}};
}

inline nlohmann::ordered_json report_json(const RateReport& rep) {
  using J = nlohmann::ordered_json;
  J j;
  j["axis"] = rep.axis_name;
  J recs = J::array();
  for (const auto& r : rep.records) {
    J jr{{"parameter", r.parameter}, {"axis", r.axis}, {"ok", r.ok}};
    if (!r.ok) {
      jr["error_tag"] = r.error_tag;
      jr["message"] = r.message;
    }
    jr["steps"] = r.steps;
    jr["max_pressure"] = r.max_pressure;
    jr["bv_max"] = r.bv_max;
    jr["relation_residual"] = r.relation_raw;
    jr["relation_residual_abs"] = r.relation_abs;
    jr["complementarity_residual"] = r.complementarity;
    jr["times"] = r.times;
    J norms = J::object();
    for (const auto& n : r.norms)
      norms[n.norm] = {{"sup", n.sup}, {"e0", n.e0}, {"t_of_sup", n.t_of_sup}, {"errors", n.errors}};
    jr["norms"] = norms;
    recs.push_back(jr);
  }
  j["records"] = recs;
  J fits = J::object();
  for (const auto& f : rep.fits) {
    J jf{{"raw", fit_json(f.raw)}, {"adjusted", fit_json(f.adjusted)}};
    jf["expected_exponent"] = f.expected ? J(*f.expected) : J(nullptr);
    jf["C"] = f.C;
    jf["slope_without_last"] = f.slope_without_last ? J(*f.slope_without_last) : J(nullptr);
    jf["degenerate"] = f.degenerate;
    fits[f.norm] = jf;
  }
  j["fits"] = fits;
  J verdicts = J::array();
  for (const auto& v : rep.verdicts) verdicts.push_back(verdict_json(v));
  j["verdicts"] = verdicts;
  j["all_pass"] = rep.all_pass();
  return j;
}

inline nlohmann::ordered_json appendix_json(const AppendixReport& rep) {
  using J = nlohmann::ordered_json;
  J j;
  j["seed"] = rep.seed;
  J pairs = J::array();
  for (const auto& r : rep.sandwich)
    pairs.push_back({{"index", r.index},
                     {"w2", r.result.w2},
                     {"hm1", r.result.hm1},
                     {"tol", r.result.tol},
                     {"left_ok", r.result.left_ok},
                     {"right_ok", r.result.right_ok}});
  j["sandwich"] = {{"pairs", pairs}, {"pass", rep.sandwich_pass}};
  J diag = J::array();
  for (const auto& d : rep.diagnostics)
    diag.push_back({{"t", d.t},
                    {"mass", d.diag.mass},
                    {"second_moment", d.diag.second_moment},
                    {"entropy", d.diag.entropy},
                    {"log_hls_lhs", d.diag.log_hls_lhs},
                    {"log_hls_bound", d.diag.log_hls_bound},
                    {"log_hls_ok", d.diag.log_hls_ok}});
  j["diagnostics_2d"] = {{"snapshots", diag},
                         {"second_moment_max", rep.second_moment_max},
                         {"second_moment_bound", rep.second_moment_bound},
                         {"entropy_max", rep.entropy_max},
                         {"entropy_bound", rep.entropy_bound},
                         {"moments_pass", rep.moments_pass},
                         {"log_hls_pass", rep.log_hls_pass}};
  j["all_pass"] = rep.all_pass();
  return j;
}

}  // namespace stiffpress
