#pragma once
// INI experiment configuration: schema check, overrides, canonical form and
// content hash, and translation into SimConfig / SweepPlan / suite options.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <openssl/evp.h>

#include "stiffpress/harness.hpp"

namespace stiffpress {

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    fail(ErrorCode::Config, key + ": not a number: '" + v + "'");
  }
}

inline long long to_int(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d != double(static_cast<long long>(d))) fail(ErrorCode::Config, key + ": not an integer");
  return static_cast<long long>(d);
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail(ErrorCode::Config, key + ": not a boolean: '" + v + "'");
}

inline std::string sha1_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx, md, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    fail(ErrorCode::Io, "sha1 digest failed");
  }
  EVP_MD_CTX_free(ctx);
  std::string hex;
  char buf[3];
  for (unsigned i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

}  // namespace detail

/// Git blob object id of `content`: sha1("blob <len>\0" + content).
inline std::string git_blob_hash(const std::string& content) {
  std::string obj = "blob " + std::to_string(content.size());
  obj.push_back('\0');
  obj += content;
  return detail::sha1_hex(obj);
}

/// Published schema: section -> accepted keys.
inline const std::map<std::string, std::set<std::string>>& config_schema() {
  static const std::map<std::string, std::set<std::string>> schema{
      {"general", {"seed", "threads"}},
      {"grid", {"dim", "lo", "hi", "n", "bc"}},
      {"law", {"kind", "gamma", "epsilon", "p_max"}},
      {"drift", {"kind", "strength", "center", "lambda"}},
      {"reaction", {"kind", "rate"}},
      {"time", {"T", "cfl", "snapshots", "snapshot_times", "dt_max", "max_steps",
                "diagnostics_stride"}},
      {"init", {"kind", "gamma", "mass", "t0", "center", "radius", "inner_radius", "height",
                "value"}},
      {"sweep", {"parameters", "reference", "reference_parameter", "mesa_mass", "norms",
                 "slope_tol", "r2_min", "relation_ratio", "complementarity_ratio", "theorem3",
                 "rate_verdicts", "solver", "mock_c"}},
      {"appendix", {"pairs", "n_1d", "n_lower", "quantile_nodes", "run_2d", "n_2d", "gamma_2d",
                    "drift_strength", "bump_radius", "T"}},
      {"validate", {"mutant", "samples"}},
      {"metrics", {"input", "reference", "norms", "mesa_mass"}},
  };
  return schema;
}

class Config {
 public:
  using ptree = boost::property_tree::ptree;

  static Config from_string(const std::string& text) {
    Config c;
    std::istringstream is(text);
    try {
      boost::property_tree::ini_parser::read_ini(is, c.tree_);
    } catch (const boost::property_tree::ini_parser_error& e) {
      fail(ErrorCode::Config, std::string("config parse error: ") + e.message() + " at line " +
                                  std::to_string(e.line()));
    }
    c.check_schema();
    return c;
  }

  static Config load(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Config, "cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str());
  }

  /// Applies "section.key=value".
  void set(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) fail(ErrorCode::Config, "override needs key=value: " + assignment);
    const std::string key = detail::trim(assignment.substr(0, eq));
    const std::string value = detail::trim(assignment.substr(eq + 1));
    const auto dot = key.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == key.size())
      fail(ErrorCode::Config, "override key must be section.key: " + key);
    check_key(key.substr(0, dot), key.substr(dot + 1));
    tree_.put(key, value);
  }

  bool has(const std::string& key) const { return tree_.get_optional<std::string>(key).has_value(); }

  std::string str(const std::string& key, const std::string& def) const {
    return detail::trim(tree_.get<std::string>(key, def));
  }
  std::string str(const std::string& key) const {
    auto v = tree_.get_optional<std::string>(key);
    if (!v) fail(ErrorCode::Config, "missing required key: " + key);
    return detail::trim(*v);
  }
  double num(const std::string& key, double def) const {
    return has(key) ? detail::to_double(key, str(key)) : def;
  }
  double num(const std::string& key) const { return detail::to_double(key, str(key)); }
  long long integer(const std::string& key, long long def) const {
    return has(key) ? detail::to_int(key, str(key)) : def;
  }
  bool flag(const std::string& key, bool def) const {
    return has(key) ? detail::to_bool(key, str(key)) : def;
  }
  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    for (const auto& s : detail::split(str(key, ""))) out.push_back(detail::to_double(key, s));
    return out;
  }

  /// Sorted "section.key=value" lines; the hashed canonical form.
  std::string canonical() const {
    std::map<std::string, std::string> flat;
    for (const auto& [sec, body] : tree_)
      for (const auto& [k, v] : body) flat[sec + "." + k] = detail::trim(v.data());
    std::string out;
    for (const auto& [k, v] : flat) out += k + "=" + v + "\n";
    return out;
  }

  std::map<std::string, std::map<std::string, std::string>> sections() const {
    std::map<std::string, std::map<std::string, std::string>> out;
    for (const auto& [sec, body] : tree_)
      for (const auto& [k, v] : body) out[sec][k] = detail::trim(v.data());
    return out;
  }

  std::string hash() const { return git_blob_hash(canonical()); }

  // -------------------------------------------------------------------------
  // Translation.

  Grid grid() const {
    Grid g;
    g.dim = int(integer("grid.dim", 1));
    if (g.dim != 1 && g.dim != 2) fail(ErrorCode::Config, "grid.dim must be 1 or 2");
    g.n = int(integer("grid.n", 256));
    const auto lo = point("grid.lo", g.dim, -1.5), hi = point("grid.hi", g.dim, 1.5);
    g.lo = lo;
    g.hi = hi;
    const std::string bc = str("grid.bc", "dirichlet");
    if (bc == "dirichlet") g.bc = Boundary::DirichletZero;
    else if (bc == "periodic") g.bc = Boundary::Periodic;
    else fail(ErrorCode::Config, "grid.bc must be dirichlet or periodic");
    try {
      g.validate();
    } catch (const Error& e) {
      fail(ErrorCode::Config, e.what());
    }
    return g;
  }

  PressureLaw law() const {
    const std::string kind = str("law.kind", "power");
    PressureLaw law;
    if (kind == "power") {
      law.kind = PressureLaw::Kind::Power;
      law.gamma = num("law.gamma", 2.0);
    } else if (kind == "singular") {
      law.kind = PressureLaw::Kind::Singular;
      law.epsilon = num("law.epsilon", 0.1);
    } else {
      fail(ErrorCode::Config, "law.kind must be power or singular");
    }
    const std::string pm = str("law.p_max", "auto");
    law.p_max = pm == "auto" ? 1.0 : detail::to_double("law.p_max", pm);
    wrap([&] { law.validate(); });
    return law;
  }

  SimConfig sim() const {
    SimConfig c;
    c.grid = grid();
    c.law = law();
    c.p_max_auto = str("law.p_max", "auto") == "auto";

    const std::string dk = str("drift.kind", "none");
    if (dk == "quadratic") {
      c.drift = quadratic_drift(num("drift.strength", 1.0), point("drift.center", c.grid.dim, 0.0));
      if (has("drift.lambda")) c.drift->lambda = num("drift.lambda");
    } else if (dk != "none") {
      fail(ErrorCode::Config, "drift.kind must be none or quadratic");
    }
    const std::string rk = str("reaction.kind", "none");
    if (rk == "constant") c.reaction = constant_reaction(num("reaction.rate", 0.0));
    else if (rk != "none") fail(ErrorCode::Config, "reaction.kind must be none or constant");

    c.T = num("time.T", 1.0);
    c.cfl = num("time.cfl", 0.4);
    c.dt_max = num("time.dt_max", 0.0);
    const long long ms = integer("time.max_steps", 100'000'000);
    if (ms <= 0) fail(ErrorCode::Config, "time.max_steps must be positive");
    c.max_steps = std::size_t(ms);
    const long long stride = integer("time.diagnostics_stride", 1);
    if (stride <= 0) fail(ErrorCode::Config, "time.diagnostics_stride must be positive");
    c.diagnostics_stride = std::size_t(stride);
    if (has("time.snapshot_times")) {
      c.snapshot_times = list("time.snapshot_times");
    } else if (has("time.snapshots")) {
      const long long k = integer("time.snapshots", 11);
      if (k < 1) fail(ErrorCode::Config, "time.snapshots must be >= 1");
      if (k == 1 || c.T == 0.0) {
        c.snapshot_times = {c.T};
      } else {
        for (long long i = 0; i < k; ++i) c.snapshot_times.push_back(c.T * double(i) / double(k - 1));
        c.snapshot_times.back() = c.T;
      }
    }

    InitialDatum& in = c.init;
    const std::string ik = str("init.kind", "barenblatt");
    static const std::map<std::string, InitialDatum::Kind> kinds{
        {"barenblatt", InitialDatum::Kind::Barenblatt}, {"indicator", InitialDatum::Kind::Indicator},
        {"bump", InitialDatum::Kind::Bump},             {"constant", InitialDatum::Kind::Constant},
        {"annulus", InitialDatum::Kind::Annulus}};
    const auto it = kinds.find(ik);
    if (it == kinds.end()) fail(ErrorCode::Config, "unknown init.kind: " + ik);
    in.kind = it->second;
    const std::string ig = str("init.gamma", "auto");
    in.gamma_auto = ig == "auto";
    if (!in.gamma_auto) in.gamma = detail::to_double("init.gamma", ig);
    in.mass = num("init.mass", 1.0);
    in.t0 = num("init.t0", 1.0);
    in.center = point("init.center", c.grid.dim, 0.0);
    in.radius = num("init.radius", 0.5);
    in.inner_radius = num("init.inner_radius", 0.2);
    in.height = num("init.height", 1.0);
    in.value = num("init.value", 0.5);
    if (in.kind == InitialDatum::Kind::Barenblatt && !(in.gamma_auto || in.gamma > 1.0))
      fail(ErrorCode::Config, "init.gamma must exceed 1");
    if (in.kind == InitialDatum::Kind::Barenblatt && in.gamma_auto && !c.law.is_power())
      fail(ErrorCode::Config, "init.gamma=auto needs law.kind=power");
    if (!(in.mass > 0.0) || !(in.t0 > 0.0) || !(in.radius > 0.0) || !(in.height >= 0.0))
      fail(ErrorCode::Config, "init parameters must be positive");

    wrap([&] {
      c = resolve(c);
      c.validate();
    });
    return c;
  }

  SweepPlan sweep() const {
    SweepPlan p;
    p.base = sim();
    p.parameters = list("sweep.parameters");
    const std::string ref = str("sweep.reference", "mesa");
    if (ref == "mesa") p.reference = SweepPlan::Reference::Mesa;
    else if (ref == "surrogate") p.reference = SweepPlan::Reference::Surrogate;
    else fail(ErrorCode::Config, "sweep.reference must be mesa or surrogate");
    p.reference_parameter = num("sweep.reference_parameter", 0.0);
    p.mesa_mass = num("sweep.mesa_mass", p.base.init.kind == InitialDatum::Kind::Barenblatt
                                             ? p.base.init.mass
                                             : 1.0);
    p.mesa_center = p.base.init.center;
    if (has("sweep.norms")) {
      p.norms.clear();
      for (const auto& s : detail::split(str("sweep.norms"))) p.norms.push_back(parse_norm(s));
    }
    p.seed = std::uint64_t(integer("general.seed", 0));
    p.slope_tol = num("sweep.slope_tol", 0.15);
    p.r2_min = num("sweep.r2_min", 0.95);
    p.relation_ratio = num("sweep.relation_ratio", 0.25);
    p.complementarity_ratio = num("sweep.complementarity_ratio", 0.5);
    p.theorem3 = flag("sweep.theorem3", true);
    p.rate_verdicts = flag("sweep.rate_verdicts", true);
    p.threads = int(integer("general.threads", 1));
    const std::string solver = str("sweep.solver", "real");
    if (solver != "real" && solver != "mock") fail(ErrorCode::Config, "sweep.solver must be real or mock");
    if (solver == "mock" && ref != "mesa") fail(ErrorCode::Config, "mock solver needs the mesa reference");
    p.base.init.gamma_auto = p.base.init.gamma_auto && p.base.law.is_power();
    wrap([&] { p.validate(); });
    return p;
  }

  bool mock_solver() const { return str("sweep.solver", "real") == "mock"; }
  double mock_c() const { return num("sweep.mock_c", 0.01); }

  AppendixOptions appendix() const {
    AppendixOptions o;
    o.pairs = int(integer("appendix.pairs", o.pairs));
    o.n_1d = int(integer("appendix.n_1d", o.n_1d));
    o.n_lower = num("appendix.n_lower", o.n_lower);
    o.quantile_nodes = int(integer("appendix.quantile_nodes", o.quantile_nodes));
    o.run_2d = flag("appendix.run_2d", o.run_2d);
    o.n_2d = int(integer("appendix.n_2d", o.n_2d));
    o.gamma_2d = num("appendix.gamma_2d", o.gamma_2d);
    o.drift_strength = num("appendix.drift_strength", o.drift_strength);
    o.bump_radius = num("appendix.bump_radius", o.bump_radius);
    o.T_2d = num("appendix.T", o.T_2d);
    if (o.pairs < 1 || o.n_1d < 4 || o.n_2d < 4 || !(o.n_lower > 0.0 && o.n_lower < 1.0) ||
        o.quantile_nodes < 2 || !(o.gamma_2d > 1.0) || !(o.bump_radius > 0.0) || !(o.T_2d >= 0.0))
      fail(ErrorCode::Config, "invalid [appendix] settings");
    return o;
  }

  const ptree& tree() const { return tree_; }

 private:
  template <class F>
  static void wrap(F&& f) {
    try {
      f();
    } catch (const Error& e) {
      const ErrorCode c = e.code();
      if (c == ErrorCode::InvalidArgument || c == ErrorCode::InvalidGrid || c == ErrorCode::Domain)
        fail(ErrorCode::Config, e.what());
      throw;
    }
  }

  Point point(const std::string& key, int dim, double def) const {
    if (!has(key)) return {def, dim == 2 ? def : 0.0};
    const auto v = list(key);
    if (v.size() == 1) return {v[0], dim == 2 ? v[0] : 0.0};
    if (v.size() == 2 && dim == 2) return {v[0], v[1]};
    fail(ErrorCode::Config, key + ": expected " + std::to_string(dim) + " component(s)");
  }

  static void check_key(const std::string& sec, const std::string& key) {
    const auto& schema = config_schema();
    const auto it = schema.find(sec);
    if (it == schema.end()) fail(ErrorCode::Config, "unknown config section: [" + sec + "]");
    if (!it->second.count(key)) fail(ErrorCode::Config, "unknown config key: " + sec + "." + key);
  }

  void check_schema() const {
    for (const auto& [sec, body] : tree_) {
      if (!body.data().empty() && body.empty())
        fail(ErrorCode::Config, "config keys must live inside a [section]: " + sec);
      for (const auto& [k, v] : body) check_key(sec, k);
    }
  }

  ptree tree_;
};

}  // namespace stiffpress
