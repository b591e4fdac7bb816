// stiffpress command-line entry point.
//
// Exit codes: 0 success, 1 configuration error, 2 solver / compute error,
// 3 verdict or property failure. Errors print one line "TAG: message" on stderr.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stiffpress/stiffpress.hpp"

namespace fs = std::filesystem;
using namespace stiffpress;
using json = nlohmann::ordered_json;

namespace {

struct Manifest {
  std::string command;
  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
  std::optional<long long> seed;
  std::optional<int> threads;
};

constexpr int kOk = 0, kConfig = 1, kCompute = 2, kVerdict = 3;

Config load(const Manifest& m, bool required) {
  Config cfg = m.config_path.empty() ? (required ? (fail(ErrorCode::Config, "--config is required"), Config())
                                                 : Config::from_string(""))
                                     : Config::load(m.config_path);
  for (const auto& o : m.overrides) cfg.set(o);
  if (m.seed) cfg.set("general.seed=" + std::to_string(*m.seed));
  int threads = 0;
  if (m.threads) {
    threads = *m.threads;
    if (threads < 1) fail(ErrorCode::Config, "thread count must be >= 1");
  } else if (const char* env = std::getenv("STIFFPRESS_THREADS")) {
    try {
      threads = std::stoi(env);
    } catch (const std::exception&) {
      fail(ErrorCode::Config, "STIFFPRESS_THREADS is not an integer");
    }
  }
  if (threads != 0) {
    if (threads < 1) fail(ErrorCode::Config, "thread count must be >= 1");
    cfg.set("general.threads=" + std::to_string(threads));
  }
  return cfg;
}

void prepare_out(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) fail(ErrorCode::Config, "output directory not writable: " + dir);
  const fs::path probe = fs::path(dir) / ".write_probe";
  {
    std::ofstream os(probe);
    if (!os) fail(ErrorCode::Config, "output directory not writable: " + dir);
  }
  fs::remove(probe, ec);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) fail(ErrorCode::Io, "cannot write " + path);
  os << text;
}

json config_echo(const Config& cfg) {
  json j;
  j["sections"] = cfg.sections();
  j["canonical"] = cfg.canonical();
  j["hash"] = cfg.hash();
  return j;
}

int cmd_run(const Manifest& m) {
  const Config cfg = load(m, true);
  const SimConfig sim = cfg.sim();
  prepare_out(m.out_dir);
  const Trajectory tr = solve(sim);
  write_trajectory(m.out_dir, tr);
  json j;
  j["steps"] = tr.steps;
  j["snapshots"] = tr.snapshots.size();
  j["max_pressure"] = tr.max_pressure;
  j["p_max"] = sim.law.p_max;
  j["final_mass"] = mass(tr.snapshots.back().density);
  json bv = json::array();
  for (const auto& s : tr.snapshots) bv.push_back({{"t", s.t}, {"bv", s.bv}});
  j["bv"] = bv;
  j["config"] = config_echo(cfg);
  write_text(m.out_dir + "/run.json", j.dump(2) + "\n");
  std::cout << "run: " << tr.steps << " steps, " << tr.snapshots.size() << " snapshots -> "
            << m.out_dir << "\n";
  return kOk;
}

int cmd_sweep(const Manifest& m) {
  const Config cfg = load(m, true);
  const SweepPlan plan = cfg.sweep();
  prepare_out(m.out_dir);
  RateReport rep;
  if (cfg.mock_solver()) {
    const LimitReference ref = mesa_indicator(plan.base.grid, plan.mesa_mass, plan.mesa_center);
    rep = run_sweep(plan, mock_solver(ref, cfg.mock_c()), ref);
  } else {
    rep = run_sweep(plan);
  }
  write_text(m.out_dir + "/sweep.csv", sweep_csv(rep));
  json j = report_json(rep);
  json t3 = json::array();
  if (plan.theorem3)
    for (const auto& r : theorem3_rows(rep))
      t3.push_back({{"parameter", r.parameter},
                    {"relation_residual", r.relation_residual},
                    {"relation_residual_abs", r.relation_abs},
                    {"complementarity_residual", r.complementarity_residual}});
  j["theorem3"] = t3;
  j["config"] = config_echo(cfg);
  write_text(m.out_dir + "/report.json", j.dump(2) + "\n");
  for (const auto& v : rep.verdicts)
    std::cout << (v.pass ? "PASS " : "FAIL ") << v.name << (v.degenerate ? " (degenerate)" : "")
              << "  " << v.detail << "\n";
  for (const auto& r : rep.records)
    if (!r.ok) {
      std::cerr << r.error_tag << ": run at parameter " << r.parameter << " failed: " << r.message
                << "\n";
      return kCompute;
    }
  if (!rep.all_pass()) {
    std::cerr << "VERDICT_FAILURE: one or more verdicts failed\n";
    return kVerdict;
  }
  return kOk;
}

int cmd_metrics(const Manifest& m) {
  const Config cfg = load(m, true);
  const std::string input = cfg.str("metrics.input");
  const std::string ref_kind = cfg.str("metrics.reference", "none");
  if (ref_kind != "none" && ref_kind != "mesa") fail(ErrorCode::Config, "metrics.reference must be none or mesa");
  std::vector<NormSpec> norms;
  for (const auto& s : detail::split(cfg.str("metrics.norms", "l1,hminus1"))) norms.push_back(parse_norm(s));
  const bool with_law = cfg.has("law.kind");
  const PressureLaw law = with_law ? cfg.law() : PressureLaw{};
  prepare_out(m.out_dir);
  const auto snaps = read_snapshots(input);
  if (snaps.empty()) fail(ErrorCode::Io, "snapshot file holds no snapshots");
  const Grid& g = snaps.front().field.grid;
  std::optional<LimitReference> ref;
  if (ref_kind == "mesa") ref = mesa_indicator(g, cfg.num("metrics.mesa_mass", 1.0));
  std::ofstream os(m.out_dir + "/metrics.csv");
  if (!os) fail(ErrorCode::Io, "cannot write metrics.csv");
  os << "t,mass,min,max,bv,l43_norm";
  if (ref)
    for (const auto& n : norms) os << ',' << n.name() << "_error";
  if (with_law) os << ",relation_residual,complementarity_residual";
  os << "\n";
  for (const auto& s : snaps) {
    const Field& n = s.field;
    os << detail::num(s.t) << ',' << detail::num(mass(n)) << ',' << detail::num(n.min()) << ','
       << detail::num(n.max()) << ',' << detail::num(bv_seminorm(n)) << ','
       << detail::num(lp_norm(n, 4.0 / 3.0));
    if (ref)
      for (const auto& nm : norms) os << ',' << detail::num(nm.measure(n, ref->density(s.t)));
    if (with_law) {
      const Field p = pressure_field(law, n);
      os << ',' << detail::num(relation_residual(n, p).raw) << ','
         << detail::num(complementarity_residual(
                n, p, std::nullopt, std::nullopt,
                law.is_power() ? ComplementarityVariant::Power : ComplementarityVariant::Singular));
    }
    os << "\n";
  }
  std::cout << "metrics: " << snaps.size() << " snapshots -> " << m.out_dir << "/metrics.csv\n";
  return kOk;
}

int cmd_validate(const Manifest& m) {
  const Config cfg = load(m, false);
  ValidateOptions opt;
  opt.seed = std::uint64_t(cfg.integer("general.seed", 0));
  opt.mutant = cfg.str("validate.mutant", "none");
  opt.samples = int(cfg.integer("validate.samples", 10000));
  if (opt.samples < 1) fail(ErrorCode::Config, "validate.samples must be >= 1");
  if (opt.mutant != "none" && opt.mutant != "laplacian_sign")
    fail(ErrorCode::Config, "validate.mutant must be none or laplacian_sign");
  prepare_out(m.out_dir);
  const ValidateReport rep = run_validation(opt);
  json j;
  j["seed"] = opt.seed;
  j["mutant"] = opt.mutant;
  json arr = json::array();
  for (const auto& r : rep.results) {
    arr.push_back({{"name", r.name},
                   {"pass", r.pass},
                   {"value", r.value},
                   {"threshold", r.threshold},
                   {"detail", r.detail}});
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << "  value " << detail::num(r.value)
              << "\n";
  }
  j["properties"] = arr;
  j["all_pass"] = rep.all_pass();
  write_text(m.out_dir + "/validate.json", j.dump(2) + "\n");
  if (!rep.all_pass()) {
    std::cerr << "PROPERTY_FAILURE: one or more properties failed\n";
    return kVerdict;
  }
  return kOk;
}

int cmd_appendix(const Manifest& m) {
  const Config cfg = load(m, false);
  const AppendixOptions opt = cfg.appendix();
  const auto seed = std::uint64_t(cfg.integer("general.seed", 0));
  prepare_out(m.out_dir);
  const AppendixReport rep = appendix_suites(seed, opt);
  write_text(m.out_dir + "/appendix.json", appendix_json(rep).dump(2) + "\n");
  std::cout << (rep.sandwich_pass ? "PASS" : "FAIL") << " sandwich (" << rep.sandwich.size()
            << " pairs)\n"
            << (rep.moments_pass ? "PASS" : "FAIL") << " second moment and entropy bounded\n"
            << (rep.log_hls_pass ? "PASS" : "FAIL") << " log-HLS at every snapshot\n";
  if (!rep.all_pass()) {
    std::cerr << "VERDICT_FAILURE: appendix suite failed\n";
    return kVerdict;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stiffpress: stiff-pressure limit laboratory"};
  app.require_subcommand(1);
  Manifest m;
  auto common = [&m](CLI::App* sub) {
    sub->add_option("--config", m.config_path, "INI configuration file");
    sub->add_option("--out", m.out_dir, "output directory");
    sub->add_option("--set", m.overrides, "override section.key=value (repeatable)");
    sub->add_option_function<long long>("--seed", [&m](long long s) { m.seed = s; }, "random seed");
    sub->add_option_function<int>("--threads", [&m](int t) { m.threads = t; }, "worker threads");
  };
  const std::vector<std::pair<std::string, std::string>> cmds{
      {"run", "solve one configuration and write snapshots"},
      {"sweep", "stiffness sweep with rate fits and verdicts"},
      {"metrics", "compute norms on stored snapshots"},
      {"validate", "run the property suite"},
      {"appendix", "W2/H^-1 sandwich and 2D diagnostics suites"}};
  for (const auto& [name, help] : cmds) common(app.add_subcommand(name, help));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }
  m.command = app.get_subcommands().front()->get_name();

  try {
    if (m.command == "run") return cmd_run(m);
    if (m.command == "sweep") return cmd_sweep(m);
    if (m.command == "metrics") return cmd_metrics(m);
    if (m.command == "validate") return cmd_validate(m);
    if (m.command == "appendix") return cmd_appendix(m);
  } catch (const Error& e) {
    std::cerr << tag(e.code()) << ": " << e.what() << "\n";
    return e.code() == ErrorCode::Config ? kConfig : kCompute;
  } catch (const std::exception& e) {
    std::cerr << "INTERNAL_ERROR: " << e.what() << "\n";
    return kCompute;
  }
  return kConfig;
}
