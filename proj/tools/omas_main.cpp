// omas: analyze, certify and simulate open multi-agent scenarios.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "omas/errors.hpp"
#include "omas/report.hpp"
#include "omas/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kRuntime = 1, kSchema = 2, kAssumption = 3, kDiverged = 4 };

struct Common {
  std::string scenario;
  std::string out;
  std::string signal_file;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::string suffixes;
  bool strict = false;
  bool json_out = false;
  bool calibrate = false;
  int sweep = 1;
};

omas::Scenario load(const Common& c) {
  omas::Scenario sc = omas::load_scenario(c.scenario);
  if (c.seed) sc.seed = *c.seed;
  if (c.dt) {
    if (!(*c.dt > 0.0)) throw omas::ConfigError("--dt must be positive");
    sc.simulation.dt = *c.dt;
  }
  if (c.suffixes == "all") sc.certification.suffixes = omas::SuffixMode::All;
  if (c.suffixes == "first") sc.certification.suffixes = omas::SuffixMode::First;
  if (!c.signal_file.empty()) {
    std::ifstream in(c.signal_file);
    if (!in) throw omas::ConfigError(c.signal_file + ": cannot open signal file");
    const omas::SwitchingSignal sig = omas::signal_from_json(json::parse(in));
    sc.signal.t0 = sig.t0();
    sc.signal.tf = sig.tf();
    sc.signal.segments = sig.segments();
    sc.signal.generate.reset();
  }
  return sc;
}

void emit(const json& j, const Common& c, const std::string& name) {
  if (c.out.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  fs::create_directories(c.out);
  const fs::path path = fs::path(c.out) / name;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << j.dump(2) << "\n";
  std::cerr << "wrote " << path.string() << "\n";
}

int cmd_analyze(const Common& c) {
  const omas::Scenario sc = load(c);
  const omas::Analysis a = omas::analyze(sc);
  const json j = omas::analysis_to_json(a, sc);
  if (c.json_out || !c.out.empty()) emit(j, c, "analysis.json");
  if (!c.json_out) std::cout << omas::analysis_table(a);
  return kOk;
}

int cmd_certify(const Common& c) {
  omas::Scenario sc = load(c);
  if (c.calibrate && !sc.certification.calibration) {
    sc.certification.calibration = omas::CalibrationTargets{13.15, 2.42};
  }
  const omas::Certification cert = omas::certify(sc);
  json j = omas::certification_to_json(cert);
  emit(j, c, "certificate.json");
  std::cerr << "ratio lower bound " << cert.bundle.budget().ratio_lower_bound() << ", ADT lower bound "
            << cert.bundle.budget().adt_lower_bound() << ", verdict " << (cert.theorem1.ok ? "ok" : "FAILED")
            << "\n";
  if (!cert.theorem1.ok) {
    std::cerr << "binding suffix: j = " << (cert.theorem1.ratio_ok ? cert.theorem1.worst_j_adt : cert.theorem1.worst_j_ratio)
              << "\n";
  }
  if (!cert.bundle.bounded) throw omas::UnboundedCertificate("ultimate bound diverges (varsigma_bar >= 0)");
  return kOk;
}

struct SimOutcome {
  json summary;
  bool diverged = false;
};

SimOutcome simulate_one(const omas::Scenario& sc, const fs::path& out) {
  std::optional<omas::Certification> cert;
  try {
    cert = omas::certify(sc);
  } catch (const omas::AssumptionViolation& e) {
    if (sc.signal.generate) throw;
    std::cerr << "warning: running without a certificate: " << e.what() << "\n";
  } catch (const omas::CertificateError& e) {
    if (sc.signal.generate) throw;
    std::cerr << "warning: running without a certificate: " << e.what() << "\n";
  }
  const omas::SwitchingSignal sig = cert ? cert->signal : omas::explicit_signal(sc);
  const omas::SimulationSetup setup = omas::build_setup(sc, sig);
  const omas::CertificateBundle* bundle = cert ? &cert->bundle : nullptr;
  const omas::SimulationResult res = omas::run_scenario(setup, sc.simulation, bundle);

  fs::create_directories(out);
  auto open = [&out](const char* name) {
    std::ofstream os(out / name);
    if (!os) throw std::runtime_error("cannot write " + (out / name).string());
    return os;
  };
  {
    auto os = open("trajectory.csv");
    omas::write_trajectory_csv(os, res.traj);
  }
  {
    auto os = open("events.csv");
    omas::write_event_csv(os, res.traj);
  }
  std::optional<omas::LyapunovTrace> lyap;
  if (bundle) {
    lyap = omas::lyapunov_trace(res.traj, *bundle);
    auto os = open("lyapunov.csv");
    omas::write_lyapunov_csv(os, *lyap);
  }
  SimOutcome o;
  o.summary = omas::summary_to_json(res.summary, sc.seed, lyap ? &*lyap : nullptr);
  if (cert) o.summary["theorem1"] = omas::theorem1_to_json(cert->theorem1);
  o.diverged = res.summary.diverged;
  open("summary.json") << o.summary.dump(2) << "\n";
  open("signal.json") << omas::signal_to_json(sig).dump(2) << "\n";
  return o;
}

int cmd_simulate(const Common& c) {
  const omas::Scenario sc = load(c);
  if (c.out.empty()) throw omas::ConfigError("simulate needs --out <dir>");
  if (c.sweep <= 1) {
    const SimOutcome o = simulate_one(sc, c.out);
    std::cerr << "tail_sup_error " << o.summary["tail_sup_error"] << ", epsilon " << o.summary["epsilon"]
              << (o.diverged ? ", DIVERGED" : "") << "\n";
    return o.diverged && c.strict ? kDiverged : kOk;
  }

  // Independent seeds share nothing mutable; each run gets its own directory.
  std::vector<std::future<SimOutcome>> runs;
  for (int i = 0; i < c.sweep; ++i) {
    omas::Scenario run = sc;
    run.seed = sc.seed + static_cast<std::uint64_t>(i);
    const fs::path dir = fs::path(c.out) / ("seed_" + std::to_string(run.seed));
    runs.push_back(std::async(std::launch::async, [run, dir] { return simulate_one(run, dir); }));
  }
  json all = json::array();
  bool any_diverged = false;
  for (auto& f : runs) {
    SimOutcome o = f.get();
    any_diverged = any_diverged || o.diverged;
    all.push_back(std::move(o.summary));
  }
  std::ofstream(fs::path(c.out) / "sweep.json") << all.dump(2) << "\n";
  std::cerr << "wrote " << c.sweep << " runs to " << c.out << "\n";
  return any_diverged && c.strict ? kDiverged : kOk;
}

int cmd_gen_signal(const Common& c) {
  omas::Scenario sc = load(c);
  if (!sc.signal.generate) sc.signal.generate = omas::GenerateSpec{};
  const omas::Certification cert = omas::certify(sc);
  json j = omas::signal_to_json(cert.signal);
  j["ratio_lower_bound"] = cert.theorem1.ratio_lower_bound;
  j["adt_lower_bound"] = cert.theorem1.adt_lower_bound;
  j["seed"] = sc.seed;
  j["theorem1_ok"] = cert.theorem1.ok;
  emit(j, c, "signal.json");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Open multi-agent system analysis, certification and simulation"};
  app.require_subcommand(1);
  Common c;

  auto add_common = [&c](CLI::App* sub) {
    sub->add_option("--scenario", c.scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", c.out, "Output directory (stdout when omitted)");
    sub->add_option("--seed", c.seed, "Override the scenario seed");
    sub->add_option("--dt", c.dt, "Override the integration step");
    sub->add_option("--signal", c.signal_file, "Use this signal file instead of the scenario signal")
        ->check(CLI::ExistingFile);
    sub->add_option("--validate-suffixes", c.suffixes, "Suffixes checked by the switching validator")
        ->check(CLI::IsMember({"all", "first"}));
  };

  CLI::App* analyze = app.add_subcommand("analyze", "Classify modes and report spectra");
  add_common(analyze);
  analyze->add_flag("--json", c.json_out, "Print JSON instead of the table");
  CLI::App* certify = app.add_subcommand("certify", "Solve mode certificates and check the switching conditions");
  add_common(certify);
  certify->add_flag("--calibrate", c.calibrate, "Search margins reproducing ratio 13.15 and ADT 2.42 unless targets are given");
  CLI::App* simulate = app.add_subcommand("simulate", "Integrate the scenario and write traces");
  add_common(simulate);
  simulate->add_flag("--strict", c.strict, "Exit with 4 when the run diverges");
  simulate->add_option("--sweep", c.sweep, "Run this many consecutive seeds in parallel")->check(CLI::Range(1, 4096));
  CLI::App* gen = app.add_subcommand("gen-signal", "Generate a compliant switching signal");
  add_common(gen);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kSchema;
  }

  try {
    if (*analyze) return cmd_analyze(c);
    if (*certify) return cmd_certify(c);
    if (*simulate) return cmd_simulate(c);
    if (*gen) return cmd_gen_signal(c);
  } catch (const omas::ConfigError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kSchema;
  } catch (const json::exception& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kSchema;
  } catch (const omas::AssumptionViolation& e) {
    std::cerr << "assumption violated: " << e.what() << "\n";
    return kAssumption;
  } catch (const omas::CertificateError& e) {
    std::cerr << "certificate failure: " << e.what() << "\n";
    return kAssumption;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kOk;
}
