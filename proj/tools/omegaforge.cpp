// Command-line front end. Exit codes: 0 ok, 2 input/schema problems,
// 3 violated preconditions or a failed randomness-test bound, 4 broken
// machine invariants (or an unexpected error).

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "omegaforge/errors.hpp"
#include "omegaforge/measure.hpp"
#include "omegaforge/mltest.hpp"
#include "omegaforge/scripts.hpp"

using namespace omegaforge;

namespace {

// --- small input helpers ----------------------------------------------------

ordered_json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw schema_error("cannot open \"" + path + "\"");
  return ordered_json::parse(in);
}

unsigned cfg_uint(const ordered_json& j, const std::string& what) {
  if (!j.is_number_unsigned()) throw schema_error(what + " must be a non-negative integer");
  return j.get<unsigned>();
}

// Writes via a temporary in the same directory plus rename, so a rerun that
// produces identical bytes never leaves a half-written file behind.
void write_file_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << content;
    out.flush();
    if (!out) {
      std::remove(tmp.c_str());
      throw domain_error("cannot write \"" + tmp + "\"");
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw domain_error("cannot rename \"" + tmp + "\" to \"" + path + "\"");
  }
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty())
    std::cout << content;
  else
    write_file_atomic(out_path, content);
}

// --- configuration -----------------------------------------------------------

struct Settings {
  unsigned depth = 6;
  unsigned stage = 32;
  unsigned nmax = 8;
  unsigned jobs = 1;
  std::optional<std::vector<ScheduleRow>> schedule;
};

// Sources in precedence order: --config path, then the OMEGA_FORGE_CONFIG
// environment variable, then ./omegaforge.json. A path named by either of
// the first two must exist; the default file is optional.
Settings load_settings(const std::string& config_flag) {
  std::string path;
  bool named_explicitly = false;
  if (!config_flag.empty()) {
    path = config_flag;
    named_explicitly = true;
  } else if (const char* env = std::getenv("OMEGA_FORGE_CONFIG"); env != nullptr && *env != '\0') {
    path = env;
    named_explicitly = true;
  } else {
    path = "omegaforge.json";
  }

  Settings s;
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (named_explicitly) throw schema_error("cannot open config \"" + path + "\"");
    return s;
  }
  ordered_json j = ordered_json::parse(in);
  if (!j.is_object()) throw schema_error("config must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key == "jobs")
      s.jobs = cfg_uint(*it, "config \"jobs\"");
    else if (key == "depth")
      s.depth = cfg_uint(*it, "config \"depth\"");
    else if (key == "stage")
      s.stage = cfg_uint(*it, "config \"stage\"");
    else if (key == "nmax")
      s.nmax = cfg_uint(*it, "config \"nmax\"");
    else if (key == "seed")
      (void)cfg_uint(*it, "config \"seed\"");  // reserved; accepted and unused
    else if (key == "schedule") {
      if (!it->is_array()) throw schema_error("config \"schedule\" must be an array");
      std::vector<ScheduleRow> rows;
      for (const ordered_json& r : *it) {
        if (!r.is_array() || r.size() != 3)
          throw schema_error("config \"schedule\" rows must be [depth, stage, nmax]");
        rows.push_back({cfg_uint(r[0], "schedule depth"), cfg_uint(r[1], "schedule stage"),
                        cfg_uint(r[2], "schedule nmax")});
      }
      s.schedule = std::move(rows);
    } else {
      throw schema_error("unknown key \"" + key + "\" in config");
    }
  }
  return s;
}

// --- subcommands --------------------------------------------------------------

const char* kind_name(AnyMachine::Kind k) {
  switch (k) {
    case AnyMachine::Kind::oracle: return "oracle";
    case AnyMachine::Kind::monotone: return "monotone";
    case AnyMachine::Kind::infsd: return "infsd";
  }
  return "?";
}

int run_build(const std::string& input, const std::string& out_path) {
  BuiltMachine b = build_machine(read_json_file(input));
  ordered_json report;
  report["kind"] = kind_name(b.machine.kind);
  report.update(b.log);
  emit(out_path, dump_json(report));
  return 0;
}

int run_trace(const std::string& input, const std::string& tag_name, const Settings& s,
              bool row_flags_given, const std::string& out_path) {
  std::optional<ClassTag> tag = class_tag_parse(tag_name);
  if (!tag) throw schema_error("unknown class tag \"" + tag_name + "\"");

  std::vector<ScheduleRow> schedule;
  if (s.schedule && !row_flags_given) {
    schedule = *s.schedule;
  } else if (s.depth == 0) {
    schedule.push_back({0, s.stage, s.nmax});
  } else {
    for (unsigned l = 1; l <= s.depth; ++l)
      schedule.push_back({l, s.stage * l / s.depth, s.nmax * l / s.depth});
  }

  BuiltMachine b = build_machine(read_json_file(input));
  std::vector<MeasureBound> rows;
  switch (b.machine.kind) {
    case AnyMachine::Kind::oracle:
      rows = trace(*b.machine.oracle, *tag, schedule, s.jobs);
      break;
    case AnyMachine::Kind::monotone:
      rows = trace(*b.machine.monotone, *tag, schedule, s.jobs);
      break;
    case AnyMachine::Kind::infsd:
      rows = trace(*b.machine.infsd, *tag, schedule, s.jobs);
      break;
  }
  emit(out_path, trace_csv(rows));
  return 0;
}

int run_mltest(const std::string& input, const std::string& out_path) {
  ordered_json j = read_json_file(input);
  if (!j.is_object()) throw schema_error("test description must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key != "anchor" && key != "enumeration" && key != "margins" && key != "horizon")
      throw schema_error("unknown key \"" + key + "\" in test description");
  }
  if (!j.contains("anchor") || !j.contains("enumeration") || !j.contains("margins") ||
      !j.contains("horizon"))
    throw schema_error("test description requires \"anchor\", \"enumeration\", \"margins\" and \"horizon\"");

  StagewiseSet anchor = load_set(j["anchor"]);
  StagewiseSet enumeration = load_set(j["enumeration"]);
  if (!j["margins"].is_array()) throw schema_error("\"margins\" must be an array");
  std::vector<Rational> margins;
  for (const ordered_json& m : j["margins"]) {
    if (!m.is_string()) throw schema_error("margins must be \"p/q\" strings");
    margins.push_back(parse_rational(m.get<std::string>()));
  }
  unsigned horizon = cfg_uint(j["horizon"], "\"horizon\"");

  MLTest t = ml_test_build(anchor, enumeration, margins, horizon);
  MLReport report = ml_test_verify(t);

  ordered_json rows = ordered_json::array();
  for (const MLReportRow& r : report.rows) {
    std::cout << "component " << r.n << ": measure " << r.measure.to_string() << " vs bound "
              << r.bound.to_string() << " -> " << (r.ok ? "ok" : "VIOLATED") << "\n";
    ordered_json row;
    row["n"] = r.n;
    row["measure"] = r.measure.to_string();
    row["bound"] = r.bound.to_string();
    row["slack"] = r.slack.to_string();
    row["ok"] = r.ok;
    rows.push_back(std::move(row));
  }
  ordered_json summary;
  summary["rows"] = std::move(rows);
  summary["all_ok"] = report.all_ok;
  if (report.first_violation) summary["first_violation"] = *report.first_violation;
  if (!out_path.empty()) write_file_atomic(out_path, dump_json(summary));

  if (!report.all_ok) {
    std::cout << "bound violated first at component " << *report.first_violation << "\n";
    return 3;
  }
  std::cout << "all components within bounds\n";
  return 0;
}

int run_verify(const std::string& input, const Settings& s, const std::string& out_path) {
  BuiltMachine b = build_machine(read_json_file(input));
  ordered_json report;
  report["kind"] = kind_name(b.machine.kind);
  switch (b.machine.kind) {
    case AnyMachine::Kind::oracle: {
      CheckHorizons h{s.depth, s.nmax, s.stage};
      check_oracle_machine_invariants(*b.machine.oracle, h);
      std::cout << "oracle machine: invariants hold (depth " << s.depth << ", n_max " << s.nmax
                << ", stage " << s.stage << ")\n";
      report["depth"] = s.depth;
      report["n_max"] = s.nmax;
      report["stage"] = s.stage;
      break;
    }
    case AnyMachine::Kind::monotone:
      check_monotone_machine_invariants(*b.machine.monotone, s.depth, s.stage);
      std::cout << "monotone machine: invariants hold (depth " << s.depth << ", stage " << s.stage
                << ")\n";
      report["depth"] = s.depth;
      report["stage"] = s.stage;
      break;
    case AnyMachine::Kind::infsd:
      check_infsd_machine_invariants(*b.machine.infsd, s.depth, s.nmax);
      std::cout << "infsd machine: invariants hold (depth " << s.depth << ", n_max " << s.nmax
                << ")\n";
      report["depth"] = s.depth;
      report["n_max"] = s.nmax;
      break;
  }
  report["invariants"] = "ok";
  if (!out_path.empty()) write_file_atomic(out_path, dump_json(report));
  return 0;
}

int run_concordance() {
  struct Row {
    const char* name;
    const char* route;
  };
  const Row rows[] = {
      {"Kraft-Chaitin weight allocation",
       "build {\"construction\": \"prescribed-*\"} -- the \"allocations\" list in the report"},
      {"hat trick (canonical approximations)",
       "sets with \"kind\": \"canonical-sigma2\"; library entry point hat_trick()"},
      {"true stages", "library entry point true_stages() over known-limit oracles"},
      {"totality-region machines",
       "build {\"construction\": \"tot-from-sigma2\"}; trace <machine> TOT"},
      {"prescribed probabilities",
       "build {\"construction\": \"prescribed-tot\" | \"prescribed-cof\" | \"prescribed-com\" | "
       "\"prescribed-domain-infsd\"}"},
      {"movable markers",
       "build {\"construction\": \"cof-from-sigma3\"}; trace <machine> COF-domain"},
      {"universal machine splicing",
       "build {\"construction\": \"splice\" | \"universal-family\" | "
       "\"prescribed-universal-tot\"}"},
      {"Martin-Lof tests", "mltest <test.json>"},
  };
  std::size_t width = 0;
  for (const Row& r : rows) width = std::max(width, std::string(r.name).size());
  for (const Row& r : rows) {
    std::string name = r.name;
    name.resize(width, ' ');
    std::cout << name << "  " << r.route << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"omegaforge: stagewise machines, outcome-class measures, randomness tests"};
  app.require_subcommand(1);

  std::string build_input, build_out;
  CLI::App* build_cmd = app.add_subcommand("build", "construct a machine, print its build report");
  build_cmd->add_option("input", build_input, "machine description (JSON)")->required();
  build_cmd->add_option("--out", build_out, "write the report to this file (atomic)");

  std::string trace_input, trace_tag, trace_out, trace_config;
  unsigned f_depth = 0, f_stage = 0, f_nmax = 0, f_jobs = 0;
  CLI::App* trace_cmd =
      app.add_subcommand("trace", "bracket a class measure over a truncation schedule (CSV)");
  trace_cmd->add_option("input", trace_input, "machine description (JSON)")->required();
  trace_cmd->add_option("tag", trace_tag, "class tag (e.g. TOT, COF-domain, DOM-infsd)")
      ->required();
  CLI::Option* od = trace_cmd->add_option("--depth", f_depth, "cylinder depth of the last row");
  CLI::Option* os = trace_cmd->add_option("--stage", f_stage, "stage of the last row");
  CLI::Option* on = trace_cmd->add_option("--nmax", f_nmax, "evaluation horizon of the last row");
  CLI::Option* oj = trace_cmd->add_option("--jobs", f_jobs, "worker threads");
  trace_cmd->add_option("--config", trace_config, "configuration file");
  trace_cmd->add_option("--out", trace_out, "write the CSV to this file (atomic)");

  std::string ml_input, ml_out;
  CLI::App* ml_cmd = app.add_subcommand("mltest", "build and verify a randomness test");
  ml_cmd->add_option("input", ml_input, "test description (JSON)")->required();
  ml_cmd->add_option("--out", ml_out, "write the JSON report to this file (atomic)");

  std::string verify_input, verify_out, verify_config;
  unsigned v_depth = 0, v_stage = 0, v_nmax = 0;
  CLI::App* verify_cmd =
      app.add_subcommand("verify-machine", "run the machine-contract invariant suite");
  verify_cmd->add_option("input", verify_input, "machine description (JSON)")->required();
  CLI::Option* vd = verify_cmd->add_option("--depth", v_depth, "oracle-prefix depth to sweep");
  CLI::Option* vs = verify_cmd->add_option("--stage", v_stage, "stage horizon to sweep");
  CLI::Option* vn = verify_cmd->add_option("--nmax", v_nmax, "evaluation horizon to sweep");
  verify_cmd->add_option("--config", verify_config, "configuration file");
  verify_cmd->add_option("--out", verify_out, "write a JSON confirmation to this file (atomic)");

  CLI::App* conc_cmd =
      app.add_subcommand("concordance", "map classical construction names to tool routes");

  try {
    app.parse(argc, argv);

    if (*build_cmd) return run_build(build_input, build_out);
    if (*trace_cmd) {
      Settings s = load_settings(trace_config);
      if (od->count()) s.depth = f_depth;
      if (os->count()) s.stage = f_stage;
      if (on->count()) s.nmax = f_nmax;
      if (oj->count()) s.jobs = f_jobs;
      bool row_flags = od->count() || os->count() || on->count();
      return run_trace(trace_input, trace_tag, s, row_flags, trace_out);
    }
    if (*ml_cmd) return run_mltest(ml_input, ml_out);
    if (*verify_cmd) {
      Settings s = load_settings(verify_config);
      if (vd->count()) s.depth = v_depth;
      if (vs->count()) s.stage = v_stage;
      if (vn->count()) s.nmax = v_nmax;
      return run_verify(verify_input, s, verify_out);
    }
    if (*conc_cmd) return run_concordance();
    return 0;
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const schema_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const invariant_violation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 4;
  } catch (const domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 4;
  }
}
