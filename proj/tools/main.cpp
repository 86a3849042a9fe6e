// numalang command-line driver: check, run, explore, cost.
//
// Exit codes: 0 success; 1 diagnostics (parse/type/WF errors); 2 runtime
// fault; 3 soundness-verification failure; 4 usage error.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "numalang/cost.hpp"
#include "numalang/monitor.hpp"
#include "numalang/mutation.hpp"
#include "numalang/parser.hpp"
#include "numalang/pretty.hpp"
#include "numalang/runtime.hpp"
#include "numalang/typer.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kDiagnostics = 1;
constexpr int kRuntimeFault = 2;
constexpr int kSoundness = 3;
constexpr int kUsage = 4;

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << content;
  return out.good();
}

struct CheckedProgram {
  std::shared_ptr<const numalang::syntax::Program> program;
  numalang::typer::CheckReport report;
};

// Parses and checks; on failure prints diagnostics and returns nullopt.
std::optional<CheckedProgram> load_checked(const std::string& path) {
  auto text = read_file(path);
  if (!text) {
    std::cerr << "cannot read '" << path << "'\n";
    return std::nullopt;
  }
  auto parsed = numalang::syntax::parse_program(*text);
  if (!parsed.ok()) {
    std::cerr << numalang::format_diagnostics(parsed.diagnostics, path);
    return std::nullopt;
  }
  auto program = std::make_shared<numalang::syntax::Program>(std::move(*parsed.value));
  auto report = numalang::typer::check_program(*program);
  if (!report.ok) {
    std::cerr << numalang::format_diagnostics(report.diagnostics, path);
    return std::nullopt;
  }
  return CheckedProgram{std::move(program), std::move(report)};
}

std::optional<numalang::runtime::LocationMap> load_map(const std::string& inline_map,
                                                       const std::string& map_file) {
  std::string text = inline_map;
  if (!map_file.empty()) {
    auto content = read_file(map_file);
    if (!content) {
      std::cerr << "cannot read map file '" << map_file << "'\n";
      return std::nullopt;
    }
    text = *content;
  }
  if (text.empty()) {
    std::cerr << "a location map is required (--map or --map-file)\n";
    return std::nullopt;
  }
  std::string error;
  auto map = numalang::runtime::parse_location_map(text, error);
  if (!map) {
    std::cerr << "invalid location map: " << error << "\n";
    return std::nullopt;
  }
  return map;
}

// The map must cover Main's owners exactly; mismatches are usage errors.
bool map_matches_main(const numalang::syntax::Program& program,
                      const numalang::runtime::LocationMap& map) {
  numalang::syntax::ProgramIndex idx(program);
  const auto* main_cls = idx.find_class("Main");
  if (!main_cls) return false;
  std::set<std::string> owners;
  for (const auto& l : main_cls->owners) owners.insert(l.name);
  for (const auto& l : main_cls->owners) {
    if (!map.count(l.name)) {
      std::cerr << "location map does not cover '" << l.name << "'\n";
      return false;
    }
  }
  for (const auto& [k, v] : map) {
    (void)v;
    if (!owners.count(k)) {
      std::cerr << "location map names unknown location '" << k << "'\n";
      return false;
    }
  }
  return true;
}

std::optional<numalang::cost::CostMatrix> load_matrix(const std::string& path) {
  auto text = read_file(path);
  if (!text) {
    std::cerr << "cannot read matrix file '" << path << "'\n";
    return std::nullopt;
  }
  std::string error;
  auto m = numalang::cost::parse_cost_matrix(*text, error);
  if (!m) {
    std::cerr << "invalid cost matrix: " << error << "\n";
    return std::nullopt;
  }
  return m;
}

void apply_faults(const std::vector<std::string>& faults) {
  for (const auto& f : faults) {
    if (f == "newr-read-label")
      numalang::testing::mutations().newr_read_label = true;
    else if (f == "dispatch-lifo")
      numalang::testing::mutations().dispatch_lifo = true;
    else if (f == "filter-skip-loop")
      numalang::testing::mutations().filter_skip_loop = true;
  }
}

int cmd_check(const std::string& file, const std::string& report_path) {
  auto text = read_file(file);
  if (!text) {
    std::cerr << "cannot read '" << file << "'\n";
    return kUsage;
  }
  auto parsed = numalang::syntax::parse_program(*text);
  if (!parsed.ok()) {
    std::cerr << numalang::format_diagnostics(parsed.diagnostics, file);
    return kDiagnostics;
  }
  auto report = numalang::typer::check_program(*parsed.value);

  std::string records;
  for (const auto& m : report.methods) {
    std::string declared = numalang::syntax::pretty(m.declared);
    std::string inferred = m.inferred ? numalang::syntax::pretty(m.inferred) : "-";
    std::string filtered = m.filtered ? numalang::syntax::pretty(m.filtered) : "-";
    records += "class=" + m.class_name + " method=" + m.method_name +
               " declared=" + declared + " inferred=" + inferred +
               " filtered=" + filtered + " verdict=" + (m.ok ? "ok" : "mismatch") + "\n";
    if (m.ok)
      std::cout << m.class_name << "." << m.method_name << ": " << declared << " ✓\n";
  }
  if (!report_path.empty() && !write_file(report_path, records)) {
    std::cerr << "cannot write report '" << report_path << "'\n";
    return kUsage;
  }
  if (!report.ok) {
    std::cerr << numalang::format_diagnostics(report.diagnostics, file);
    return kDiagnostics;
  }
  return kOk;
}

int cmd_run(const std::string& file, const std::string& map_flag,
            const std::string& map_file, std::uint64_t seed, std::size_t max_steps,
            const std::string& trace_path, bool verify) {
  auto checked = load_checked(file);
  if (!checked) return kDiagnostics;
  auto map = load_map(map_flag, map_file);
  if (!map || !map_matches_main(*checked->program, *map)) return kUsage;

  auto sched = numalang::runtime::SchedulerSpec::random(seed);
  if (verify) {
    auto report = numalang::monitor::verify_run(checked->program, *map, sched, max_steps);
    if (!trace_path.empty()) {
      std::vector<numalang::runtime::TraceEvent> events;
      for (const auto& r : report.records)
        if (!r.event.faulted) events.push_back(r.event);
      if (!write_file(trace_path, numalang::runtime::trace_file(events))) {
        std::cerr << "cannot write trace '" << trace_path << "'\n";
        return kUsage;
      }
    }
    std::cout << numalang::monitor::report_log(report);
    if (report.faulted) {
      std::cerr << "fault: " << report.fault << "\n";
      return kRuntimeFault;
    }
    if (!report.pass) {
      std::cerr << "soundness violation: " << report.failure << "\n";
      return kSoundness;
    }
    std::cout << "verified " << report.steps << " step(s)\n";
    return kOk;
  }

  auto result = numalang::runtime::run(checked->program, *map, sched, max_steps);
  if (!trace_path.empty() &&
      !write_file(trace_path, numalang::runtime::trace_file(result.events))) {
    std::cerr << "cannot write trace '" << trace_path << "'\n";
    return kUsage;
  }
  for (const auto& ev : result.events)
    if (!ev.faulted) std::cout << numalang::runtime::trace_line(ev) << "\n";
  if (result.faulted) {
    std::cerr << "fault: " << result.fault << "\n";
    return kRuntimeFault;
  }
  if (result.hit_max_steps) {
    std::cerr << "stopped after " << max_steps << " steps without quiescence\n";
    return kUsage;
  }
  return kOk;
}

int cmd_explore(const std::string& file, const std::string& map_flag,
                const std::string& map_file, std::size_t depth) {
  auto checked = load_checked(file);
  if (!checked) return kDiagnostics;
  auto map = load_map(map_flag, map_file);
  if (!map || !map_matches_main(*checked->program, *map)) return kUsage;

  auto result = numalang::runtime::explore(checked->program, *map, depth);
  if (result.depth_exceeded) {
    std::cerr << "exploration exceeded depth limit " << depth << "\n";
    return kUsage;
  }

  std::size_t failures = 0;
  std::string first_failure;
  for (const auto& trace : result.traces) {
    if (trace.faulted) {
      ++failures;
      if (first_failure.empty()) first_failure = "machine fault along a trace";
      continue;
    }
    auto sched = numalang::runtime::SchedulerSpec::scripted(trace.script);
    auto report = numalang::monitor::verify_run(checked->program, *map, sched,
                                                trace.script.size() + 1);
    if (!report.pass) {
      ++failures;
      if (first_failure.empty()) first_failure = report.failure;
    }
  }
  std::cout << "interleavings=" << result.traces.size()
            << " steps=" << result.total_steps << " failures=" << failures << "\n";
  if (failures > 0) {
    std::cerr << "verification failed: " << first_failure << "\n";
    return kSoundness;
  }
  return kOk;
}

int cmd_cost(const std::string& file, const std::string& behaviour_text,
             const std::string& map_flag, const std::string& map_file,
             const std::string& matrix_path, bool dynamic, std::uint64_t seed,
             std::size_t max_steps) {
  auto matrix = load_matrix(matrix_path);
  if (!matrix) return kUsage;

  if (!behaviour_text.empty()) {
    auto parsed = numalang::syntax::parse_behaviour(behaviour_text);
    if (!parsed.ok()) {
      std::cerr << numalang::format_diagnostics(parsed.diagnostics, "<behaviour>");
      return kDiagnostics;
    }
    numalang::runtime::LocationMap map;
    if (!map_flag.empty() || !map_file.empty()) {
      auto m = load_map(map_flag, map_file);
      if (!m) return kUsage;
      map = *m;
    }
    try {
      auto report = numalang::cost::static_cost(*parsed.value, map, *matrix);
      std::cout << numalang::cost::format_report(report);
      return kOk;
    } catch (const std::invalid_argument& e) {
      std::cerr << e.what() << "\n";
      return kUsage;
    }
  }

  if (file.empty()) {
    std::cerr << "cost needs a program file or --behaviour\n";
    return kUsage;
  }
  auto checked = load_checked(file);
  if (!checked) return kDiagnostics;
  auto map = load_map(map_flag, map_file);
  if (!map || !map_matches_main(*checked->program, *map)) return kUsage;

  if (dynamic) {
    auto result = numalang::runtime::run(checked->program, *map,
                                         numalang::runtime::SchedulerSpec::random(seed),
                                         max_steps);
    if (result.faulted) {
      std::cerr << "fault: " << result.fault << "\n";
      return kRuntimeFault;
    }
    try {
      auto report = numalang::cost::trace_cost(result.events, *matrix);
      std::cout << "trace: " << numalang::cost::format_report(report);
      return kOk;
    } catch (const std::invalid_argument& e) {
      std::cerr << e.what() << "\n";
      return kUsage;
    }
  }

  // Static mode prices declared behaviours. Only Main's methods mention
  // the mapped abstract locations; other classes' behaviours speak of
  // their ownership parameters and are skipped.
  for (const auto& cls : checked->program->classes) {
    for (const auto& m : cls.methods) {
      std::cout << cls.name << "." << m.name << ": ";
      try {
        auto report = numalang::cost::static_cost(m.declared, *map, *matrix);
        std::cout << numalang::cost::format_report(report);
      } catch (const std::invalid_argument& e) {
        if (cls.name == "Main") {
          std::cerr << e.what() << "\n";
          return kUsage;
        }
        std::cout << "skipped (" << e.what() << ")\n";
      }
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "numalang: checker, simulator and cost analyzer for a NUMA-aware actor language"};
  app.require_subcommand(1);

  std::vector<std::string> faults;
  app.add_option("--inject-fault", faults,
                 "enable an interpreter fault for monitor testing "
                 "(newr-read-label, dispatch-lifo, filter-skip-loop)")
      ->check(CLI::IsMember({"newr-read-label", "dispatch-lifo", "filter-skip-loop"}));

  std::string file, map_flag, map_file, trace_path, report_path, matrix_path,
      behaviour_text;
  std::uint64_t seed = 0;
  std::size_t max_steps = 100000;
  std::size_t depth = 64;
  bool verify = false, dynamic = false;

  auto* check = app.add_subcommand("check", "parse and type-check a program");
  check->add_option("file", file, "source file (.nm)")->required();
  check->add_option("--report", report_path, "write per-method records to a file");

  auto* run = app.add_subcommand("run", "execute a program and emit a trace");
  run->add_option("file", file)->required();
  run->add_option("--map", map_flag, "location map, e.g. L1=0,L2=1");
  run->add_option("--map-file", map_file, "file holding the location map");
  run->add_option("--seed", seed, "scheduler seed (default 0)");
  run->add_option("--max-steps", max_steps, "step budget");
  run->add_option("--trace", trace_path, "write the trace to a file");
  run->add_flag("--verify", verify, "check the soundness monitor at every step");

  auto* explore = app.add_subcommand("explore", "enumerate and verify all interleavings");
  explore->add_option("file", file)->required();
  explore->add_option("--map", map_flag);
  explore->add_option("--map-file", map_file);
  explore->add_option("--depth", depth, "per-trace step limit");

  auto* cost = app.add_subcommand("cost", "price behaviours or traces");
  cost->add_option("file", file);
  cost->add_option("--behaviour", behaviour_text, "price a standalone behaviour term");
  cost->add_option("--map", map_flag);
  cost->add_option("--map-file", map_file);
  cost->add_option("--matrix", matrix_path, "cost matrix file")->required();
  cost->add_flag("--dynamic", dynamic, "run the program and price the trace");
  cost->add_option("--seed", seed);
  cost->add_option("--max-steps", max_steps);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  apply_faults(faults);

  if (check->parsed()) return cmd_check(file, report_path);
  if (run->parsed())
    return cmd_run(file, map_flag, map_file, seed, max_steps, trace_path, verify);
  if (explore->parsed()) return cmd_explore(file, map_flag, map_file, depth);
  if (cost->parsed())
    return cmd_cost(file, behaviour_text, map_flag, map_file, matrix_path, dynamic, seed,
                    max_steps);
  return kUsage;
}
