#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "numalang/runtime.hpp"
#include "numalang/typer.hpp"

namespace numalang::monitor {

using runtime::Config;
using runtime::Label;
using runtime::LocationMap;
using runtime::SchedulerSpec;
using runtime::Stack;
using runtime::TraceEvent;
using syntax::Address;
using syntax::BehaviourPtr;
using syntax::ExprPtr;
using syntax::Program;

/// Raised when a runtime expression fails to type: the interpreter and
/// the type system disagree, which the monitor treats as a bug.
struct MonitorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Types an in-flight expression against the union heap. The typing
/// context is built from the stack with the newest frame outermost, so
/// each `return` wrapper pops exactly one context while descending.
/// Addresses are resolved through the heap's ownership records.
typer::TypedExpr type_at_runtime(const Config& cfg, const Stack& stack, const ExprPtr& e);

/// One global-behaviour entry: the filtered behaviour of an actor's
/// running expression concatenated with those of its queued messages.
struct SigmaEntry {
  Address actor;
  BehaviourPtr behaviour;
};

/// Entries for every runnable object (active objects and the Main
/// instance), in node-then-creation order. Entry positions are aligned
/// across steps by actor address.
struct GlobalBehaviour {
  std::vector<SigmaEntry> entries;
};

GlobalBehaviour global_behaviour(const Config& cfg);
std::string to_string(const GlobalBehaviour& sigma);

/// Configuration well-formedness: (1) node-id uniqueness, (2) address
/// locality and thread typability, (3) heap value agreement including
/// queued-message typing, (4)-(5) stack and frame containment.
std::vector<Diagnostic> wf_config(const Config& cfg);

struct StepVerdict {
  bool pass = false;
  std::string clause;    // matched reduction clauses, e.g. "loop-unroll+pi"
  std::string detail;    // counterexample on failure
  int position = -1;     // acting entry, or first mismatch on failure
};

/// Checks one labelled transition of the global behaviour: some entry
/// must reduce under the label (possibly after silent unrolls and
/// projections), the discarded right branch of a parallel split must be
/// appended to exactly one entry, and every other entry is unchanged.
/// Fresh entries may appear only as eps (actor creation).
StepVerdict check_step(const GlobalBehaviour& before, const Label& label,
                       const GlobalBehaviour& after);

struct StepRecord {
  TraceEvent event;
  std::string sigma_before;
  std::string sigma_after;
  bool pass = false;
  std::string clause;
};

struct SoundnessReport {
  std::vector<StepRecord> records;
  std::vector<Diagnostic> wf_diagnostics;  // first well-formedness violation
  bool pass = false;
  bool faulted = false;       // the run hit a machine fault (not a soundness issue)
  std::string fault;
  std::string failure;        // human-readable cause when pass == false
  std::size_t steps = 0;
};

std::string report_log(const SoundnessReport& report);

/// Runs the program under the scheduler, checking well-formedness and
/// the per-step behaviour reduction after every transition. Labels with
/// equal endpoints are normalized to silent before checking. Halts at
/// the first failing step.
SoundnessReport verify_run(std::shared_ptr<const Program> program, const LocationMap& map,
                           const SchedulerSpec& sched, std::size_t max_steps);

}  // namespace numalang::monitor
