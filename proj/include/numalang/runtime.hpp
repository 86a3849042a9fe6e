#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "numalang/ast.hpp"
#include "numalang/diag.hpp"

namespace numalang::runtime {

using syntax::Address;
using syntax::ExprPtr;
using syntax::NodeId;
using syntax::Program;
using syntax::ProgramIndex;
using syntax::RemAccess;

/// Runtime values: the literals plus heap addresses.
struct Value {
  enum class Kind { True, False, Null, Addr };
  Kind kind = Kind::Null;
  Address addr;

  static Value truth(bool b) { return Value{b ? Kind::True : Kind::False, {}}; }
  static Value null() { return Value{Kind::Null, {}}; }
  static Value address(Address a) { return Value{Kind::Addr, a}; }

  friend auto operator<=>(const Value&, const Value&) = default;
};

Value value_of_expr(const ExprPtr& e);  // precondition: is_value(e)
ExprPtr expr_of_value(const Value& v);
bool is_value_expr(const ExprPtr& e);
std::string to_string(const Value& v);

/// A queued message m(v) awaiting dispatch.
struct Message {
  std::string method;
  std::optional<Value> arg;
};

/// Heap record: class, owner nodes (first = the holding node), field
/// store, and a FIFO mailbox for active objects (nullopt marks the
/// passive bullet).
struct ObjectRecord {
  std::string class_name;
  std::vector<NodeId> owner_nodes;
  std::vector<std::pair<std::string, Value>> fields;
  std::optional<std::deque<Message>> queue;

  const Value* field(const std::string& name) const;
  void set_field(const std::string& name, Value v);
};

/// One call frame: the receiver plus at most one parameter binding.
struct Frame {
  Address self;
  std::optional<std::pair<std::string, Value>> param;
};

/// sigma = owning actor address followed by the frame list, oldest
/// first; a synchronous call pushes, `return v` pops the newest.
struct Stack {
  Address actor;
  std::vector<Frame> frames;
};

/// A running activity. Terminated once all frames are popped and the
/// expression has collapsed to null.
struct Thread {
  Stack stack;
  ExprPtr expr;
  bool terminated() const;
};

struct Node {
  NodeId id = 0;
  std::map<int, ObjectRecord> heap;  // allocation index -> object
  std::vector<Thread> threads;       // one per actor that has run here
  int next_index = 0;
};

/// Abstract locations of Main mapped to node ids; total, not
/// necessarily injective.
using LocationMap = std::map<std::string, NodeId>;

std::optional<LocationMap> parse_location_map(const std::string& text, std::string& error);
std::string to_string(const LocationMap& map);

/// Whole-machine state. Copyable; the program is shared.
struct Config {
  std::shared_ptr<const Program> program;
  ProgramIndex index;  // points into *program
  LocationMap location_map;
  std::vector<Node> nodes;  // ascending id

  Node* node(NodeId id);
  const Node* node(NodeId id) const;
  const ObjectRecord* object(const Address& a) const;
  ObjectRecord* object(const Address& a);
  const Thread* thread_of(const Address& actor) const;
};

/// Step label: silent or a remote access with node-id endpoints.
using Label = std::optional<RemAccess>;
std::string to_string(const Label& l);

enum class Rule {
  MsgL, MsgR, FReadL, FReadR, FWriteL, FWriteR, NewL, NewR, Dispatch, Pure
};
const char* to_string(Rule r);

struct TraceEvent {
  std::size_t step = 0;
  Rule rule = Rule::Pure;
  Label label;
  NodeId node = 0;
  int thread = 0;
  bool faulted = false;
  std::string fault;
};

/// Trace file line: step=<n> rule=<name> label=<l> node=<k> thread=<i>.
std::string trace_line(const TraceEvent& ev);
std::string trace_file(const std::vector<TraceEvent>& events);

/// An enabled reduction: either the (unique) next step of a live thread
/// or the dispatch of a mailbox head at an idle actor.
struct Redex {
  enum class Kind { ThreadStep, Dispatch };
  Kind kind = Kind::ThreadStep;
  NodeId node = 0;
  int thread = -1;     // ThreadStep: index into node.threads
  Address actor;       // Dispatch target
};

/// Boots the machine: one node per mapped id, a single Main instance at
/// the node of its first owner, and one thread running main's body with
/// owners substituted. The map must cover exactly Main's owners.
Config init_config(std::shared_ptr<const Program> program, const LocationMap& map);

/// All redexes of the configuration, in (node, thread, actor) order.
/// Empty means quiescent.
std::vector<Redex> enabled(const Config& cfg);

struct StepResult {
  Config config;
  TraceEvent event;
  bool faulted = false;
};

/// Fires one redex. Faults (message to a passive object, member access
/// or call on null) freeze the machine and mark the event.
StepResult step(const Config& cfg, const Redex& r, std::size_t step_index);

struct SchedulerSpec {
  enum class Kind { Fifo, Random, Script };
  Kind kind = Kind::Random;
  std::uint64_t seed = 0;
  std::vector<std::size_t> script;

  static SchedulerSpec fifo();
  static SchedulerSpec random(std::uint64_t seed);
  static SchedulerSpec scripted(std::vector<std::size_t> picks);
};

struct RunResult {
  Config config;
  std::vector<TraceEvent> events;
  bool faulted = false;
  std::string fault;
  bool hit_max_steps = false;
};

/// Runs to quiescence (or fault / step bound) under the scheduler.
/// Deterministic given identical program, map, scheduler and seed.
RunResult run(std::shared_ptr<const Program> program, const LocationMap& map,
              const SchedulerSpec& sched, std::size_t max_steps);

struct ExploredTrace {
  std::vector<std::size_t> script;  // enabled-set indices, per step
  std::vector<TraceEvent> events;
  bool faulted = false;
};

struct ExploreResult {
  std::vector<ExploredTrace> traces;
  std::size_t total_steps = 0;
  bool depth_exceeded = false;
};

/// Exhaustive DFS over scheduler choices, collecting every maximal
/// interleaving up to depth_limit steps each.
ExploreResult explore(std::shared_ptr<const Program> program, const LocationMap& map,
                      std::size_t depth_limit);

}  // namespace numalang::runtime
