#include "numalang/monitor.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "numalang/effects.hpp"
#include "numalang/pretty.hpp"

namespace numalang::monitor {

using effects::concat;
using effects::filter;
using runtime::ObjectRecord;
using runtime::Value;
using syntax::beh_eps;
using syntax::Location;
using syntax::Type;

namespace {

std::optional<Type> type_of_value(const Config& cfg, const Value& v) {
  switch (v.kind) {
    case Value::Kind::True:
    case Value::Kind::False:
      return Type::boolean();
    case Value::Kind::Null:
      return Type::nil();
    case Value::Kind::Addr: {
      const ObjectRecord* obj = cfg.object(v.addr);
      if (!obj) return std::nullopt;
      std::vector<Location> locs;
      for (auto k : obj->owner_nodes) locs.push_back(Location::at_node(k));
      return Type::owned(obj->class_name, std::move(locs));
    }
  }
  return std::nullopt;
}

typer::TypingContext build_gammas(const Config& cfg, const Stack& stack) {
  typer::TypingContext ctx;
  // Newest frame becomes the outermost context; the code at return
  // depth d then always consults the context of frames[d].
  for (auto it = stack.frames.rbegin(); it != stack.frames.rend(); ++it) {
    typer::TypingFrame frame;
    auto self_t = type_of_value(cfg, Value::address(it->self));
    if (!self_t) throw MonitorError("dangling 'this' address " + to_string(it->self));
    frame.vars["this"] = *self_t;
    if (it->param) {
      auto pt = type_of_value(cfg, it->param->second);
      if (!pt)
        throw MonitorError("dangling value bound to '" + it->param->first + "'");
      frame.vars[it->param->first] = *pt;
    }
    ctx.push_back(std::move(frame));
  }
  return ctx;
}

}  // namespace

typer::TypedExpr type_at_runtime(const Config& cfg, const Stack& stack, const ExprPtr& e) {
  std::vector<Diagnostic> diags;
  typer::Typer typer(cfg.index, diags);
  typer.runtime_mode = true;
  typer.address_type = [&cfg](const Address& a) -> std::optional<Type> {
    return type_of_value(cfg, Value::address(a));
  };
  auto res = typer.type_expr(build_gammas(cfg, stack), e);
  if (!res) {
    std::string msg = "untypable runtime expression: " + syntax::pretty(e);
    if (!diags.empty()) msg += " (" + diags.front().message + ")";
    throw MonitorError(msg);
  }
  return *res;
}

GlobalBehaviour global_behaviour(const Config& cfg) {
  GlobalBehaviour sigma;
  for (const auto& node : cfg.nodes) {
    for (const auto& [index, obj] : node.heap) {
      Address actor{node.id, index};
      const runtime::Thread* th = cfg.thread_of(actor);
      if (!obj.queue && !th) continue;  // plain passive object

      BehaviourPtr b = beh_eps();
      if (th) b = type_at_runtime(cfg, th->stack, th->expr).behaviour;
      if (obj.queue) {
        const syntax::ClassDecl* cls = cfg.index.find_class(obj.class_name);
        for (const auto& msg : *obj.queue) {
          const syntax::MethodDecl* m =
              cls ? cfg.index.find_method(*cls, msg.method) : nullptr;
          if (!m)
            throw MonitorError("queued message '" + msg.method +
                               "' has no target method");
          Stack msg_stack;
          msg_stack.actor = actor;
          runtime::Frame frame{actor, std::nullopt};
          if (m->param) {
            if (!msg.arg)
              throw MonitorError("queued message '" + msg.method + "' lacks an argument");
            frame.param = {m->param->name, *msg.arg};
          }
          msg_stack.frames.push_back(frame);
          effects::LocationSubst sub;
          for (size_t i = 0; i < cls->owners.size(); ++i)
            sub[cls->owners[i]] = Location::at_node(obj.owner_nodes[i]);
          ExprPtr body = effects::subst(m->body, sub);
          b = concat(b, type_at_runtime(cfg, msg_stack, body).behaviour);
        }
      }
      sigma.entries.push_back({actor, filter(b)});
    }
  }
  return sigma;
}

std::string to_string(const GlobalBehaviour& sigma) {
  std::string out = "[";
  for (size_t i = 0; i < sigma.entries.size(); ++i) {
    if (i) out += "; ";
    out += to_string(sigma.entries[i].actor) + "=" + syntax::pretty(sigma.entries[i].behaviour);
  }
  return out + "]";
}

// ---------------------------------------------------------------------------
// Well-formedness
// ---------------------------------------------------------------------------

namespace {

void wf_error(std::vector<Diagnostic>& out, int clause, const std::string& msg) {
  out.push_back({Severity::Error, {}, msg, "WF(" + std::to_string(clause) + ")"});
}

bool value_contained(const Config& cfg, const Value& v) {
  if (v.kind != Value::Kind::Addr) return true;
  return cfg.object(v.addr) != nullptr;
}

// Value agreement against a type: literals by shape, null against nil or
// any owned type, addresses by exact ownership equality.
bool value_agrees(const Config& cfg, const Value& v, const Type& t) {
  switch (v.kind) {
    case Value::Kind::True:
    case Value::Kind::False:
      return t.kind == Type::Kind::Bool;
    case Value::Kind::Null:
      return t.kind == Type::Kind::Nil || t.kind == Type::Kind::Owned;
    case Value::Kind::Addr: {
      auto vt = type_of_value(cfg, v);
      return vt && *vt == t;
    }
  }
  return false;
}

}  // namespace

std::vector<Diagnostic> wf_config(const Config& cfg) {
  std::vector<Diagnostic> out;

  // (1) node ids pairwise distinct
  std::set<runtime::NodeId> ids;
  for (const auto& n : cfg.nodes)
    if (!ids.insert(n.id).second)
      wf_error(out, 1, "duplicate node id " + std::to_string(n.id));

  for (const auto& node : cfg.nodes) {
    // (2) address locality: every heap entry lives on its node, and the
    // object's first owner is that node.
    for (const auto& [index, obj] : node.heap) {
      Address a{node.id, index};
      if (obj.owner_nodes.empty() || obj.owner_nodes.front() != node.id)
        wf_error(out, 2, "object " + to_string(a) + " is owned by node " +
                             (obj.owner_nodes.empty()
                                  ? std::string("<none>")
                                  : std::to_string(obj.owner_nodes.front())) +
                             " but stored on node " + std::to_string(node.id));

      const syntax::ClassDecl* cls = cfg.index.find_class(obj.class_name);
      if (!cls) {
        wf_error(out, 3, "object " + to_string(a) + " has unknown class " + obj.class_name);
        continue;
      }
      if (obj.owner_nodes.size() != cls->owners.size())
        wf_error(out, 3, "object " + to_string(a) + " has " +
                             std::to_string(obj.owner_nodes.size()) +
                             " owner nodes, class declares " +
                             std::to_string(cls->owners.size()));
      if (static_cast<bool>(obj.queue) != cls->active)
        wf_error(out, 3, "object " + to_string(a) +
                             (obj.queue ? " has a mailbox but its class is passive"
                                        : " lacks a mailbox but its class is active"));

      // (3) field agreement under the object's own substitution.
      effects::LocationSubst sub;
      for (size_t i = 0; i < cls->owners.size() && i < obj.owner_nodes.size(); ++i)
        sub[cls->owners[i]] = Location::at_node(obj.owner_nodes[i]);
      for (const auto& f : cls->fields) {
        const Value* v = obj.field(f.name);
        if (!v) {
          wf_error(out, 3, "object " + to_string(a) + " lacks field '" + f.name + "'");
          continue;
        }
        Type ft = effects::subst(f.type, sub);
        if (!value_agrees(cfg, *v, ft))
          wf_error(out, 3, "field '" + f.name + "' of " + to_string(a) +
                               " disagrees with type " + to_string(ft) + " (value " +
                               to_string(*v) + ")");
      }
      // (3) queued messages: target methods exist and arguments agree
      // with their substituted parameter types.
      if (obj.queue) {
        for (const auto& msg : *obj.queue) {
          const syntax::MethodDecl* m = cfg.index.find_method(*cls, msg.method);
          if (!m) {
            wf_error(out, 3, "queued message '" + msg.method + "' at " + to_string(a) +
                                 " has no target method");
            continue;
          }
          if (m->param.has_value() != msg.arg.has_value()) {
            wf_error(out, 3, "queued message '" + msg.method + "' at " + to_string(a) +
                                 " disagrees with the method's parameter list");
            continue;
          }
          if (m->param && !value_agrees(cfg, *msg.arg, effects::subst(m->param->type, sub)))
            wf_error(out, 3, "queued argument of '" + msg.method + "' at " + to_string(a) +
                                 " disagrees with type " +
                                 to_string(effects::subst(m->param->type, sub)));
        }
      }
    }

    // (4)-(5) stacks: the owning actor and every bound value live in
    // some heap; (2) each thread's expression is typable.
    for (const auto& th : node.threads) {
      if (!cfg.object(th.stack.actor))
        wf_error(out, 4, "thread actor " + to_string(th.stack.actor) + " is dangling");
      for (const auto& frame : th.stack.frames) {
        if (!cfg.object(frame.self))
          wf_error(out, 5, "frame 'this' " + to_string(frame.self) + " is dangling");
        if (frame.param && !value_contained(cfg, frame.param->second))
          wf_error(out, 5, "frame binding '" + frame.param->first + "' is dangling");
      }
      try {
        (void)type_at_runtime(cfg, th.stack, th.expr);
      } catch (const MonitorError& e) {
        wf_error(out, 2, e.what());
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Global behaviour reduction
// ---------------------------------------------------------------------------

namespace {

struct SearchState {
  BehaviourPtr term;
  bool consumed = false;
  std::vector<BehaviourPtr> obligations;  // non-eps migrated branches
  std::string clause;
};

std::string state_key(const SearchState& s) {
  std::string key = s.consumed ? "1|" : "0|";
  key += syntax::pretty(s.term);
  for (const auto& o : s.obligations) key += "|" + syntax::pretty(o);
  return key;
}

/// Chain outcomes for one acting entry: where the term can end up, with
/// at most one pending migrated branch.
struct Outcome {
  BehaviourPtr term;
  BehaviourPtr migrated;  // may be null
  std::string clause;
};

std::vector<Outcome> chain_outcomes(const BehaviourPtr& start, const Label& label) {
  std::vector<Outcome> out;
  std::set<std::string> visited;
  std::vector<SearchState> work{{start, false, {}, ""}};
  visited.insert(state_key(work.front()));
  const bool need_pi = label.has_value();
  const size_t state_cap = 20000;
  size_t expanded = 0;

  auto join = [](const std::string& a, const char* b) {
    return a.empty() ? std::string(b) : a + "+" + b;
  };

  while (!work.empty() && expanded < state_cap) {
    SearchState s = work.back();
    work.pop_back();
    ++expanded;

    if (s.consumed == need_pi) {
      Outcome o;
      o.term = s.term;
      o.migrated = s.obligations.empty() ? nullptr : s.obligations.front();
      o.clause = s.clause.empty() ? "stutter" : s.clause;
      out.push_back(std::move(o));
    }

    auto push = [&](SearchState next) {
      if (next.obligations.size() > 1) return;  // one enqueue per machine step
      if (visited.insert(state_key(next)).second) work.push_back(std::move(next));
    };

    for (const auto& mv : effects::silent_moves(s.term)) {
      SearchState next = s;
      next.term = mv.result;
      switch (mv.clause) {
        case effects::SilentMove::Clause::ChoiceLeft:
          next.clause = join(s.clause, "choice-left");
          break;
        case effects::SilentMove::Clause::ChoiceRight:
          next.clause = join(s.clause, "choice-right");
          break;
        case effects::SilentMove::Clause::LoopUnroll:
          next.clause = join(s.clause, "loop-unroll");
          break;
        case effects::SilentMove::Clause::ParProject:
          next.clause = join(s.clause, "par-project");
          if (!syntax::is_eps(mv.migrated)) next.obligations.push_back(mv.migrated);
          break;
      }
      push(std::move(next));
    }
    if (need_pi && !s.consumed && s.term->kind == syntax::Behaviour::Kind::Access &&
        s.term->access == *label) {
      SearchState next = s;
      next.term = s.term->rest;
      next.consumed = true;
      next.clause = join(s.clause, "pi");
      push(std::move(next));
    }
  }
  return out;
}

}  // namespace

StepVerdict check_step(const GlobalBehaviour& before, const Label& label,
                       const GlobalBehaviour& after) {
  StepVerdict verdict;

  std::map<Address, BehaviourPtr> prev;
  for (const auto& e : before.entries) prev[e.actor] = e.behaviour;

  // Fresh entries come only from object creation and start silent.
  std::map<Address, BehaviourPtr> next;
  for (const auto& e : after.entries) {
    next[e.actor] = e.behaviour;
    if (!prev.count(e.actor) && !syntax::is_eps(e.behaviour)) {
      verdict.detail = "fresh entry " + to_string(e.actor) +
                       " starts with non-empty behaviour " + syntax::pretty(e.behaviour);
      return verdict;
    }
  }
  for (const auto& e : before.entries) {
    if (!next.count(e.actor)) {
      verdict.detail = "entry " + to_string(e.actor) + " disappeared";
      return verdict;
    }
  }

  std::vector<Address> changed;
  for (const auto& e : before.entries)
    if (!syntax::equal(e.behaviour, next.at(e.actor))) changed.push_back(e.actor);

  if (changed.empty() && !label) {
    verdict.pass = true;
    verdict.clause = "stutter";
    return verdict;
  }
  if (changed.size() > 2) {
    verdict.detail = std::to_string(changed.size()) + " entries changed in one step";
    verdict.position = 0;
    return verdict;
  }

  // Candidate acting entries: the changed ones, or any entry when a
  // labelled step leaves the behaviours equal.
  std::vector<Address> candidates = changed;
  if (candidates.empty())
    for (const auto& e : before.entries) candidates.push_back(e.actor);

  auto index_of = [&](const Address& a) {
    for (size_t i = 0; i < before.entries.size(); ++i)
      if (before.entries[i].actor == a) return static_cast<int>(i);
    return -1;
  };

  for (const Address& acting : candidates) {
    std::vector<Address> others;
    for (const Address& c : changed)
      if (!(c == acting)) others.push_back(c);
    if (others.size() > 1) continue;

    for (const auto& outcome : chain_outcomes(prev.at(acting), label)) {
      const BehaviourPtr& target = next.at(acting);
      if (!outcome.migrated) {
        if (others.empty() && syntax::equal(outcome.term, target)) {
          verdict.pass = true;
          verdict.clause = outcome.clause;
          verdict.position = index_of(acting);
          return verdict;
        }
        continue;
      }
      // Migration of the projected right branch: either appended to the
      // acting entry itself (self-send) or to exactly one other entry.
      if (others.empty()) {
        if (syntax::equal(concat(outcome.term, outcome.migrated), target)) {
          verdict.pass = true;
          verdict.clause = outcome.clause + "+migrate-self";
          verdict.position = index_of(acting);
          return verdict;
        }
        continue;
      }
      const Address& dest = others.front();
      if (syntax::equal(outcome.term, target) &&
          syntax::equal(concat(prev.at(dest), outcome.migrated), next.at(dest))) {
        verdict.pass = true;
        verdict.clause = outcome.clause + "+migrate";
        verdict.position = index_of(acting);
        return verdict;
      }
    }
  }

  // Build a counterexample around the first mismatching entry.
  if (!changed.empty()) {
    verdict.position = index_of(changed.front());
    verdict.detail = "entry " + to_string(changed.front()) + ": no reduction of " +
                     syntax::pretty(prev.at(changed.front())) + " under " +
                     runtime::to_string(label) + " reaches " +
                     syntax::pretty(next.at(changed.front()));
  } else {
    verdict.detail = "label " + runtime::to_string(label) +
                     " has no matching reduction in any entry";
  }
  return verdict;
}

// ---------------------------------------------------------------------------
// Per-run verification
// ---------------------------------------------------------------------------

namespace {

Label normalize(const Label& l) {
  if (l && l->src == l->dst) return std::nullopt;
  return l;
}

}  // namespace

std::string report_log(const SoundnessReport& report) {
  std::string out;
  for (const auto& r : report.records) {
    out += runtime::trace_line(r.event);
    out += " verdict=";
    out += r.pass ? "pass" : "fail";
    out += " clause=" + (r.clause.empty() ? std::string("-") : r.clause);
    out += '\n';
  }
  return out;
}

SoundnessReport verify_run(std::shared_ptr<const Program> program, const LocationMap& map,
                           const SchedulerSpec& sched, std::size_t max_steps) {
  SoundnessReport report;
  Config cfg = runtime::init_config(std::move(program), map);

  report.wf_diagnostics = wf_config(cfg);
  if (has_errors(report.wf_diagnostics)) {
    report.failure = "initial configuration is not well-formed";
    return report;
  }

  GlobalBehaviour sigma;
  try {
    sigma = global_behaviour(cfg);
  } catch (const MonitorError& e) {
    report.failure = e.what();
    return report;
  }

  runtime::SchedulerSpec spec = sched;
  // Reuse the runtime scheduler by replaying one step at a time.
  std::vector<runtime::Redex> redexes;
  std::mt19937_64 rng(sched.seed);
  std::size_t script_pos = 0;

  for (std::size_t i = 0; i < max_steps; ++i) {
    redexes = runtime::enabled(cfg);
    if (redexes.empty()) break;

    std::size_t pick = 0;
    switch (spec.kind) {
      case SchedulerSpec::Kind::Fifo:
        pick = 0;
        break;
      case SchedulerSpec::Kind::Random:
        pick = static_cast<std::size_t>(rng() % redexes.size());
        break;
      case SchedulerSpec::Kind::Script:
        if (script_pos >= spec.script.size()) {
          report.pass = true;
          report.steps = i;
          return report;
        }
        pick = spec.script[script_pos++];
        if (pick >= redexes.size()) {
          report.failure = "schedule index out of range";
          return report;
        }
        break;
    }

    runtime::StepResult sr = runtime::step(cfg, redexes[pick], i);
    report.steps = i + 1;

    StepRecord rec;
    rec.event = sr.event;
    rec.sigma_before = to_string(sigma);

    if (sr.faulted) {
      report.faulted = true;
      report.fault = sr.event.fault;
      rec.pass = false;
      rec.clause = "fault";
      report.records.push_back(std::move(rec));
      report.failure = "machine fault: " + report.fault;
      return report;
    }

    cfg = std::move(sr.config);

    auto wf = wf_config(cfg);
    if (has_errors(wf)) {
      report.wf_diagnostics = wf;
      rec.pass = false;
      rec.clause = "wf";
      report.records.push_back(std::move(rec));
      report.failure = "configuration after step " + std::to_string(i) +
                       " is not well-formed: " + wf.front().message;
      return report;
    }

    GlobalBehaviour sigma_next;
    try {
      sigma_next = global_behaviour(cfg);
    } catch (const MonitorError& e) {
      rec.pass = false;
      rec.clause = "untypable";
      report.records.push_back(std::move(rec));
      report.failure = e.what();
      return report;
    }
    rec.sigma_after = to_string(sigma_next);

    StepVerdict v = check_step(sigma, normalize(sr.event.label), sigma_next);
    rec.pass = v.pass;
    rec.clause = v.pass ? v.clause : v.detail;
    report.records.push_back(rec);
    if (!v.pass) {
      report.failure = "step " + std::to_string(i) + " (" +
                       runtime::trace_line(sr.event) + "): " + v.detail;
      return report;
    }
    sigma = std::move(sigma_next);
  }

  report.pass = true;
  return report;
}

}  // namespace numalang::monitor
