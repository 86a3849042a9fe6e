#include "numalang/runtime.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "numalang/effects.hpp"
#include "numalang/mutation.hpp"
#include "numalang/typer.hpp"

namespace numalang::runtime {

using syntax::Expr;
using syntax::Location;

// ---------------------------------------------------------------------------
// Values
// ---------------------------------------------------------------------------

bool is_value_expr(const ExprPtr& e) {
  switch (e->kind) {
    case Expr::Kind::True:
    case Expr::Kind::False:
    case Expr::Kind::Null:
    case Expr::Kind::Addr:
    case Expr::Kind::IntLit:  // inert loop counters
      return true;
    default:
      return false;
  }
}

Value value_of_expr(const ExprPtr& e) {
  switch (e->kind) {
    case Expr::Kind::True: return Value::truth(true);
    case Expr::Kind::False: return Value::truth(false);
    case Expr::Kind::Null: return Value::null();
    case Expr::Kind::Addr: return Value::address(e->address);
    default:
      throw std::logic_error("value_of_expr: not a storable value");
  }
}

ExprPtr expr_of_value(const Value& v) {
  switch (v.kind) {
    case Value::Kind::True: return syntax::e_true();
    case Value::Kind::False: return syntax::e_false();
    case Value::Kind::Null: return syntax::e_null();
    case Value::Kind::Addr: return syntax::e_addr(v.addr);
  }
  return syntax::e_null();
}

std::string to_string(const Value& v) {
  switch (v.kind) {
    case Value::Kind::True: return "true";
    case Value::Kind::False: return "false";
    case Value::Kind::Null: return "null";
    case Value::Kind::Addr: return to_string(v.addr);
  }
  return "?";
}

const Value* ObjectRecord::field(const std::string& name) const {
  for (const auto& [n, v] : fields)
    if (n == name) return &v;
  return nullptr;
}

void ObjectRecord::set_field(const std::string& name, Value v) {
  for (auto& [n, val] : fields) {
    if (n == name) {
      val = v;
      return;
    }
  }
  fields.emplace_back(name, v);
}

bool Thread::terminated() const {
  return stack.frames.empty() && expr->kind == Expr::Kind::Null;
}

// ---------------------------------------------------------------------------
// Location maps
// ---------------------------------------------------------------------------

std::optional<LocationMap> parse_location_map(const std::string& text, std::string& error) {
  LocationMap map;
  std::string item;
  std::istringstream in(text);
  auto handle = [&](std::string s) -> bool {
    // Trim whitespace.
    auto b = s.find_first_not_of(" \t\r\n");
    auto e = s.find_last_not_of(" \t\r\n");
    if (b == std::string::npos) return true;
    s = s.substr(b, e - b + 1);
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 >= s.size()) {
      error = "malformed mapping entry '" + s + "' (expected L=nodeId)";
      return false;
    }
    std::string key = s.substr(0, eq);
    std::string val = s.substr(eq + 1);
    try {
      size_t used = 0;
      int node = std::stoi(val, &used);
      if (used != val.size() || node < 0) throw std::invalid_argument(val);
      if (map.count(key)) {
        error = "location '" + key + "' mapped twice";
        return false;
      }
      map[key] = node;
    } catch (...) {
      error = "malformed node id '" + val + "' in mapping entry '" + s + "'";
      return false;
    }
    return true;
  };
  // Entries are comma-separated; files may also use newlines.
  std::string normalized;
  for (char c : text) normalized += (c == '\n' || c == '\r') ? ',' : c;
  std::istringstream entries(normalized);
  while (std::getline(entries, item, ','))
    if (!handle(item)) return std::nullopt;
  if (map.empty()) {
    error = "empty location map";
    return std::nullopt;
  }
  return map;
}

std::string to_string(const LocationMap& map) {
  std::string out;
  for (const auto& [k, v] : map) {
    if (!out.empty()) out += ",";
    out += k + "=" + std::to_string(v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Config accessors
// ---------------------------------------------------------------------------

Node* Config::node(NodeId id) {
  for (auto& n : nodes)
    if (n.id == id) return &n;
  return nullptr;
}

const Node* Config::node(NodeId id) const {
  for (const auto& n : nodes)
    if (n.id == id) return &n;
  return nullptr;
}

const ObjectRecord* Config::object(const Address& a) const {
  const Node* n = node(a.node);
  if (!n) return nullptr;
  auto it = n->heap.find(a.index);
  return it == n->heap.end() ? nullptr : &it->second;
}

ObjectRecord* Config::object(const Address& a) {
  Node* n = node(a.node);
  if (!n) return nullptr;
  auto it = n->heap.find(a.index);
  return it == n->heap.end() ? nullptr : &it->second;
}

const Thread* Config::thread_of(const Address& actor) const {
  const Node* n = node(actor.node);
  if (!n) return nullptr;
  for (const auto& t : n->threads)
    if (t.stack.actor == actor) return &t;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Trace serialization
// ---------------------------------------------------------------------------

const char* to_string(Rule r) {
  switch (r) {
    case Rule::MsgL: return "MsgL";
    case Rule::MsgR: return "MsgR";
    case Rule::FReadL: return "FReadL";
    case Rule::FReadR: return "FReadR";
    case Rule::FWriteL: return "FWriteL";
    case Rule::FWriteR: return "FWriteR";
    case Rule::NewL: return "NewL";
    case Rule::NewR: return "NewR";
    case Rule::Dispatch: return "Dispatch";
    case Rule::Pure: return "Pure";
  }
  return "?";
}

std::string to_string(const Label& l) {
  if (!l) return "eps";
  return to_string(*l);
}

std::string trace_line(const TraceEvent& ev) {
  std::ostringstream os;
  os << "step=" << ev.step << " rule=" << to_string(ev.rule)
     << " label=" << to_string(ev.label) << " node=" << ev.node
     << " thread=" << ev.thread;
  return os.str();
}

std::string trace_file(const std::vector<TraceEvent>& events) {
  std::string out;
  for (const auto& ev : events) {
    if (ev.faulted) continue;  // faulted steps abort the run and are reported aside
    out += trace_line(ev);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bootstrapping
// ---------------------------------------------------------------------------

namespace {

Value init_value(const syntax::Type& t) {
  return t.kind == syntax::Type::Kind::Bool ? Value::truth(false) : Value::null();
}

ObjectRecord init_object(const syntax::ClassDecl& cls,
                         std::vector<NodeId> owner_nodes) {
  ObjectRecord o;
  o.class_name = cls.name;
  o.owner_nodes = std::move(owner_nodes);
  for (const auto& f : cls.fields) o.fields.emplace_back(f.name, init_value(f.type));
  if (cls.active) o.queue.emplace();
  return o;
}

effects::LocationSubst node_subst(const syntax::ClassDecl& cls,
                                  const std::vector<NodeId>& owner_nodes) {
  effects::LocationSubst m;
  for (size_t i = 0; i < cls.owners.size(); ++i)
    m[cls.owners[i]] = Location::at_node(owner_nodes[i]);
  return m;
}

}  // namespace

Config init_config(std::shared_ptr<const Program> program, const LocationMap& map) {
  Config cfg;
  cfg.program = std::move(program);
  cfg.index = ProgramIndex(*cfg.program);
  cfg.location_map = map;

  const syntax::ClassDecl* main_cls = cfg.index.find_class("Main");
  if (!main_cls) throw std::invalid_argument("program has no class Main");

  // The map must cover exactly Main's owners.
  std::set<std::string> owner_names;
  for (const auto& l : main_cls->owners) owner_names.insert(l.name);
  for (const auto& l : main_cls->owners)
    if (!map.count(l.name))
      throw std::invalid_argument("location map does not cover '" + l.name + "'");
  for (const auto& [k, _] : map)
    if (!owner_names.count(k))
      throw std::invalid_argument("location map names unknown location '" + k + "'");

  std::set<NodeId> node_ids;
  for (const auto& [_, v] : map) node_ids.insert(v);
  for (NodeId id : node_ids) {
    Node n;
    n.id = id;
    cfg.nodes.push_back(std::move(n));
  }

  std::vector<NodeId> owner_nodes;
  for (const auto& l : main_cls->owners) owner_nodes.push_back(map.at(l.name));

  NodeId main_node = owner_nodes.front();
  Node* host = cfg.node(main_node);
  Address main_addr{main_node, host->next_index++};
  host->heap.emplace(main_addr.index, init_object(*main_cls, owner_nodes));

  const syntax::MethodDecl* main_m = cfg.index.find_method(*main_cls, "main");
  if (!main_m) throw std::invalid_argument("class Main has no method main");

  Thread t;
  t.stack.actor = main_addr;
  t.stack.frames.push_back(Frame{main_addr, std::nullopt});
  t.expr = effects::subst(main_m->body, node_subst(*main_cls, owner_nodes));
  host->threads.push_back(std::move(t));
  return cfg;
}

// ---------------------------------------------------------------------------
// Evaluation contexts
// ---------------------------------------------------------------------------

namespace {

using Rebuild = std::function<ExprPtr(ExprPtr)>;

struct Decomposition {
  ExprPtr redex;
  int return_depth = 0;  // frames index consulted by variable lookups
  Rebuild rebuild;
};

// Leftmost-innermost decomposition following the evaluation contexts:
// let x = E in e | if E then e else e | E.f | E.f = e | v.f = E
// | E.m(e) | v.m(E) | E!m(e) | v!m(E) | return E.
// A value is not decomposable; the caller handles thread termination.
std::optional<Decomposition> decompose(const ExprPtr& e, int depth = 0) {
  if (is_value_expr(e)) return std::nullopt;
  auto here = [&](const ExprPtr& redex) {
    return Decomposition{redex, depth, [](ExprPtr r) { return r; }};
  };
  auto wrap = [](Decomposition d, Rebuild outer) {
    Rebuild inner = d.rebuild;
    d.rebuild = [inner, outer](ExprPtr r) { return outer(inner(r)); };
    return d;
  };
  switch (e->kind) {
    case Expr::Kind::Var:
    case Expr::Kind::This:
    case Expr::Kind::New:
    case Expr::Kind::For:
      return here(e);
    case Expr::Kind::Let: {
      if (is_value_expr(e->a)) return here(e);
      auto d = decompose(e->a, depth);
      return wrap(std::move(*d), [e](ExprPtr r) {
        return syntax::e_let(e->name, r, e->b, e->span);
      });
    }
    case Expr::Kind::If: {
      if (is_value_expr(e->a)) return here(e);
      auto d = decompose(e->a, depth);
      return wrap(std::move(*d), [e](ExprPtr r) {
        return syntax::e_if(r, e->b, e->c, e->span);
      });
    }
    case Expr::Kind::FieldRead: {
      if (is_value_expr(e->a)) return here(e);
      auto d = decompose(e->a, depth);
      return wrap(std::move(*d), [e](ExprPtr r) {
        return syntax::e_fread(r, e->name, e->span);
      });
    }
    case Expr::Kind::FieldWrite: {
      if (!is_value_expr(e->a)) {
        auto d = decompose(e->a, depth);
        return wrap(std::move(*d), [e](ExprPtr r) {
          return syntax::e_fwrite(r, e->name, e->b, e->span);
        });
      }
      if (!is_value_expr(e->b)) {
        auto d = decompose(e->b, depth);
        return wrap(std::move(*d), [e](ExprPtr r) {
          return syntax::e_fwrite(e->a, e->name, r, e->span);
        });
      }
      return here(e);
    }
    case Expr::Kind::SyncCall:
    case Expr::Kind::AsyncSend: {
      bool sync = e->kind == Expr::Kind::SyncCall;
      if (!is_value_expr(e->a)) {
        auto d = decompose(e->a, depth);
        return wrap(std::move(*d), [e, sync](ExprPtr r) {
          return sync ? syntax::e_call(r, e->name, e->arg, e->span)
                      : syntax::e_send(r, e->name, e->arg, e->span);
        });
      }
      if (e->arg && !is_value_expr(*e->arg)) {
        auto d = decompose(*e->arg, depth);
        return wrap(std::move(*d), [e, sync](ExprPtr r) {
          return sync ? syntax::e_call(e->a, e->name, r, e->span)
                      : syntax::e_send(e->a, e->name, r, e->span);
        });
      }
      return here(e);
    }
    case Expr::Kind::Return: {
      if (is_value_expr(e->a)) return here(e);
      auto d = decompose(e->a, depth + 1);
      return wrap(std::move(*d), [](ExprPtr r) { return syntax::e_return(r); });
    }
    default:
      return std::nullopt;
  }
}

// Capture-respecting substitution of a value expression for a variable;
// let and for binders of the same name shadow it.
ExprPtr subst_var(const ExprPtr& e, const std::string& x, const ExprPtr& v) {
  if (!e) return e;
  switch (e->kind) {
    case Expr::Kind::Var:
      return e->name == x ? v : e;
    case Expr::Kind::Let: {
      ExprPtr init = subst_var(e->a, x, v);
      ExprPtr body = e->name == x ? e->b : subst_var(e->b, x, v);
      return syntax::e_let(e->name, init, body, e->span);
    }
    case Expr::Kind::For: {
      ExprPtr body = e->name == x ? e->a : subst_var(e->a, x, v);
      return syntax::e_for(e->name, e->lo, e->hi, body, e->span);
    }
    case Expr::Kind::If:
      return syntax::e_if(subst_var(e->a, x, v), subst_var(e->b, x, v),
                          subst_var(e->c, x, v), e->span);
    case Expr::Kind::FieldRead:
      return syntax::e_fread(subst_var(e->a, x, v), e->name, e->span);
    case Expr::Kind::FieldWrite:
      return syntax::e_fwrite(subst_var(e->a, x, v), e->name, subst_var(e->b, x, v),
                              e->span);
    case Expr::Kind::SyncCall:
    case Expr::Kind::AsyncSend: {
      std::optional<ExprPtr> arg;
      if (e->arg) arg = subst_var(*e->arg, x, v);
      if (e->kind == Expr::Kind::SyncCall)
        return syntax::e_call(subst_var(e->a, x, v), e->name, std::move(arg), e->span);
      return syntax::e_send(subst_var(e->a, x, v), e->name, std::move(arg), e->span);
    }
    case Expr::Kind::Return:
      return syntax::e_return(subst_var(e->a, x, v));
    default:
      return e;  // literals, addresses, this, new (no variables)
  }
}

bool actor_idle(const Config& cfg, const Address& actor) {
  const Thread* t = cfg.thread_of(actor);
  return !t || t->terminated();
}

int thread_index(const Node& node, const Address& actor) {
  for (size_t i = 0; i < node.threads.size(); ++i)
    if (node.threads[i].stack.actor == actor) return static_cast<int>(i);
  return -1;
}

}  // namespace

std::vector<Redex> enabled(const Config& cfg) {
  std::vector<Redex> out;
  for (const auto& n : cfg.nodes) {
    for (size_t i = 0; i < n.threads.size(); ++i) {
      const Thread& t = n.threads[i];
      if (t.terminated()) continue;
      Redex r;
      r.kind = Redex::Kind::ThreadStep;
      r.node = n.id;
      r.thread = static_cast<int>(i);
      out.push_back(r);
    }
    for (const auto& [idx, obj] : n.heap) {
      if (!obj.queue || obj.queue->empty()) continue;
      Address actor{n.id, idx};
      if (!actor_idle(cfg, actor)) continue;
      Redex r;
      r.kind = Redex::Kind::Dispatch;
      r.node = n.id;
      r.actor = actor;
      out.push_back(r);
    }
  }
  return out;
}

namespace {

struct Stepper {
  Config cfg;  // working copy
  TraceEvent ev;
  bool faulted = false;

  void fault(const std::string& msg) {
    faulted = true;
    ev.faulted = true;
    ev.fault = msg;
  }
};

}  // namespace

StepResult step(const Config& input, const Redex& r, std::size_t step_index) {
  Stepper st;
  st.cfg = input;
  st.ev.step = step_index;
  st.ev.node = r.node;

  Config& cfg = st.cfg;

  if (r.kind == Redex::Kind::Dispatch) {
    st.ev.rule = Rule::Dispatch;
    ObjectRecord* obj = cfg.object(r.actor);
    if (!obj || !obj->queue || obj->queue->empty()) {
      st.fault("dispatch on actor without pending messages");
      return {std::move(st.cfg), st.ev, true};
    }
    Message msg;
    if (testing::mutations().dispatch_lifo) {
      msg = obj->queue->back();
      obj->queue->pop_back();
    } else {
      msg = obj->queue->front();
      obj->queue->pop_front();
    }
    const syntax::ClassDecl* cls = cfg.index.find_class(obj->class_name);
    const syntax::MethodDecl* m = cls ? cfg.index.find_method(*cls, msg.method) : nullptr;
    if (!m) {
      st.fault("no method '" + msg.method + "' on class " + obj->class_name);
      return {std::move(st.cfg), st.ev, true};
    }
    Frame frame{r.actor, std::nullopt};
    if (m->param) {
      if (!msg.arg) {
        st.fault("message '" + msg.method + "' missing its argument");
        return {std::move(st.cfg), st.ev, true};
      }
      frame.param = {m->param->name, *msg.arg};
    }
    Thread fresh;
    fresh.stack.actor = r.actor;
    fresh.stack.frames.push_back(frame);
    fresh.expr = effects::subst(m->body, node_subst(*cls, obj->owner_nodes));

    Node* host = cfg.node(r.actor.node);
    int ti = thread_index(*host, r.actor);
    if (ti < 0) {
      host->threads.push_back(std::move(fresh));
      ti = static_cast<int>(host->threads.size()) - 1;
    } else {
      host->threads[static_cast<size_t>(ti)] = std::move(fresh);
    }
    st.ev.thread = ti;
    return {std::move(st.cfg), st.ev, false};
  }

  Node* host = cfg.node(r.node);
  Thread& th = host->threads[static_cast<size_t>(r.thread)];
  st.ev.thread = r.thread;
  NodeId here = r.node;

  // Thread termination: the base frame pops once the body is a value;
  // the value is discarded (thread bodies return nil).
  if (is_value_expr(th.expr)) {
    if (th.stack.frames.size() != 1) {
      st.fault("value expression with nested frames");
      return {std::move(st.cfg), st.ev, true};
    }
    th.stack.frames.pop_back();
    th.expr = syntax::e_null();
    st.ev.rule = Rule::Pure;
    return {std::move(st.cfg), st.ev, false};
  }

  auto dec = decompose(th.expr);
  if (!dec) {
    st.fault("stuck expression");
    return {std::move(st.cfg), st.ev, true};
  }
  const ExprPtr& rx = dec->redex;
  auto finish = [&](ExprPtr result, Rule rule, Label label) {
    th.expr = dec->rebuild(std::move(result));
    st.ev.rule = rule;
    st.ev.label = std::move(label);
  };
  auto pure = [&](ExprPtr result) { finish(std::move(result), Rule::Pure, std::nullopt); };

  switch (rx->kind) {
    case Expr::Kind::This:
    case Expr::Kind::Var: {
      if (dec->return_depth >= static_cast<int>(th.stack.frames.size())) {
        st.fault("frame underflow resolving '" +
                 (rx->kind == Expr::Kind::This ? std::string("this") : rx->name) + "'");
        break;
      }
      const Frame& frame = th.stack.frames[static_cast<size_t>(dec->return_depth)];
      if (rx->kind == Expr::Kind::This) {
        pure(syntax::e_addr(frame.self));
        break;
      }
      if (frame.param && frame.param->first == rx->name) {
        pure(expr_of_value(frame.param->second));
        break;
      }
      st.fault("unbound variable '" + rx->name + "'");
      break;
    }

    case Expr::Kind::Let:
      pure(rx->name == "_" ? rx->b : subst_var(rx->b, rx->name, rx->a));
      break;

    case Expr::Kind::If:
      if (rx->a->kind == Expr::Kind::True)
        pure(rx->b);
      else if (rx->a->kind == Expr::Kind::False)
        pure(rx->c);
      else
        st.fault("condition did not evaluate to a boolean");
      break;

    case Expr::Kind::For: {
      ExprPtr first = subst_var(rx->a, rx->name, syntax::e_int(rx->lo));
      if (rx->lo == rx->hi) {
        pure(first);
      } else if (rx->lo < rx->hi) {
        ExprPtr rest = syntax::e_for(rx->name, rx->lo + 1, rx->hi, rx->a, rx->span);
        pure(syntax::e_let("_", first, rest, rx->span));
      } else {
        st.fault("for-loop with empty range");
      }
      break;
    }

    case Expr::Kind::Return: {
      // The fireable return is always the innermost one: pop the newest frame.
      if (th.stack.frames.size() < 2) {
        st.fault("return with no caller frame");
        break;
      }
      th.stack.frames.pop_back();
      pure(rx->a);
      break;
    }

    case Expr::Kind::New: {
      const syntax::ClassDecl* cls = cfg.index.find_class(rx->name);
      if (!cls) {
        st.fault("unknown class '" + rx->name + "'");
        break;
      }
      std::vector<NodeId> owner_nodes;
      bool bad = false;
      for (const auto& l : rx->locations) {
        if (!l.is_node()) {
          bad = true;
          break;
        }
        owner_nodes.push_back(l.node);
      }
      if (bad || owner_nodes.size() != cls->owners.size()) {
        st.fault("unresolved ownership arguments in allocation of " + rx->name);
        break;
      }
      NodeId target = owner_nodes.front();
      Node* tn = cfg.node(target);
      if (!tn) {
        st.fault("allocation on unknown node " + std::to_string(target));
        break;
      }
      Address addr{target, tn->next_index++};
      tn->heap.emplace(addr.index, init_object(*cls, owner_nodes));
      if (target == here) {
        finish(syntax::e_addr(addr), Rule::NewL, std::nullopt);
      } else {
        auto kind = testing::mutations().newr_read_label
                        ? syntax::read_access(Location::at_node(here),
                                              Location::at_node(target))
                        : syntax::write_access(Location::at_node(here),
                                               Location::at_node(target));
        finish(syntax::e_addr(addr), Rule::NewR, kind);
      }
      break;
    }

    case Expr::Kind::FieldRead: {
      if (rx->a->kind == Expr::Kind::Null) {
        st.fault("field access on null");
        break;
      }
      if (rx->a->kind != Expr::Kind::Addr) {
        st.fault("field access on a non-object value");
        break;
      }
      Address a = rx->a->address;
      const ObjectRecord* obj = cfg.object(a);
      const Value* v = obj ? obj->field(rx->name) : nullptr;
      if (!v) {
        st.fault("no field '" + rx->name + "' at " + to_string(a));
        break;
      }
      if (a.node == here)
        finish(expr_of_value(*v), Rule::FReadL, std::nullopt);
      else
        finish(expr_of_value(*v), Rule::FReadR,
               syntax::read_access(Location::at_node(here), Location::at_node(a.node)));
      break;
    }

    case Expr::Kind::FieldWrite: {
      if (rx->a->kind == Expr::Kind::Null) {
        st.fault("field update on null");
        break;
      }
      if (rx->a->kind != Expr::Kind::Addr) {
        st.fault("field update on a non-object value");
        break;
      }
      Address a = rx->a->address;
      ObjectRecord* obj = cfg.object(a);
      if (!obj || !obj->field(rx->name)) {
        st.fault("no field '" + rx->name + "' at " + to_string(a));
        break;
      }
      obj->set_field(rx->name, value_of_expr(rx->b));
      if (a.node == here)
        finish(rx->b, Rule::FWriteL, std::nullopt);
      else
        finish(rx->b, Rule::FWriteR,
               syntax::write_access(Location::at_node(here), Location::at_node(a.node)));
      break;
    }

    case Expr::Kind::SyncCall: {
      if (rx->a->kind == Expr::Kind::Null) {
        st.fault("method call on null");
        break;
      }
      if (rx->a->kind != Expr::Kind::Addr) {
        st.fault("method call on a non-object value");
        break;
      }
      Address a = rx->a->address;
      const ObjectRecord* obj = cfg.object(a);
      const syntax::ClassDecl* cls = obj ? cfg.index.find_class(obj->class_name) : nullptr;
      const syntax::MethodDecl* m = cls ? cfg.index.find_method(*cls, rx->name) : nullptr;
      if (!m) {
        st.fault("no method '" + rx->name + "' at " + to_string(a));
        break;
      }
      if (a.node != here) {
        st.fault("synchronous call on remote object " + to_string(a));
        break;
      }
      Frame frame{a, std::nullopt};
      if (m->param) {
        if (!rx->arg) {
          st.fault("missing argument in call to '" + rx->name + "'");
          break;
        }
        frame.param = {m->param->name, value_of_expr(*rx->arg)};
      }
      th.stack.frames.push_back(frame);
      ExprPtr body = effects::subst(m->body, node_subst(*cls, obj->owner_nodes));
      pure(syntax::e_return(body));
      break;
    }

    case Expr::Kind::AsyncSend: {
      if (rx->a->kind == Expr::Kind::Null) {
        st.fault("message send on null");
        break;
      }
      if (rx->a->kind != Expr::Kind::Addr) {
        st.fault("message send on a non-object value");
        break;
      }
      Address a = rx->a->address;
      ObjectRecord* obj = cfg.object(a);
      if (!obj) {
        st.fault("message send to dangling address " + to_string(a));
        break;
      }
      if (!obj->queue) {
        st.fault("message to passive object " + to_string(a));
        break;
      }
      Message msg;
      msg.method = rx->name;
      if (rx->arg) msg.arg = value_of_expr(*rx->arg);
      obj->queue->push_back(std::move(msg));
      if (a.node == here)
        finish(syntax::e_null(), Rule::MsgL, std::nullopt);
      else
        finish(syntax::e_null(), Rule::MsgR,
               syntax::msg_access(Location::at_node(here), Location::at_node(a.node),
                                  rx->name));
      break;
    }

    default:
      st.fault("unexpected redex");
      break;
  }

  return {std::move(st.cfg), st.ev, st.faulted};
}

// ---------------------------------------------------------------------------
// Schedulers, run, explore
// ---------------------------------------------------------------------------

SchedulerSpec SchedulerSpec::fifo() { return {Kind::Fifo, 0, {}}; }
SchedulerSpec SchedulerSpec::random(std::uint64_t seed) { return {Kind::Random, seed, {}}; }
SchedulerSpec SchedulerSpec::scripted(std::vector<std::size_t> picks) {
  return {Kind::Script, 0, std::move(picks)};
}

namespace {

class ScheduleCursor {
 public:
  explicit ScheduleCursor(const SchedulerSpec& spec) : spec_(spec), rng_(spec.seed) {}

  std::optional<std::size_t> pick(std::size_t n) {
    switch (spec_.kind) {
      case SchedulerSpec::Kind::Fifo:
        return 0;
      case SchedulerSpec::Kind::Random:
        // Plain modulo keeps traces reproducible across platforms.
        return static_cast<std::size_t>(rng_() % n);
      case SchedulerSpec::Kind::Script: {
        if (pos_ >= spec_.script.size()) return std::nullopt;
        std::size_t k = spec_.script[pos_++];
        if (k >= n) return std::nullopt;
        return k;
      }
    }
    return std::nullopt;
  }

 private:
  const SchedulerSpec& spec_;
  std::mt19937_64 rng_;
  std::size_t pos_ = 0;
};

}  // namespace

RunResult run(std::shared_ptr<const Program> program, const LocationMap& map,
              const SchedulerSpec& sched, std::size_t max_steps) {
  RunResult res{init_config(std::move(program), map), {}, false, {}, false};
  ScheduleCursor cursor(sched);
  for (std::size_t i = 0;; ++i) {
    auto redexes = enabled(res.config);
    if (redexes.empty()) break;
    if (i >= max_steps) {
      res.hit_max_steps = true;
      break;
    }
    auto k = cursor.pick(redexes.size());
    if (!k) break;  // script exhausted
    StepResult sr = step(res.config, redexes[*k], i);
    res.events.push_back(sr.event);
    res.config = std::move(sr.config);
    if (sr.faulted) {
      res.faulted = true;
      res.fault = sr.event.fault;
      break;
    }
  }
  return res;
}

namespace {

void explore_dfs(const Config& cfg, std::vector<std::size_t>& script,
                 std::vector<TraceEvent>& events, ExploreResult& out,
                 std::size_t depth_limit) {
  auto redexes = enabled(cfg);
  if (redexes.empty()) {
    out.traces.push_back({script, events, false});
    return;
  }
  if (events.size() >= depth_limit) {
    out.depth_exceeded = true;
    return;
  }
  for (std::size_t k = 0; k < redexes.size(); ++k) {
    StepResult sr = step(cfg, redexes[k], events.size());
    ++out.total_steps;
    script.push_back(k);
    events.push_back(sr.event);
    if (sr.faulted)
      out.traces.push_back({script, events, true});
    else
      explore_dfs(sr.config, script, events, out, depth_limit);
    events.pop_back();
    script.pop_back();
  }
}

}  // namespace

ExploreResult explore(std::shared_ptr<const Program> program, const LocationMap& map,
                      std::size_t depth_limit) {
  ExploreResult out;
  Config cfg = init_config(std::move(program), map);
  std::vector<std::size_t> script;
  std::vector<TraceEvent> events;
  explore_dfs(cfg, script, events, out, depth_limit);
  return out;
}

}  // namespace numalang::runtime
