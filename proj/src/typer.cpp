#include "numalang/typer.hpp"

#include <algorithm>
#include <set>

#include "numalang/pretty.hpp"

namespace numalang::typer {

using effects::concat;
using syntax::beh_access;
using syntax::beh_choice;
using syntax::beh_eps;
using syntax::beh_loop;
using syntax::beh_par;
using syntax::Expr;
using syntax::msg_access;
using syntax::read_access;
using syntax::write_access;

std::optional<Location> loc_of(const TypingContext& ctx) {
  if (ctx.empty()) return std::nullopt;
  const auto& frame = ctx.back();
  auto it = frame.vars.find("this");
  if (it == frame.vars.end()) return std::nullopt;
  if (it->second.kind != Type::Kind::Owned || it->second.locations.empty())
    return std::nullopt;
  return it->second.locations.front();
}

effects::LocationSubst owner_subst(const ClassDecl& cls, const std::vector<Location>& args) {
  effects::LocationSubst m;
  for (size_t i = 0; i < cls.owners.size() && i < args.size(); ++i)
    m[cls.owners[i]] = args[i];
  return m;
}

std::optional<std::vector<Location>> owners(const ProgramIndex& idx, const std::string& cls) {
  const ClassDecl* c = idx.find_class(cls);
  if (!c) return std::nullopt;
  return c->owners;
}

std::optional<Type> field_type(const ProgramIndex& idx, const std::string& cls,
                               const std::string& field, const std::vector<Location>& args) {
  const ClassDecl* c = idx.find_class(cls);
  if (!c || args.size() != c->owners.size()) return std::nullopt;
  const syntax::FieldDecl* f = idx.find_field(*c, field);
  if (!f) return std::nullopt;
  return effects::subst(f->type, owner_subst(*c, args));
}

std::optional<MethodSig> method_sig(const ProgramIndex& idx, const std::string& cls,
                                    const std::string& method,
                                    const std::vector<Location>& args) {
  const ClassDecl* c = idx.find_class(cls);
  if (!c || args.size() != c->owners.size()) return std::nullopt;
  const MethodDecl* m = idx.find_method(*c, method);
  if (!m) return std::nullopt;
  auto sub = owner_subst(*c, args);
  MethodSig sig;
  sig.return_type = effects::subst(m->return_type, sub);
  if (m->param)
    sig.param = syntax::Param{m->param->name, effects::subst(m->param->type, sub)};
  sig.body = effects::subst(m->body, sub);
  sig.declared = effects::subst(m->declared, sub);
  return sig;
}

std::optional<TypedExpr> Typer::fail(Span sp, const std::string& rule,
                                     const std::string& msg) {
  diags_.push_back({Severity::Error, sp, msg, rule});
  return std::nullopt;
}

namespace {

bool is_nil(const Type& t) { return t.kind == Type::Kind::Nil; }

}  // namespace

std::optional<TypedExpr> Typer::type_expr(TypingContext ctx, const ExprPtr& e) {
  switch (e->kind) {
    case Expr::Kind::Var: {
      if (ctx.empty())
        return fail(e->span, "T-Var", "no frame binds variable '" + e->name + "'");
      const auto& frame = ctx.back();
      auto it = frame.vars.find(e->name);
      if (it == frame.vars.end())
        return fail(e->span, "T-Var", "unbound variable '" + e->name + "'");
      return TypedExpr{it->second, beh_eps()};
    }
    case Expr::Kind::This: {
      if (ctx.empty()) return fail(e->span, "T-Var", "no frame binds 'this'");
      auto it = ctx.back().vars.find("this");
      if (it == ctx.back().vars.end())
        return fail(e->span, "T-Var", "'this' is not bound in the innermost frame");
      return TypedExpr{it->second, beh_eps()};
    }
    case Expr::Kind::Addr: {
      if (address_type) {
        if (auto t = address_type(e->address)) return TypedExpr{*t, beh_eps()};
        return fail(e->span, "T-Addr",
                    "dangling address " + to_string(e->address));
      }
      return fail(e->span, "T-Addr", "address literals cannot be typed statically");
    }
    case Expr::Kind::True:
    case Expr::Kind::False:
      return TypedExpr{Type::boolean(), beh_eps()};
    case Expr::Kind::Null:
      return TypedExpr{Type::nil(), beh_eps()};
    case Expr::Kind::IntLit:
      return TypedExpr{Type::integer(), beh_eps()};

    case Expr::Kind::Let: {
      auto init = type_expr(ctx, e->a);
      if (!init) return std::nullopt;
      TypingContext inner = ctx;
      if (e->name != "_") {
        if (inner.back().vars.count(e->name))
          return fail(e->span, "T-Let",
                      "variable '" + e->name + "' is already bound in the innermost frame");
        inner.back().vars[e->name] = init->type;
      }
      auto body = type_expr(std::move(inner), e->b);
      if (!body) return std::nullopt;
      return TypedExpr{body->type, concat(init->behaviour, body->behaviour)};
    }

    case Expr::Kind::If: {
      auto cond = type_expr(ctx, e->a);
      if (!cond) return std::nullopt;
      if (cond->type.kind != Type::Kind::Bool)
        return fail(e->span, "T-Cond",
                    "condition must be bool, got " + to_string(cond->type));
      auto thn = type_expr(ctx, e->b);
      auto els = type_expr(ctx, e->c);
      if (!thn || !els) return std::nullopt;
      Type t;
      if (thn->type == els->type) {
        t = thn->type;
      } else if (is_nil(thn->type) || is_nil(els->type)) {
        t = Type::nil();  // nil discards the other branch's value
      } else {
        return fail(e->span, "T-Cond",
                    "branches have incompatible types " + to_string(thn->type) +
                        " and " + to_string(els->type));
      }
      BehaviourPtr choice = beh_choice(thn->behaviour, els->behaviour, beh_eps());
      return TypedExpr{t, concat(cond->behaviour, choice)};
    }

    case Expr::Kind::For: {
      if (e->hi < e->lo || (!runtime_mode && e->hi <= e->lo))
        return fail(e->span, "T-For",
                    "loop upper bound must exceed the lower bound (" +
                        std::to_string(e->lo) + ".." + std::to_string(e->hi) + ")");
      TypingContext inner = ctx;
      inner.back().vars[e->name] = Type::integer();
      auto body = type_expr(std::move(inner), e->a);
      if (!body) return std::nullopt;
      int n = e->hi - e->lo + 1;
      return TypedExpr{body->type, beh_loop(n, body->behaviour, beh_eps())};
    }

    case Expr::Kind::Return: {
      if (ctx.size() < 1)
        return fail(e->span, "T-Ret", "no frame to pop for 'return'");
      TypingContext popped(ctx.begin(), ctx.end() - 1);
      return type_expr(std::move(popped), e->a);
    }

    case Expr::Kind::New: {
      const ClassDecl* cls = idx_.find_class(e->name);
      if (!cls) return fail(e->span, "T-NewO", "unknown class '" + e->name + "'");
      if (e->locations.size() != cls->owners.size())
        return fail(e->span, "T-NewO",
                    "class " + e->name + " expects " +
                        std::to_string(cls->owners.size()) + " ownership argument(s), got " +
                        std::to_string(e->locations.size()));
      bool runtime_locs = std::any_of(e->locations.begin(), e->locations.end(),
                                      [](const Location& l) { return l.is_node(); });
      if (!runtime_locs) {
        std::set<Location> distinct(e->locations.begin(), e->locations.end());
        if (distinct.size() != e->locations.size())
          return fail(e->span, "T-NewO", "ownership arguments must be pairwise distinct");
      }
      if (cls->active) {
        bool in_main = false;
        if (!ctx.empty()) {
          auto th = ctx.back().vars.find("this");
          in_main = th != ctx.back().vars.end() &&
                    th->second.kind == Type::Kind::Owned &&
                    th->second.class_name == "Main";
        }
        if (!in_main)
          return fail(e->span, "T-NewO",
                      "active class " + e->name + " may only be instantiated in Main");
      }
      auto l = loc_of(ctx);
      if (!l)
        return fail(e->span, "T-NewO", "'this' is not bound to an owned type");
      Type t = Type::owned(e->name, e->locations);
      return TypedExpr{t, beh_access(write_access(*l, e->locations.front()), beh_eps())};
    }

    case Expr::Kind::FieldRead: {
      auto obj = type_expr(ctx, e->a);
      if (!obj) return std::nullopt;
      if (obj->type.kind != Type::Kind::Owned)
        return fail(e->span, "T-FRead",
                    "field access on non-object type " + to_string(obj->type));
      auto ft = field_type(idx_, obj->type.class_name, e->name, obj->type.locations);
      if (!ft)
        return fail(e->span, "T-FRead",
                    "class " + obj->type.class_name + " has no field '" + e->name + "'");
      auto l = loc_of(ctx);
      if (!l) return fail(e->span, "T-FRead", "'this' is not bound to an owned type");
      BehaviourPtr eff = concat(
          obj->behaviour,
          beh_access(read_access(*l, obj->type.locations.front()), beh_eps()));
      return TypedExpr{*ft, eff};
    }

    case Expr::Kind::FieldWrite: {
      auto obj = type_expr(ctx, e->a);
      if (!obj) return std::nullopt;
      if (obj->type.kind != Type::Kind::Owned)
        return fail(e->span, "T-FWrite",
                    "field update on non-object type " + to_string(obj->type));
      auto ft = field_type(idx_, obj->type.class_name, e->name, obj->type.locations);
      if (!ft)
        return fail(e->span, "T-FWrite",
                    "class " + obj->type.class_name + " has no field '" + e->name + "'");
      auto val = type_expr(ctx, e->b);
      if (!val) return std::nullopt;
      if (!(val->type == *ft))
        return fail(e->span, "T-FWrite",
                    "field '" + e->name + "' expects " + to_string(*ft) + ", got " +
                        to_string(val->type));
      auto l = loc_of(ctx);
      if (!l) return fail(e->span, "T-FWrite", "'this' is not bound to an owned type");
      BehaviourPtr eff = concat(
          obj->behaviour,
          concat(val->behaviour,
                 beh_access(write_access(*l, obj->type.locations.front()), beh_eps())));
      return TypedExpr{*ft, eff};
    }

    case Expr::Kind::SyncCall: {
      auto recv = type_expr(ctx, e->a);
      if (!recv) return std::nullopt;
      if (recv->type.kind != Type::Kind::Owned)
        return fail(e->span, "T-Call",
                    "method call on non-object type " + to_string(recv->type));
      auto sig = method_sig(idx_, recv->type.class_name, e->name, recv->type.locations);
      if (!sig)
        return fail(e->span, "T-Call",
                    "class " + recv->type.class_name + " has no method '" + e->name + "'");
      auto l = loc_of(ctx);
      if (!l) return fail(e->span, "T-Call", "'this' is not bound to an owned type");
      if (!(*l == recv->type.locations.front()))
        return fail(e->span, "T-Call",
                    "synchronous call requires the receiver at the caller's location (" +
                        to_string(*l) + " vs " + to_string(recv->type.locations.front()) + ")");
      BehaviourPtr eff = recv->behaviour;
      if (sig->param) {
        if (!e->arg)
          return fail(e->span, "T-Call", "method '" + e->name + "' expects an argument");
        auto arg = type_expr(ctx, *e->arg);
        if (!arg) return std::nullopt;
        if (!(arg->type == sig->param->type))
          return fail(e->span, "T-Call",
                      "argument of '" + e->name + "' expects " +
                          to_string(sig->param->type) + ", got " + to_string(arg->type));
        eff = concat(eff, arg->behaviour);
      } else if (e->arg) {
        return fail(e->span, "T-Call", "method '" + e->name + "' takes no argument");
      }
      if (call_edges)
        call_edges->push_back({current_method, recv->type.class_name + "." + e->name});
      return TypedExpr{sig->return_type, concat(eff, sig->declared)};
    }

    case Expr::Kind::AsyncSend: {
      auto recv = type_expr(ctx, e->a);
      if (!recv) return std::nullopt;
      if (recv->type.kind != Type::Kind::Owned)
        return fail(e->span, "T-Message",
                    "message send on non-object type " + to_string(recv->type));
      auto sig = method_sig(idx_, recv->type.class_name, e->name, recv->type.locations);
      if (!sig)
        return fail(e->span, "T-Message",
                    "class " + recv->type.class_name + " has no method '" + e->name + "'");
      if (!is_nil(sig->return_type))
        return fail(e->span, "T-Message",
                    "message target '" + e->name + "' must return nil, not " +
                        to_string(sig->return_type));
      auto l = loc_of(ctx);
      if (!l) return fail(e->span, "T-Message", "'this' is not bound to an owned type");
      BehaviourPtr eff = recv->behaviour;
      if (sig->param) {
        if (!e->arg)
          return fail(e->span, "T-Message", "method '" + e->name + "' expects an argument");
        auto arg = type_expr(ctx, *e->arg);
        if (!arg) return std::nullopt;
        if (!(arg->type == sig->param->type))
          return fail(e->span, "T-Message",
                      "argument of '" + e->name + "' expects " +
                          to_string(sig->param->type) + ", got " + to_string(arg->type));
        eff = concat(eff, arg->behaviour);
      } else if (e->arg) {
        return fail(e->span, "T-Message", "method '" + e->name + "' takes no argument");
      }
      if (call_edges)
        call_edges->push_back({current_method, recv->type.class_name + "." + e->name});
      BehaviourPtr msg = beh_access(
          msg_access(*l, recv->type.locations.front(), e->name),
          beh_par(beh_eps(), sig->declared));
      return TypedExpr{Type::nil(), concat(eff, msg)};
    }
  }
  return fail(e->span, "", "unreachable expression kind");
}

std::vector<Diagnostic> check_class(const ProgramIndex& idx, const ClassDecl& cls,
                                    std::vector<MethodRecord>* records,
                                    std::vector<CallEdge>* edges) {
  std::vector<Diagnostic> diags;
  for (const auto& m : cls.methods) {
    Typer typer(idx, diags);
    typer.call_edges = edges;
    typer.current_method = cls.name + "." + m.name;

    TypingFrame frame;
    frame.vars["this"] = Type::owned(cls.name, cls.owners);
    if (m.param) {
      if (m.param->name == "this" || m.param->name == "_") {
        diags.push_back({Severity::Error, m.span,
                         "method parameter may not be named '" + m.param->name + "'",
                         "WF-Class"});
        continue;
      }
      frame.vars[m.param->name] = m.param->type;
    }

    MethodRecord rec;
    rec.class_name = cls.name;
    rec.method_name = m.name;
    rec.declared = m.declared;

    auto typed = typer.type_expr({frame}, m.body);
    if (typed) {
      rec.inferred = typed->behaviour;
      rec.filtered = effects::filter(typed->behaviour);
      bool type_ok = typed->type == m.return_type || m.return_type.kind == Type::Kind::Nil;
      if (!type_ok) {
        diags.push_back({Severity::Error, m.span,
                         "method '" + m.name + "' declares return type " +
                             to_string(m.return_type) + " but its body has type " +
                             to_string(typed->type),
                         "WF-Class"});
      }
      rec.ok = type_ok && effects::equiv(rec.filtered, m.declared);
      if (type_ok && !rec.ok) {
        diags.push_back({Severity::Error, m.span,
                         "method '" + m.name + "' declares behaviour " +
                             syntax::pretty(m.declared) +
                             " but its filtered inferred behaviour is " +
                             syntax::pretty(rec.filtered),
                         "WF-Class"});
      }
    }
    if (records) records->push_back(std::move(rec));
  }
  return diags;
}

namespace {

// Rejects any cycle in the sync+async invocation graph; inference
// remains finite regardless, but acyclicity keeps runtime call depth
// bounded and forbids the recursion the language rules out.
void check_acyclic(const std::vector<CallEdge>& edges, std::vector<Diagnostic>& diags) {
  std::map<std::string, std::vector<std::string>> adj;
  for (const auto& e : edges) adj[e.from].push_back(e.to);

  std::set<std::string> done;
  for (const auto& [start, _] : adj) {
    if (done.count(start)) continue;
    // Iterative DFS with an explicit path for cycle reporting.
    std::vector<std::pair<std::string, size_t>> stack{{start, 0}};
    std::set<std::string> on_path{start};
    std::vector<std::string> path{start};
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      auto it = adj.find(node);
      if (it == adj.end() || next >= it->second.size()) {
        done.insert(node);
        on_path.erase(node);
        path.pop_back();
        stack.pop_back();
        continue;
      }
      std::string succ = it->second[next++];
      if (on_path.count(succ)) {
        std::string chain;
        auto at = std::find(path.begin(), path.end(), succ);
        for (auto p = at; p != path.end(); ++p) chain += *p + " -> ";
        chain += succ;
        diags.push_back({Severity::Error, {},
                         "recursive invocation chain: " + chain, "WF-Program"});
        return;
      }
      if (!done.count(succ)) {
        on_path.insert(succ);
        path.push_back(succ);
        stack.emplace_back(succ, 0);
      }
    }
  }
}

}  // namespace

CheckReport check_program(const Program& program) {
  CheckReport report;
  ProgramIndex idx(program);

  const ClassDecl* main_cls = idx.find_class("Main");
  if (!main_cls) {
    report.diagnostics.push_back(
        {Severity::Error, {}, "program must declare a class Main", "WF-Program"});
  } else {
    const MethodDecl* main_m = idx.find_method(*main_cls, "main");
    if (!main_m) {
      report.diagnostics.push_back({Severity::Error, main_cls->span,
                                    "class Main must declare a method 'main'",
                                    "WF-Program"});
    } else {
      if (main_m->param)
        report.diagnostics.push_back({Severity::Error, main_m->span,
                                      "'main' must take no parameter", "WF-Program"});
      if (main_m->return_type.kind != Type::Kind::Nil)
        report.diagnostics.push_back({Severity::Error, main_m->span,
                                      "'main' must return nil", "WF-Program"});
    }
  }

  std::vector<CallEdge> edges;
  for (const auto& cls : program.classes) {
    auto diags = check_class(idx, cls, &report.methods, &edges);
    report.diagnostics.insert(report.diagnostics.end(), diags.begin(), diags.end());
  }
  check_acyclic(edges, report.diagnostics);

  report.ok = !has_errors(report.diagnostics);
  return report;
}

}  // namespace numalang::typer
