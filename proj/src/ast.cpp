#include "numalang/ast.hpp"

#include <sstream>

namespace numalang::syntax {

Location Location::owner_param(std::string n) {
  Location l;
  l.kind = Kind::OwnerParam;
  l.name = std::move(n);
  return l;
}

Location Location::abstract(std::string n) {
  Location l;
  l.kind = Kind::AbstractLoc;
  l.name = std::move(n);
  return l;
}

Location Location::at_node(NodeId k) {
  Location l;
  l.kind = Kind::Node;
  l.node = k;
  return l;
}

std::string to_string(const Location& l) {
  if (l.kind == Location::Kind::Node) return std::to_string(l.node);
  return l.name;
}

RemAccess read_access(Location src, Location dst) {
  return RemAccess{RemAccess::Kind::Read, std::move(src), std::move(dst), {}};
}

RemAccess write_access(Location src, Location dst) {
  return RemAccess{RemAccess::Kind::Write, std::move(src), std::move(dst), {}};
}

RemAccess msg_access(Location src, Location dst, std::string method) {
  return RemAccess{RemAccess::Kind::Msg, std::move(src), std::move(dst), std::move(method)};
}

std::string to_string(const RemAccess& a) {
  std::string head;
  switch (a.kind) {
    case RemAccess::Kind::Read: head = "read"; break;
    case RemAccess::Kind::Write: head = "write"; break;
    case RemAccess::Kind::Msg: head = "msg"; break;
  }
  std::string out = head + "(" + to_string(a.src) + "," + to_string(a.dst);
  if (a.kind == RemAccess::Kind::Msg) out += "," + a.method;
  return out + ")";
}

BehaviourPtr beh_eps() {
  static const BehaviourPtr eps = std::make_shared<Behaviour>();
  return eps;
}

BehaviourPtr beh_access(RemAccess a, BehaviourPtr rest) {
  auto b = std::make_shared<Behaviour>();
  b->kind = Behaviour::Kind::Access;
  b->access = std::move(a);
  b->rest = std::move(rest);
  return b;
}

BehaviourPtr beh_choice(BehaviourPtr l, BehaviourPtr r, BehaviourPtr rest) {
  auto b = std::make_shared<Behaviour>();
  b->kind = Behaviour::Kind::Choice;
  b->lhs = std::move(l);
  b->rhs = std::move(r);
  b->rest = std::move(rest);
  return b;
}

BehaviourPtr beh_loop(int n, BehaviourPtr body, BehaviourPtr rest) {
  auto b = std::make_shared<Behaviour>();
  b->kind = Behaviour::Kind::Loop;
  b->loop_count = n;
  b->body = std::move(body);
  b->rest = std::move(rest);
  return b;
}

BehaviourPtr beh_par(BehaviourPtr l, BehaviourPtr r) {
  auto b = std::make_shared<Behaviour>();
  b->kind = Behaviour::Kind::Par;
  b->lhs = std::move(l);
  b->rhs = std::move(r);
  return b;
}

namespace {

template <typename T>
int cmp3(const T& a, const T& b) {
  if (a < b) return -1;
  if (b < a) return 1;
  return 0;
}

int compare(const RemAccess& a, const RemAccess& b) {
  if (int c = cmp3(static_cast<int>(a.kind), static_cast<int>(b.kind))) return c;
  if (int c = cmp3(a.src, b.src)) return c;
  if (int c = cmp3(a.dst, b.dst)) return c;
  return cmp3(a.method, b.method);
}

}  // namespace

int compare(const Behaviour& a, const Behaviour& b) {
  if (int c = cmp3(static_cast<int>(a.kind), static_cast<int>(b.kind))) return c;
  switch (a.kind) {
    case Behaviour::Kind::Eps:
      return 0;
    case Behaviour::Kind::Access:
      if (int c = compare(a.access, b.access)) return c;
      return compare(a.rest, b.rest);
    case Behaviour::Kind::Choice:
      if (int c = compare(a.lhs, b.lhs)) return c;
      if (int c = compare(a.rhs, b.rhs)) return c;
      return compare(a.rest, b.rest);
    case Behaviour::Kind::Loop:
      if (int c = cmp3(a.loop_count, b.loop_count)) return c;
      if (int c = compare(a.body, b.body)) return c;
      return compare(a.rest, b.rest);
    case Behaviour::Kind::Par:
      if (int c = compare(a.lhs, b.lhs)) return c;
      return compare(a.rhs, b.rhs);
  }
  return 0;
}

int compare(const BehaviourPtr& a, const BehaviourPtr& b) {
  if (a.get() == b.get()) return 0;
  return compare(*a, *b);
}

bool equal(const BehaviourPtr& a, const BehaviourPtr& b) { return compare(a, b) == 0; }

bool is_eps(const BehaviourPtr& b) { return b->kind == Behaviour::Kind::Eps; }

Type Type::boolean() {
  Type t;
  t.kind = Kind::Bool;
  return t;
}

Type Type::nil() {
  Type t;
  t.kind = Kind::Nil;
  return t;
}

Type Type::integer() {
  Type t;
  t.kind = Kind::Int;
  return t;
}

Type Type::owned(std::string cls, std::vector<Location> locs) {
  Type t;
  t.kind = Kind::Owned;
  t.class_name = std::move(cls);
  t.locations = std::move(locs);
  return t;
}

std::string to_string(const Type& t) {
  switch (t.kind) {
    case Type::Kind::Bool: return "bool";
    case Type::Kind::Nil: return "nil";
    case Type::Kind::Int: return "int";
    case Type::Kind::Owned: {
      std::string out = t.class_name + "<";
      for (size_t i = 0; i < t.locations.size(); ++i) {
        if (i) out += ", ";
        out += to_string(t.locations[i]);
      }
      return out + ">";
    }
  }
  return "?";
}

std::string to_string(const Address& a) {
  return "@" + std::to_string(a.node) + "." + std::to_string(a.index);
}

namespace {

std::shared_ptr<Expr> mk(Expr::Kind k, Span sp) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->span = sp;
  return e;
}

}  // namespace

ExprPtr e_var(std::string name, Span sp) {
  auto e = mk(Expr::Kind::Var, sp);
  e->name = std::move(name);
  return e;
}

ExprPtr e_this(Span sp) { return mk(Expr::Kind::This, sp); }
ExprPtr e_true(Span sp) { return mk(Expr::Kind::True, sp); }
ExprPtr e_false(Span sp) { return mk(Expr::Kind::False, sp); }
ExprPtr e_null(Span sp) { return mk(Expr::Kind::Null, sp); }

ExprPtr e_if(ExprPtr c, ExprPtr t, ExprPtr e, Span sp) {
  auto n = mk(Expr::Kind::If, sp);
  n->a = std::move(c);
  n->b = std::move(t);
  n->c = std::move(e);
  return n;
}

ExprPtr e_call(ExprPtr recv, std::string method, std::optional<ExprPtr> arg, Span sp) {
  auto n = mk(Expr::Kind::SyncCall, sp);
  n->a = std::move(recv);
  n->name = std::move(method);
  n->arg = std::move(arg);
  return n;
}

ExprPtr e_send(ExprPtr recv, std::string method, std::optional<ExprPtr> arg, Span sp) {
  auto n = mk(Expr::Kind::AsyncSend, sp);
  n->a = std::move(recv);
  n->name = std::move(method);
  n->arg = std::move(arg);
  return n;
}

ExprPtr e_fread(ExprPtr obj, std::string field, Span sp) {
  auto n = mk(Expr::Kind::FieldRead, sp);
  n->a = std::move(obj);
  n->name = std::move(field);
  return n;
}

ExprPtr e_fwrite(ExprPtr obj, std::string field, ExprPtr val, Span sp) {
  auto n = mk(Expr::Kind::FieldWrite, sp);
  n->a = std::move(obj);
  n->name = std::move(field);
  n->b = std::move(val);
  return n;
}

ExprPtr e_new(std::string cls, std::vector<Location> locs, Span sp) {
  auto n = mk(Expr::Kind::New, sp);
  n->name = std::move(cls);
  n->locations = std::move(locs);
  return n;
}

ExprPtr e_for(std::string counter, int lo, int hi, ExprPtr body, Span sp) {
  auto n = mk(Expr::Kind::For, sp);
  n->name = std::move(counter);
  n->lo = lo;
  n->hi = hi;
  n->a = std::move(body);
  return n;
}

ExprPtr e_let(std::string binder, ExprPtr init, ExprPtr body, Span sp) {
  auto n = mk(Expr::Kind::Let, sp);
  n->name = std::move(binder);
  n->a = std::move(init);
  n->b = std::move(body);
  return n;
}

ExprPtr e_return(ExprPtr inner) {
  auto n = mk(Expr::Kind::Return, {});
  n->a = std::move(inner);
  return n;
}

ExprPtr e_addr(Address a) {
  auto n = mk(Expr::Kind::Addr, {});
  n->address = a;
  return n;
}

ExprPtr e_int(int v) {
  auto n = mk(Expr::Kind::IntLit, {});
  n->int_value = v;
  return n;
}

bool equal(const ExprPtr& a, const ExprPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  auto eq_child = [](const ExprPtr& x, const ExprPtr& y) {
    if (!x && !y) return true;
    if (!x || !y) return false;
    return equal(x, y);
  };
  if (a->name != b->name) return false;
  if (a->int_value != b->int_value) return false;
  if (a->lo != b->lo || a->hi != b->hi) return false;
  if (a->address != b->address) return false;
  if (a->locations != b->locations) return false;
  if (a->arg.has_value() != b->arg.has_value()) return false;
  if (a->arg && !equal(*a->arg, *b->arg)) return false;
  return eq_child(a->a, b->a) && eq_child(a->b, b->b) && eq_child(a->c, b->c);
}

namespace {

bool equal(const Type& a, const Type& b) { return a == b; }

bool equal(const MethodDecl& a, const MethodDecl& b) {
  if (a.name != b.name) return false;
  if (a.param.has_value() != b.param.has_value()) return false;
  if (a.param && (a.param->name != b.param->name || !(a.param->type == b.param->type)))
    return false;
  return equal(a.return_type, b.return_type) && equal(a.declared, b.declared) &&
         equal(a.body, b.body);
}

bool equal(const ClassDecl& a, const ClassDecl& b) {
  if (a.active != b.active || a.name != b.name || a.owners != b.owners) return false;
  if (a.fields.size() != b.fields.size() || a.methods.size() != b.methods.size()) return false;
  for (size_t i = 0; i < a.fields.size(); ++i)
    if (a.fields[i].name != b.fields[i].name || !(a.fields[i].type == b.fields[i].type))
      return false;
  for (size_t i = 0; i < a.methods.size(); ++i)
    if (!equal(a.methods[i], b.methods[i])) return false;
  return true;
}

}  // namespace

bool equal(const Program& a, const Program& b) {
  if (a.classes.size() != b.classes.size()) return false;
  for (size_t i = 0; i < a.classes.size(); ++i)
    if (!equal(a.classes[i], b.classes[i])) return false;
  return true;
}

ProgramIndex::ProgramIndex(const Program& p) : program_(&p) {
  for (const auto& cls : p.classes) classes_.emplace(cls.name, &cls);
}

const ClassDecl* ProgramIndex::find_class(const std::string& name) const {
  auto it = classes_.find(name);
  return it == classes_.end() ? nullptr : it->second;
}

const FieldDecl* ProgramIndex::find_field(const ClassDecl& cls, const std::string& name) const {
  for (const auto& f : cls.fields)
    if (f.name == name) return &f;
  return nullptr;
}

const MethodDecl* ProgramIndex::find_method(const ClassDecl& cls, const std::string& name) const {
  for (const auto& m : cls.methods)
    if (m.name == name) return &m;
  return nullptr;
}

}  // namespace numalang::syntax
