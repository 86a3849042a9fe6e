#include "numalang/pretty.hpp"

#include <sstream>

namespace numalang::syntax {

namespace {

void print_behaviour(std::ostream& os, const BehaviourPtr& b, bool at_head);

// Prints one sequencing item. Continuations are joined with '.', and a
// trailing eps is left implicit unless the whole term is eps.
void print_behaviour(std::ostream& os, const BehaviourPtr& b, bool at_head) {
  switch (b->kind) {
    case Behaviour::Kind::Eps:
      if (at_head) os << "eps";
      return;
    case Behaviour::Kind::Par:
      if (!at_head) os << ".";
      os << "(";
      print_behaviour(os, b->lhs, true);
      os << " || ";
      print_behaviour(os, b->rhs, true);
      os << ")";
      return;
    case Behaviour::Kind::Access:
      if (!at_head) os << ".";
      os << to_string(b->access);
      print_behaviour(os, b->rest, false);
      return;
    case Behaviour::Kind::Choice:
      if (!at_head) os << ".";
      os << "(";
      print_behaviour(os, b->lhs, true);
      os << " + ";
      print_behaviour(os, b->rhs, true);
      os << ")";
      print_behaviour(os, b->rest, false);
      return;
    case Behaviour::Kind::Loop:
      if (!at_head) os << ".";
      os << b->loop_count << "*{";
      print_behaviour(os, b->body, true);
      os << "}";
      print_behaviour(os, b->rest, false);
      return;
  }
}

// Precedence tiers for expression printing: a receiver of `.` / `!`
// must be a primary, everything else takes the loose form.
bool needs_parens_as_receiver(const ExprPtr& e) {
  switch (e->kind) {
    case Expr::Kind::Var:
    case Expr::Kind::This:
    case Expr::Kind::True:
    case Expr::Kind::False:
    case Expr::Kind::Null:
    case Expr::Kind::Addr:
    case Expr::Kind::SyncCall:
    case Expr::Kind::FieldRead:
    case Expr::Kind::FieldWrite:  // prints its own parentheses
      return false;
    default:
      return true;
  }
}

void print_expr(std::ostream& os, const ExprPtr& e) {
  auto child = [&](const ExprPtr& c, bool parens) {
    if (parens) os << "(";
    print_expr(os, c);
    if (parens) os << ")";
  };
  switch (e->kind) {
    case Expr::Kind::Var: os << e->name; return;
    case Expr::Kind::This: os << "this"; return;
    case Expr::Kind::True: os << "true"; return;
    case Expr::Kind::False: os << "false"; return;
    case Expr::Kind::Null: os << "null"; return;
    case Expr::Kind::IntLit: os << e->int_value; return;
    case Expr::Kind::Addr: os << to_string(e->address); return;
    case Expr::Kind::Let:
      os << "let " << e->name << " = ";
      print_expr(os, e->a);
      os << " in ";
      print_expr(os, e->b);
      return;
    case Expr::Kind::If:
      os << "if ";
      print_expr(os, e->a);
      os << " then ";
      print_expr(os, e->b);
      os << " else ";
      print_expr(os, e->c);
      return;
    case Expr::Kind::For:
      os << "for " << e->name << " in " << e->lo << ".." << e->hi << " { ";
      print_expr(os, e->a);
      os << " }";
      return;
    case Expr::Kind::FieldRead:
      child(e->a, needs_parens_as_receiver(e->a));
      os << "." << e->name;
      return;
    case Expr::Kind::FieldWrite:
      os << "(";
      child(e->a, needs_parens_as_receiver(e->a));
      os << "." << e->name << " = ";
      print_expr(os, e->b);
      os << ")";
      return;
    case Expr::Kind::SyncCall:
      child(e->a, needs_parens_as_receiver(e->a));
      os << "." << e->name << "(";
      if (e->arg) print_expr(os, *e->arg);
      os << ")";
      return;
    case Expr::Kind::AsyncSend:
      child(e->a, needs_parens_as_receiver(e->a));
      os << "!" << e->name << "(";
      if (e->arg) print_expr(os, *e->arg);
      os << ")";
      return;
    case Expr::Kind::New: {
      os << "new " << e->name << "<";
      for (size_t i = 0; i < e->locations.size(); ++i) {
        if (i) os << ", ";
        os << to_string(e->locations[i]);
      }
      os << ">";
      return;
    }
    case Expr::Kind::Return:
      os << "return ";
      print_expr(os, e->a);
      return;
  }
}

}  // namespace

std::string pretty(const BehaviourPtr& b) {
  std::ostringstream os;
  print_behaviour(os, b, true);
  return os.str();
}

std::string pretty(const ExprPtr& e) {
  std::ostringstream os;
  print_expr(os, e);
  return os.str();
}

std::string pretty(const Type& t) { return to_string(t); }

std::string pretty(const Program& p) {
  std::ostringstream os;
  bool first = true;
  for (const auto& cls : p.classes) {
    if (!first) os << "\n";
    first = false;
    if (cls.active) os << "active ";
    os << "class " << cls.name << "<";
    for (size_t i = 0; i < cls.owners.size(); ++i) {
      if (i) os << ", ";
      os << to_string(cls.owners[i]);
    }
    os << ">\n";
    for (const auto& f : cls.fields)
      os << "  " << f.name << ": " << to_string(f.type) << "\n";
    for (const auto& m : cls.methods) {
      os << "  def " << m.name << "(";
      if (m.param) os << m.param->name << ": " << to_string(m.param->type);
      os << "): " << to_string(m.return_type) << " as " << pretty(m.declared) << " {\n";
      os << "    " << pretty(m.body) << "\n";
      os << "  }\n";
    }
  }
  return os.str();
}

}  // namespace numalang::syntax
