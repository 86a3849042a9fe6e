#include "numalang/parser.hpp"

#include <algorithm>
#include <set>

#include "numalang/lexer.hpp"

namespace numalang::syntax {

namespace {

// Recursive-descent parser over the token stream. Class bodies are not
// braced: a class's fields and methods run until the next `class` /
// `active` or end of input, mirroring the listing style of the language.
class Parser {
 public:
  Parser(std::string_view src, std::vector<Diagnostic>& diags)
      : diags_(diags), toks_(lex(src, diags)) {}

  std::optional<Program> program() {
    Program p;
    std::set<std::string> names;
    while (!at(Tok::End)) {
      if (at(Tok::KwActive) || at(Tok::KwClass)) {
        auto cls = class_decl();
        if (cls) {
          if (!names.insert(cls->name).second)
            error(cls->span, "duplicate class '" + cls->name + "'");
          p.classes.push_back(std::move(*cls));
        } else {
          sync_to_class();
        }
      } else {
        error(cur().span, std::string("expected 'class' or 'active', got ") +
                              token_name(cur().kind));
        sync_to_class();
      }
    }
    if (has_errors(diags_)) return std::nullopt;
    return p;
  }

  std::optional<BehaviourPtr> standalone_behaviour() {
    standalone_ = true;
    auto b = behaviour();
    expect(Tok::End, "behaviour");
    if (has_errors(diags_) || !b) return std::nullopt;
    return b;
  }

  std::optional<ExprPtr> standalone_expr() {
    standalone_ = true;
    auto e = expr();
    expect(Tok::End, "expression");
    if (has_errors(diags_) || !e) return std::nullopt;
    return e;
  }

 private:
  std::vector<Diagnostic>& diags_;
  std::vector<Token> toks_;
  size_t pos_ = 0;

  // Location resolution context: inside a class, identifiers must be
  // declared ownership parameters; standalone terms take any identifier
  // as an abstract location and integers as node ids.
  bool standalone_ = false;
  bool in_main_ = false;
  std::vector<std::string> owner_names_;

  const Token& cur() const { return toks_[pos_]; }
  const Token& peek(size_t n = 1) const {
    return toks_[std::min(pos_ + n, toks_.size() - 1)];
  }
  bool at(Tok k) const { return cur().kind == k; }
  Token consume() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
  bool accept(Tok k) {
    if (at(k)) {
      consume();
      return true;
    }
    return false;
  }

  void error(Span sp, std::string msg) {
    diags_.push_back({Severity::Error, sp, std::move(msg), {}});
  }

  bool expect(Tok k, const char* where) {
    if (accept(k)) return true;
    error(cur().span, std::string("expected ") + token_name(k) + " in " + where +
                          ", got " + token_name(cur().kind));
    return false;
  }

  void sync_to_class() {
    while (!at(Tok::End) && !at(Tok::KwClass) && !at(Tok::KwActive)) consume();
  }

  std::optional<std::string> ident(const char* where) {
    if (at(Tok::Ident)) return consume().text;
    error(cur().span, std::string("expected identifier in ") + where + ", got " +
                          token_name(cur().kind));
    return std::nullopt;
  }

  // --- declarations ---------------------------------------------------

  std::optional<ClassDecl> class_decl() {
    ClassDecl cls;
    cls.span = cur().span;
    cls.active = accept(Tok::KwActive);
    if (!expect(Tok::KwClass, "class declaration")) return std::nullopt;
    auto name = ident("class declaration");
    if (!name) return std::nullopt;
    cls.name = *name;
    in_main_ = (cls.name == "Main");
    if (!expect(Tok::Lt, "class declaration")) return std::nullopt;
    owner_names_.clear();
    do {
      Span sp = cur().span;
      auto p = ident("ownership parameter list");
      if (!p) return std::nullopt;
      if (std::find(owner_names_.begin(), owner_names_.end(), *p) != owner_names_.end())
        error(sp, "duplicate ownership parameter '" + *p + "'");
      owner_names_.push_back(*p);
      cls.owners.push_back(in_main_ ? Location::abstract(*p) : Location::owner_param(*p));
    } while (accept(Tok::Comma));
    if (!expect(Tok::Gt, "class declaration")) return std::nullopt;

    std::set<std::string> field_names, method_names;
    bool seen_method = false;
    while (true) {
      if (at(Tok::Ident)) {
        Span sp = cur().span;
        if (seen_method)
          error(sp, "field declarations must precede method declarations");
        auto f = field_decl();
        if (!f) return std::nullopt;
        if (!field_names.insert(f->name).second)
          error(f->span, "duplicate field '" + f->name + "' in class " + cls.name);
        cls.fields.push_back(std::move(*f));
      } else if (at(Tok::KwDef)) {
        seen_method = true;
        auto m = method_decl();
        if (!m) return std::nullopt;
        if (!method_names.insert(m->name).second)
          error(m->span, "duplicate method '" + m->name + "' in class " + cls.name);
        cls.methods.push_back(std::move(*m));
      } else {
        break;
      }
    }
    return cls;
  }

  std::optional<FieldDecl> field_decl() {
    FieldDecl f;
    f.span = cur().span;
    auto name = ident("field declaration");
    if (!name) return std::nullopt;
    f.name = *name;
    if (!expect(Tok::Colon, "field declaration")) return std::nullopt;
    auto t = type("field type");
    if (!t) return std::nullopt;
    f.type = *t;
    return f;
  }

  std::optional<MethodDecl> method_decl() {
    MethodDecl m;
    m.span = cur().span;
    consume();  // def
    auto name = ident("method declaration");
    if (!name) return std::nullopt;
    m.name = *name;
    if (!expect(Tok::LParen, "method declaration")) return std::nullopt;
    if (!at(Tok::RParen)) {
      Param p;
      auto pn = ident("method parameter");
      if (!pn) return std::nullopt;
      p.name = *pn;
      if (!expect(Tok::Colon, "method parameter")) return std::nullopt;
      auto pt = type("parameter type");
      if (!pt) return std::nullopt;
      p.type = *pt;
      m.param = std::move(p);
    }
    if (!expect(Tok::RParen, "method declaration")) return std::nullopt;
    if (!expect(Tok::Colon, "method declaration")) return std::nullopt;
    auto rt = type("return type");
    if (!rt) return std::nullopt;
    m.return_type = *rt;
    if (!expect(Tok::KwAs, "method declaration")) return std::nullopt;
    auto b = behaviour();
    if (!b) return std::nullopt;
    m.declared = *b;
    if (!expect(Tok::LBrace, "method body")) return std::nullopt;
    auto body = expr();
    if (!body) return std::nullopt;
    m.body = *body;
    if (!expect(Tok::RBrace, "method body")) return std::nullopt;
    return m;
  }

  // --- types & locations ----------------------------------------------

  std::optional<Type> type(const char* where) {
    if (accept(Tok::KwBool)) return Type::boolean();
    if (accept(Tok::KwNil)) return Type::nil();
    if (at(Tok::Ident)) {
      std::string cls = consume().text;
      if (!expect(Tok::Lt, where)) return std::nullopt;
      std::vector<Location> locs;
      do {
        auto l = location(where);
        if (!l) return std::nullopt;
        locs.push_back(*l);
      } while (accept(Tok::Comma));
      if (!expect(Tok::Gt, where)) return std::nullopt;
      return Type::owned(std::move(cls), std::move(locs));
    }
    error(cur().span, std::string("expected a type in ") + where + ", got " +
                          token_name(cur().kind));
    return std::nullopt;
  }

  std::optional<Location> location(const char* where) {
    Span sp = cur().span;
    if (at(Tok::Int)) {
      if (!standalone_) {
        error(sp, "node-id locations are not source syntax");
        consume();
        return std::nullopt;
      }
      return Location::at_node(consume().value);
    }
    if (at(Tok::Ident)) {
      std::string n = consume().text;
      if (standalone_) return Location::abstract(n);
      if (std::find(owner_names_.begin(), owner_names_.end(), n) == owner_names_.end()) {
        error(sp, "location '" + n + "' is not an ownership parameter of the enclosing class");
        return std::nullopt;
      }
      return in_main_ ? Location::abstract(n) : Location::owner_param(n);
    }
    error(sp, std::string("expected a location in ") + where + ", got " +
                  token_name(cur().kind));
    return std::nullopt;
  }

  // --- behaviours -------------------------------------------------------
  //
  //   behaviour := item ('.' item)*
  //   item      := 'eps' | '(' behaviour ('+' | '||') behaviour ')'
  //              | read/write/msg atom | Int '*' '{' behaviour '}'
  //
  // `eps` and a parallel composition terminate a sequence; a trailing
  // operator item gets an implicit eps continuation.

  struct Item {
    enum class Kind { Eps, Par, Access, Choice, Loop } kind;
    RemAccess access;
    BehaviourPtr lhs, rhs, body;
    int loop_count = 0;
    Span span;
  };

  std::optional<BehaviourPtr> behaviour() {
    std::vector<Item> items;
    do {
      auto it = behaviour_item();
      if (!it) return std::nullopt;
      items.push_back(std::move(*it));
    } while (accept(Tok::Dot));

    BehaviourPtr tail;
    size_t n = items.size();
    const Item& last = items[n - 1];
    switch (last.kind) {
      case Item::Kind::Eps: tail = beh_eps(); break;
      case Item::Kind::Par: tail = beh_par(last.lhs, last.rhs); break;
      case Item::Kind::Access: tail = beh_access(last.access, beh_eps()); break;
      case Item::Kind::Choice: tail = beh_choice(last.lhs, last.rhs, beh_eps()); break;
      case Item::Kind::Loop: tail = beh_loop(last.loop_count, last.body, beh_eps()); break;
    }
    for (size_t i = n - 1; i-- > 0;) {
      const Item& it = items[i];
      switch (it.kind) {
        case Item::Kind::Eps:
        case Item::Kind::Par:
          error(it.span, it.kind == Item::Kind::Eps
                             ? "'eps' may only terminate a behaviour sequence"
                             : "a parallel behaviour may only terminate a sequence");
          return std::nullopt;
        case Item::Kind::Access: tail = beh_access(it.access, tail); break;
        case Item::Kind::Choice: tail = beh_choice(it.lhs, it.rhs, tail); break;
        case Item::Kind::Loop: tail = beh_loop(it.loop_count, it.body, tail); break;
      }
    }
    return tail;
  }

  std::optional<Item> behaviour_item() {
    Item it;
    it.span = cur().span;
    if (accept(Tok::KwEps)) {
      it.kind = Item::Kind::Eps;
      return it;
    }
    if (at(Tok::KwRead) || at(Tok::KwWrite) || at(Tok::KwMsg)) {
      Tok k = consume().kind;
      if (!expect(Tok::LParen, "access")) return std::nullopt;
      auto src = location("access");
      if (!src) return std::nullopt;
      if (!expect(Tok::Comma, "access")) return std::nullopt;
      auto dst = location("access");
      if (!dst) return std::nullopt;
      std::string method;
      if (k == Tok::KwMsg) {
        if (!expect(Tok::Comma, "message access")) return std::nullopt;
        auto m = ident("message access");
        if (!m) return std::nullopt;
        method = *m;
      }
      if (!expect(Tok::RParen, "access")) return std::nullopt;
      it.kind = Item::Kind::Access;
      it.access.kind = k == Tok::KwRead    ? RemAccess::Kind::Read
                       : k == Tok::KwWrite ? RemAccess::Kind::Write
                                           : RemAccess::Kind::Msg;
      it.access.src = *src;
      it.access.dst = *dst;
      it.access.method = std::move(method);
      return it;
    }
    if (at(Tok::Int)) {
      int n = consume().value;
      if (n < 1) error(it.span, "loop count must be at least 1");
      if (!expect(Tok::Star, "loop behaviour")) return std::nullopt;
      if (!expect(Tok::LBrace, "loop behaviour")) return std::nullopt;
      auto body = behaviour();
      if (!body) return std::nullopt;
      if (!expect(Tok::RBrace, "loop behaviour")) return std::nullopt;
      it.kind = Item::Kind::Loop;
      it.loop_count = n;
      it.body = *body;
      return it;
    }
    if (accept(Tok::LParen)) {
      auto l = behaviour();
      if (!l) return std::nullopt;
      bool par;
      if (accept(Tok::Plus)) {
        par = false;
      } else if (accept(Tok::PipePipe)) {
        par = true;
      } else {
        error(cur().span, "expected '+' or '||' inside parenthesized behaviour");
        return std::nullopt;
      }
      auto r = behaviour();
      if (!r) return std::nullopt;
      if (!expect(Tok::RParen, "behaviour")) return std::nullopt;
      it.kind = par ? Item::Kind::Par : Item::Kind::Choice;
      it.lhs = *l;
      it.rhs = *r;
      return it;
    }
    error(it.span, std::string("expected a behaviour, got ") + token_name(cur().kind));
    return std::nullopt;
  }

  // --- expressions ------------------------------------------------------

  std::optional<ExprPtr> expr() {
    Span sp = cur().span;
    if (accept(Tok::KwLet)) {
      auto x = ident("let binding");
      if (!x) return std::nullopt;
      if (!expect(Tok::Assign, "let binding")) return std::nullopt;
      auto init = expr();
      if (!init) return std::nullopt;
      if (!expect(Tok::KwIn, "let binding")) return std::nullopt;
      auto body = expr();
      if (!body) return std::nullopt;
      return e_let(*x, *init, *body, sp);
    }
    if (accept(Tok::KwIf)) {
      auto c = expr();
      if (!c) return std::nullopt;
      if (!expect(Tok::KwThen, "conditional")) return std::nullopt;
      auto t = expr();
      if (!t) return std::nullopt;
      if (!expect(Tok::KwElse, "conditional")) return std::nullopt;
      auto e = expr();
      if (!e) return std::nullopt;
      return e_if(*c, *t, *e, sp);
    }
    if (accept(Tok::KwFor)) {
      auto i = ident("for loop");
      if (!i) return std::nullopt;
      if (!expect(Tok::KwIn, "for loop")) return std::nullopt;
      if (!at(Tok::Int)) {
        error(cur().span, "for-loop bounds must be integer literals");
        return std::nullopt;
      }
      int lo = consume().value;
      if (!expect(Tok::DotDot, "for loop")) return std::nullopt;
      if (!at(Tok::Int)) {
        error(cur().span, "for-loop bounds must be integer literals");
        return std::nullopt;
      }
      int hi = consume().value;
      if (!expect(Tok::LBrace, "for loop")) return std::nullopt;
      auto body = expr();
      if (!body) return std::nullopt;
      if (!expect(Tok::RBrace, "for loop")) return std::nullopt;
      return e_for(*i, lo, hi, *body, sp);
    }
    if (at(Tok::KwReturn)) {
      error(sp, "'return' is not source syntax");
      return std::nullopt;
    }
    return assign();
  }

  std::optional<ExprPtr> assign() {
    auto lhs = postfix();
    if (!lhs) return std::nullopt;
    if (at(Tok::Assign)) {
      Span sp = cur().span;
      if ((*lhs)->kind != Expr::Kind::FieldRead) {
        error(sp, "only a field access may be assigned to");
        return std::nullopt;
      }
      consume();
      auto rhs = expr();
      if (!rhs) return std::nullopt;
      return e_fwrite((*lhs)->a, (*lhs)->name, *rhs, (*lhs)->span);
    }
    return lhs;
  }

  std::optional<ExprPtr> postfix() {
    auto base = primary();
    if (!base) return std::nullopt;
    ExprPtr e = *base;
    while (true) {
      Span sp = cur().span;
      if (accept(Tok::Dot)) {
        auto n = ident("member access");
        if (!n) return std::nullopt;
        if (accept(Tok::LParen)) {
          std::optional<ExprPtr> arg;
          if (!at(Tok::RParen)) {
            auto a = expr();
            if (!a) return std::nullopt;
            arg = *a;
          }
          if (!expect(Tok::RParen, "method call")) return std::nullopt;
          e = e_call(e, *n, arg, sp);
        } else {
          e = e_fread(e, *n, sp);
        }
      } else if (accept(Tok::Bang)) {
        auto n = ident("message send");
        if (!n) return std::nullopt;
        if (!expect(Tok::LParen, "message send")) return std::nullopt;
        std::optional<ExprPtr> arg;
        if (!at(Tok::RParen)) {
          auto a = expr();
          if (!a) return std::nullopt;
          arg = *a;
        }
        if (!expect(Tok::RParen, "message send")) return std::nullopt;
        e = e_send(e, *n, arg, sp);
      } else {
        break;
      }
    }
    return e;
  }

  std::optional<ExprPtr> primary() {
    Span sp = cur().span;
    if (accept(Tok::KwThis)) return e_this(sp);
    if (accept(Tok::KwNull)) return e_null(sp);
    if (accept(Tok::KwSkip)) return e_null(sp);
    if (accept(Tok::KwTrue)) return e_true(sp);
    if (accept(Tok::KwFalse)) return e_false(sp);
    if (at(Tok::Ident)) return e_var(consume().text, sp);
    if (accept(Tok::KwNew)) {
      auto cls = ident("object creation");
      if (!cls) return std::nullopt;
      if (!expect(Tok::Lt, "object creation")) return std::nullopt;
      std::vector<Location> locs;
      do {
        auto l = location("object creation");
        if (!l) return std::nullopt;
        locs.push_back(*l);
      } while (accept(Tok::Comma));
      if (!expect(Tok::Gt, "object creation")) return std::nullopt;
      return e_new(*cls, std::move(locs), sp);
    }
    if (accept(Tok::LParen)) {
      auto e = expr();
      if (!e) return std::nullopt;
      if (!expect(Tok::RParen, "parenthesized expression")) return std::nullopt;
      return e;
    }
    if (at(Tok::At)) {
      error(sp, "address literals are not source syntax");
      return std::nullopt;
    }
    if (at(Tok::Int)) {
      error(sp, "integer literals are not source expressions");
      return std::nullopt;
    }
    if (at(Tok::KwReturn)) {
      error(sp, "'return' is not source syntax");
      return std::nullopt;
    }
    error(sp, std::string("expected an expression, got ") + token_name(cur().kind));
    return std::nullopt;
  }
};

}  // namespace

ParseResult<Program> parse_program(std::string_view source) {
  ParseResult<Program> res;
  Parser p(source, res.diagnostics);
  res.value = p.program();
  return res;
}

ParseResult<BehaviourPtr> parse_behaviour(std::string_view source) {
  ParseResult<BehaviourPtr> res;
  Parser p(source, res.diagnostics);
  res.value = p.standalone_behaviour();
  return res;
}

ParseResult<ExprPtr> parse_expr(std::string_view source) {
  ParseResult<ExprPtr> res;
  Parser p(source, res.diagnostics);
  res.value = p.standalone_expr();
  return res;
}

}  // namespace numalang::syntax
