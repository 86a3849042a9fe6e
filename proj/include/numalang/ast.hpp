#pragma once

#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "numalang/diag.hpp"

namespace numalang::syntax {

/// Identifier of a machine node holding a heap partition.
using NodeId = int;

/// A placement expression. Source programs mention only ownership
/// parameters (of the enclosing class) and abstract locations (the
/// ownership parameters of Main); node ids appear once the runtime has
/// substituted the location map into types and behaviours.
struct Location {
  enum class Kind { OwnerParam, AbstractLoc, Node };
  Kind kind = Kind::AbstractLoc;
  std::string name;  // OwnerParam / AbstractLoc
  NodeId node = 0;   // Node

  static Location owner_param(std::string n);
  static Location abstract(std::string n);
  static Location at_node(NodeId k);
  bool is_node() const { return kind == Kind::Node; }

  friend auto operator<=>(const Location&, const Location&) = default;
};

std::string to_string(const Location& l);

/// A remote access: read or write of a heap cell, or an asynchronous
/// message send, between two locations. `method` is set for sends only.
struct RemAccess {
  enum class Kind { Read, Write, Msg };
  Kind kind = Kind::Read;
  Location src;
  Location dst;
  std::string method;

  friend auto operator<=>(const RemAccess&, const RemAccess&) = default;
};

RemAccess read_access(Location src, Location dst);
RemAccess write_access(Location src, Location dst);
RemAccess msg_access(Location src, Location dst, std::string method);

std::string to_string(const RemAccess& a);

// ---------------------------------------------------------------------------
// Behaviours
// ---------------------------------------------------------------------------

struct Behaviour;
using BehaviourPtr = std::shared_ptr<const Behaviour>;

/// Behaviour terms. The grammar is
///
///   b   ::= eps | bop . b | b || b
///   bop ::= pi | (b + b) | n*{b}
///
/// represented with one node kind per alternative: Access/Choice/Loop are
/// the sequenced operator forms carrying their continuation in `rest`;
/// Par terminates a term (it has no continuation — concatenation pushes
/// continuations into the left branch).
struct Behaviour {
  enum class Kind { Eps, Access, Choice, Loop, Par };
  Kind kind = Kind::Eps;

  RemAccess access;     // Access
  BehaviourPtr lhs;     // Choice branches / Par sides
  BehaviourPtr rhs;
  int loop_count = 0;   // Loop, >= 1 in parsed terms
  BehaviourPtr body;    // Loop
  BehaviourPtr rest;    // continuation of Access/Choice/Loop
};

BehaviourPtr beh_eps();
BehaviourPtr beh_access(RemAccess a, BehaviourPtr rest);
BehaviourPtr beh_choice(BehaviourPtr l, BehaviourPtr r, BehaviourPtr rest);
BehaviourPtr beh_loop(int n, BehaviourPtr body, BehaviourPtr rest);
BehaviourPtr beh_par(BehaviourPtr l, BehaviourPtr r);

/// Total structural order; equality is compare() == 0.
int compare(const Behaviour& a, const Behaviour& b);
int compare(const BehaviourPtr& a, const BehaviourPtr& b);
bool equal(const BehaviourPtr& a, const BehaviourPtr& b);
bool is_eps(const BehaviourPtr& b);

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// Expression types. `Int` is the loop-counter type and never appears in
/// source text; owned types carry at least one location, the first being
/// the instance's own placement.
struct Type {
  enum class Kind { Bool, Nil, Int, Owned };
  Kind kind = Kind::Nil;
  std::string class_name;
  std::vector<Location> locations;

  static Type boolean();
  static Type nil();
  static Type integer();
  static Type owned(std::string cls, std::vector<Location> locs);

  friend bool operator==(const Type&, const Type&) = default;
};

std::string to_string(const Type& t);

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

/// Heap address kappa.n: allocation index `index` on node `node`.
struct Address {
  NodeId node = 0;
  int index = 0;
  friend auto operator<=>(const Address&, const Address&) = default;
};

std::string to_string(const Address& a);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Expression nodes. Child slots by kind:
///   If:         a = condition, b = then, c = else
///   SyncCall:   a = receiver, name = method, arg = optional argument
///   AsyncSend:  a = receiver, name = method, arg = optional argument
///   FieldRead:  a = object,   name = field
///   FieldWrite: a = object,   name = field, b = value
///   New:        name = class, locations
///   For:        name = counter, lo..hi literal bounds, a = body
///   Let:        name = binder, a = init, b = body
///   Return:     a = inner     (runtime only)
///   Addr:       address       (runtime only)
///   IntLit:     int_value     (runtime only; substituted loop counters)
struct Expr {
  enum class Kind {
    Var, This, True, False, Null,
    If, SyncCall, AsyncSend, FieldRead, FieldWrite, New, For, Let,
    Return, Addr, IntLit
  };
  Kind kind = Kind::Null;
  Span span;

  std::string name;
  ExprPtr a, b, c;
  std::optional<ExprPtr> arg;
  std::vector<Location> locations;
  int int_value = 0;
  int lo = 0, hi = 0;
  Address address;
};

ExprPtr e_var(std::string name, Span sp = {});
ExprPtr e_this(Span sp = {});
ExprPtr e_true(Span sp = {});
ExprPtr e_false(Span sp = {});
ExprPtr e_null(Span sp = {});
ExprPtr e_if(ExprPtr c, ExprPtr t, ExprPtr e, Span sp = {});
ExprPtr e_call(ExprPtr recv, std::string method, std::optional<ExprPtr> arg, Span sp = {});
ExprPtr e_send(ExprPtr recv, std::string method, std::optional<ExprPtr> arg, Span sp = {});
ExprPtr e_fread(ExprPtr obj, std::string field, Span sp = {});
ExprPtr e_fwrite(ExprPtr obj, std::string field, ExprPtr val, Span sp = {});
ExprPtr e_new(std::string cls, std::vector<Location> locs, Span sp = {});
ExprPtr e_for(std::string counter, int lo, int hi, ExprPtr body, Span sp = {});
ExprPtr e_let(std::string binder, ExprPtr init, ExprPtr body, Span sp = {});
ExprPtr e_return(ExprPtr inner);
ExprPtr e_addr(Address a);
ExprPtr e_int(int v);

/// Structural equality, ignoring spans.
bool equal(const ExprPtr& a, const ExprPtr& b);

// ---------------------------------------------------------------------------
// Declarations
// ---------------------------------------------------------------------------

struct FieldDecl {
  std::string name;
  Type type;
  Span span;
};

struct Param {
  std::string name;
  Type type;
};

struct MethodDecl {
  std::string name;
  std::optional<Param> param;  // zero or one parameter
  Type return_type;
  BehaviourPtr declared;       // annotated behaviour
  ExprPtr body;
  Span span;
};

struct ClassDecl {
  bool active = false;
  std::string name;
  std::vector<Location> owners;  // pairwise distinct; first = own placement
  std::vector<FieldDecl> fields;
  std::vector<MethodDecl> methods;
  Span span;
};

struct Program {
  std::vector<ClassDecl> classes;
};

bool equal(const Program& a, const Program& b);

/// Name-based lookups over a parsed program. Holds pointers into the
/// Program, which must outlive the index.
class ProgramIndex {
 public:
  ProgramIndex() = default;
  explicit ProgramIndex(const Program& p);

  const Program* program() const { return program_; }
  const ClassDecl* find_class(const std::string& name) const;
  const FieldDecl* find_field(const ClassDecl& cls, const std::string& name) const;
  const MethodDecl* find_method(const ClassDecl& cls, const std::string& name) const;

 private:
  const Program* program_ = nullptr;
  std::map<std::string, const ClassDecl*> classes_;
};

}  // namespace numalang::syntax
