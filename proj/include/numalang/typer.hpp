#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "numalang/ast.hpp"
#include "numalang/diag.hpp"
#include "numalang/effects.hpp"

namespace numalang::typer {

using syntax::Address;
using syntax::BehaviourPtr;
using syntax::ClassDecl;
using syntax::ExprPtr;
using syntax::Location;
using syntax::MethodDecl;
using syntax::Program;
using syntax::ProgramIndex;
using syntax::Type;

/// One variable frame: `this` plus at most one method parameter in
/// runtime-built contexts, arbitrary bindings in static ones.
struct TypingFrame {
  std::map<std::string, Type> vars;
};

/// Sequence of frames; the innermost frame is the last element. Each
/// `return` wrapper in an expression pops one frame while typing.
using TypingContext = std::vector<TypingFrame>;

/// First location argument of the innermost `this`.
std::optional<Location> loc_of(const TypingContext& ctx);

/// Substituting lookups over the program. Each owner p_i of the class is
/// replaced by the corresponding argument location, in field types and
/// in method signatures, declared behaviours and bodies alike.
std::optional<std::vector<Location>> owners(const ProgramIndex& idx, const std::string& cls);
std::optional<Type> field_type(const ProgramIndex& idx, const std::string& cls,
                               const std::string& field, const std::vector<Location>& args);

struct MethodSig {
  Type return_type;
  std::optional<syntax::Param> param;
  ExprPtr body;
  BehaviourPtr declared;
};
std::optional<MethodSig> method_sig(const ProgramIndex& idx, const std::string& cls,
                                    const std::string& method,
                                    const std::vector<Location>& args);

/// Builds the substitution owners(cls) -> args.
effects::LocationSubst owner_subst(const ClassDecl& cls, const std::vector<Location>& args);

struct TypedExpr {
  Type type;
  BehaviourPtr behaviour;
};

struct CallEdge {
  std::string from;  // "Class.method"
  std::string to;
};

/// Expression typing. Pure; diagnostics are appended to the sink and a
/// failed judgment yields nullopt.
class Typer {
 public:
  Typer(const ProgramIndex& idx, std::vector<Diagnostic>& diags)
      : idx_(idx), diags_(diags) {}

  /// Heap-backed address typing used by the runtime monitor; addresses
  /// are untypable without it.
  std::function<std::optional<Type>(const Address&)> address_type;

  /// Accepts single-iteration loops, which arise transiently from the
  /// machine's loop unrolling. Static checking requires strictly
  /// increasing bounds.
  bool runtime_mode = false;

  /// Collects the sync/async invocation edges of the typed expression.
  std::vector<CallEdge>* call_edges = nullptr;
  std::string current_method;

  std::optional<TypedExpr> type_expr(TypingContext ctx, const ExprPtr& e);

 private:
  const ProgramIndex& idx_;
  std::vector<Diagnostic>& diags_;

  std::optional<TypedExpr> fail(Span sp, const std::string& rule,
                                const std::string& msg);
};

/// Per-method verdict of the declared-vs-inferred behaviour check.
struct MethodRecord {
  std::string class_name;
  std::string method_name;
  BehaviourPtr declared;
  BehaviourPtr inferred;  // raw inferred effect (may be null on type errors)
  BehaviourPtr filtered;  // filter(inferred)
  bool ok = false;
};

struct CheckReport {
  std::vector<MethodRecord> methods;
  std::vector<Diagnostic> diagnostics;
  bool ok = false;
};

/// Checks one class: every method body must type to its declared return
/// type under (this -> C<p...>, x -> T'), and the filtered inferred
/// behaviour must equal the declared one.
std::vector<Diagnostic> check_class(const ProgramIndex& idx, const ClassDecl& cls,
                                    std::vector<MethodRecord>* records = nullptr,
                                    std::vector<CallEdge>* edges = nullptr);

/// Whole-program check: all classes well-formed, Main present with a
/// parameterless `main` returning nil, strictly increasing for-loop
/// bounds, and an acyclic sync+async call graph.
CheckReport check_program(const Program& program);

}  // namespace numalang::typer
