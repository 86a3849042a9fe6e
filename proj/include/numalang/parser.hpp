#pragma once

#include <optional>
#include <string_view>

#include "numalang/ast.hpp"
#include "numalang/diag.hpp"

namespace numalang::syntax {

template <typename T>
struct ParseResult {
  std::optional<T> value;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return value.has_value() && !has_errors(diagnostics); }
};

/// Parses a whole program. Location identifiers inside a class must be
/// ownership parameters of that class; in class Main they denote the
/// program's abstract locations. Runtime-only constructs (`return`,
/// address literals, node-id locations, bare integer expressions) are
/// rejected with diagnostics.
ParseResult<Program> parse_program(std::string_view source);

/// Parses a standalone behaviour term (method annotations use the same
/// grammar). Identifiers denote abstract locations, integers node ids.
ParseResult<BehaviourPtr> parse_behaviour(std::string_view source);

/// Parses a standalone expression, with behaviour-style location rules.
ParseResult<ExprPtr> parse_expr(std::string_view source);

}  // namespace numalang::syntax
