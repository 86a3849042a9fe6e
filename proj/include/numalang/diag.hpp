#pragma once

#include <string>
#include <vector>

namespace numalang {

/// Source position, 1-based. Runtime-synthesized nodes carry {0,0}.
struct Span {
  int line = 0;
  int col = 0;
};

enum class Severity { Error, Warning };

/// One checker/parser finding. `rule` names the violated typing or
/// well-formedness rule when one applies (e.g. "T-Call", "WF-Class").
struct Diagnostic {
  Severity severity = Severity::Error;
  Span span;
  std::string message;
  std::string rule;
};

std::string format_diagnostic(const Diagnostic& d, const std::string& file);
std::string format_diagnostics(const std::vector<Diagnostic>& ds, const std::string& file);
bool has_errors(const std::vector<Diagnostic>& ds);

}  // namespace numalang
