#include "numalang/diag.hpp"

#include <sstream>

namespace numalang {

std::string format_diagnostic(const Diagnostic& d, const std::string& file) {
  std::ostringstream out;
  out << file << ":" << d.span.line << ":" << d.span.col << ": ";
  out << (d.severity == Severity::Error ? "error: " : "warning: ");
  if (!d.rule.empty()) out << d.rule << ": ";
  out << d.message;
  return out.str();
}

std::string format_diagnostics(const std::vector<Diagnostic>& ds, const std::string& file) {
  std::string out;
  for (const auto& d : ds) {
    out += format_diagnostic(d, file);
    out += '\n';
  }
  return out;
}

bool has_errors(const std::vector<Diagnostic>& ds) {
  for (const auto& d : ds)
    if (d.severity == Severity::Error) return true;
  return false;
}

}  // namespace numalang
