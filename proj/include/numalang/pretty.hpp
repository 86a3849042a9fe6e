#pragma once

#include <string>

#include "numalang/ast.hpp"

namespace numalang::syntax {

/// Concrete-syntax printers. For every source-legal term t,
/// parse(pretty(t)) is structurally equal to t.
std::string pretty(const BehaviourPtr& b);
std::string pretty(const ExprPtr& e);
std::string pretty(const Program& p);
std::string pretty(const Type& t);

}  // namespace numalang::syntax
