#pragma once

#include <map>
#include <optional>
#include <vector>

#include "numalang/ast.hpp"

namespace numalang::effects {

using syntax::Behaviour;
using syntax::BehaviourPtr;
using syntax::ExprPtr;
using syntax::Location;
using syntax::RemAccess;
using syntax::Type;

/// Effect concatenation. The continuation of a parallel composition
/// joins the left branch: (b1 || b2) o b3 = (b1 o b3) || b2.
BehaviourPtr concat(const BehaviourPtr& b1, const BehaviourPtr& b2);

/// Erases accesses whose source and destination coincide; a choice whose
/// filtered branches are both empty and a loop whose filtered body is
/// empty disappear.
BehaviourPtr filter(const BehaviourPtr& b);

/// Pointwise location substitution. Locations absent from the map pass
/// through when they are already node ids; any other unmapped location
/// throws std::invalid_argument.
using LocationSubst = std::map<Location, Location>;
Location subst(const Location& l, const LocationSubst& m);
RemAccess subst(const RemAccess& a, const LocationSubst& m);
BehaviourPtr subst(const BehaviourPtr& b, const LocationSubst& m);
Type subst(const Type& t, const LocationSubst& m);
ExprPtr subst(const ExprPtr& e, const LocationSubst& m);

/// One observable-step successor relation clause on behaviours.
struct BehaviourStep {
  std::optional<RemAccess> label;  // nullopt = silent
  BehaviourPtr result;
};

/// All successors of b under the given label: the access-prefix clause
/// for a concrete label, and for the silent label the identity stutter,
/// choice-branch selection (the continuation is preserved), loop
/// unrolling n*{b}.b' -> b o (n-1)*{b}.b' (dropping an exhausted loop),
/// and left projection of a parallel composition.
std::vector<BehaviourPtr> reduce(const BehaviourPtr& b, const std::optional<RemAccess>& label);

/// A single silent move, with the discarded right branch of a parallel
/// projection exposed so callers can account for its migration.
struct SilentMove {
  enum class Clause { ChoiceLeft, ChoiceRight, LoopUnroll, ParProject };
  Clause clause;
  BehaviourPtr result;
  BehaviourPtr migrated;  // right branch for ParProject, eps otherwise
};

/// Non-stuttering silent moves of b.
std::vector<SilentMove> silent_moves(const BehaviourPtr& b);

/// Everything silently reachable from b (including b itself). Finite:
/// unrolling strictly decreases loop counters and choices shrink.
std::vector<BehaviourPtr> eps_closure(const BehaviourPtr& b);

/// Successors of b under pi after finitely many silent moves.
std::vector<BehaviourPtr> reduce_closure(const BehaviourPtr& b, const RemAccess& pi);

/// Canonical structural equality; the grammar admits no redundant forms,
/// and concatenation with eps rebuilds an equal term.
bool equiv(const BehaviourPtr& a, const BehaviourPtr& b);

}  // namespace numalang::effects
