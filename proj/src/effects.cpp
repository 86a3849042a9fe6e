#include "numalang/effects.hpp"

#include <set>
#include <stdexcept>

#include "numalang/mutation.hpp"
#include "numalang/pretty.hpp"

namespace numalang::effects {

using syntax::beh_access;
using syntax::beh_choice;
using syntax::beh_eps;
using syntax::beh_loop;
using syntax::beh_par;
using syntax::is_eps;

BehaviourPtr concat(const BehaviourPtr& b1, const BehaviourPtr& b2) {
  switch (b1->kind) {
    case Behaviour::Kind::Eps:
      return b2;
    case Behaviour::Kind::Access:
      return beh_access(b1->access, concat(b1->rest, b2));
    case Behaviour::Kind::Choice:
      return beh_choice(b1->lhs, b1->rhs, concat(b1->rest, b2));
    case Behaviour::Kind::Loop:
      return beh_loop(b1->loop_count, b1->body, concat(b1->rest, b2));
    case Behaviour::Kind::Par:
      return beh_par(concat(b1->lhs, b2), b1->rhs);
  }
  return b2;
}

BehaviourPtr filter(const BehaviourPtr& b) {
  switch (b->kind) {
    case Behaviour::Kind::Eps:
      return beh_eps();
    case Behaviour::Kind::Par:
      return beh_par(filter(b->lhs), filter(b->rhs));
    case Behaviour::Kind::Access: {
      BehaviourPtr rest = filter(b->rest);
      if (b->access.src == b->access.dst) return rest;
      return beh_access(b->access, rest);
    }
    case Behaviour::Kind::Choice: {
      BehaviourPtr l = filter(b->lhs);
      BehaviourPtr r = filter(b->rhs);
      BehaviourPtr rest = filter(b->rest);
      if (is_eps(l) && is_eps(r)) return rest;
      return beh_choice(l, r, rest);
    }
    case Behaviour::Kind::Loop: {
      if (testing::mutations().filter_skip_loop)
        return beh_loop(b->loop_count, b->body, filter(b->rest));
      BehaviourPtr body = filter(b->body);
      BehaviourPtr rest = filter(b->rest);
      if (is_eps(body)) return rest;
      return beh_loop(b->loop_count, body, rest);
    }
  }
  return beh_eps();
}

Location subst(const Location& l, const LocationSubst& m) {
  auto it = m.find(l);
  if (it != m.end()) return it->second;
  if (l.is_node()) return l;
  throw std::invalid_argument("unmapped location '" + to_string(l) + "'");
}

RemAccess subst(const RemAccess& a, const LocationSubst& m) {
  RemAccess out = a;
  out.src = subst(a.src, m);
  out.dst = subst(a.dst, m);
  return out;
}

BehaviourPtr subst(const BehaviourPtr& b, const LocationSubst& m) {
  switch (b->kind) {
    case Behaviour::Kind::Eps:
      return beh_eps();
    case Behaviour::Kind::Access:
      return beh_access(subst(b->access, m), subst(b->rest, m));
    case Behaviour::Kind::Choice:
      return beh_choice(subst(b->lhs, m), subst(b->rhs, m), subst(b->rest, m));
    case Behaviour::Kind::Loop:
      return beh_loop(b->loop_count, subst(b->body, m), subst(b->rest, m));
    case Behaviour::Kind::Par:
      return beh_par(subst(b->lhs, m), subst(b->rhs, m));
  }
  return beh_eps();
}

Type subst(const Type& t, const LocationSubst& m) {
  if (t.kind != Type::Kind::Owned) return t;
  std::vector<Location> locs;
  locs.reserve(t.locations.size());
  for (const auto& l : t.locations) locs.push_back(subst(l, m));
  return Type::owned(t.class_name, std::move(locs));
}

ExprPtr subst(const ExprPtr& e, const LocationSubst& m) {
  if (!e) return e;
  using syntax::Expr;
  switch (e->kind) {
    case Expr::Kind::New: {
      std::vector<Location> locs;
      locs.reserve(e->locations.size());
      for (const auto& l : e->locations) locs.push_back(subst(l, m));
      return syntax::e_new(e->name, std::move(locs), e->span);
    }
    case Expr::Kind::If:
      return syntax::e_if(subst(e->a, m), subst(e->b, m), subst(e->c, m), e->span);
    case Expr::Kind::Let:
      return syntax::e_let(e->name, subst(e->a, m), subst(e->b, m), e->span);
    case Expr::Kind::For:
      return syntax::e_for(e->name, e->lo, e->hi, subst(e->a, m), e->span);
    case Expr::Kind::FieldRead:
      return syntax::e_fread(subst(e->a, m), e->name, e->span);
    case Expr::Kind::FieldWrite:
      return syntax::e_fwrite(subst(e->a, m), e->name, subst(e->b, m), e->span);
    case Expr::Kind::SyncCall:
    case Expr::Kind::AsyncSend: {
      std::optional<ExprPtr> arg;
      if (e->arg) arg = subst(*e->arg, m);
      if (e->kind == Expr::Kind::SyncCall)
        return syntax::e_call(subst(e->a, m), e->name, std::move(arg), e->span);
      return syntax::e_send(subst(e->a, m), e->name, std::move(arg), e->span);
    }
    case Expr::Kind::Return:
      return syntax::e_return(subst(e->a, m));
    default:
      return e;  // leaves carry no locations
  }
}

std::vector<SilentMove> silent_moves(const BehaviourPtr& b) {
  std::vector<SilentMove> out;
  switch (b->kind) {
    case Behaviour::Kind::Choice:
      out.push_back({SilentMove::Clause::ChoiceLeft, concat(b->lhs, b->rest), beh_eps()});
      out.push_back({SilentMove::Clause::ChoiceRight, concat(b->rhs, b->rest), beh_eps()});
      break;
    case Behaviour::Kind::Loop: {
      BehaviourPtr next = b->loop_count <= 1
                              ? b->rest
                              : beh_loop(b->loop_count - 1, b->body, b->rest);
      BehaviourPtr unrolled =
          b->loop_count == 0 ? b->rest : concat(b->body, next);
      out.push_back({SilentMove::Clause::LoopUnroll, unrolled, beh_eps()});
      break;
    }
    case Behaviour::Kind::Par:
      out.push_back({SilentMove::Clause::ParProject, b->lhs, b->rhs});
      break;
    default:
      break;
  }
  return out;
}

std::vector<BehaviourPtr> reduce(const BehaviourPtr& b, const std::optional<RemAccess>& label) {
  std::vector<BehaviourPtr> out;
  auto add = [&](const BehaviourPtr& r) {
    for (const auto& x : out)
      if (syntax::equal(x, r)) return;
    out.push_back(r);
  };
  if (label) {
    if (b->kind == Behaviour::Kind::Access && b->access == *label) add(b->rest);
    return out;
  }
  add(b);  // silent stutter
  for (const auto& mv : silent_moves(b)) add(mv.result);
  return out;
}

namespace {

struct BehaviourLess {
  bool operator()(const BehaviourPtr& a, const BehaviourPtr& b) const {
    return syntax::compare(a, b) < 0;
  }
};

}  // namespace

std::vector<BehaviourPtr> eps_closure(const BehaviourPtr& b) {
  std::set<BehaviourPtr, BehaviourLess> seen;
  std::vector<BehaviourPtr> work{b};
  seen.insert(b);
  while (!work.empty()) {
    BehaviourPtr cur = work.back();
    work.pop_back();
    for (const auto& mv : silent_moves(cur)) {
      if (seen.insert(mv.result).second) work.push_back(mv.result);
    }
  }
  return {seen.begin(), seen.end()};
}

std::vector<BehaviourPtr> reduce_closure(const BehaviourPtr& b, const RemAccess& pi) {
  std::set<BehaviourPtr, BehaviourLess> out;
  for (const auto& reachable : eps_closure(b)) {
    if (reachable->kind == Behaviour::Kind::Access && reachable->access == pi)
      out.insert(reachable->rest);
  }
  return {out.begin(), out.end()};
}

bool equiv(const BehaviourPtr& a, const BehaviourPtr& b) { return syntax::equal(a, b); }

}  // namespace numalang::effects
