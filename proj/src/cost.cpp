#include "numalang/cost.hpp"

#include <sstream>
#include <stdexcept>

#include "numalang/effects.hpp"

namespace numalang::cost {

using syntax::Behaviour;

std::uint64_t CostMatrix::price(const RemAccess& a) const {
  if (!a.src.is_node() || !a.dst.is_node())
    throw std::invalid_argument("cost matrix applied to unmapped location in " +
                                to_string(a));
  if (!covers(a.src.node) || !covers(a.dst.node))
    throw std::invalid_argument("cost matrix of size " + std::to_string(size()) +
                                " does not cover " + to_string(a));
  std::uint64_t w = a.kind == RemAccess::Kind::Read    ? w_read
                    : a.kind == RemAccess::Kind::Write ? w_write
                                                       : w_msg;
  return w * distance[static_cast<std::size_t>(a.src.node)]
                     [static_cast<std::size_t>(a.dst.node)];
}

std::optional<CostMatrix> parse_cost_matrix(const std::string& text, std::string& error) {
  std::istringstream in(text);
  std::size_t k = 0;
  if (!(in >> k) || k == 0) {
    error = "matrix file must start with a positive node count";
    return std::nullopt;
  }
  CostMatrix m;
  m.distance.assign(k, std::vector<std::uint64_t>(k, 0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      long long v = 0;
      if (!(in >> v) || v < 0) {
        error = "malformed matrix entry at row " + std::to_string(i) + ", column " +
                std::to_string(j);
        return std::nullopt;
      }
      m.distance[i][j] = static_cast<std::uint64_t>(v);
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (m.distance[i][i] != 0) {
      error = "matrix diagonal must be zero (row " + std::to_string(i) + ")";
      return std::nullopt;
    }
  }
  std::string word;
  if (in >> word) {
    if (word != "weights") {
      error = "unexpected trailing content '" + word + "'";
      return std::nullopt;
    }
    long long r = 0, w = 0, g = 0;
    if (!(in >> r >> w >> g) || r < 0 || w < 0 || g < 0) {
      error = "weights line must carry three nonnegative integers";
      return std::nullopt;
    }
    m.w_read = static_cast<std::uint64_t>(r);
    m.w_write = static_cast<std::uint64_t>(w);
    m.w_msg = static_cast<std::uint64_t>(g);
  }
  return m;
}

namespace {

const char* kind_name(RemAccess::Kind k) {
  switch (k) {
    case RemAccess::Kind::Read: return "read";
    case RemAccess::Kind::Write: return "write";
    case RemAccess::Kind::Msg: return "msg";
  }
  return "?";
}

struct Breakdown {
  std::map<std::pair<NodeId, NodeId>, std::uint64_t> per_pair;
  std::map<std::string, std::uint64_t> per_kind;

  void add(const RemAccess& a, std::uint64_t c, std::uint64_t repeat = 1) {
    per_pair[{a.src.node, a.dst.node}] += c * repeat;
    per_kind[kind_name(a.kind)] += c * repeat;
  }
  void add_scaled(const Breakdown& other, std::uint64_t factor) {
    for (const auto& [k, v] : other.per_pair) per_pair[k] += v * factor;
    for (const auto& [k, v] : other.per_kind) per_kind[k] += v * factor;
  }
};

// Price algebra over behaviour terms. The breakdown follows the
// max-cost resolution of each choice (left on ties).
struct Priced {
  std::uint64_t min = 0;
  std::uint64_t max = 0;
  double expected = 0.0;
  std::uint64_t makespan = 0;
  Breakdown breakdown;
};

Priced price(const BehaviourPtr& b, const CostMatrix& m) {
  switch (b->kind) {
    case Behaviour::Kind::Eps:
      return {};
    case Behaviour::Kind::Access: {
      Priced rest = price(b->rest, m);
      std::uint64_t c = m.price(b->access);
      rest.min += c;
      rest.max += c;
      rest.expected += static_cast<double>(c);
      rest.makespan += c;
      rest.breakdown.add(b->access, c);
      return rest;
    }
    case Behaviour::Kind::Choice: {
      Priced l = price(b->lhs, m);
      Priced r = price(b->rhs, m);
      Priced rest = price(b->rest, m);
      Priced out;
      out.min = std::min(l.min, r.min) + rest.min;
      out.max = std::max(l.max, r.max) + rest.max;
      out.expected = (l.expected + r.expected) / 2.0 + rest.expected;
      out.makespan = std::max(l.makespan, r.makespan) + rest.makespan;
      out.breakdown = l.max >= r.max ? l.breakdown : r.breakdown;
      out.breakdown.add_scaled(rest.breakdown, 1);
      return out;
    }
    case Behaviour::Kind::Loop: {
      Priced body = price(b->body, m);
      Priced rest = price(b->rest, m);
      auto n = static_cast<std::uint64_t>(b->loop_count);
      Priced out;
      out.min = body.min * n + rest.min;
      out.max = body.max * n + rest.max;
      out.expected = body.expected * static_cast<double>(n) + rest.expected;
      out.makespan = body.makespan * n + rest.makespan;
      out.breakdown.add_scaled(body.breakdown, n);
      out.breakdown.add_scaled(rest.breakdown, 1);
      return out;
    }
    case Behaviour::Kind::Par: {
      // Total traffic sums both branches; the makespan bound takes the
      // slower one.
      Priced l = price(b->lhs, m);
      Priced r = price(b->rhs, m);
      Priced out;
      out.min = l.min + r.min;
      out.max = l.max + r.max;
      out.expected = l.expected + r.expected;
      out.makespan = std::max(l.makespan, r.makespan);
      out.breakdown = l.breakdown;
      out.breakdown.add_scaled(r.breakdown, 1);
      return out;
    }
  }
  return {};
}

}  // namespace

std::string format_report(const CostReport& r) {
  std::ostringstream os;
  os << "total=" << r.total << " min=" << r.min << " max=" << r.max
     << " expected=" << r.expected << " makespan_bound=" << r.makespan_bound << "\n";
  for (const auto& [pair, c] : r.per_pair)
    os << "  " << pair.first << "->" << pair.second << ": " << c << "\n";
  for (const auto& [kind, c] : r.per_kind) os << "  " << kind << ": " << c << "\n";
  return os.str();
}

CostReport static_cost(const BehaviourPtr& b, const runtime::LocationMap& map,
                       const CostMatrix& m) {
  effects::LocationSubst sub;
  for (const auto& [name, node] : map)
    sub[syntax::Location::abstract(name)] = syntax::Location::at_node(node);
  BehaviourPtr mapped = effects::subst(b, sub);

  Priced p = price(mapped, m);
  CostReport out;
  out.total = p.max;
  out.min = p.min;
  out.max = p.max;
  out.expected = p.expected;
  out.makespan_bound = p.makespan;
  out.per_pair = std::move(p.breakdown.per_pair);
  out.per_kind = std::move(p.breakdown.per_kind);
  return out;
}

CostReport trace_cost(const std::vector<runtime::TraceEvent>& trace, const CostMatrix& m) {
  CostReport out;
  Breakdown bd;
  for (const auto& ev : trace) {
    if (!ev.label || ev.faulted) continue;
    std::uint64_t c = m.price(*ev.label);
    out.total += c;
    bd.add(*ev.label, c);
  }
  out.min = out.max = out.makespan_bound = out.total;
  out.expected = static_cast<double>(out.total);
  out.per_pair = std::move(bd.per_pair);
  out.per_kind = std::move(bd.per_kind);
  return out;
}

}  // namespace numalang::cost
