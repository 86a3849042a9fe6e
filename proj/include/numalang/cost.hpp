#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "numalang/ast.hpp"
#include "numalang/runtime.hpp"

namespace numalang::cost {

using syntax::BehaviourPtr;
using syntax::NodeId;
using syntax::RemAccess;

/// Per-access pricing: a node-distance matrix with zero diagonal plus
/// per-kind weights.
struct CostMatrix {
  std::vector<std::vector<std::uint64_t>> distance;  // square
  std::uint64_t w_read = 1;
  std::uint64_t w_write = 1;
  std::uint64_t w_msg = 1;

  std::size_t size() const { return distance.size(); }
  bool covers(NodeId k) const { return k >= 0 && static_cast<std::size_t>(k) < size(); }
  std::uint64_t price(const RemAccess& a) const;  // throws on uncovered nodes
};

/// Matrix file: node count, then the rows, then optionally
/// `weights r w m`.
std::optional<CostMatrix> parse_cost_matrix(const std::string& text, std::string& error);

struct CostReport {
  std::uint64_t total = 0;  // maximum over choices, parallel branches summed
  std::uint64_t min = 0;
  std::uint64_t max = 0;
  double expected = 0.0;                  // choices at probability 1/2
  std::uint64_t makespan_bound = 0;       // parallel branches by max instead of sum
  std::map<std::pair<NodeId, NodeId>, std::uint64_t> per_pair;  // max-resolution
  std::map<std::string, std::uint64_t> per_kind;
};

std::string format_report(const CostReport& r);

/// Prices a behaviour after mapping its abstract locations to nodes.
/// Node-id locations pass through; other unmapped locations throw.
CostReport static_cost(const BehaviourPtr& b, const runtime::LocationMap& map,
                       const CostMatrix& m);

/// Prices the non-silent labels of a trace.
CostReport trace_cost(const std::vector<runtime::TraceEvent>& trace, const CostMatrix& m);

}  // namespace numalang::cost
