// SPDX-License-Identifier: Apache-2.0
//
// Diff callgraph: caller -> callee edges restricted to functions that are
// themselves part of the diff, plus the callee-first summarization order.

#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "diffsense/model.hpp"

namespace diffsense {

struct DiffCallgraph {
  std::set<std::string> nodes;
  std::set<std::pair<std::string, std::string>> edges;  // (caller, callee)

  std::vector<std::string> callees_of(const std::string& node) const;
};

struct Schedule {
  /// Callee-first order. Members of a strongly connected component are
  /// contiguous and sorted by name.
  std::vector<std::string> order;
  /// In-graph callees of each node, excluding the node itself.
  std::map<std::string, std::vector<std::string>> deps;
  /// Components in schedule order; each is sorted by name.
  std::vector<std::vector<std::string>> components;
  /// Height of each component above the leaves; components sharing a level
  /// only depend on lower levels and can run concurrently.
  std::vector<std::size_t> component_level;
  std::map<std::string, std::size_t> component_of;
  std::map<std::string, std::size_t> position;  // index into order

  /// True if `callee` lies in the same component as `caller` and comes at
  /// or after it, i.e. it has not been summarized when `caller` is.
  bool is_cycle_stub(const std::string& caller, const std::string& callee) const;
};

DiffCallgraph build_diff_callgraph(const DiffArtifact& artifact);

/// Condenses strongly connected components and orders them leaves-first by
/// height, ties broken by the smallest member name.
Schedule schedule(const DiffCallgraph& graph);

/// Tarjan's algorithm over an index graph. Components come out in reverse
/// topological order (a component precedes every component that reaches it).
std::vector<std::vector<std::size_t>> strongly_connected_components(
    const std::vector<std::vector<std::size_t>>& adjacency);

std::string to_dot(const DiffCallgraph& graph, const DiffArtifact* artifact = nullptr);

}  // namespace diffsense
