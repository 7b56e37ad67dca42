// SPDX-License-Identifier: Apache-2.0

#include "diffsense/callgraph.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace diffsense {

std::vector<std::string> DiffCallgraph::callees_of(const std::string& node) const {
  std::vector<std::string> out;
  for (auto it = edges.lower_bound({node, std::string()}); it != edges.end() && it->first == node;
       ++it) {
    out.push_back(it->second);
  }
  return out;
}

bool Schedule::is_cycle_stub(const std::string& caller, const std::string& callee) const {
  auto a = component_of.find(caller);
  auto b = component_of.find(callee);
  if (a == component_of.end() || b == component_of.end() || a->second != b->second) return false;
  return position.at(callee) >= position.at(caller);
}

DiffCallgraph build_diff_callgraph(const DiffArtifact& artifact) {
  DiffCallgraph g;
  for (const auto& fn : artifact.functions) g.nodes.insert(fn.id.display_name);
  for (const auto& fn : artifact.functions) {
    for (const auto& callee : fn.callees) {
      if (g.nodes.contains(callee)) g.edges.emplace(fn.id.display_name, callee);
    }
  }
  return g;
}

std::vector<std::vector<std::size_t>> strongly_connected_components(
    const std::vector<std::vector<std::size_t>>& adjacency) {
  constexpr std::size_t kUnvisited = std::numeric_limits<std::size_t>::max();
  const std::size_t n = adjacency.size();
  std::vector<std::size_t> index(n, kUnvisited), lowlink(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> components;
  std::size_t counter = 0;

  // Explicit call stack of (vertex, next successor position).
  std::vector<std::pair<std::size_t, std::size_t>> frames;
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    frames.emplace_back(root, 0);
    index[root] = lowlink[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;

    while (!frames.empty()) {
      auto& [v, pos] = frames.back();
      if (pos < adjacency[v].size()) {
        std::size_t w = adjacency[v][pos++];
        if (index[w] == kUnvisited) {
          index[w] = lowlink[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.emplace_back(w, 0);
        } else if (on_stack[w]) {
          lowlink[v] = std::min(lowlink[v], index[w]);
        }
        continue;
      }
      std::size_t done = v;
      if (lowlink[done] == index[done]) {
        std::vector<std::size_t> comp;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != done);
        components.push_back(std::move(comp));
      }
      frames.pop_back();
      if (!frames.empty()) {
        std::size_t parent = frames.back().first;
        lowlink[parent] = std::min(lowlink[parent], lowlink[done]);
      }
    }
  }
  return components;
}

Schedule schedule(const DiffCallgraph& graph) {
  std::vector<std::string> names(graph.nodes.begin(), graph.nodes.end());  // sorted
  std::map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < names.size(); ++i) idx.emplace(names[i], i);

  std::vector<std::vector<std::size_t>> adj(names.size());
  for (const auto& [caller, callee] : graph.edges) adj[idx.at(caller)].push_back(idx.at(callee));

  auto sccs = strongly_connected_components(adj);
  std::vector<std::size_t> comp_of(names.size());
  for (std::size_t c = 0; c < sccs.size(); ++c) {
    std::sort(sccs[c].begin(), sccs[c].end());
    for (auto v : sccs[c]) comp_of[v] = c;
  }

  // Tarjan emits callees before callers, so heights can be filled in order.
  std::vector<std::size_t> height(sccs.size(), 0);
  for (std::size_t c = 0; c < sccs.size(); ++c) {
    for (auto v : sccs[c]) {
      for (auto w : adj[v]) {
        if (comp_of[w] != c) height[c] = std::max(height[c], height[comp_of[w]] + 1);
      }
    }
  }

  std::vector<std::size_t> comp_order(sccs.size());
  for (std::size_t c = 0; c < sccs.size(); ++c) comp_order[c] = c;
  // Members are name-sorted and names are index-sorted, so the first member
  // index is the smallest name.
  std::sort(comp_order.begin(), comp_order.end(), [&](std::size_t x, std::size_t y) {
    return std::pair(height[x], sccs[x].front()) < std::pair(height[y], sccs[y].front());
  });

  Schedule s;
  for (std::size_t c : comp_order) {
    std::vector<std::string> members;
    for (auto v : sccs[c]) {
      s.component_of.emplace(names[v], s.components.size());
      s.position.emplace(names[v], s.order.size());
      s.order.push_back(names[v]);
      members.push_back(names[v]);
    }
    s.components.push_back(std::move(members));
    s.component_level.push_back(height[c]);
  }
  for (const auto& name : names) {
    auto& deps = s.deps[name];
    for (const auto& callee : graph.callees_of(name)) {
      if (callee != name) deps.push_back(callee);
    }
  }
  return s;
}

namespace {

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string to_dot(const DiffCallgraph& graph, const DiffArtifact* artifact) {
  std::ostringstream os;
  os << "digraph diff_callgraph {\n";
  for (const auto& node : graph.nodes) {
    os << "  " << dot_quote(node);
    if (artifact) {
      if (const auto* fn = artifact->find(node)) {
        const char* color = fn->kind == FunctionKind::Added     ? "green"
                            : fn->kind == FunctionKind::Deleted ? "red"
                                                                : "orange";
        os << " [color=" << color << ", label=" << dot_quote(node + "\\n" +
                                                             std::string(to_string(fn->kind)))
           << "]";
      }
    }
    os << ";\n";
  }
  for (const auto& [caller, callee] : graph.edges) {
    os << "  " << dot_quote(caller) << " -> " << dot_quote(callee) << ";\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace diffsense
