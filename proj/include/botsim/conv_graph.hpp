#pragma once

// Conversation graph: dialogs are vertices, transitions are labelled edges.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "botsim/bot_def.hpp"

namespace botsim {

struct Edge {
  std::string source;
  std::string label;
  std::string target;

  bool operator==(const Edge&) const = default;
};

class ConversationGraph {
 public:
  ConversationGraph() = default;

  // Nodes keep declaration order; adjacency keeps transition order.
  void add_node(const std::string& name) {
    if (adjacency_.emplace(name, std::vector<Edge>{}).second) order_.push_back(name);
  }

  void add_edge(const std::string& source, const std::string& label, const std::string& target) {
    add_node(source);
    add_node(target);
    adjacency_[source].push_back(Edge{source, label, target});
  }

  bool contains(const std::string& name) const { return adjacency_.count(name) > 0; }
  const std::vector<std::string>& nodes() const { return order_; }

  const std::vector<Edge>& out_edges(const std::string& name) const {
    auto it = adjacency_.find(name);
    if (it == adjacency_.end()) throw UnknownNode("unknown dialog '" + name + "'");
    return it->second;
  }

  bool is_terminal(const std::string& name) const { return out_edges(name).empty(); }

  std::vector<std::string> terminals() const {
    std::vector<std::string> out;
    for (const auto& n : order_)
      if (adjacency_.at(n).empty()) out.push_back(n);
    return out;
  }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (const auto& n : order_)
      for (const auto& e : adjacency_.at(n)) out.push_back(e);
    return out;
  }

 private:
  std::vector<std::string> order_;
  std::map<std::string, std::vector<Edge>> adjacency_;
};

inline ConversationGraph build_graph(const BotDefinition& def) {
  ConversationGraph g;
  for (const auto& d : def.dialogs) g.add_node(d.name);
  for (const auto& d : def.dialogs)
    for (const auto& t : d.transitions) g.add_edge(d.name, t.label, t.target);
  return g;
}

struct Path {
  std::vector<std::string> nodes;
  std::vector<std::string> edge_labels;

  std::size_t length() const { return edge_labels.size(); }
  bool operator==(const Path&) const = default;
};

struct PathSet {
  std::vector<Path> paths;
  bool truncated = false;
};

inline constexpr std::size_t kDefaultMaxDepth = 20;
inline constexpr std::size_t kDefaultMaxPaths = 500;

// Simple paths src -> dst with at most max_depth edges, in lexicographic order
// of their node sequences. `truncated` is set when more than max_paths exist.
inline PathSet enumerate_simple_paths(const ConversationGraph& g, const std::string& src,
                                      const std::string& dst,
                                      std::size_t max_depth = kDefaultMaxDepth,
                                      std::size_t max_paths = kDefaultMaxPaths) {
  if (!g.contains(src)) throw UnknownNode("unknown source dialog '" + src + "'");
  if (!g.contains(dst)) throw UnknownNode("unknown target dialog '" + dst + "'");
  if (max_depth < 1 || max_paths < 1) throw ContractError("max_depth and max_paths must be >= 1");

  PathSet result;
  if (src == dst) {
    result.paths.push_back(Path{{src}, {}});
    return result;
  }

  // Successors sorted by target name so DFS order is lexicographic.
  std::map<std::string, std::vector<const Edge*>> sorted;
  for (const auto& n : g.nodes()) {
    auto& v = sorted[n];
    for (const auto& e : g.out_edges(n)) v.push_back(&e);
    std::sort(v.begin(), v.end(), [](const Edge* a, const Edge* b) {
      return a->target < b->target || (a->target == b->target && a->label < b->label);
    });
  }

  Path current{{src}, {}};
  std::set<std::string> on_path{src};
  bool stop = false;

  auto dfs = [&](auto&& self, const std::string& node) -> void {
    for (const Edge* e : sorted[node]) {
      if (stop) return;
      if (on_path.count(e->target)) continue;
      if (current.edge_labels.size() + 1 > max_depth) return;
      current.nodes.push_back(e->target);
      current.edge_labels.push_back(e->label);
      if (e->target == dst) {
        if (result.paths.size() == max_paths) {
          result.truncated = true;
          stop = true;
        } else {
          result.paths.push_back(current);
        }
      } else {
        on_path.insert(e->target);
        self(self, e->target);
        on_path.erase(e->target);
      }
      current.nodes.pop_back();
      current.edge_labels.pop_back();
    }
  };
  dfs(dfs, src);
  return result;
}

// Every node lying on at least one simple path from `start` to a terminal
// node (start included). Unbounded depth; prunes nodes that cannot reach a
// terminal and stops once every candidate has been seen on some path.
inline std::set<std::string> nodes_on_terminal_paths(const ConversationGraph& g,
                                                     const std::string& start) {
  if (!g.contains(start)) throw UnknownNode("unknown dialog '" + start + "'");

  std::map<std::string, std::vector<std::string>> reverse;
  for (const auto& e : g.edges()) reverse[e.target].push_back(e.source);
  std::set<std::string> reaches_terminal;
  std::vector<std::string> stack = g.terminals();
  for (const auto& t : stack) reaches_terminal.insert(t);
  while (!stack.empty()) {
    auto n = stack.back();
    stack.pop_back();
    for (const auto& p : reverse[n])
      if (reaches_terminal.insert(p).second) stack.push_back(p);
  }

  std::set<std::string> marked{start};
  if (!reaches_terminal.count(start)) return marked;

  std::vector<std::string> path{start};
  std::set<std::string> on_path{start};
  const std::size_t ceiling = reaches_terminal.size();

  auto dfs = [&](auto&& self, const std::string& node) -> void {
    if (g.is_terminal(node)) {
      marked.insert(path.begin(), path.end());
      return;
    }
    for (const auto& e : g.out_edges(node)) {
      if (marked.size() == ceiling) return;
      if (on_path.count(e.target) || !reaches_terminal.count(e.target)) continue;
      path.push_back(e.target);
      on_path.insert(e.target);
      self(self, e.target);
      on_path.erase(e.target);
      path.pop_back();
    }
  };
  dfs(dfs, start);
  return marked;
}

inline Json to_json(const Path& p) {
  return Json{{"nodes", p.nodes}, {"edge_labels", p.edge_labels}, {"length", p.length()}};
}

inline Path path_from_json(const Json& j) {
  Path p;
  p.nodes = j.at("nodes").get<std::vector<std::string>>();
  p.edge_labels = j.at("edge_labels").get<std::vector<std::string>>();
  if (p.nodes.empty() || p.edge_labels.size() + 1 != p.nodes.size())
    throw SchemaError("path record: edge_labels must have one fewer entry than nodes");
  return p;
}

// One JSON record per line, for the path explorer.
inline std::string export_paths_jsonl(const PathSet& set) {
  std::vector<Json> rows;
  for (const auto& p : set.paths) rows.push_back(to_json(p));
  return to_jsonl(rows);
}

inline Json to_json(const ConversationGraph& g) {
  Json j;
  j["nodes"] = g.nodes();
  j["edges"] = Json::array();
  for (const auto& e : g.edges())
    j["edges"].push_back({{"source", e.source}, {"label", e.label}, {"target", e.target}});
  j["terminals"] = g.terminals();
  return j;
}

inline ConversationGraph graph_from_json(const Json& j) {
  ConversationGraph g;
  for (const auto& n : j.at("nodes")) g.add_node(n.get<std::string>());
  for (const auto& e : j.at("edges")) {
    auto src = e.at("source").get<std::string>();
    auto dst = e.at("target").get<std::string>();
    if (!g.contains(src) || !g.contains(dst))
      throw SchemaError("graph: edge references unknown node");
    g.add_edge(src, e.value("label", dst), dst);
  }
  return g;
}

}  // namespace botsim
