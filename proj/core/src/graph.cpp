#include "catnet/graph.hpp"

#include <algorithm>
#include <cctype>

#include "catnet/error.hpp"

namespace catnet {

namespace {

constexpr std::array<std::string_view, 7> kKindNames{
    "Contract", "Cedent", "Underwriter", "Country", "StateProvince", "Peril", "RiskModeler"};

void insert_sorted(std::vector<NodeId>& list, NodeId value) {
  list.insert(std::lower_bound(list.begin(), list.end(), value), value);
}

}  // namespace

std::string_view to_string(NodeKind kind) { return kKindNames.at(static_cast<std::size_t>(kind)); }

NodeKind parse_node_kind(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<NodeKind>(i);
  }
  throw DataError("unknown node kind '" + std::string(name) + "'");
}

std::string normalize_label(std::string_view label) {
  std::size_t begin = 0;
  std::size_t end = label.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(label[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(label[end - 1]))) --end;
  std::string out(label.substr(begin, end - begin));
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string entity_key(NodeKind kind, std::string_view label) {
  std::string key(to_string(kind));
  key += ':';
  key += normalize_label(label);
  return key;
}

void HeteroGraph::require_mutable(const char* op) const {
  if (frozen_) throw BuildError(std::string(op) + " on a frozen graph");
}

void HeteroGraph::require_node(NodeId id) const {
  if (id >= nodes_.size()) throw BuildError("unknown node id " + std::to_string(id));
}

NodeId HeteroGraph::add_node(NodeKind kind, std::string_view label) {
  require_mutable("add_node");
  auto key = std::make_pair(kind, normalize_label(label));
  if (auto it = node_index_.find(key); it != node_index_.end()) return it->second;

  const auto id = static_cast<NodeId>(nodes_.size());
  std::string_view trimmed = label;
  while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.front()))) trimmed.remove_prefix(1);
  while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back()))) trimmed.remove_suffix(1);
  nodes_.push_back(Node{id, kind, std::string(trimmed)});
  node_index_.emplace(std::move(key), id);
  for (auto& per_relation : adjacency_) per_relation.emplace_back();
  return id;
}

RelationId HeteroGraph::add_relation(std::string_view label) {
  require_mutable("add_relation");
  std::string key(label);
  if (auto it = relation_index_.find(key); it != relation_index_.end()) return it->second;
  const auto id = static_cast<RelationId>(relations_.size());
  relations_.push_back(key);
  relation_index_.emplace(std::move(key), id);
  adjacency_.emplace_back(nodes_.size());
  return id;
}

void HeteroGraph::add_edge(NodeId u, RelationId r, NodeId v) {
  require_mutable("add_edge");
  require_node(u);
  require_node(v);
  if (r >= relations_.size()) throw BuildError("unknown relation id " + std::to_string(r));
  if (u == v) throw BuildError("self-loop on node " + std::to_string(u));

  auto& out = adjacency_[r][u];
  if (std::binary_search(out.begin(), out.end(), v)) return;
  insert_sorted(out, v);
  insert_sorted(adjacency_[r][v], u);
  ++edge_count_;
}

const Node& HeteroGraph::node(NodeId id) const {
  if (id >= nodes_.size()) throw DataError("unknown node id " + std::to_string(id));
  return nodes_[id];
}

std::optional<NodeId> HeteroGraph::find_node(NodeKind kind, std::string_view label) const {
  auto it = node_index_.find(std::make_pair(kind, normalize_label(label)));
  if (it == node_index_.end()) return std::nullopt;
  return it->second;
}

const std::string& HeteroGraph::relation_label(RelationId r) const {
  if (r >= relations_.size()) throw DataError("unknown relation id " + std::to_string(r));
  return relations_[r];
}

std::optional<RelationId> HeteroGraph::find_relation(std::string_view label) const {
  auto it = relation_index_.find(std::string(label));
  if (it == relation_index_.end()) return std::nullopt;
  return it->second;
}

std::span<const NodeId> HeteroGraph::neighbors(NodeId u, RelationId r) const {
  if (r >= relations_.size()) throw DataError("unknown relation id " + std::to_string(r));
  if (u >= nodes_.size()) throw DataError("unknown node id " + std::to_string(u));
  return adjacency_[r][u];
}

std::size_t HeteroGraph::degree(NodeId u) const {
  if (u >= nodes_.size()) throw DataError("unknown node id " + std::to_string(u));
  std::vector<NodeId> all;
  for (const auto& per_relation : adjacency_) {
    all.insert(all.end(), per_relation[u].begin(), per_relation[u].end());
  }
  std::sort(all.begin(), all.end());
  return static_cast<std::size_t>(std::unique(all.begin(), all.end()) - all.begin());
}

std::size_t HeteroGraph::multi_degree(NodeId u) const {
  if (u >= nodes_.size()) throw DataError("unknown node id " + std::to_string(u));
  std::size_t total = 0;
  for (const auto& per_relation : adjacency_) total += per_relation[u].size();
  return total;
}

std::vector<Edge> HeteroGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (NodeId u = 0; u < nodes_.size(); ++u) {
    for (RelationId r = 0; r < relations_.size(); ++r) {
      for (NodeId v : adjacency_[r][u]) {
        if (u < v) out.push_back(Edge{u, r, v});
      }
    }
  }
  // Already ordered by u then r; v ascending within each list.
  return out;
}

HomoView::HomoView(const HeteroGraph& g) : adjacency_(g.num_nodes()) {
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    auto& list = adjacency_[u];
    for (RelationId r = 0; r < g.num_relations(); ++r) {
      auto nb = g.neighbors(u, r);
      list.insert(list.end(), nb.begin(), nb.end());
    }
  }
  finish();
}

HomoView::HomoView(std::size_t num_nodes, std::span<const std::pair<NodeId, NodeId>> edges)
    : adjacency_(num_nodes) {
  for (auto [u, v] : edges) {
    if (u >= num_nodes || v >= num_nodes) throw BuildError("edge endpoint out of range");
    if (u == v) throw BuildError("self-loop on node " + std::to_string(u));
    adjacency_[u].push_back(v);
    adjacency_[v].push_back(u);
  }
  finish();
}

void HomoView::finish() {
  std::size_t half_edges = 0;
  for (auto& list : adjacency_) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    half_edges += list.size();
  }
  edge_count_ = half_edges / 2;
}

std::vector<std::size_t> HomoView::degrees() const {
  std::vector<std::size_t> out(adjacency_.size());
  for (std::size_t u = 0; u < adjacency_.size(); ++u) out[u] = adjacency_[u].size();
  return out;
}

bool HomoView::has_edge(NodeId u, NodeId v) const {
  const auto& list = adjacency_.at(u);
  return std::binary_search(list.begin(), list.end(), v);
}

Subgraph subgraph_by_years(const HeteroGraph& g, int year_cutoff, const IssueYears& issue_years) {
  const std::size_t n = g.num_nodes();
  std::vector<char> keep(n, 0);
  for (NodeId u = 0; u < n; ++u) {
    if (g.node(u).kind != NodeKind::Contract) continue;
    auto it = issue_years.find(u);
    if (it == issue_years.end()) {
      throw DataError("contract node " + std::to_string(u) + " has no issue year");
    }
    if (it->second <= year_cutoff) keep[u] = 1;
  }
  // Entities incident to a kept contract under any relation.
  for (NodeId u = 0; u < n; ++u) {
    if (!keep[u] || g.node(u).kind != NodeKind::Contract) continue;
    for (RelationId r = 0; r < g.num_relations(); ++r) {
      for (NodeId v : g.neighbors(u, r)) {
        if (g.node(v).kind != NodeKind::Contract) keep[v] = 1;
      }
    }
  }

  Subgraph out;
  for (const auto& label : g.relations()) out.graph.add_relation(label);
  std::vector<NodeId> remap(n, 0);
  for (NodeId u = 0; u < n; ++u) {
    if (!keep[u]) continue;
    const Node& node = g.node(u);
    remap[u] = out.graph.add_node(node.kind, node.label);
    out.parent_ids.push_back(u);
  }
  for (const Edge& e : g.edges()) {
    if (keep[e.u] && keep[e.v]) out.graph.add_edge(remap[e.u], e.r, remap[e.v]);
  }
  out.graph.freeze();
  return out;
}

}  // namespace catnet
