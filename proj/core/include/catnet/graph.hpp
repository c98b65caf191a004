#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace catnet {

enum class NodeKind : std::uint8_t {
  Contract,
  Cedent,
  Underwriter,
  Country,
  StateProvince,
  Peril,
  RiskModeler,
};

inline constexpr std::array<NodeKind, 7> kAllNodeKinds{
    NodeKind::Contract, NodeKind::Cedent,   NodeKind::Underwriter, NodeKind::Country,
    NodeKind::StateProvince, NodeKind::Peril, NodeKind::RiskModeler};

std::string_view to_string(NodeKind kind);
// Throws DataError on an unknown name.
NodeKind parse_node_kind(std::string_view name);

using NodeId = std::uint32_t;
using RelationId = std::uint32_t;

// Dedup key for entity labels: trimmed, lowercased.
std::string normalize_label(std::string_view label);

// "Kind:normalized label", stable across graphs built from different record sets.
std::string entity_key(NodeKind kind, std::string_view label);

struct Node {
  NodeId id = 0;
  NodeKind kind = NodeKind::Contract;
  std::string label;
};

// Undirected typed edge, stored canonically with u < v.
struct Edge {
  NodeId u = 0;
  RelationId r = 0;
  NodeId v = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Heterogeneous multi-relational graph. Mutable until freeze(); afterwards
// every mutation throws BuildError and the graph is safe to share between
// readers.
class HeteroGraph {
 public:
  // Idempotent on (kind, normalized label).
  NodeId add_node(NodeKind kind, std::string_view label);
  // Idempotent on label.
  RelationId add_relation(std::string_view label);
  // Undirected; duplicate inserts are no-ops. Rejects self-loops and unknown ids.
  void add_edge(NodeId u, RelationId r, NodeId v);
  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_relations() const { return relations_.size(); }
  std::size_t num_edges() const { return edge_count_; }

  const Node& node(NodeId id) const;
  std::span<const Node> nodes() const { return nodes_; }
  std::optional<NodeId> find_node(NodeKind kind, std::string_view label) const;

  const std::string& relation_label(RelationId r) const;
  std::span<const std::string> relations() const { return relations_; }
  std::optional<RelationId> find_relation(std::string_view label) const;

  // Sorted, duplicate-free.
  std::span<const NodeId> neighbors(NodeId u, RelationId r) const;
  // Distinct neighbors across all relations (simple-graph degree).
  std::size_t degree(NodeId u) const;
  // Sum over relations of |N_r(u)|.
  std::size_t multi_degree(NodeId u) const;

  // Canonical order: lexicographic on (u, r, v) with u < v.
  std::vector<Edge> edges() const;

 private:
  void require_mutable(const char* op) const;
  void require_node(NodeId id) const;

  std::vector<Node> nodes_;
  std::vector<std::string> relations_;
  std::map<std::pair<NodeKind, std::string>, NodeId> node_index_;
  std::unordered_map<std::string, RelationId> relation_index_;
  // adjacency_[r][u] = sorted neighbors of u under r
  std::vector<std::vector<std::vector<NodeId>>> adjacency_;
  std::size_t edge_count_ = 0;
  bool frozen_ = false;
};

// Simple undirected graph: relation labels dropped, parallel edges merged.
class HomoView {
 public:
  explicit HomoView(const HeteroGraph& g);
  // Builds from an explicit edge list; duplicates are merged, self-loops rejected.
  HomoView(std::size_t num_nodes, std::span<const std::pair<NodeId, NodeId>> edges);

  std::size_t num_nodes() const { return adjacency_.size(); }
  std::size_t num_edges() const { return edge_count_; }
  std::span<const NodeId> neighbors(NodeId u) const { return adjacency_.at(u); }
  std::size_t degree(NodeId u) const { return adjacency_.at(u).size(); }
  std::vector<std::size_t> degrees() const;
  bool has_edge(NodeId u, NodeId v) const;

 private:
  void finish();

  std::vector<std::vector<NodeId>> adjacency_;
  std::size_t edge_count_ = 0;
};

using IssueYears = std::map<NodeId, int>;

struct Subgraph {
  HeteroGraph graph;               // frozen, ids relabelled densely
  std::vector<NodeId> parent_ids;  // parent_ids[new id] = id in the source graph
};

// Contracts issued in or before `year_cutoff`, every entity incident to them,
// and the induced edges. Relation registry is copied unchanged so relation ids
// line up with the source graph. Node order follows the source ids.
Subgraph subgraph_by_years(const HeteroGraph& g, int year_cutoff, const IssueYears& issue_years);

}  // namespace catnet
