#pragma once

#include <span>
#include <string>
#include <vector>

#include "catnet/contract.hpp"
#include "catnet/graph.hpp"

namespace catnet {

// Relation label for contract -> entity edges of the given entity kind,
// e.g. "contract-covers-peril".
std::string contract_relation_label(NodeKind entity);
// Relation label for an entity pair from one transaction, e.g.
// "peril-with-country". Symmetric in its arguments.
std::string pair_relation_label(NodeKind a, NodeKind b);
// The full relation registry, in id order. Every graph from build_graph()
// registers exactly this list, so relation ids agree across graphs.
std::vector<std::string> relation_registry();

struct ContractGraph {
  HeteroGraph graph;  // frozen
  IssueYears issue_years;
  std::map<NodeId, double> targets;   // spread_premium per contract node
  std::vector<NodeId> contract_nodes; // contract_nodes[i] is records[i]
};

// One Contract node per record (label = contract_id), one node per distinct
// (kind, normalized label) entity, a contract-entity edge per role, and
// pairwise entity-entity edges among the entities of each transaction.
// Throws DataError on a duplicate contract_id.
ContractGraph build_graph(std::span<const ContractRecord> records);

// Entity nodes (kind, label) a record connects to, in role order.
std::vector<std::pair<NodeKind, std::string>> record_entities(const ContractRecord& record);

}  // namespace catnet
