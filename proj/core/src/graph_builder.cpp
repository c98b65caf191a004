#include "catnet/graph_builder.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "catnet/error.hpp"

namespace catnet {

namespace {

// Naming order for entity pairs, so labels read "peril-with-country".
constexpr std::array<NodeKind, 6> kPairOrder{NodeKind::Peril,  NodeKind::Country,
                                             NodeKind::StateProvince, NodeKind::Cedent,
                                             NodeKind::Underwriter, NodeKind::RiskModeler};

std::size_t pair_rank(NodeKind kind) {
  for (std::size_t i = 0; i < kPairOrder.size(); ++i) {
    if (kPairOrder[i] == kind) return i;
  }
  throw DataError("contract nodes do not take part in entity pairs");
}

std::string slug(NodeKind kind) {
  switch (kind) {
    case NodeKind::Contract: return "contract";
    case NodeKind::Cedent: return "cedent";
    case NodeKind::Underwriter: return "underwriter";
    case NodeKind::Country: return "country";
    case NodeKind::StateProvince: return "state";
    case NodeKind::Peril: return "peril";
    case NodeKind::RiskModeler: return "modeler";
  }
  return "unknown";
}

}  // namespace

std::string contract_relation_label(NodeKind entity) {
  switch (entity) {
    case NodeKind::Cedent: return "contract-ceded-by-cedent";
    case NodeKind::Underwriter: return "contract-underwritten-by-underwriter";
    case NodeKind::Country: return "contract-covers-country";
    case NodeKind::StateProvince: return "contract-covers-state";
    case NodeKind::Peril: return "contract-covers-peril";
    case NodeKind::RiskModeler: return "contract-modeled-by-modeler";
    case NodeKind::Contract: break;
  }
  throw DataError("no contract relation for contract nodes");
}

std::string pair_relation_label(NodeKind a, NodeKind b) {
  if (pair_rank(a) > pair_rank(b)) std::swap(a, b);
  return slug(a) + "-with-" + slug(b);
}

std::vector<std::string> relation_registry() {
  std::vector<std::string> out;
  for (NodeKind kind : {NodeKind::Cedent, NodeKind::Underwriter, NodeKind::Country,
                        NodeKind::StateProvince, NodeKind::Peril, NodeKind::RiskModeler}) {
    out.push_back(contract_relation_label(kind));
  }
  for (std::size_t i = 0; i < kPairOrder.size(); ++i) {
    for (std::size_t j = i; j < kPairOrder.size(); ++j) {
      out.push_back(pair_relation_label(kPairOrder[i], kPairOrder[j]));
    }
  }
  return out;
}

std::vector<std::pair<NodeKind, std::string>> record_entities(const ContractRecord& r) {
  std::vector<std::pair<NodeKind, std::string>> out;
  out.emplace_back(NodeKind::Cedent, r.cedent);
  for (const auto& u : r.underwriters) out.emplace_back(NodeKind::Underwriter, u);
  for (const auto& c : r.countries) out.emplace_back(NodeKind::Country, c);
  for (const auto& s : r.states_provinces) out.emplace_back(NodeKind::StateProvince, s);
  for (const auto& p : r.perils) out.emplace_back(NodeKind::Peril, p);
  if (!r.risk_modeler.empty()) out.emplace_back(NodeKind::RiskModeler, r.risk_modeler);
  return out;
}

ContractGraph build_graph(std::span<const ContractRecord> records) {
  ContractGraph out;
  HeteroGraph& g = out.graph;
  for (const auto& label : relation_registry()) g.add_relation(label);

  std::set<std::string> seen_ids;
  for (const auto& rec : records) {
    if (!seen_ids.insert(rec.contract_id).second) {
      throw DataError("duplicate contract_id '" + rec.contract_id + "'");
    }
    if (g.find_node(NodeKind::Contract, rec.contract_id)) {
      throw DataError("contract_id '" + rec.contract_id + "' collides after normalization");
    }
    const NodeId contract = g.add_node(NodeKind::Contract, rec.contract_id);
    out.contract_nodes.push_back(contract);
    out.issue_years.emplace(contract, rec.issue_year);
    out.targets.emplace(contract, rec.spread_premium);

    std::vector<NodeId> entities;
    for (const auto& [kind, label] : record_entities(rec)) {
      const NodeId id = g.add_node(kind, label);
      if (std::find(entities.begin(), entities.end(), id) != entities.end()) continue;
      entities.push_back(id);
      g.add_edge(contract, *g.find_relation(contract_relation_label(kind)), id);
    }
    for (std::size_t i = 0; i < entities.size(); ++i) {
      for (std::size_t j = i + 1; j < entities.size(); ++j) {
        const auto rel = pair_relation_label(g.node(entities[i]).kind, g.node(entities[j]).kind);
        g.add_edge(entities[i], *g.find_relation(rel), entities[j]);
      }
    }
  }
  g.freeze();
  return out;
}

}  // namespace catnet
