#include "catnet/graph_io.hpp"

#include "catnet/error.hpp"
#include "json.hpp"

namespace catnet {

using nlohmann::json;

std::string graph_to_json(const HeteroGraph& g) {
  json nodes = json::array();
  for (const Node& n : g.nodes()) {
    nodes.push_back(json{{"id", n.id}, {"kind", std::string(to_string(n.kind))}, {"label", n.label}});
  }
  json relations = json::array();
  for (const auto& label : g.relations()) relations.push_back(label);
  json edges = json::array();
  for (const Edge& e : g.edges()) edges.push_back(json::array({e.u, e.r, e.v}));

  json doc;
  doc["nodes"] = std::move(nodes);
  doc["relations"] = std::move(relations);
  doc["edges"] = std::move(edges);
  return doc.dump() + "\n";
}

HeteroGraph graph_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("graph json: ") + e.what());
  }
  HeteroGraph g;
  try {
    for (const auto& label : doc.at("relations")) g.add_relation(label.get<std::string>());
    for (const auto& node : doc.at("nodes")) {
      const auto expected = static_cast<NodeId>(g.num_nodes());
      const auto id = node.at("id").get<NodeId>();
      if (id != expected) {
        throw DataError("graph json: node ids must be dense and ordered, got " + std::to_string(id) +
                        " at position " + std::to_string(expected));
      }
      const NodeId got = g.add_node(parse_node_kind(node.at("kind").get<std::string>()),
                                    node.at("label").get<std::string>());
      if (got != expected) throw DataError("graph json: duplicate node label at id " + std::to_string(id));
    }
    for (const auto& edge : doc.at("edges")) {
      if (!edge.is_array() || edge.size() != 3) throw DataError("graph json: edges must be [u,r,v]");
      g.add_edge(edge[0].get<NodeId>(), edge[1].get<RelationId>(), edge[2].get<NodeId>());
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("graph json: ") + e.what());
  } catch (const BuildError& e) {
    throw DataError(std::string("graph json: ") + e.what());
  }
  g.freeze();
  return g;
}

}  // namespace catnet
