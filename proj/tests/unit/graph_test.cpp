#include <gtest/gtest.h>

#include <set>

#include "catnet/error.hpp"
#include "catnet/graph.hpp"
#include "catnet/graph_io.hpp"
#include "test_support.hpp"

namespace catnet {
namespace {

TEST(HeteroGraph, AddNodeIsIdempotentOnKindAndLabel) {
  HeteroGraph g;
  const NodeId a = g.add_node(NodeKind::Peril, "earthquake");
  const NodeId b = g.add_node(NodeKind::Peril, "earthquake");
  EXPECT_EQ(a, 0u);
  EXPECT_EQ(a, b);
  EXPECT_EQ(g.add_node(NodeKind::Peril, "  EarthQuake "), a);
  EXPECT_NE(g.add_node(NodeKind::Country, "earthquake"), a);
  EXPECT_EQ(g.num_nodes(), 2u);
}

TEST(HeteroGraph, DistinctPairsGiveOneNodeEach) {
  HeteroGraph g;
  for (int i = 0; i < 1902; ++i) g.add_node(kAllNodeKinds[static_cast<std::size_t>(i) % 7], "e" + std::to_string(i / 7));
  for (int i = 0; i < 1902; ++i) g.add_node(kAllNodeKinds[static_cast<std::size_t>(i) % 7], "e" + std::to_string(i / 7));
  EXPECT_EQ(g.num_nodes(), 1902u);
}

TEST(HeteroGraph, EdgesAreSymmetricAndDeduplicated) {
  HeteroGraph g;
  const RelationId r = g.add_relation("contract-covers-peril");
  const NodeId u = g.add_node(NodeKind::Contract, "CAT_CON001");
  const NodeId v = g.add_node(NodeKind::Peril, "hurricane");
  g.add_edge(u, r, v);
  g.add_edge(v, r, u);
  g.add_edge(u, r, v);
  EXPECT_EQ(g.num_edges(), 1u);
  ASSERT_EQ(g.neighbors(v, r).size(), 1u);
  EXPECT_EQ(g.neighbors(v, r)[0], u);
  EXPECT_THROW(g.add_edge(u, r, u), BuildError);
  EXPECT_THROW(g.add_edge(u, r, 99), BuildError);
  EXPECT_THROW(g.add_edge(u, 7, v), BuildError);
}

TEST(HeteroGraph, NeighborsOfSmallShapes) {
  HeteroGraph g;
  const RelationId r = g.add_relation("r");
  std::vector<NodeId> ids;
  for (int i = 0; i < 8; ++i) ids.push_back(g.add_node(NodeKind::Cedent, "c" + std::to_string(i)));
  g.add_edge(ids[0], r, ids[1]);
  g.add_edge(ids[1], r, ids[2]);
  g.add_edge(ids[2], r, ids[0]);
  g.add_edge(ids[3], r, ids[4]);
  g.add_edge(ids[3], r, ids[5]);
  g.add_edge(ids[3], r, ids[6]);
  g.freeze();
  EXPECT_TRUE(g.neighbors(ids[7], r).empty());
  for (int i = 0; i < 3; ++i) EXPECT_EQ(g.neighbors(ids[static_cast<std::size_t>(i)], r).size(), 2u);
  EXPECT_EQ(g.neighbors(ids[3], r).size(), 3u);
  EXPECT_THROW((void)g.neighbors(ids[0], 5), DataError);
}

TEST(HeteroGraph, DegreeCollapsesRelations) {
  HeteroGraph g;
  const RelationId r1 = g.add_relation("a");
  const RelationId r2 = g.add_relation("b");
  const NodeId a = g.add_node(NodeKind::Peril, "a");
  const NodeId b = g.add_node(NodeKind::Peril, "b");
  const NodeId c = g.add_node(NodeKind::Peril, "c");
  const NodeId iso = g.add_node(NodeKind::Peril, "iso");
  g.add_edge(a, r1, b);
  g.add_edge(b, r1, c);
  g.add_edge(a, r2, b);
  EXPECT_EQ(g.degree(b), 2u);
  EXPECT_EQ(g.degree(iso), 0u);
  EXPECT_EQ(g.multi_degree(b), 3u);
  EXPECT_EQ(HomoView(g).degree(b), 2u);
  EXPECT_EQ(HomoView(g).num_edges(), 2u);
}

TEST(HeteroGraph, FrozenGraphRejectsMutation) {
  HeteroGraph g;
  const RelationId r = g.add_relation("r");
  const NodeId a = g.add_node(NodeKind::Peril, "a");
  const NodeId b = g.add_node(NodeKind::Peril, "b");
  g.freeze();
  EXPECT_THROW(g.add_node(NodeKind::Peril, "c"), BuildError);
  EXPECT_THROW(g.add_relation("s"), BuildError);
  EXPECT_THROW(g.add_edge(a, r, b), BuildError);
}

TEST(HeteroGraph, EdgesComeInCanonicalOrder) {
  Rng rng(3);
  const HeteroGraph g = testing::random_hetero(rng, 15, 3, 0.3);
  const auto edges = g.edges();
  EXPECT_EQ(edges.size(), g.num_edges());
  EXPECT_TRUE(std::is_sorted(edges.begin(), edges.end()));
  for (const Edge& e : edges) EXPECT_LT(e.u, e.v);
}

HeteroGraph two_contract_graph(IssueYears& years) {
  HeteroGraph g;
  const RelationId r = g.add_relation("contract-covers-peril");
  const NodeId c1 = g.add_node(NodeKind::Contract, "C1");
  const NodeId c2 = g.add_node(NodeKind::Contract, "C2");
  const NodeId p1 = g.add_node(NodeKind::Peril, "flood");
  const NodeId p2 = g.add_node(NodeKind::Peril, "wind");
  g.add_edge(c1, r, p1);
  g.add_edge(c2, r, p2);
  g.freeze();
  years = {{c1, 1999}, {c2, 2005}};
  return g;
}

TEST(SubgraphByYears, KeepsContractsUpToCutoffAndTheirEntities) {
  IssueYears years;
  const HeteroGraph g = two_contract_graph(years);
  const Subgraph early = subgraph_by_years(g, 2000, years);
  ASSERT_EQ(early.graph.num_nodes(), 2u);
  EXPECT_EQ(early.graph.node(0).label, "C1");
  EXPECT_EQ(early.graph.node(1).label, "flood");
  EXPECT_EQ(early.graph.num_edges(), 1u);
  EXPECT_EQ(early.parent_ids, (std::vector<NodeId>{0, 2}));

  EXPECT_EQ(graph_to_json(subgraph_by_years(g, 2005, years).graph), graph_to_json(g));
  EXPECT_EQ(subgraph_by_years(g, 1990, years).graph.num_nodes(), 0u);
}

TEST(SubgraphByYears, MissingYearIsAnError) {
  IssueYears years;
  const HeteroGraph g = two_contract_graph(years);
  years.erase(1);
  EXPECT_THROW(subgraph_by_years(g, 2010, years), DataError);
}

TEST(GraphJson, RoundTripIsByteStable) {
  Rng rng(11);
  const HeteroGraph g = testing::random_hetero(rng, 20, 4, 0.25);
  const std::string text = graph_to_json(g);
  const HeteroGraph back = graph_from_json(text);
  EXPECT_TRUE(back.frozen());
  EXPECT_EQ(graph_to_json(back), text);
  EXPECT_EQ(back.num_edges(), g.num_edges());
}

TEST(GraphJson, MalformedInputIsADataError) {
  EXPECT_THROW(graph_from_json("{"), DataError);
  EXPECT_THROW(graph_from_json(R"({"nodes":[{"id":1,"kind":"Peril","label":"x"}],"relations":[],"edges":[]})"),
               DataError);
  EXPECT_THROW(graph_from_json(R"({"nodes":[{"id":0,"kind":"Volcano","label":"x"}],"relations":[],"edges":[]})"),
               DataError);
}

TEST(NodeKind, NamesRoundTrip) {
  for (NodeKind k : kAllNodeKinds) EXPECT_EQ(parse_node_kind(to_string(k)), k);
  EXPECT_THROW(parse_node_kind("Bond"), DataError);
}

}  // namespace
}  // namespace catnet
