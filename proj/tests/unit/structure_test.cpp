#include <gtest/gtest.h>

#include <cmath>

#include "catnet/error.hpp"
#include "catnet/fitness.hpp"
#include "catnet/graph_builder.hpp"
#include "catnet/structure.hpp"
#include "catnet/topology.hpp"
#include "test_support.hpp"

namespace catnet {
namespace {

HomoView make(std::size_t n, std::vector<std::pair<NodeId, NodeId>> edges) { return HomoView(n, edges); }

TEST(GlobalClustering, HandEnumeratedTriples) {
  EXPECT_DOUBLE_EQ(global_clustering(make(3, {{0, 1}, {1, 2}, {0, 2}})), 1.0);
  EXPECT_DOUBLE_EQ(global_clustering(make(4, {{0, 1}, {0, 2}, {0, 3}})), 0.0);
  EXPECT_DOUBLE_EQ(global_clustering(make(4, {{0, 1}, {1, 2}, {0, 2}, {2, 3}})), 0.6);
  EXPECT_DOUBLE_EQ(global_clustering(make(3, {})), 0.0);
}

TEST(Assortativity, StarIsPerfectlyDisassortative) {
  const Assortativity a = assortativity(make(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}));
  ASSERT_TRUE(a.pearson_r.has_value());
  EXPECT_NEAR(*a.pearson_r, -1.0, 1e-12);
  EXPECT_FALSE(a.flagged);
}

TEST(Assortativity, CompleteGraphIsUndefined) {
  const Assortativity a = assortativity(make(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}));
  EXPECT_FALSE(a.pearson_r.has_value());
  EXPECT_TRUE(a.flagged);
  ASSERT_EQ(a.knn_curve.size(), 1u);
  EXPECT_EQ(a.knn_curve[0].k, 3u);
  EXPECT_DOUBLE_EQ(a.knn_curve[0].knn, 3.0);
}

// Pearson correlation over both orientations of every edge.
double oracle_assortativity(const HomoView& g) {
  std::vector<double> x;
  std::vector<double> y;
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    for (NodeId v : g.neighbors(u)) {
      x.push_back(static_cast<double>(g.degree(u)));
      y.push_back(static_cast<double>(g.degree(v)));
    }
  }
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

TEST(Assortativity, MatchesEdgeListPearson) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const HomoView g = testing::random_homo(rng, 25, 0.15);
    const Assortativity a = assortativity(g);
    if (!a.pearson_r) continue;
    EXPECT_NEAR(*a.pearson_r, oracle_assortativity(g), 1e-10) << seed;
  }
}

TEST(PathStats, PathAndCompleteGraph) {
  const PathStats p = path_stats(make(3, {{0, 1}, {1, 2}}));
  EXPECT_EQ(p.diameter, 2u);
  EXPECT_NEAR(p.avg_path, 4.0 / 3.0, 1e-12);
  EXPECT_TRUE(p.connected);

  const PathStats k4 = path_stats(make(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}));
  EXPECT_EQ(k4.diameter, 1u);
  EXPECT_DOUBLE_EQ(k4.avg_path, 1.0);

  EXPECT_FALSE(path_stats(make(4, {{0, 1}, {2, 3}})).connected);
}

TEST(PathStats, MatchesFloydWarshall) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    Rng rng(seed + 100);
    const HomoView g = testing::random_homo(rng, 14, 0.2);
    const auto d = testing::floyd_distances(g);
    std::size_t diameter = 0;
    double sum = 0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      for (std::size_t j = 0; j < d.size(); ++j) {
        if (i == j || d[i][j] < 0) continue;
        diameter = std::max(diameter, static_cast<std::size_t>(d[i][j]));
        sum += d[i][j];
        ++pairs;
      }
    }
    const PathStats p = path_stats(g, 2);
    EXPECT_EQ(p.diameter, diameter);
    EXPECT_EQ(p.reachable_pairs, pairs);
    if (pairs > 0) {
      EXPECT_NEAR(p.avg_path, sum / static_cast<double>(pairs), 1e-12);
    }
  }
}

TEST(Fitness, ConstantDegreeHasZeroGrowth) {
  const std::vector<int> years{2000, 2001, 2002, 2003};
  const std::vector<std::size_t> flat{3, 3, 3, 3};
  const auto eta = growth_exponent(years, flat);
  ASSERT_TRUE(eta.has_value());
  EXPECT_NEAR(*eta, 0.0, 1e-12);
}

TEST(Fitness, DoublingBeatsLinearGrowth) {
  const std::vector<int> years{2000, 2001, 2002, 2003};
  const std::vector<std::size_t> doubling{1, 2, 4, 8};
  const std::vector<std::size_t> linear{1, 2, 3, 4};
  const auto a = growth_exponent(years, doubling);
  const auto b = growth_exponent(years, linear);
  ASSERT_TRUE(a && b);
  EXPECT_GT(*a, *b);
  EXPECT_NEAR(*b, 1.0, 1e-12);
}

TEST(Fitness, FewYearsIsUndefined) {
  const std::vector<int> years{2000, 2001, 2002};
  const std::vector<std::size_t> late{0, 1, 2};
  EXPECT_FALSE(growth_exponent(years, late).has_value());
}

TEST(Fitness, SeriesFollowsCumulativeSubgraphs) {
  std::vector<ContractRecord> records{testing::make_record("A", 2000, {"flood"}, "X"),
                                      testing::make_record("B", 2001, {"flood"}, "Y"),
                                      testing::make_record("C", 2002, {"wind"}, "X")};
  const ContractGraph cg = build_graph(records);
  const FitnessSeries s = fitness_series(cg.graph, cg.issue_years);
  EXPECT_EQ(s.years, (std::vector<int>{2000, 2001, 2002}));
  const NodeId flood = *cg.graph.find_node(NodeKind::Peril, "flood");
  const HomoView full(cg.graph);
  EXPECT_EQ(s.degrees[flood].back(), full.degree(flood));
  for (std::size_t i = 1; i < s.years.size(); ++i) EXPECT_GE(s.degrees[flood][i], s.degrees[flood][i - 1]);

  IssueYears one;
  for (auto [id, y] : cg.issue_years) one[id] = 2000;
  EXPECT_THROW(fitness_series(cg.graph, one), DataError);
}

TEST(TopologyReport, ContractRowsOfTheTopoBlockAreZero) {
  std::vector<ContractRecord> records;
  for (int i = 0; i < 12; ++i) {
    records.push_back(testing::make_record("C" + std::to_string(i), 2000 + i % 4,
                                           {i % 3 ? "flood" : "wind", "quake"}, "X" + std::to_string(i % 5)));
  }
  const ContractGraph cg = build_graph(records);
  const TopoFeatures t = entity_topo_features(cg.graph);
  ASSERT_EQ(t.values.rows(), static_cast<Eigen::Index>(cg.graph.num_nodes()));
  for (NodeId u : cg.contract_nodes) EXPECT_TRUE(t.values.row(u).isZero(0.0));

  TopologyOptions options;
  const TopologyReport report = topology_report(cg.graph, &cg.issue_years, options);
  EXPECT_TRUE(report.fitness.has_value());
  EXPECT_EQ(report.degree.num_nodes, cg.graph.num_nodes());
  EXPECT_FALSE(to_json(report, cg.graph).empty());
}

}  // namespace
}  // namespace catnet
