#include <gtest/gtest.h>

#include <cmath>

#include "catnet/centrality.hpp"
#include "catnet/error.hpp"
#include "test_support.hpp"

namespace catnet {
namespace {

HomoView make(std::size_t n, std::vector<std::pair<NodeId, NodeId>> edges) { return HomoView(n, edges); }

TEST(Centrality, Triangle) {
  const HomoView g = make(3, {{0, 1}, {1, 2}, {0, 2}});
  for (double c : clustering_local(g)) EXPECT_DOUBLE_EQ(c, 1.0);
  for (double b : betweenness_centrality(g)) EXPECT_DOUBLE_EQ(b, 0.0);
}

TEST(Centrality, Path) {
  const HomoView g = make(3, {{0, 1}, {1, 2}});
  const auto b = betweenness_centrality(g);
  EXPECT_DOUBLE_EQ(b[1], 1.0);
  EXPECT_DOUBLE_EQ(b[0], 0.0);
  const auto c = closeness_centrality(g);
  EXPECT_DOUBLE_EQ(c[1], 2.0);
  EXPECT_DOUBLE_EQ(c[0], 1.5);
  EXPECT_EQ(degree_centrality(g), (std::vector<double>{1, 2, 1}));
}

TEST(Centrality, StarEigenvector) {
  const HomoView g = make(4, {{0, 1}, {0, 2}, {0, 3}});
  const auto e = eigenvector_centrality(g);
  EXPECT_NEAR(e[0], 1.0 / std::sqrt(2.0), 1e-9);
  for (int i = 1; i < 4; ++i) EXPECT_NEAR(e[static_cast<std::size_t>(i)], 1.0 / std::sqrt(6.0), 1e-9);
  EXPECT_NEAR(spectral_radius(g), std::sqrt(3.0), 1e-9);
}

TEST(Centrality, KatzOnASingleEdge) {
  const HomoView g = make(2, {{0, 1}});
  const Matrix x = katz_pairwise(g, 0.5);
  EXPECT_NEAR(x(0, 1), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(x(0, 0), 1.0 / 3.0, 1e-12);
  const auto s = katz_index(g, 0.5);
  EXPECT_NEAR(s[0], 1.0, 1e-12);
  EXPECT_THROW(katz_index(g, 1.0), NumericalError);
  EXPECT_THROW(katz_index(g, 1.5), NumericalError);
}

TEST(Centrality, DisconnectedHarmonicClosenessIsFinite) {
  const HomoView g = make(5, {{0, 1}, {2, 3}});
  const auto c = closeness_centrality(g);
  EXPECT_DOUBLE_EQ(c[0], 1.0);
  EXPECT_DOUBLE_EQ(c[4], 0.0);
  EXPECT_FALSE(classic_closeness(g).has_value());
  const auto classic = classic_closeness(make(3, {{0, 1}, {1, 2}}));
  ASSERT_TRUE(classic.has_value());
  EXPECT_DOUBLE_EQ((*classic)[1], 1.0);
}

TEST(Centrality, EdgelessGraph) {
  const HomoView g = make(4, {});
  EXPECT_EQ(default_katz_beta(g), 0.0);
  const CentralityTable t = compute_centralities(g);
  for (double v : t.katz) EXPECT_EQ(v, 0.0);
  for (double v : t.betweenness) EXPECT_EQ(v, 0.0);
}

class CentralityOracle : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(CentralityOracle, MatchesBruteForce) {
  Rng rng(GetParam());
  const std::size_t n = 3 + rng.below(10);
  const HomoView g = testing::random_homo(rng, n, rng.uniform(0.15, 0.6));
  const CentralityTable t = compute_centralities(g, std::nullopt, 2);
  const auto bb = testing::brute_betweenness(g);
  const auto bc = testing::brute_harmonic_closeness(g);
  const auto cl = testing::brute_clustering(g);
  for (std::size_t i = 0; i < n; ++i) {
    EXPECT_NEAR(t.degree[i], static_cast<double>(g.degree(static_cast<NodeId>(i))), 1e-12);
    EXPECT_NEAR(t.betweenness[i], bb[i], 1e-8);
    EXPECT_NEAR(t.closeness[i], bc[i], 1e-8);
    EXPECT_NEAR(t.clustering[i], cl[i], 1e-8);
  }
  if (g.num_edges() > 0) {
    const auto ks = testing::series_katz(g, t.katz_beta, 2000);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(t.katz[i], ks[i], 1e-8 * std::max(1.0, ks[i]));
    const auto [lambda, vec] = testing::dense_leading_eigen(g);
    EXPECT_NEAR(t.lambda_max, lambda, 1e-8);
    if (testing::connected(g)) {
      for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(t.eigenvector[i], vec[i], 1e-8);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(RandomGraphs, CentralityOracle, ::testing::Range<std::uint64_t>(0, 40));

TEST(Centrality, WorkerCountDoesNotChangeResults) {
  Rng rng(77);
  const HomoView g = testing::random_homo(rng, 60, 0.08);
  const CentralityTable a = compute_centralities(g, std::nullopt, 1);
  const CentralityTable b = compute_centralities(g, std::nullopt, 4);
  EXPECT_EQ(a.betweenness, b.betweenness);
  EXPECT_EQ(a.closeness, b.closeness);
  EXPECT_EQ(a.katz, b.katz);
  EXPECT_EQ(a.eigenvector, b.eigenvector);
}

}  // namespace
}  // namespace catnet
