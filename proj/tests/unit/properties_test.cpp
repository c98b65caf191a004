#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "catnet/centrality.hpp"
#include "catnet/contract.hpp"
#include "catnet/degree.hpp"
#include "catnet/features.hpp"
#include "catnet/graph_builder.hpp"
#include "catnet/graph_io.hpp"
#include "catnet/splits.hpp"
#include "catnet/structure.hpp"
#include "catnet/synth.hpp"
#include "test_support.hpp"

namespace catnet {
namespace {

constexpr std::uint64_t kCases = 30;

TEST(Property, AdjacencyIsSymmetricAndCountsEdges) {
  for (std::uint64_t seed = 0; seed < kCases; ++seed) {
    Rng rng(seed);
    const HeteroGraph g = testing::random_hetero(rng, 2 + rng.below(25), 1 + rng.below(4), rng.uniform(0.05, 0.5));
    std::size_t half = 0;
    for (NodeId u = 0; u < g.num_nodes(); ++u) {
      for (RelationId r = 0; r < g.num_relations(); ++r) {
        const auto nb = g.neighbors(u, r);
        half += nb.size();
        EXPECT_TRUE(std::is_sorted(nb.begin(), nb.end()));
        for (NodeId v : nb) {
          const auto back = g.neighbors(v, r);
          EXPECT_TRUE(std::binary_search(back.begin(), back.end(), u));
        }
      }
    }
    EXPECT_EQ(half, 2 * g.num_edges());
    const HomoView h(g);
    const auto d = h.degrees();
    EXPECT_EQ(std::accumulate(d.begin(), d.end(), std::size_t{0}), 2 * h.num_edges());
  }
}

TEST(Property, GraphJsonRoundTrip) {
  for (std::uint64_t seed = 0; seed < kCases; ++seed) {
    Rng rng(seed + 1000);
    const HeteroGraph g = testing::random_hetero(rng, 1 + rng.below(30), 1 + rng.below(5), rng.uniform(0.0, 0.4));
    const std::string text = graph_to_json(g);
    EXPECT_EQ(graph_to_json(graph_from_json(text)), text);
  }
}

TEST(Property, CanonicalCsvIsAFixedPoint) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto records = synth_dataset(25 + seed, seed);
    const std::string text = to_csv(records);
    std::istringstream in(text);
    EXPECT_EQ(to_csv(parse_csv(in).records), text);
  }
}

TEST(Property, YearSubgraphIsMonotoneAndInduced) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SynthConfig sc;
    sc.n_contracts = 40;
    sc.seed = seed;
    sc.first_year = 2000;
    sc.last_year = 2006;
    const auto records = synth_dataset(sc).records;
    const ContractGraph cg = build_graph(records);
    std::size_t previous = 0;
    for (int cutoff = 1999; cutoff <= 2006; ++cutoff) {
      const Subgraph s = subgraph_by_years(cg.graph, cutoff, cg.issue_years);
      EXPECT_GE(s.graph.num_nodes(), previous);
      previous = s.graph.num_nodes();
      for (NodeId v = 0; v < s.graph.num_nodes(); ++v) {
        const NodeId parent = s.parent_ids[v];
        EXPECT_EQ(s.graph.node(v).label, cg.graph.node(parent).label);
        if (s.graph.node(v).kind == NodeKind::Contract) {
          EXPECT_LE(cg.issue_years.at(parent), cutoff);
        }
      }
      for (const Edge& e : s.graph.edges()) {
        const auto nb = cg.graph.neighbors(s.parent_ids[e.u], e.r);
        EXPECT_TRUE(std::binary_search(nb.begin(), nb.end(), s.parent_ids[e.v]));
      }
    }
    EXPECT_EQ(previous, cg.graph.num_nodes());
  }
}

// Each pair at distance d contributes d - 1 to the betweenness total.
TEST(Property, BetweennessSumsToInteriorPathLength) {
  for (std::uint64_t seed = 0; seed < kCases; ++seed) {
    Rng rng(seed + 2000);
    const HomoView g = testing::random_homo(rng, 2 + rng.below(20), rng.uniform(0.05, 0.5));
    const auto b = betweenness_centrality(g);
    const auto d = testing::floyd_distances(g);
    double expected = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      for (std::size_t j = i + 1; j < d.size(); ++j) {
        if (d[i][j] > 0) expected += d[i][j] - 1;
      }
    }
    EXPECT_NEAR(std::accumulate(b.begin(), b.end(), 0.0), expected, 1e-9);
  }
}

TEST(Property, CentralityRanges) {
  for (std::uint64_t seed = 0; seed < kCases; ++seed) {
    Rng rng(seed + 3000);
    const HomoView g = testing::random_homo(rng, 3 + rng.below(25), rng.uniform(0.1, 0.5));
    if (g.num_edges() == 0) continue;
    const CentralityTable t = compute_centralities(g);
    double norm = 0.0;
    for (std::size_t i = 0; i < g.num_nodes(); ++i) {
      EXPECT_GE(t.clustering[i], 0.0);
      EXPECT_LE(t.clustering[i], 1.0);
      EXPECT_GE(t.eigenvector[i], 0.0);
      EXPECT_GE(t.katz[i], 0.0);
      norm += t.eigenvector[i] * t.eigenvector[i];
    }
    EXPECT_NEAR(norm, 1.0, 1e-12);
    const double gc = global_clustering(g);
    EXPECT_GE(gc, 0.0);
    EXPECT_LE(gc, 1.0);
  }
}

TEST(Property, KatzGrowsWithBeta) {
  for (std::uint64_t seed = 0; seed < kCases; ++seed) {
    Rng rng(seed + 4000);
    const HomoView g = testing::random_homo(rng, 4 + rng.below(15), 0.3);
    if (g.num_edges() == 0) continue;
    const double beta = default_katz_beta(g);
    const auto lo = katz_index(g, 0.5 * beta);
    const auto hi = katz_index(g, beta);
    for (std::size_t i = 0; i < lo.size(); ++i) EXPECT_LE(lo[i], hi[i] + 1e-12);
  }
}

TEST(Property, DegreeDistributionIsNormalised) {
  for (std::uint64_t seed = 0; seed < kCases; ++seed) {
    Rng rng(seed + 5000);
    const HomoView g = testing::random_homo(rng, 1 + rng.below(40), rng.uniform(0.0, 0.4));
    const DegreeStats s = degree_stats(g);
    EXPECT_NEAR(std::accumulate(s.pmf.begin(), s.pmf.end(), 0.0), 1.0, 1e-12);
    EXPECT_NEAR(s.mean, 2.0 * static_cast<double>(g.num_edges()) / static_cast<double>(g.num_nodes()), 1e-12);
    EXPECT_GE(s.second_moment, s.mean * s.mean - 1e-12);
  }
}

TEST(Property, StandardizedFitRowsHaveZeroMeanUnitVariance) {
  for (std::uint64_t seed = 0; seed < kCases; ++seed) {
    Rng rng(seed + 6000);
    const auto rows = static_cast<Eigen::Index>(3 + rng.below(30));
    const Matrix m = testing::random_matrix(rng, rows, 3, 10.0);
    std::vector<std::size_t> fit;
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (rng.uniform() < 0.7 || fit.size() < 2) fit.push_back(static_cast<std::size_t>(i));
    }
    const std::vector<std::size_t> cols{0, 1, 2};
    const StandardizeResult res = standardize(m, cols, fit);
    for (Eigen::Index c = 0; c < 3; ++c) {
      double mean = 0.0;
      double sq = 0.0;
      for (auto i : fit) mean += res.values(static_cast<Eigen::Index>(i), c);
      mean /= static_cast<double>(fit.size());
      for (auto i : fit) sq += std::pow(res.values(static_cast<Eigen::Index>(i), c) - mean, 2);
      EXPECT_NEAR(mean, 0.0, 1e-12);
      EXPECT_NEAR(sq / static_cast<double>(fit.size()), 1.0, 1e-12);
    }
  }
}

TEST(Property, OosFoldsAreDisjointWithinAFold) {
  for (std::uint64_t seed = 0; seed < kCases; ++seed) {
    Rng rng(seed + 7000);
    const std::size_t n = 10 + rng.below(200);
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back("K" + std::to_string(i));
    const double test_frac = rng.uniform(0.05, 0.5);
    const SplitPlan plan = oos_splits(ids, 1 + rng.below(5), test_frac, rng.uniform(0.05, 0.4), seed);
    for (const Fold& f : plan.folds) {
      EXPECT_EQ(f.test.size(), static_cast<std::size_t>(std::lround(test_frac * static_cast<double>(n))));
      EXPECT_EQ(f.train.size() + f.val.size() + f.test.size(), n);
      std::set<std::string> all(f.train.begin(), f.train.end());
      all.insert(f.val.begin(), f.val.end());
      all.insert(f.test.begin(), f.test.end());
      EXPECT_EQ(all.size(), n);
    }
  }
}

TEST(Property, R2IsAtMostOneAndMseNonNegative) {
  for (std::uint64_t seed = 0; seed < kCases; ++seed) {
    Rng rng(seed + 8000);
    const std::size_t n = 2 + rng.below(30);
    std::vector<double> p(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = rng.normal();
      y[i] = rng.normal();
    }
    EXPECT_LE(r2_score(p, y), 1.0);
    Vector pv = Eigen::Map<Vector>(p.data(), static_cast<Eigen::Index>(n));
    Vector yv = Eigen::Map<Vector>(y.data(), static_cast<Eigen::Index>(n));
    std::vector<std::size_t> mask(n);
    std::iota(mask.begin(), mask.end(), std::size_t{0});
    EXPECT_GE(mse_loss(pv, yv, mask), 0.0);
  }
}

TEST(Property, ModelOutputsFollowNodeRelabelling) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto f = testing::make_model_fixture(9000 + seed, 8 + seed, 2 + seed % 3, 1 + seed % 3, 5, 3,
                                               seed % 2 ? Activation::ReLU : Activation::ELU);
    Rng rng(seed);
    EXPECT_LT(testing::permutation_gap(f, testing::random_permutation(rng, f.graph.num_nodes())), 1e-10);
  }
}

}  // namespace
}  // namespace catnet
