#include <gtest/gtest.h>

#include "catnet/error.hpp"
#include "catnet/rgcn.hpp"
#include "test_support.hpp"

namespace catnet {
namespace {

using testing::make_model_fixture;
using testing::random_matrix;

TEST(ForwardLayer, IdentityRelationWeightIsNeighborMean) {
  Rng rng(1);
  const HeteroGraph g = testing::random_hetero(rng, 8, 1, 0.4);
  const std::vector<std::string> rel{g.relation_label(0)};
  const GraphInput in = bind_graph(g, rel);
  const Matrix h = random_matrix(rng, 8, 3, 1.0);
  const std::vector<Matrix> bases{Matrix::Identity(3, 3)};
  const Matrix coeff = Matrix::Ones(1, 1);
  const Matrix self = Matrix::Zero(3, 3);
  const Matrix out = forward_layer(h, in, LayerWeights{bases, coeff, self}, Activation::Identity);
  for (NodeId u = 0; u < 8; ++u) {
    const auto nb = g.neighbors(u, 0);
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(3);
    for (NodeId v : nb) mean += h.row(v) / static_cast<double>(nb.size());
    EXPECT_TRUE(out.row(u).isApprox(mean, 1e-12) || (nb.empty() && out.row(u).isZero(1e-15)));
  }
}

TEST(ForwardLayer, ZeroWeightsGiveZeros) {
  Rng rng(2);
  const HeteroGraph g = testing::random_hetero(rng, 8, 2, 0.5);
  const std::vector<std::string> rel(g.relations().begin(), g.relations().end());
  const GraphInput in = bind_graph(g, rel);
  const std::vector<Matrix> bases{Matrix::Zero(3, 3), Matrix::Zero(3, 3)};
  const Matrix coeff = random_matrix(rng, 2, 2, 1.0);
  const Matrix self = Matrix::Zero(3, 3);
  const Matrix out = forward_layer(random_matrix(rng, 8, 3, 5.0), in, LayerWeights{bases, coeff, self}, Activation::ELU);
  EXPECT_TRUE(out.isZero(0.0));
}

TEST(ForwardLayer, SingleBasisEqualsUntiedDenseGcn) {
  Rng rng(3);
  const HeteroGraph g = testing::random_hetero(rng, 8, 3, 0.5);
  const std::vector<std::string> rel(g.relations().begin(), g.relations().end());
  const GraphInput in = bind_graph(g, rel);
  const Matrix h = random_matrix(rng, 8, 4, 1.0);
  const Matrix w = random_matrix(rng, 4, 5, 1.0);
  const Matrix self = random_matrix(rng, 4, 5, 1.0);
  const std::vector<Matrix> bases{w};
  const Matrix coeff = Matrix::Ones(3, 1);
  const Matrix out = forward_layer(h, in, LayerWeights{bases, coeff, self}, Activation::Identity);

  Matrix expected = h * self;
  for (RelationId r = 0; r < 3; ++r) {
    Matrix norm_adj = Matrix::Zero(8, 8);
    for (NodeId u = 0; u < 8; ++u) {
      const auto nb = g.neighbors(u, r);
      for (NodeId v : nb) norm_adj(u, v) = 1.0 / static_cast<double>(nb.size());
    }
    expected += norm_adj * h * w;
  }
  EXPECT_LT((out - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ForwardLayer, ShapeMismatchThrows) {
  Rng rng(4);
  const HeteroGraph g = testing::random_hetero(rng, 5, 1, 0.5);
  const std::vector<std::string> rel{g.relation_label(0)};
  const GraphInput in = bind_graph(g, rel);
  const std::vector<Matrix> bases{Matrix::Zero(3, 3)};
  const Matrix coeff = Matrix::Ones(1, 1);
  const Matrix self = Matrix::Zero(3, 3);
  EXPECT_THROW(forward_layer(Matrix::Zero(5, 2), in, LayerWeights{bases, coeff, self}, Activation::ReLU), DataError);
  EXPECT_THROW(forward_layer(Matrix::Zero(4, 3), in, LayerWeights{bases, coeff, self}, Activation::ReLU), DataError);
}

TEST(Forward, ZeroLayersIsLinearInProjectedFeatures) {
  auto f = make_model_fixture(5, 10, 3, 0);
  const Vector pred = forward(f.model, f.input, f.x);
  const Matrix& proj = f.model.param("proj").value;
  const Matrix& embed = f.model.param("embed").value;
  const Matrix& hw = f.model.param("head.w").value;
  const double hb = f.model.param("head.b").value(0, 0);
  for (std::size_t u = 0; u < f.input.num_nodes; ++u) {
    Eigen::RowVectorXd h = f.x.row(static_cast<Eigen::Index>(u)) * proj;
    if (f.input.embedding_row[u] >= 0) h += embed.row(f.input.embedding_row[u]);
    EXPECT_NEAR(pred(static_cast<Eigen::Index>(u)), (h * hw)(0, 0) + hb, 1e-12);
  }
}

TEST(Forward, EvalModeIsDeterministicAndIgnoresDropout) {
  auto f = make_model_fixture(6);
  ModelConfig c = f.model.config();
  c.dropout = 0.4;
  RGCNModel m = RGCNModel::from_parts(c, f.model.relations(), f.model.entity_keys(), f.model.num_bases(),
                                      f.model.params());
  const Vector a = forward(m, f.input, f.x);
  const Vector b = forward(m, f.input, f.x);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, forward(f.model, f.input, f.x));
  ForwardOptions train;
  train.training = true;
  train.dropout_seed = 9;
  EXPECT_NE(forward(m, f.input, f.x, train), a);
  EXPECT_EQ(forward(m, f.input, f.x, train), forward(m, f.input, f.x, train));
}

TEST(Forward, UnitMasksChangeNothing) {
  auto f = make_model_fixture(7);
  const std::vector<double> edges(f.input.edges.size(), 1.0);
  const std::vector<double> feats(f.model.config().feature_dim, 1.0);
  ForwardOptions opt;
  opt.edge_weight = &edges;
  opt.feature_weight = &feats;
  EXPECT_LT((forward(f.model, f.input, f.x, opt) - forward(f.model, f.input, f.x)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Forward, RelabellingNodesPermutesOutputs) {
  auto f = make_model_fixture(8, 12, 3, 2, 6);
  Rng rng(80);
  for (int t = 0; t < 10; ++t) {
    EXPECT_LT(testing::permutation_gap(f, testing::random_permutation(rng, 12)), 1e-10);
  }
}

TEST(Backward, MatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto f = make_model_fixture(100 + seed);
    EXPECT_LT(testing::gradient_check(f, 100, seed), 1e-5) << "seed " << seed;
  }
}

TEST(Backward, MaskGradientsMatchFiniteDifferences) {
  auto f = make_model_fixture(11);
  Rng rng(12);
  std::vector<double> edges(f.input.edges.size());
  for (auto& e : edges) e = rng.uniform(0.2, 1.0);
  std::vector<double> feats(f.model.config().feature_dim);
  for (auto& v : feats) v = rng.uniform(0.2, 1.0);
  ForwardOptions opt;
  opt.edge_weight = &edges;
  opt.feature_weight = &feats;
  Vector w = Vector::Zero(static_cast<Eigen::Index>(f.input.num_nodes));
  w(0) = 1.0;
  ForwardState state;
  forward(f.model, f.input, f.x, opt, &state);
  const Gradients g = backward(f.model, f.input, f.x, state, w, opt);
  auto loss = [&] { return forward(f.model, f.input, f.x, opt)(0); };
  const double eps = 1e-6;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const double saved = edges[e];
    edges[e] = saved + eps;
    const double up = loss();
    edges[e] = saved - eps;
    const double down = loss();
    edges[e] = saved;
    EXPECT_NEAR(g.edge_weight[e], (up - down) / (2 * eps), 1e-6);
  }
  for (std::size_t j = 0; j < feats.size(); ++j) {
    const double saved = feats[j];
    feats[j] = saved + eps;
    const double up = loss();
    feats[j] = saved - eps;
    const double down = loss();
    feats[j] = saved;
    EXPECT_NEAR(g.feature_weight[j], (up - down) / (2 * eps), 1e-6);
  }
}

TEST(Backward, ZeroLossGivesZeroHeadGradient) {
  auto f = make_model_fixture(13);
  ForwardState state;
  const Vector pred = forward(f.model, f.input, f.x, {}, &state);
  const std::vector<std::size_t> mask{0, 1, 2};
  const Vector d = mse_gradient(pred, pred, mask);
  const Gradients g = backward(f.model, f.input, f.x, state, d);
  EXPECT_TRUE(g.params[f.model.head_w_index()].isZero(0.0));
  EXPECT_EQ(g.params[f.model.head_b_index()](0, 0), 0.0);
}

TEST(Backward, UnusedRelationHasZeroCoefficientGradient) {
  Rng rng(14);
  HeteroGraph g;
  g.add_relation("a");
  g.add_relation("b");
  for (int i = 0; i < 6; ++i) g.add_node(i == 0 ? NodeKind::Contract : NodeKind::Peril, "p" + std::to_string(i));
  for (NodeId v = 1; v < 6; ++v) g.add_edge(v - 1, 0, v);
  g.freeze();
  ModelConfig c;
  c.feature_dim = 2;
  c.hidden = 3;
  c.layers = 2;
  c.num_bases = 2;
  c.activation = Activation::GELU;
  RGCNModel model(c, {"a", "b", "unused"}, testing::entity_keys_of(g), 3);
  for (Param& p : model.params()) p.value = random_matrix(rng, p.value.rows(), p.value.cols(), 0.7);
  const GraphInput in = bind_graph(g, model);
  const Matrix x = random_matrix(rng, 6, 2, 1.0);
  ForwardState state;
  forward(model, in, x, {}, &state);
  const Gradients grads = backward(model, in, x, state, Vector::Ones(6));
  for (std::size_t k = 0; k < 2; ++k) {
    const Matrix& gc = grads.params[model.coeff_index(k)];
    EXPECT_TRUE(gc.row(1).isZero(0.0));
    EXPECT_TRUE(gc.row(2).isZero(0.0));
    EXPECT_FALSE(gc.row(0).isZero(0.0));
  }
}

TEST(Loss, MseHandCases) {
  Vector pred(2), target(2);
  pred << 1, 0;
  target << 0, 2;
  const std::vector<std::size_t> all{0, 1};
  EXPECT_DOUBLE_EQ(mse_loss(pred, target, all), 2.5);
  EXPECT_DOUBLE_EQ(mse_loss(target, target, all), 0.0);
  Vector shifted = target.array() + 0.3;
  EXPECT_NEAR(mse_loss(shifted, target, all), 0.09, 1e-15);
  EXPECT_THROW(mse_loss(pred, target, std::vector<std::size_t>{}), DataError);
}

TEST(Loss, R2HandCases) {
  const std::vector<double> target{-1, 1};
  EXPECT_DOUBLE_EQ(r2_score(std::vector<double>{0, 0}, target), 0.0);
  EXPECT_DOUBLE_EQ(r2_score(target, target), 1.0);
  const std::vector<double> t3{1, 2, 6};
  EXPECT_DOUBLE_EQ(r2_score(std::vector<double>{3, 3, 3}, t3), 0.0);
  EXPECT_THROW(r2_score(std::vector<double>{1, 1}, std::vector<double>{2, 2}), DataError);
}

TEST(Model, ParameterCountMatchesLayout) {
  auto f = make_model_fixture(15, 10, 3, 2, 4, 3);
  std::size_t total = 0;
  for (const Param& p : f.model.params()) total += static_cast<std::size_t>(p.value.size());
  EXPECT_EQ(total, f.model.parameter_count());
  EXPECT_EQ(RGCNModel::layer_parameter_count(2, 3, 4, 4), 2u * 16 + 3 * 2 + 16);
}

TEST(Model, UnknownEntityIsRejectedAtBinding) {
  auto f = make_model_fixture(16);
  RGCNModel other(f.model.config(), f.model.relations(), {}, 1);
  bool has_entity = false;
  for (const Node& n : f.graph.nodes()) has_entity |= n.kind != NodeKind::Contract;
  if (has_entity) {
    EXPECT_THROW(bind_graph(f.graph, other), DataError);
  }
  RGCNModel fewer(f.model.config(), {"rel0"}, f.model.entity_keys(), 1);
  EXPECT_THROW(bind_graph(f.graph, fewer), DataError);
}

TEST(Activation, NamesRoundTrip) {
  for (Activation a : {Activation::ReLU, Activation::LeakyReLU, Activation::ELU, Activation::GELU, Activation::Identity}) {
    EXPECT_EQ(parse_activation(to_string(a)), a);
  }
  EXPECT_THROW(parse_activation("tanh"), DataError);
}

}  // namespace
}  // namespace catnet
