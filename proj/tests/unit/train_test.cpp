#include <gtest/gtest.h>

#include <cmath>

#include "catnet/checkpoint.hpp"
#include "catnet/error.hpp"
#include "catnet/train.hpp"
#include "test_support.hpp"

namespace catnet {
namespace {

struct TwinGraph {
  HeteroGraph graph;
  RGCNModel model;
  GraphInput input;
  Matrix x;
};

// Two isolated contract nodes with identical features.
TwinGraph twin_graph(const TrainConfig& config) {
  TwinGraph t;
  t.graph.add_relation("r");
  t.graph.add_node(NodeKind::Contract, "A");
  t.graph.add_node(NodeKind::Contract, "B");
  t.graph.freeze();
  t.model = make_model(config, 2, {"r"}, {});
  t.input = bind_graph(t.graph, t.model);
  t.x = Matrix::Ones(2, 2);
  return t;
}

TEST(Train, EarlyStopsWhenValidationOnlyWorsens) {
  TrainConfig config;
  config.patience = 10;
  config.max_epochs = 300;
  config.hidden = 16;
  config.layers = 1;
  config.seed = 4;
  TwinGraph t = twin_graph(config);
  Vector y(2);
  y << 1.0, -1.0;
  const TrainResult res = train(t.model, t.input, t.x, y, NodeSplit{{0}, {1}}, config);
  EXPECT_TRUE(res.early_stopped);
  EXPECT_LE(res.history.size(), res.best_epoch + 11);
  EXPECT_EQ(res.history.size(), res.best_epoch + config.patience);
  double best = res.history[res.best_epoch - 1].val_mse;
  EXPECT_DOUBLE_EQ(best, res.best_val_mse);
  for (const auto& e : res.history) EXPECT_GE(e.val_mse, best);
}

TEST(Train, RestoresBestParameters) {
  TrainConfig config;
  config.patience = 5;
  config.max_epochs = 100;
  config.hidden = 16;
  config.layers = 1;
  config.seed = 5;
  TwinGraph t = twin_graph(config);
  Vector y(2);
  y << 1.0, -1.0;
  const TrainResult res = train(t.model, t.input, t.x, y, NodeSplit{{0}, {1}}, config);
  const Vector pred = forward(t.model, t.input, t.x);
  const std::vector<std::size_t> val{1};
  EXPECT_NEAR(mse_loss(pred, y, val), res.best_val_mse, 1e-12);
}

TEST(Train, SameSeedGivesIdenticalHistory) {
  auto run = [] {
    auto f = testing::make_model_fixture(21, 12, 3, 2, 8, 3);
    TrainConfig config;
    config.max_epochs = 40;
    config.dropout = 0.2;
    config.seed = 8;
    Rng rng(3);
    const Vector y = testing::random_matrix(rng, 12, 1, 1.0).col(0);
    return history_csv(train(f.model, f.input, f.x, y, NodeSplit{{0, 1, 2, 3, 4, 5, 6}, {7, 8, 9}}, config));
  };
  EXPECT_EQ(run(), run());
}

TEST(Train, LossGoesDownOnALearnableTarget) {
  auto f = testing::make_model_fixture(22, 12, 3, 2, 16, 3);
  Vector y = f.x.col(0) * 0.5 - f.x.col(2);
  TrainConfig config;
  config.max_epochs = 300;
  config.weight_decay = 0.0;
  std::vector<std::size_t> all(12);
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const TrainResult res = train(f.model, f.input, f.x, y, NodeSplit{all, {}}, config);
  EXPECT_LT(res.history.back().train_mse, 0.1 * res.history.front().train_mse);
}

TEST(Train, RejectsBadInput) {
  auto f = testing::make_model_fixture(23);
  const Vector y = Vector::Zero(10);
  TrainConfig config;
  EXPECT_THROW(train(f.model, f.input, f.x, y, NodeSplit{{}, {}}, config), DataError);
  config.learning_rate = 0.5;
  EXPECT_THROW(train(f.model, f.input, f.x, y, NodeSplit{{0}, {}}, config), DataError);
  config.learning_rate = 1e-3;
  config.weight_decay = -1.0;
  EXPECT_THROW(validate(config), DataError);
  config.weight_decay = 0.0;
  config.hidden = 17;
  EXPECT_THROW(validate(config), DataError);
  config.hidden = 16;
  config.layers = 6;
  EXPECT_THROW(validate(config), DataError);
  config.layers = 1;
  config.dropout = 0.6;
  EXPECT_THROW(validate(config), DataError);
  config.dropout = 0.5;
  EXPECT_NO_THROW(validate(config));
}

TEST(Train, NonFiniteTargetIsANumericalError) {
  auto f = testing::make_model_fixture(24);
  Vector y = Vector::Zero(10);
  y(0) = std::numeric_limits<double>::infinity();
  TrainConfig config;
  config.max_epochs = 3;
  EXPECT_THROW(train(f.model, f.input, f.x, y, NodeSplit{{0}, {}}, config), Error);
}

TEST(Optimizer, SgdStep) {
  std::vector<Param> params{{"w", Matrix::Constant(1, 2, 1.0)}};
  const std::vector<Matrix> grads{(Matrix(1, 2) << 2.0, -4.0).finished()};
  Sgd(0.1).step(params, grads);
  EXPECT_DOUBLE_EQ(params[0].value(0, 0), 0.8);
  EXPECT_DOUBLE_EQ(params[0].value(0, 1), 1.4);
}

TEST(Optimizer, AdamFirstStepIsLearningRateTimesSign) {
  std::vector<Param> params{{"w", Matrix::Zero(1, 3)}};
  const std::vector<Matrix> grads{(Matrix(1, 3) << 5.0, -0.01, 0.0).finished()};
  Adam adam(0.01);
  adam.step(params, grads);
  EXPECT_NEAR(params[0].value(0, 0), -0.01, 1e-8);
  EXPECT_NEAR(params[0].value(0, 1), 0.01, 1e-6);
  EXPECT_EQ(params[0].value(0, 2), 0.0);
  EXPECT_EQ(adam.steps(), 1u);
}

TEST(Optimizer, NamesRoundTrip) {
  EXPECT_EQ(parse_optimizer(to_string(OptimizerKind::Adam)), OptimizerKind::Adam);
  EXPECT_EQ(parse_optimizer(to_string(OptimizerKind::SGD)), OptimizerKind::SGD);
  EXPECT_THROW(parse_optimizer("rmsprop"), DataError);
}

TEST(Checkpoint, Base64RoundTripIsBitExact) {
  const std::vector<double> values{0.0, -0.0, 1.0 / 3.0, 1e-308, -2.5e300,
                                   std::numeric_limits<double>::denorm_min()};
  const auto back = decode_doubles(encode_doubles(values));
  ASSERT_EQ(back.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    EXPECT_EQ(std::signbit(back[i]), std::signbit(values[i]));
    EXPECT_EQ(back[i], values[i]);
  }
  EXPECT_EQ(encode_doubles(std::vector<double>{1.0}), "AAAAAAAA8D8=");
  EXPECT_THROW(decode_doubles("abc"), DataError);
}

TEST(Checkpoint, SaveLoadSaveIsStable) {
  auto f = testing::make_model_fixture(25);
  TrainConfig config;
  config.hidden = 4;
  config.layers = 2;
  config.activation = Activation::GELU;
  ModelBundle bundle{f.model, config, {"a", "b", "c"}, EncodingConfig{}, true, 0.05, 0.02};
  const std::string text = save_checkpoint(bundle);
  const ModelBundle back = load_checkpoint(text);
  EXPECT_EQ(save_checkpoint(back), text);
  EXPECT_EQ(forward(back.model, f.input, f.x), forward(f.model, f.input, f.x));
  EXPECT_EQ(back.train_config, bundle.train_config);
  EXPECT_THROW(load_checkpoint("{\"version\":2}"), DataError);
  EXPECT_THROW(load_checkpoint("not json"), DataError);
}

}  // namespace
}  // namespace catnet
