#include <benchmark/benchmark.h>

#include "catnet/features.hpp"
#include "catnet/graph_builder.hpp"
#include "catnet/synth.hpp"
#include "catnet/train.hpp"

namespace {

using namespace catnet;

struct Setup {
  ContractGraph graph;
  RGCNModel model;
  GraphInput input;
  Matrix x;
  Vector y;
  NodeSplit split;
};

Setup make_setup(std::size_t n, std::size_t hidden) {
  Setup s;
  const auto records = synth_dataset(n, 2);
  s.graph = build_graph(records);
  const EncodingConfig enc = fit_encoding(records);
  const FeatureMatrix f = attach_features(s.graph.graph, records, enc, nullptr);
  s.x = f.values;
  std::vector<std::string> keys;
  for (const Node& node : s.graph.graph.nodes()) {
    if (node.kind != NodeKind::Contract) keys.push_back(entity_key(node.kind, node.label));
  }
  TrainConfig config;
  config.hidden = hidden;
  s.model = make_model(config, f.columns.size(), relation_registry(), keys);
  s.input = bind_graph(s.graph.graph, s.model);
  s.y = Vector::Zero(static_cast<Eigen::Index>(s.graph.graph.num_nodes()));
  for (std::size_t i = 0; i < records.size(); ++i) {
    s.y(s.graph.contract_nodes[i]) = records[i].spread_premium;
    s.split.train.push_back(s.graph.contract_nodes[i]);
  }
  return s;
}

void BM_Forward(benchmark::State& state) {
  const Setup s = make_setup(803, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(forward(s.model, s.input, s.x));
}
BENCHMARK(BM_Forward)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_ForwardBackward(benchmark::State& state) {
  const Setup s = make_setup(803, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    ForwardState fs;
    const Vector pred = forward(s.model, s.input, s.x, {}, &fs);
    benchmark::DoNotOptimize(backward(s.model, s.input, s.x, fs, mse_gradient(pred, s.y, s.split.train)));
  }
}
BENCHMARK(BM_ForwardBackward)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_TrainTenEpochs(benchmark::State& state) {
  Setup s = make_setup(803, 32);
  TrainConfig config;
  config.max_epochs = 10;
  for (auto _ : state) {
    RGCNModel model = s.model;
    benchmark::DoNotOptimize(train(model, s.input, s.x, s.y, s.split, config));
  }
}
BENCHMARK(BM_TrainTenEpochs)->Unit(benchmark::kMillisecond);

}  // namespace
