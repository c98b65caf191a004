#include "catnet/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "catnet/error.hpp"
#include "catnet/features.hpp"
#include "catnet/random.hpp"
#include "catnet/topology.hpp"

namespace catnet {

FittedModel fit_model(std::span<const ContractRecord> records, const TrainConfig& config, bool use_topo,
                      double val_frac, unsigned workers) {
  validate(config);
  if (records.size() < 2) throw DataError("training needs at least 2 contracts");
  if (!(val_frac >= 0.0 && val_frac < 1.0)) throw DataError("val_frac must lie in [0, 1)");

  FittedModel out;
  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(Rng::derive(config.seed, 0x7a1));
  rng.shuffle(order.begin(), order.end());
  const auto n_val = static_cast<std::size_t>(std::llround(val_frac * static_cast<double>(records.size())));
  out.val_rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  out.train_rows.assign(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
  std::sort(out.val_rows.begin(), out.val_rows.end());
  std::sort(out.train_rows.begin(), out.train_rows.end());

  std::vector<ContractRecord> train_records;
  for (auto i : out.train_rows) train_records.push_back(records[i]);
  const EncodingConfig encoding = fit_encoding(train_records);
  double mean = 0.0;
  for (const auto& r : train_records) mean += r.spread_premium;
  mean /= static_cast<double>(train_records.size());
  double var = 0.0;
  for (const auto& r : train_records) var += (r.spread_premium - mean) * (r.spread_premium - mean);
  double sd = std::sqrt(var / static_cast<double>(train_records.size()));
  if (!(sd > 0.0)) sd = 1.0;

  const ContractGraph cg = build_graph(records);
  std::vector<std::string> keys;
  for (const Node& node : cg.graph.nodes()) {
    if (node.kind != NodeKind::Contract) keys.push_back(entity_key(node.kind, node.label));
  }
  std::optional<TopoFeatures> topo;
  if (use_topo) topo = entity_topo_features(cg.graph, workers);
  const FeatureMatrix features = attach_features(cg.graph, records, encoding, topo ? &*topo : nullptr);

  RGCNModel model = make_model(config, features.columns.size(), relation_registry(), keys);
  const GraphInput input = bind_graph(cg.graph, model);
  Vector targets = Vector::Constant(static_cast<Eigen::Index>(cg.graph.num_nodes()),
                                    std::numeric_limits<double>::quiet_NaN());
  NodeSplit split;
  for (auto i : out.train_rows) {
    const NodeId u = cg.contract_nodes[i];
    targets(u) = (records[i].spread_premium - mean) / sd;
    split.train.push_back(u);
  }
  for (auto i : out.val_rows) {
    const NodeId u = cg.contract_nodes[i];
    targets(u) = (records[i].spread_premium - mean) / sd;
    split.val.push_back(u);
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.val.begin(), split.val.end());
  out.result = train(model, input, features.values, targets, split, config);

  out.bundle.model = std::move(model);
  out.bundle.train_config = config;
  out.bundle.feature_columns = features.columns;
  out.bundle.encoding = encoding;
  out.bundle.use_topo = use_topo;
  out.bundle.target_mean = mean;
  out.bundle.target_std = sd;
  return out;
}

ModelInputs model_inputs(std::span<const ContractRecord> records, const ModelBundle& bundle, unsigned workers) {
  ModelInputs in;
  in.graph = build_graph(records);
  std::optional<TopoFeatures> topo;
  if (bundle.use_topo) topo = entity_topo_features(in.graph.graph, workers);
  FeatureMatrix features = attach_features(in.graph.graph, records, bundle.encoding, topo ? &*topo : nullptr);
  if (features.columns != bundle.feature_columns) {
    throw DataError("feature columns differ from those the model was trained with");
  }
  in.input = bind_graph(in.graph.graph, bundle.model);
  in.x = std::move(features.values);
  in.feature_names = std::move(features.columns);
  return in;
}

std::vector<double> predict_spreads(const ModelBundle& bundle, const ModelInputs& inputs) {
  const Vector z = forward(bundle.model, inputs.input, inputs.x);
  std::vector<double> out;
  out.reserve(inputs.graph.contract_nodes.size());
  for (NodeId u : inputs.graph.contract_nodes) {
    out.push_back(z(static_cast<Eigen::Index>(u)) * bundle.target_std + bundle.target_mean);
  }
  return out;
}

}  // namespace catnet
