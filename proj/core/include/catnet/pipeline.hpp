#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "catnet/checkpoint.hpp"
#include "catnet/contract.hpp"
#include "catnet/graph_builder.hpp"
#include "catnet/rgcn.hpp"
#include "catnet/train.hpp"

namespace catnet {

struct FittedModel {
  ModelBundle bundle;
  TrainResult result;
  std::vector<std::size_t> train_rows;  // record indices in the loss
  std::vector<std::size_t> val_rows;    // record indices used for early stopping
};

// Trains one R-GCN on the full graph of `records`. A seeded val_frac share of
// contracts is held out for early stopping; the encoder and target scaler
// are fitted on the remaining contracts.
FittedModel fit_model(std::span<const ContractRecord> records, const TrainConfig& config, bool use_topo,
                      double val_frac, unsigned workers = 1);

struct ModelInputs {
  ContractGraph graph;
  GraphInput input;
  Matrix x;
  std::vector<std::string> feature_names;
};

// Graph, binding and features for a saved model applied to `records`.
// Throws DataError if an entity has no embedding or the feature columns
// differ from the ones the model was trained with.
ModelInputs model_inputs(std::span<const ContractRecord> records, const ModelBundle& bundle, unsigned workers = 1);

// Spread predictions in record order.
std::vector<double> predict_spreads(const ModelBundle& bundle, const ModelInputs& inputs);

}  // namespace catnet
