#include "catnet/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "catnet/contract.hpp"
#include "catnet/error.hpp"
#include "catnet/random.hpp"

namespace catnet {

void validate(const TrainConfig& c) {
  if (!(c.learning_rate >= kLearningRateMin && c.learning_rate <= kLearningRateMax)) {
    throw DataError("learning rate must be in [1e-6, 1e-2]");
  }
  if (c.dropout < 0.0 || c.dropout > 0.5) throw DataError("dropout must be in [0, 0.5]");
  if (std::find(std::begin(kHiddenChoices), std::end(kHiddenChoices), c.hidden) == std::end(kHiddenChoices)) {
    throw DataError("hidden units must be one of 16, 32, 64, 128, 256");
  }
  if (c.layers < 1 || c.layers > 5) throw DataError("layers must be in 1..5");
  if (c.activation == Activation::Identity) throw DataError("activation must be ReLU, LeakyReLU, ELU or GELU");
  if (c.max_epochs < 1) throw DataError("max_epochs must be positive");
  if (!(c.weight_decay >= 0.0) || !std::isfinite(c.weight_decay)) throw DataError("weight_decay must be non-negative");
}

RGCNModel make_model(const TrainConfig& config, std::size_t feature_dim, std::vector<std::string> relations,
                     std::vector<std::string> entity_keys) {
  ModelConfig mc;
  mc.feature_dim = feature_dim;
  mc.hidden = config.hidden;
  mc.layers = config.layers;
  mc.activation = config.activation;
  mc.dropout = config.dropout;
  return RGCNModel(mc, std::move(relations), std::move(entity_keys), Rng::derive(config.seed, 0));
}

TrainResult train(RGCNModel& model, const GraphInput& g, const Matrix& x, const Vector& targets,
                  const NodeSplit& split, const TrainConfig& config) {
  validate(config);
  if (split.train.empty()) throw DataError("training set is empty");
  for (auto u : split.train) {
    if (u >= g.num_nodes || !std::isfinite(targets(static_cast<Eigen::Index>(u)))) {
      throw DataError("training node " + std::to_string(u) + " has no target");
    }
  }
  std::unique_ptr<Optimizer> opt;
  if (config.optimizer == OptimizerKind::Adam) {
    opt = std::make_unique<Adam>(config.learning_rate);
  } else {
    opt = std::make_unique<Sgd>(config.learning_rate);
  }

  const auto& select = split.val.empty() ? split.train : split.val;
  TrainResult result;
  result.best_val_mse = std::numeric_limits<double>::infinity();
  std::vector<Param> best = model.params();
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    ForwardOptions fo;
    fo.training = true;
    fo.dropout_seed = Rng::derive(config.seed, epoch);
    ForwardState state;
    const Vector pred = forward(model, g, x, fo, &state);
    const double train_mse = mse_loss(pred, targets, split.train);
    Gradients grads = backward(model, g, x, state, mse_gradient(pred, targets, split.train), fo);
    for (std::size_t i = 0; i < grads.params.size(); ++i) {
      if (!grads.params[i].allFinite()) {
        throw NumericalError("non-finite gradient for parameter '" + model.params()[i].name + "' at epoch " +
                             std::to_string(epoch));
      }
    }
    if (config.weight_decay > 0.0) {
      for (std::size_t i = 0; i < grads.params.size(); ++i) {
        if (i != model.head_b_index()) grads.params[i] += config.weight_decay * model.params()[i].value;
      }
    }
    opt->step(model.params(), grads.params);

    const Vector eval = forward(model, g, x);
    const double val_mse = mse_loss(eval, targets, select);
    if (!std::isfinite(val_mse)) throw NumericalError("validation loss is not finite at epoch " + std::to_string(epoch));
    result.history.push_back({epoch, train_mse, val_mse});
    if (val_mse < result.best_val_mse) {
      result.best_val_mse = val_mse;
      result.best_epoch = epoch;
      best = model.params();
      since_best = 0;
    } else if (++since_best >= config.patience) {
      result.early_stopped = true;
      break;
    }
  }
  model.params() = std::move(best);
  return result;
}

std::string history_csv(const TrainResult& result) {
  std::ostringstream out;
  out << "epoch,train_mse,val_mse\n";
  for (const auto& e : result.history) {
    out << e.epoch << ',' << format_double(e.train_mse) << ',' << format_double(e.val_mse) << '\n';
  }
  return out.str();
}

}  // namespace catnet
