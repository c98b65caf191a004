#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "catnet/rgcn.hpp"

namespace catnet {

enum class OptimizerKind { Adam, SGD };

std::string_view to_string(OptimizerKind k);
OptimizerKind parse_optimizer(std::string_view name);

class Optimizer {
 public:
  virtual ~Optimizer() = default;
  virtual void step(std::vector<Param>& params, const std::vector<Matrix>& grads) = 0;
};

class Sgd final : public Optimizer {
 public:
  explicit Sgd(double lr) : lr_(lr) {}
  void step(std::vector<Param>& params, const std::vector<Matrix>& grads) override;

 private:
  double lr_;
};

class Adam final : public Optimizer {
 public:
  explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}
  void step(std::vector<Param>& params, const std::vector<Matrix>& grads) override;
  std::size_t steps() const { return t_; }
  const std::vector<Matrix>& first_moment() const { return m_; }
  const std::vector<Matrix>& second_moment() const { return v_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  std::size_t t_ = 0;
  std::vector<Matrix> m_, v_;
};

struct TrainConfig {
  double learning_rate = 1e-2;
  OptimizerKind optimizer = OptimizerKind::Adam;
  std::size_t max_epochs = 500;
  std::size_t patience = 50;
  double dropout = 0.0;
  std::size_t hidden = 32;
  std::size_t layers = 2;
  Activation activation = Activation::ReLU;
  std::uint64_t seed = 0;
  double weight_decay = 1e-2;  // L2 term on every parameter except the head bias; not searched

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

inline constexpr double kLearningRateMin = 1e-6;
inline constexpr double kLearningRateMax = 1e-2;
inline constexpr std::size_t kHiddenChoices[] = {16, 32, 64, 128, 256};

// Throws DataError when a field is outside the hyperparameter search space.
void validate(const TrainConfig& config);

// Model sized from a training config: hidden width, depth, activation and
// dropout come from `config`, init from config.seed.
RGCNModel make_model(const TrainConfig& config, std::size_t feature_dim, std::vector<std::string> relations,
                     std::vector<std::string> entity_keys);

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  double train_mse = 0.0;
  double val_mse = 0.0;
};

struct TrainResult {
  std::vector<EpochLog> history;
  std::size_t best_epoch = 0;
  double best_val_mse = 0.0;
  bool early_stopped = false;
};

struct NodeSplit {
  std::vector<std::size_t> train;  // node indices whose targets enter the loss
  std::vector<std::size_t> val;    // early-stopping nodes; may be empty
};

// Full-batch training with early stopping on validation MSE (training MSE
// when val is empty). The config is validated first. Parameters from the best epoch are restored. Throws
// DataError on an empty training set and NumericalError on a non-finite
// gradient, naming the parameter.
TrainResult train(RGCNModel& model, const GraphInput& g, const Matrix& x, const Vector& targets,
                  const NodeSplit& split, const TrainConfig& config);

// epoch,train_mse,val_mse
std::string history_csv(const TrainResult& result);

}  // namespace catnet
