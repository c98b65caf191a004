#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "catnet/contract.hpp"
#include "catnet/experiment.hpp"
#include "catnet/random.hpp"
#include "catnet/splits.hpp"
#include "catnet/train.hpp"

namespace catnet {

// R-GCN hyperparameter space. Learning rate is log-uniform, dropout uniform,
// the rest uniform over the listed choices.
struct SearchSpace {
  double lr_min = kLearningRateMin;
  double lr_max = kLearningRateMax;
  std::vector<std::size_t> hidden{16, 32, 64, 128, 256};
  double dropout_min = 0.0;
  double dropout_max = 0.5;
  std::vector<OptimizerKind> optimizers{OptimizerKind::Adam, OptimizerKind::SGD};
  std::vector<Activation> activations{Activation::ReLU, Activation::LeakyReLU, Activation::ELU, Activation::GELU};
  std::size_t layers_min = 1;
  std::size_t layers_max = 5;
};

// Draws one config; epochs, patience and seed are taken from `base`.
TrainConfig sample_config(const SearchSpace& space, Rng& rng, const TrainConfig& base);

struct SearchResult {
  std::vector<TrialLog> trials;       // in trial order
  std::vector<std::size_t> ranking;   // trial indices by best validation loss; failed trials last
  std::optional<TrainConfig> best;
};

// Trains the with_topo arm of fold 0 of `plan` once per sampled config.
// Trial i samples from Rng(derive(seed, i)) and trains with seed
// derive(seed, i), so the sequence does not depend on the worker count.
SearchResult random_search(std::span<const ContractRecord> records, const SplitPlan& plan, const SearchSpace& space,
                           std::size_t n_trials, std::uint64_t seed, const ExperimentConfig& base);

std::string to_json(const SearchResult& result);

}  // namespace catnet
