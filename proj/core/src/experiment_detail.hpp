#pragma once

#include <optional>
#include <string>
#include <vector>

#include "catnet/experiment.hpp"
#include "catnet/features.hpp"
#include "catnet/graph_builder.hpp"
#include "catnet/rgcn.hpp"

namespace catnet::detail {

// Full-graph inputs shared by every OOS fold.
struct SharedGraph {
  ContractGraph graph;
  TopoFeatures topo;
};

SharedGraph make_shared_graph(std::span<const ContractRecord> records, unsigned workers);

// Everything one (fold, arm) training run needs, fitted on the fold's
// training data only.
struct PreparedFold {
  std::vector<std::string> entity_keys;
  GraphInput train_graph;
  Matrix x_train_topo;
  Matrix x_train_plain;
  Vector targets;  // standardized; NaN outside train and val
  NodeSplit split;
  bool separate_inference = false;  // OOT: score on a graph with the test contracts attached
  GraphInput infer_graph;
  Matrix x_infer_topo;
  Matrix x_infer_plain;
  std::vector<std::size_t> test_nodes;  // in the inference graph
  std::vector<std::string> test_ids;
  std::vector<double> test_y;
  double y_mean = 0.0;
  double y_std = 1.0;
  std::vector<ContractRecord> tabular_train;  // train and val records
  std::vector<ContractRecord> tabular_test;   // scored test records
  FoldResult info;                            // counts, flags, audit
};

PreparedFold prepare_fold(std::span<const ContractRecord> records, const SplitPlan& plan, std::size_t fold,
                          const SharedGraph* shared);

ArmResult run_arm(const PreparedFold& prepared, Arm arm, const ExperimentConfig& config, std::uint64_t seed);

std::vector<ContractRecord> maybe_shuffle_targets(std::span<const ContractRecord> records, bool shuffle,
                                                  std::uint64_t seed);

}  // namespace catnet::detail
