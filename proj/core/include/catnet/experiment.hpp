#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "catnet/contract.hpp"
#include "catnet/splits.hpp"
#include "catnet/train.hpp"

namespace catnet {

enum class Arm { WithTopo, WithoutTopo, BaselineLinear };

std::string_view to_string(Arm a);
// Accepts with_topo, without_topo, baseline_linear and the short form baseline.
Arm parse_arm(std::string_view name);
std::vector<Arm> parse_arms(std::string_view comma_list);

struct ExperimentConfig {
  TrainConfig train;
  std::vector<Arm> arms{Arm::WithTopo, Arm::WithoutTopo, Arm::BaselineLinear};
  double ridge_lambda = 1.0;
  bool shuffle_targets = false;  // null-signal control
  unsigned workers = 1;
};

struct Prediction {
  std::string contract_id;
  double y = 0.0;
  double y_hat = 0.0;
};

struct ArmResult {
  Arm arm = Arm::WithTopo;
  std::optional<double> r2;
  std::optional<double> val_mse;  // standardized units; R-GCN arms only
  std::size_t best_epoch = 0;
  std::size_t epochs_run = 0;
  std::string error;
  std::vector<Prediction> predictions;
};

struct LeakageAudit {
  bool passed = true;
  std::vector<std::string> failures;
};

struct FoldResult {
  std::size_t fold = 0;
  std::optional<int> test_year;
  std::size_t n_train = 0;
  std::size_t n_val = 0;
  std::size_t n_test = 0;  // scored test contracts
  std::vector<std::string> new_entity;  // OOT test contracts flagged and skipped
  LeakageAudit audit;
  std::vector<ArmResult> arms;
  std::string error;
};

struct ArmSummary {
  Arm arm = Arm::WithTopo;
  std::optional<double> mean_r2;  // over folds with a defined R^2
  std::size_t folds = 0;
};

struct TrialLog {
  std::size_t trial = 0;
  TrainConfig config;
  std::optional<double> best_val_loss;
  std::optional<double> test_r2;
  std::size_t best_epoch = 0;
  std::string error;
};

struct ExperimentReport {
  SplitKind mode = SplitKind::OOS;
  std::uint64_t seed = 0;
  ExperimentConfig config;
  std::vector<FoldResult> folds;
  std::vector<ArmSummary> summary;
  std::vector<TrialLog> trials;  // filled when a search preceded the run
  bool partial = false;
  std::string environment;
};

// Trains one model per (fold, arm) and reports per-fold and mean test R^2.
// OOS folds see the full graph (only train targets enter the loss, topology
// on the full graph). OOT folds train on the graph of earlier years and score
// the test year semi-inductively; test contracts touching an entity unseen in
// training are flagged as new-entity and skipped. Fold failures are recorded
// and mark the report partial.
ExperimentReport run_ablation(std::span<const ContractRecord> records, const SplitPlan& plan,
                              const ExperimentConfig& config);

// Mean of the defined values in fold order.
std::optional<double> mean_defined(std::span<const std::optional<double>> values);

std::string to_json(const ExperimentReport& report);
// contract_id,y,y_hat
std::string predictions_csv(const ArmResult& arm);

// Compiler and library stamp recorded in reports.
std::string environment_stamp();

}  // namespace catnet
