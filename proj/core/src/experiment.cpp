#include "catnet/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <Eigen/Core>
#include <json.hpp>

#include "catnet/error.hpp"
#include "catnet/parallel.hpp"
#include "catnet/random.hpp"
#include "catnet/ridge.hpp"
#include "catnet/topology.hpp"
#include "experiment_detail.hpp"

namespace catnet {

namespace {

using nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::unordered_map<std::string, std::size_t> index_by_id(std::span<const ContractRecord> records) {
  std::unordered_map<std::string, std::size_t> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!out.emplace(records[i].contract_id, i).second) {
      throw DataError("duplicate contract_id '" + records[i].contract_id + "'");
    }
  }
  return out;
}

std::vector<ContractRecord> select(std::span<const ContractRecord> records,
                                   const std::unordered_map<std::string, std::size_t>& index,
                                   std::span<const std::string> ids) {
  std::vector<ContractRecord> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    auto it = index.find(id);
    if (it == index.end()) throw DataError("split references unknown contract '" + id + "'");
    out.push_back(records[it->second]);
  }
  return out;
}

std::pair<double, double> target_moments(std::span<const ContractRecord> train) {
  double mean = 0.0;
  for (const auto& r : train) mean += r.spread_premium;
  mean /= static_cast<double>(train.size());
  double var = 0.0;
  for (const auto& r : train) var += (r.spread_premium - mean) * (r.spread_premium - mean);
  const double sd = std::sqrt(var / static_cast<double>(train.size()));
  return {mean, sd > 0.0 ? sd : 1.0};
}

std::vector<std::string> entity_keys_of(const HeteroGraph& g) {
  std::vector<std::string> keys;
  for (const Node& node : g.nodes()) {
    if (node.kind != NodeKind::Contract) keys.push_back(entity_key(node.kind, node.label));
  }
  return keys;
}

std::unordered_map<std::string, NodeId> contract_nodes_by_id(const HeteroGraph& g) {
  std::unordered_map<std::string, NodeId> out;
  for (const Node& node : g.nodes()) {
    if (node.kind == NodeKind::Contract) out.emplace(node.label, node.id);
  }
  return out;
}

// Embedding rows indexed by position in `keys`, so graphs built from
// different record sets share one embedding table.
GraphInput bind_with_keys(const HeteroGraph& g, const std::vector<std::string>& keys) {
  GraphInput in = bind_graph(g, relation_registry());
  std::unordered_map<std::string, std::int64_t> rows;
  for (std::size_t i = 0; i < keys.size(); ++i) rows.emplace(keys[i], static_cast<std::int64_t>(i));
  for (const Node& node : g.nodes()) {
    if (node.kind == NodeKind::Contract) continue;
    auto it = rows.find(entity_key(node.kind, node.label));
    if (it == rows.end()) throw DataError("entity '" + entity_key(node.kind, node.label) + "' has no embedding");
    in.embedding_row[node.id] = it->second;
  }
  return in;
}

// Topology rows for `target` copied by entity key from a graph whose
// topology is known.
TopoFeatures transfer_topo(const HeteroGraph& source, const TopoFeatures& topo, const HeteroGraph& target) {
  TopoFeatures out{Matrix::Zero(static_cast<Eigen::Index>(target.num_nodes()),
                                static_cast<Eigen::Index>(kTopoFeatureCount))};
  for (const Node& node : target.nodes()) {
    if (node.kind == NodeKind::Contract) continue;
    const auto from = source.find_node(node.kind, node.label);
    if (!from) throw DataError("entity '" + entity_key(node.kind, node.label) + "' missing from the training graph");
    out.values.row(node.id) = topo.values.row(*from);
  }
  return out;
}

bool topo_rows_equal(const HeteroGraph& a, const TopoFeatures& ta, const HeteroGraph& b, const TopoFeatures& tb) {
  for (const Node& node : b.nodes()) {
    if (node.kind == NodeKind::Contract) continue;
    const auto other = a.find_node(node.kind, node.label);
    if (!other || ta.values.row(*other) != tb.values.row(node.id)) return false;
  }
  return true;
}

void fill_targets(Vector& targets, const std::unordered_map<std::string, NodeId>& nodes,
                  std::span<const ContractRecord> recs, double mean, double sd, std::vector<std::size_t>& out) {
  for (const auto& r : recs) {
    const NodeId u = nodes.at(r.contract_id);
    targets(u) = (r.spread_premium - mean) / sd;
    out.push_back(u);
  }
  std::sort(out.begin(), out.end());
}

std::optional<double> safe_r2(const std::vector<double>& pred, const std::vector<double>& y, std::string& error) {
  try {
    return r2_score(pred, y);
  } catch (const DataError& e) {
    error = e.what();
    return std::nullopt;
  }
}

ordered_json optional_number(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json config_json(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate}, {"optimizer", std::string(to_string(c.optimizer))},
          {"max_epochs", c.max_epochs},       {"patience", c.patience},
          {"dropout", c.dropout},             {"hidden", c.hidden},
          {"layers", c.layers},               {"activation", std::string(to_string(c.activation))},
          {"seed", c.seed},                   {"weight_decay", c.weight_decay}};
}

}  // namespace

namespace detail {

std::vector<ContractRecord> maybe_shuffle_targets(std::span<const ContractRecord> records, bool shuffle,
                                                  std::uint64_t seed) {
  std::vector<ContractRecord> out(records.begin(), records.end());
  if (!shuffle) return out;
  std::vector<double> y;
  for (const auto& r : out) y.push_back(r.spread_premium);
  Rng rng(Rng::derive(seed, 0x5eed));
  rng.shuffle(y.begin(), y.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i].spread_premium = y[i];
  return out;
}

SharedGraph make_shared_graph(std::span<const ContractRecord> records, unsigned workers) {
  SharedGraph s{build_graph(records), {}};
  s.topo = entity_topo_features(s.graph.graph, workers);
  return s;
}

PreparedFold prepare_fold(std::span<const ContractRecord> records, const SplitPlan& plan, std::size_t fold_index,
                          const SharedGraph* shared) {
  const Fold& fold = plan.folds.at(fold_index);
  const auto index = index_by_id(records);
  const auto train = select(records, index, fold.train);
  const auto val = select(records, index, fold.val);
  const auto test = select(records, index, fold.test);

  PreparedFold p;
  p.info.fold = fold_index;
  p.info.test_year = fold.test_year;
  p.info.n_train = train.size();
  p.info.n_val = val.size();
  if (train.empty()) throw DataError("fold " + std::to_string(fold_index) + " has no training contracts");

  const EncodingConfig enc = fit_encoding(train);
  std::tie(p.y_mean, p.y_std) = target_moments(train);
  p.tabular_train = train;
  p.tabular_train.insert(p.tabular_train.end(), val.begin(), val.end());

  if (plan.kind == SplitKind::OOS) {
    if (shared == nullptr) throw DataError("OOS folds need the shared full graph");
    const HeteroGraph& g = shared->graph.graph;
    p.entity_keys = entity_keys_of(g);
    p.train_graph = bind_with_keys(g, p.entity_keys);
    p.x_train_topo = attach_features(g, records, enc, &shared->topo).values;
    p.x_train_plain = attach_features(g, records, enc, nullptr).values;
    p.targets = Vector::Constant(static_cast<Eigen::Index>(g.num_nodes()), kNaN);
    const auto nodes = contract_nodes_by_id(g);
    fill_targets(p.targets, nodes, train, p.y_mean, p.y_std, p.split.train);
    fill_targets(p.targets, nodes, val, p.y_mean, p.y_std, p.split.val);
    for (const auto& r : test) {
      p.test_nodes.push_back(nodes.at(r.contract_id));
      p.test_ids.push_back(r.contract_id);
      p.test_y.push_back(r.spread_premium);
    }
    p.tabular_test = test;
    p.info.n_test = test.size();
    return p;
  }

  // OOT: train on the graph of earlier years, score the test year on that
  // graph with admissible test contracts attached.
  std::vector<ContractRecord> visible = train;
  visible.insert(visible.end(), val.begin(), val.end());
  const ContractGraph g_train = build_graph(visible);
  const TopoFeatures topo_train = entity_topo_features(g_train.graph);

  std::vector<ContractRecord> admissible;
  for (const auto& r : test) {
    bool known = true;
    for (const auto& [kind, label] : record_entities(r)) {
      if (!g_train.graph.find_node(kind, label)) {
        known = false;
        break;
      }
    }
    if (known) {
      admissible.push_back(r);
    } else {
      p.info.new_entity.push_back(r.contract_id);
    }
  }
  std::vector<ContractRecord> inference = visible;
  inference.insert(inference.end(), admissible.begin(), admissible.end());
  const ContractGraph g_inf = build_graph(inference);
  const TopoFeatures topo_inf = transfer_topo(g_train.graph, topo_train, g_inf.graph);

  p.entity_keys = entity_keys_of(g_train.graph);
  p.train_graph = bind_with_keys(g_train.graph, p.entity_keys);
  p.x_train_topo = attach_features(g_train.graph, visible, enc, &topo_train).values;
  p.x_train_plain = attach_features(g_train.graph, visible, enc, nullptr).values;
  p.targets = Vector::Constant(static_cast<Eigen::Index>(g_train.graph.num_nodes()), kNaN);
  const auto train_nodes = contract_nodes_by_id(g_train.graph);
  fill_targets(p.targets, train_nodes, train, p.y_mean, p.y_std, p.split.train);
  fill_targets(p.targets, train_nodes, val, p.y_mean, p.y_std, p.split.val);

  p.separate_inference = true;
  p.infer_graph = bind_with_keys(g_inf.graph, p.entity_keys);
  p.x_infer_topo = attach_features(g_inf.graph, inference, enc, &topo_inf).values;
  p.x_infer_plain = attach_features(g_inf.graph, inference, enc, nullptr).values;
  const auto inf_nodes = contract_nodes_by_id(g_inf.graph);
  for (const auto& r : admissible) {
    p.test_nodes.push_back(inf_nodes.at(r.contract_id));
    p.test_ids.push_back(r.contract_id);
    p.test_y.push_back(r.spread_premium);
  }
  p.tabular_test = admissible;
  p.info.n_test = admissible.size();

  // Leakage audit: recompute every fitted quantity from training-visible
  // records alone and compare with what the fold uses.
  auto& audit = p.info.audit;
  const auto fail = [&](std::string msg) {
    audit.passed = false;
    audit.failures.push_back(std::move(msg));
  };
  const auto fresh_train = select(records, index, fold.train);
  if (!(fit_encoding(fresh_train) == enc)) fail("feature scaler or vocabulary differs from a train-only refit");
  if (target_moments(fresh_train) != std::make_pair(p.y_mean, p.y_std)) fail("target scaler differs from a train-only refit");
  std::unordered_set<std::string> seen(fold.train.begin(), fold.train.end());
  seen.insert(fold.val.begin(), fold.val.end());
  for (const auto& id : fold.test) {
    if (seen.count(id)) fail("test contract " + id + " is also in train/val");
  }
  for (const auto& r : visible) {
    if (fold.test_year && r.issue_year >= *fold.test_year) fail("training contract " + r.contract_id + " is not before the test year");
  }
  const ContractGraph recomputed = build_graph(select(records, index, [&] {
    std::vector<std::string> ids = fold.train;
    ids.insert(ids.end(), fold.val.begin(), fold.val.end());
    return ids;
  }()));
  const TopoFeatures topo_check = entity_topo_features(recomputed.graph);
  if (!topo_rows_equal(recomputed.graph, topo_check, g_inf.graph, topo_inf)) {
    fail("topological features differ from a training-graph recomputation");
  }
  for (const auto& id : p.test_ids) {
    if (train_nodes.count(id)) fail("test contract " + id + " is present in the training graph");
  }
  return p;
}

ArmResult run_arm(const PreparedFold& p, Arm arm, const ExperimentConfig& config, std::uint64_t seed) {
  ArmResult out;
  out.arm = arm;
  std::vector<double> pred;
  if (arm == Arm::BaselineLinear) {
    const auto enc = TabularEncoder::fit(p.tabular_train);
    Vector y(static_cast<Eigen::Index>(p.tabular_train.size()));
    for (std::size_t i = 0; i < p.tabular_train.size(); ++i) y(static_cast<Eigen::Index>(i)) = p.tabular_train[i].spread_premium;
    const auto model = fit_ridge(enc.encode(p.tabular_train), y, config.ridge_lambda);
    const Vector yhat = predict(model, enc.encode(p.tabular_test));
    pred.assign(yhat.data(), yhat.data() + yhat.size());
  } else {
    const bool topo = arm == Arm::WithTopo;
    const Matrix& x_train = topo ? p.x_train_topo : p.x_train_plain;
    TrainConfig tc = config.train;
    tc.seed = seed;
    RGCNModel model = make_model(tc, static_cast<std::size_t>(x_train.cols()), relation_registry(), p.entity_keys);
    const TrainResult result = train(model, p.train_graph, x_train, p.targets, p.split, tc);
    out.val_mse = result.best_val_mse;
    out.best_epoch = result.best_epoch;
    out.epochs_run = result.history.size();
    const GraphInput& g = p.separate_inference ? p.infer_graph : p.train_graph;
    const Matrix& x = p.separate_inference ? (topo ? p.x_infer_topo : p.x_infer_plain) : x_train;
    const Vector z = forward(model, g, x);
    for (auto u : p.test_nodes) pred.push_back(z(static_cast<Eigen::Index>(u)) * p.y_std + p.y_mean);
  }
  for (std::size_t i = 0; i < pred.size(); ++i) out.predictions.push_back({p.test_ids[i], p.test_y[i], pred[i]});
  out.r2 = safe_r2(pred, p.test_y, out.error);
  return out;
}

}  // namespace detail

std::string_view to_string(Arm a) {
  switch (a) {
    case Arm::WithTopo: return "with_topo";
    case Arm::WithoutTopo: return "without_topo";
    case Arm::BaselineLinear: return "baseline_linear";
  }
  return "unknown";
}

Arm parse_arm(std::string_view name) {
  if (name == "with_topo") return Arm::WithTopo;
  if (name == "without_topo") return Arm::WithoutTopo;
  if (name == "baseline_linear" || name == "baseline") return Arm::BaselineLinear;
  throw DataError("unknown arm '" + std::string(name) + "'");
}

std::vector<Arm> parse_arms(std::string_view list) {
  std::vector<Arm> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t end = std::min(list.find(',', start), list.size());
    const auto item = list.substr(start, end - start);
    if (!item.empty()) {
      const Arm a = parse_arm(item);
      if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
    }
    start = end + 1;
  }
  if (out.empty()) throw DataError("no arms given");
  return out;
}

std::optional<double> mean_defined(std::span<const std::optional<double>> values) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& v : values) {
    if (!v) continue;
    sum += *v;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

ExperimentReport run_ablation(std::span<const ContractRecord> input, const SplitPlan& plan,
                              const ExperimentConfig& config) {
  validate(config.train);
  const auto records = detail::maybe_shuffle_targets(input, config.shuffle_targets, plan.seed);
  ExperimentReport report;
  report.mode = plan.kind;
  report.seed = plan.seed;
  report.config = config;
  report.environment = environment_stamp();

  std::optional<detail::SharedGraph> shared;
  if (plan.kind == SplitKind::OOS) shared = detail::make_shared_graph(records, config.workers);

  report.folds.resize(plan.folds.size());
  parallel_for(plan.folds.size(), config.workers, [&](std::size_t f) {
    FoldResult& slot = report.folds[f];
    try {
      const auto prepared = detail::prepare_fold(records, plan, f, shared ? &*shared : nullptr);
      slot = prepared.info;
      const std::uint64_t seed = Rng::derive(config.train.seed, f);
      for (Arm arm : config.arms) {
        try {
          slot.arms.push_back(detail::run_arm(prepared, arm, config, seed));
        } catch (const Error& e) {
          ArmResult failed;
          failed.arm = arm;
          failed.error = e.what();
          slot.arms.push_back(std::move(failed));
        }
      }
    } catch (const Error& e) {
      slot.fold = f;
      slot.test_year = plan.folds[f].test_year;
      slot.error = e.what();
    }
  });

  for (Arm arm : config.arms) {
    std::vector<std::optional<double>> values;
    for (const auto& fold : report.folds) {
      for (const auto& a : fold.arms) {
        if (a.arm == arm) values.push_back(a.r2);
      }
    }
    ArmSummary s;
    s.arm = arm;
    s.mean_r2 = mean_defined(values);
    s.folds = static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](const auto& v) { return v.has_value(); }));
    report.summary.push_back(s);
  }
  for (const auto& fold : report.folds) {
    if (!fold.error.empty() || !fold.audit.passed) report.partial = true;
    for (const auto& a : fold.arms) {
      if (!a.r2) report.partial = true;
    }
  }
  return report;
}

std::string to_json(const ExperimentReport& r) {
  ordered_json j;
  j["mode"] = std::string(to_string(r.mode));
  j["seed"] = r.seed;
  ordered_json arms = ordered_json::array();
  for (Arm a : r.config.arms) arms.push_back(std::string(to_string(a)));
  j["config"] = {{"train", config_json(r.config.train)},
                 {"arms", arms},
                 {"ridge_lambda", r.config.ridge_lambda},
                 {"shuffle_targets", r.config.shuffle_targets}};
  ordered_json folds = ordered_json::array();
  for (const auto& f : r.folds) {
    ordered_json fj;
    fj["fold"] = f.fold;
    fj["test_year"] = f.test_year ? ordered_json(*f.test_year) : ordered_json(nullptr);
    fj["n_train"] = f.n_train;
    fj["n_val"] = f.n_val;
    fj["n_test"] = f.n_test;
    fj["new_entity"] = f.new_entity;
    fj["leakage_audit"] = {{"passed", f.audit.passed}, {"failures", f.audit.failures}};
    ordered_json fa = ordered_json::array();
    for (const auto& a : f.arms) {
      fa.push_back({{"arm", std::string(to_string(a.arm))},
                    {"r2", optional_number(a.r2)},
                    {"val_mse", optional_number(a.val_mse)},
                    {"best_epoch", a.best_epoch},
                    {"epochs_run", a.epochs_run},
                    {"error", a.error}});
    }
    fj["arms"] = fa;
    fj["error"] = f.error;
    folds.push_back(fj);
  }
  j["folds"] = folds;
  ordered_json summary = ordered_json::array();
  for (const auto& s : r.summary) {
    summary.push_back({{"arm", std::string(to_string(s.arm))}, {"mean_r2", optional_number(s.mean_r2)}, {"folds", s.folds}});
  }
  j["summary"] = summary;
  ordered_json trials = ordered_json::array();
  for (const auto& t : r.trials) {
    trials.push_back({{"trial", t.trial},
                      {"config", config_json(t.config)},
                      {"best_val_loss", optional_number(t.best_val_loss)},
                      {"test_r2", optional_number(t.test_r2)},
                      {"best_epoch", t.best_epoch},
                      {"error", t.error}});
  }
  j["trials"] = trials;
  j["partial"] = r.partial;
  j["environment"] = r.environment;
  return j.dump(2) + "\n";
}

std::string predictions_csv(const ArmResult& arm) {
  std::ostringstream out;
  out << "contract_id,y,y_hat\n";
  for (const auto& p : arm.predictions) out << p.contract_id << ',' << format_double(p.y) << ',' << format_double(p.y_hat) << '\n';
  return out.str();
}

std::string environment_stamp() {
  std::ostringstream out;
#if defined(__clang__)
  out << "clang " << __clang_major__ << '.' << __clang_minor__;
#elif defined(__GNUC__)
  out << "gcc " << __GNUC__ << '.' << __GNUC_MINOR__;
#else
  out << "unknown-compiler";
#endif
  out << "; eigen " << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION;
  out << "; c++ " << __cplusplus;
  return out.str();
}

}  // namespace catnet
