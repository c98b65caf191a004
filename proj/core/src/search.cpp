#include "catnet/search.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "catnet/error.hpp"
#include "catnet/parallel.hpp"
#include "experiment_detail.hpp"

namespace catnet {

namespace {

template <class T>
const T& pick(const std::vector<T>& choices, Rng& rng) {
  if (choices.empty()) throw DataError("empty choice list in search space");
  return choices[rng.below(choices.size())];
}

}  // namespace

TrainConfig sample_config(const SearchSpace& space, Rng& rng, const TrainConfig& base) {
  if (!(space.lr_min > 0.0 && space.lr_min <= space.lr_max)) throw DataError("invalid learning-rate range");
  if (space.layers_min < 1 || space.layers_min > space.layers_max) throw DataError("invalid layer range");
  TrainConfig c = base;
  c.learning_rate = std::exp(rng.uniform(std::log(space.lr_min), std::log(space.lr_max)));
  c.learning_rate = std::clamp(c.learning_rate, space.lr_min, space.lr_max);
  c.hidden = pick(space.hidden, rng);
  c.dropout = rng.uniform(space.dropout_min, space.dropout_max);
  c.optimizer = pick(space.optimizers, rng);
  c.activation = pick(space.activations, rng);
  c.layers = space.layers_min + rng.below(space.layers_max - space.layers_min + 1);
  return c;
}

SearchResult random_search(std::span<const ContractRecord> records, const SplitPlan& plan, const SearchSpace& space,
                           std::size_t n_trials, std::uint64_t seed, const ExperimentConfig& base) {
  if (plan.folds.empty()) throw DataError("random search needs at least one fold");
  std::optional<detail::SharedGraph> shared;
  if (plan.kind == SplitKind::OOS) shared = detail::make_shared_graph(records, base.workers);
  const auto prepared = detail::prepare_fold(records, plan, 0, shared ? &*shared : nullptr);

  SearchResult result;
  result.trials.resize(n_trials);
  parallel_for(n_trials, base.workers, [&](std::size_t i) {
    TrialLog& log = result.trials[i];
    log.trial = i;
    Rng rng(Rng::derive(seed, i));
    log.config = sample_config(space, rng, base.train);
    log.config.seed = Rng::derive(seed, i);
    try {
      ExperimentConfig cfg = base;
      cfg.train = log.config;
      const ArmResult arm = detail::run_arm(prepared, Arm::WithTopo, cfg, log.config.seed);
      log.best_val_loss = arm.val_mse;
      log.test_r2 = arm.r2;
      log.best_epoch = arm.best_epoch;
      log.error = arm.error;
      if (log.best_val_loss && !std::isfinite(*log.best_val_loss)) log.best_val_loss.reset();
    } catch (const Error& e) {
      log.error = e.what();
    }
  });

  result.ranking.resize(n_trials);
  std::iota(result.ranking.begin(), result.ranking.end(), std::size_t{0});
  std::stable_sort(result.ranking.begin(), result.ranking.end(), [&](std::size_t a, std::size_t b) {
    const auto& la = result.trials[a].best_val_loss;
    const auto& lb = result.trials[b].best_val_loss;
    if (la && lb) return *la < *lb;
    return la.has_value() && !lb.has_value();
  });
  if (!result.ranking.empty() && result.trials[result.ranking.front()].best_val_loss) {
    result.best = result.trials[result.ranking.front()].config;
  }
  return result;
}

std::string to_json(const SearchResult& r) {
  using nlohmann::ordered_json;
  const auto opt = [](const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); };
  const auto cfg = [](const TrainConfig& c) {
    return ordered_json{{"learning_rate", c.learning_rate}, {"optimizer", std::string(to_string(c.optimizer))},
                        {"max_epochs", c.max_epochs},       {"patience", c.patience},
                        {"dropout", c.dropout},             {"hidden", c.hidden},
                        {"layers", c.layers},               {"activation", std::string(to_string(c.activation))},
                        {"seed", c.seed},                   {"weight_decay", c.weight_decay}};
  };
  ordered_json j;
  ordered_json trials = ordered_json::array();
  for (const auto& t : r.trials) {
    trials.push_back({{"trial", t.trial},
                      {"config", cfg(t.config)},
                      {"best_val_loss", opt(t.best_val_loss)},
                      {"test_r2", opt(t.test_r2)},
                      {"best_epoch", t.best_epoch},
                      {"error", t.error}});
  }
  j["trials"] = trials;
  j["ranking"] = r.ranking;
  j["best"] = r.best ? cfg(*r.best) : ordered_json(nullptr);
  return j.dump(2) + "\n";
}

}  // namespace catnet
