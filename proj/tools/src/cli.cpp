#include "catnet_cli/cli.hpp"

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "catnet/checkpoint.hpp"
#include "catnet/contract.hpp"
#include "catnet/error.hpp"
#include "catnet/experiment.hpp"
#include "catnet/explain.hpp"
#include "catnet/graph_builder.hpp"
#include "catnet/graph_io.hpp"
#include "catnet/pipeline.hpp"
#include "catnet/search.hpp"
#include "catnet/splits.hpp"
#include "catnet/synth.hpp"
#include "catnet/topology.hpp"

namespace catnet::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("write failed for " + path.string());
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

unsigned default_workers() {
  if (const char* env = std::getenv("CATNET_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

std::vector<ContractRecord> load_records(const fs::path& path, std::ostream& err) {
  ParseResult parsed = parse_csv_file(path);
  for (const auto& e : parsed.errors) err << "warning: " << path.string() << ": line " << e.line << ": " << e.message << '\n';
  if (parsed.records.empty()) throw DataError("no valid contracts in " + path.string());
  return std::move(parsed.records);
}

// Shared state of one subcommand run: its output directory, the inputs it
// read and the options it was given.
struct Run {
  std::string name;
  fs::path out_dir;
  unsigned workers = default_workers();
  std::uint64_t seed = 0;
  std::vector<fs::path> inputs;
  ordered_json extra = ordered_json::object();

  void write(const std::string& file, const std::string& text) const { write_file(out_dir / file, text); }
};

ordered_json flag_values(const CLI::App& app) {
  ordered_json flags = ordered_json::object();
  for (const CLI::Option* opt : app.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help") continue;
    if (opt->count() > 0) {
      const auto results = opt->reduced_results();
      if (opt->get_type_size() == 0 && opt->get_expected_max() == 0) {
        flags[name] = true;
      } else if (results.size() == 1) {
        flags[name] = results.front();
      } else {
        flags[name] = results;
      }
    } else if (!opt->get_default_str().empty()) {
      flags[name] = opt->get_default_str();
    } else {
      flags[name] = nullptr;
    }
  }
  return flags;
}

void write_manifest(const Run& run, const CLI::App& app, double seconds) {
  ordered_json m;
  m["subcommand"] = run.name;
  m["flags"] = flag_values(app);
  m["seed"] = run.seed;
  m["workers"] = run.workers;
  ordered_json inputs = ordered_json::array();
  for (const auto& p : run.inputs) inputs.push_back({{"path", p.string()}, {"fnv1a64", fnv1a_hex(read_file(p))}});
  m["inputs"] = inputs;
  m["tool_version"] = CATNET_VERSION;
  m["environment"] = environment_stamp();
  for (auto it = run.extra.begin(); it != run.extra.end(); ++it) m[it.key()] = it.value();
  m["wall_clock_seconds"] = seconds;
  run.write("manifest.json", m.dump(2) + "\n");
}

struct TrainFlags {
  double lr = 1e-2;
  std::string optimizer = "Adam";
  std::size_t epochs = 500;
  std::size_t patience = 50;
  double dropout = 0.0;
  std::size_t hidden = 32;
  std::size_t layers = 2;
  std::string activation = "ReLU";
  double weight_decay = 1e-2;

  void add(CLI::App* app) {
    app->add_option("--lr", lr, "Learning rate")->capture_default_str();
    app->add_option("--optimizer", optimizer, "Adam or SGD")->capture_default_str();
    app->add_option("--epochs", epochs, "Maximum epochs")->capture_default_str();
    app->add_option("--patience", patience, "Early-stopping patience")->capture_default_str();
    app->add_option("--dropout", dropout, "Dropout rate")->capture_default_str();
    app->add_option("--hidden", hidden, "Hidden units")->capture_default_str();
    app->add_option("--layers", layers, "R-GCN layers")->capture_default_str();
    app->add_option("--activation", activation, "ReLU, LeakyReLU, ELU or GELU")->capture_default_str();
    app->add_option("--weight-decay", weight_decay, "L2 penalty coefficient")->capture_default_str();
  }

  TrainConfig config(std::uint64_t seed) const {
    TrainConfig c;
    c.learning_rate = lr;
    c.optimizer = parse_optimizer(optimizer);
    c.max_epochs = epochs;
    c.patience = patience;
    c.dropout = dropout;
    c.hidden = hidden;
    c.layers = layers;
    c.activation = parse_activation(activation);
    c.seed = seed;
    c.weight_decay = weight_decay;
    validate(c);
    return c;
  }
};

void add_common(CLI::App* app, Run& run) {
  app->add_option("--out", run.out_dir, "Output directory")->required();
  app->add_option("--workers", run.workers, "Worker threads (default: CATNET_WORKERS or 1)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
}

// synth

struct SynthArgs {
  std::size_t n = 803;
  int first_year = 1999;
  int last_year = 2021;
  bool no_entity_effects = false;
};

void run_synth(Run& run, const SynthArgs& a, std::ostream& out) {
  SynthConfig config;
  config.n_contracts = a.n;
  config.seed = run.seed;
  config.first_year = a.first_year;
  config.last_year = a.last_year;
  config.entity_effects = !a.no_entity_effects;
  const SynthDataset data = synth_dataset(config);
  run.write("contracts.csv", to_csv(data.records));
  const std::string synthetic = synth_manifest_json(data);
  run.write("synthetic.json", synthetic);
  run.extra["synthetic"] = ordered_json::parse(synthetic);
  out << "wrote " << data.records.size() << " contracts to " << (run.out_dir / "contracts.csv").string() << '\n';
}

// ingest

void run_ingest(Run& run, const fs::path& in_path, std::ostream& out) {
  run.inputs.push_back(in_path);
  const ParseResult parsed = parse_csv_file(in_path);
  std::ostringstream errors;
  errors << "line,column,message\n";
  for (const auto& e : parsed.errors) {
    errors << e.line << ',' << csv_escape(e.column) << ',' << csv_escape(e.message) << '\n';
  }
  run.write("row_errors.csv", errors.str());
  if (parsed.records.empty()) throw DataError("no valid contracts in " + in_path.string());
  const ContractGraph cg = build_graph(parsed.records);
  run.write("contracts.csv", to_csv(parsed.records));
  run.write("graph.json", graph_to_json(cg.graph));
  run.extra["ingest"] = {{"contracts", parsed.records.size()},
                         {"rejected_rows", parsed.errors.size()},
                         {"nodes", cg.graph.num_nodes()},
                         {"edges", cg.graph.num_edges()}};
  out << parsed.records.size() << " contracts, " << parsed.errors.size() << " rejected rows, "
      << cg.graph.num_nodes() << " nodes, " << cg.graph.num_edges() << " edges\n";
}

// topology

struct TopologyArgs {
  fs::path in;
  std::size_t bootstrap = 0;
  std::optional<double> katz_beta;
};

void run_topology(Run& run, const TopologyArgs& a, std::ostream& out) {
  run.inputs.push_back(a.in);
  TopologyOptions options;
  options.n_bootstrap = a.bootstrap;
  options.seed = run.seed;
  options.katz_beta = a.katz_beta;
  options.workers = run.workers;
  HeteroGraph graph;
  std::optional<IssueYears> years;
  if (a.in.extension() == ".csv") {
    ContractGraph cg = build_graph(parse_csv_file(a.in).records);
    years = std::move(cg.issue_years);
    graph = std::move(cg.graph);
  } else {
    graph = graph_from_json(read_file(a.in));
  }
  const TopologyReport report = topology_report(graph, years ? &*years : nullptr, options);
  run.write("topology.json", to_json(report, graph));
  run.write("centrality.csv", centrality_csv(graph, report.centrality));
  out << "nodes " << graph.num_nodes() << ", edges " << graph.num_edges() << ", mean degree "
      << format_double(report.degree.mean) << '\n';
  if (report.powerlaw) out << "power-law gamma " << format_double(report.powerlaw->gamma) << '\n';
}

// train

struct TrainArgs {
  fs::path in;
  TrainFlags flags;
  bool no_topo = false;
  double val_frac = kDefaultValFrac;
};

void run_train(Run& run, const TrainArgs& a, std::ostream& out, std::ostream& err) {
  run.inputs.push_back(a.in);
  const auto records = load_records(a.in, err);
  const FittedModel fitted = fit_model(records, a.flags.config(run.seed), !a.no_topo, a.val_frac, run.workers);
  run.write("model.json", save_checkpoint(fitted.bundle));
  run.write("history.csv", history_csv(fitted.result));
  const ModelInputs inputs = model_inputs(records, fitted.bundle, run.workers);
  const auto pred = predict_spreads(fitted.bundle, inputs);
  std::ostringstream csv;
  csv << "contract_id,y,y_hat\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    csv << records[i].contract_id << ',' << format_double(records[i].spread_premium) << ',' << format_double(pred[i])
        << '\n';
  }
  run.write("predictions.csv", csv.str());
  out << "best epoch " << fitted.result.best_epoch << ", best val mse " << format_double(fitted.result.best_val_mse)
      << '\n';
}

// evaluate

struct EvaluateArgs {
  fs::path in;
  std::string mode = "oos";
  std::string arms = "with_topo,without_topo,baseline_linear";
  std::size_t trials = 0;
  std::size_t folds = 10;
  int first_test_year = 2016;
  double val_frac = kDefaultValFrac;
  double ridge_lambda = 1.0;
  bool shuffle_targets = false;
  TrainFlags flags;
};

void run_evaluate(Run& run, const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
  run.inputs.push_back(a.in);
  const auto records = load_records(a.in, err);
  SplitPlan plan;
  if (parse_split_kind(a.mode) == SplitKind::OOS) {
    std::vector<std::string> ids;
    for (const auto& r : records) ids.push_back(r.contract_id);
    plan = oos_splits(ids, a.folds, 0.2, a.val_frac, run.seed);
  } else {
    std::vector<std::pair<std::string, int>> years;
    for (const auto& r : records) years.emplace_back(r.contract_id, r.issue_year);
    plan = oot_splits(years, a.first_test_year, a.val_frac, run.seed);
  }
  ExperimentConfig config;
  config.train = a.flags.config(run.seed);
  config.arms = parse_arms(a.arms);
  config.ridge_lambda = a.ridge_lambda;
  config.shuffle_targets = a.shuffle_targets;
  config.workers = run.workers;

  std::optional<SearchResult> search;
  if (a.trials > 0) {
    search = random_search(records, plan, SearchSpace{}, a.trials, run.seed, config);
    run.write("search.json", to_json(*search));
    if (search->best) config.train = *search->best;
  }
  ExperimentReport report = run_ablation(records, plan, config);
  if (search) report.trials = search->trials;
  run.write("report.json", to_json(report));
  for (const auto& fold : report.folds) {
    for (const auto& arm : fold.arms) {
      std::ostringstream name;
      name << "predictions/fold" << std::setw(2) << std::setfill('0') << fold.fold << '_' << to_string(arm.arm)
           << ".csv";
      run.write(name.str(), predictions_csv(arm));
    }
  }
  for (const auto& s : report.summary) {
    out << to_string(s.arm) << ": mean R2 " << (s.mean_r2 ? format_double(*s.mean_r2) : std::string("undefined"))
        << " over " << s.folds << " folds\n";
  }
  if (report.partial) err << "warning: report is partial; see report.json\n";
}

// explain

struct ExplainArgs {
  fs::path model;
  fs::path in;
  std::vector<std::string> contracts;
  bool all = false;
  std::size_t top_k = 10;
  std::size_t steps = 200;
};

void run_explain(Run& run, const ExplainArgs& a, std::ostream& out, std::ostream& err) {
  run.inputs.push_back(a.model);
  run.inputs.push_back(a.in);
  const ModelBundle bundle = load_checkpoint(read_file(a.model));
  const auto records = load_records(a.in, err);
  const ModelInputs inputs = model_inputs(records, bundle, run.workers);
  std::vector<NodeId> nodes;
  if (a.all) {
    nodes = inputs.graph.contract_nodes;
  } else {
    for (const auto& id : a.contracts) {
      const auto u = inputs.graph.graph.find_node(NodeKind::Contract, id);
      if (!u) throw DataError("unknown contract '" + id + "'");
      nodes.push_back(*u);
    }
  }
  ExplainConfig config;
  config.max_steps = a.steps;
  const auto explanations =
      explain_nodes(bundle.model, inputs.graph.graph, inputs.input, inputs.x, inputs.feature_names, nodes, config,
                    run.workers);
  const std::string selection = a.all ? "all" : "contracts";
  run.write("explanations.json", explanations_json(explanations, inputs.graph.graph, config, a.top_k, selection));
  const auto features = rank_node_features(explanations);
  run.write("feature_ranking.csv", feature_ranking_csv(features));
  run.write("kind_ranking.csv", kind_ranking_csv(rank_edge_importance_by_type(explanations, inputs.graph.graph)));
  run.write("top_entities.csv", entity_ranking_csv(rank_entities(explanations, inputs.graph.graph, a.top_k)));
  out << "explained " << explanations.size() << " contracts";
  if (!features.empty()) out << "; top feature " << features.front().feature;
  out << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"CAT-bond graph learning lab"};
  app.name("catnet");
  app.require_subcommand(1);
  app.set_version_flag("--version", CATNET_VERSION);

  Run run;

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic contract corpus");
  add_common(synth_cmd, run);
  synth_cmd->add_option("--n", synth.n, "Number of contracts")->capture_default_str()->check(CLI::PositiveNumber);
  synth_cmd->add_option("--seed", run.seed, "Seed")->capture_default_str();
  synth_cmd->add_option("--first-year", synth.first_year, "First issue year")->capture_default_str();
  synth_cmd->add_option("--last-year", synth.last_year, "Last issue year")->capture_default_str();
  synth_cmd->add_flag("--no-entity-effects", synth.no_entity_effects, "Plant no peril or cedent effects");

  fs::path ingest_in;
  auto* ingest_cmd = app.add_subcommand("ingest", "Validate a contract CSV and build its graph");
  add_common(ingest_cmd, run);
  ingest_cmd->add_option("--in", ingest_in, "Contract CSV")->required()->check(CLI::ExistingFile);

  TopologyArgs topo;
  auto* topo_cmd = app.add_subcommand("topology", "Network statistics and centralities");
  add_common(topo_cmd, run);
  topo_cmd->add_option("--in", topo.in, "Graph JSON or contract CSV")->required()->check(CLI::ExistingFile);
  topo_cmd->add_option("--bootstrap", topo.bootstrap, "Power-law bootstrap replicates")->capture_default_str();
  topo_cmd->add_option("--seed", run.seed, "Seed")->capture_default_str();
  topo_cmd->add_option("--katz-beta", topo.katz_beta, "Katz attenuation (default 0.9/lambda_max)");

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train an R-GCN on all contracts");
  add_common(train_cmd, run);
  train_cmd->add_option("--in", train_args.in, "Contract CSV")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--seed", run.seed, "Seed")->capture_default_str();
  train_cmd->add_option("--val-frac", train_args.val_frac, "Validation share")->capture_default_str();
  train_cmd->add_flag("--no-topo", train_args.no_topo, "Leave out topological entity features");
  train_args.flags.add(train_cmd);

  EvaluateArgs eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "Out-of-sample or out-of-time ablation");
  add_common(eval_cmd, run);
  eval_cmd->add_option("--in", eval.in, "Contract CSV")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--mode", eval.mode, "oos or oot")->capture_default_str()->check(CLI::IsMember({"oos", "oot"}));
  eval_cmd->add_option("--arms", eval.arms, "Comma-separated arms")->capture_default_str();
  eval_cmd->add_option("--trials", eval.trials, "Random-search trials before the ablation")->capture_default_str();
  eval_cmd->add_option("--seed", run.seed, "Seed")->capture_default_str();
  eval_cmd->add_option("--folds", eval.folds, "OOS folds")->capture_default_str()->check(CLI::PositiveNumber);
  eval_cmd->add_option("--first-test-year", eval.first_test_year, "First OOT test year")->capture_default_str();
  eval_cmd->add_option("--val-frac", eval.val_frac, "Validation share of non-test data")->capture_default_str();
  eval_cmd->add_option("--ridge-lambda", eval.ridge_lambda, "Ridge penalty for the linear baseline")
      ->capture_default_str();
  eval_cmd->add_flag("--shuffle-targets", eval.shuffle_targets, "Permute spreads (null-signal control)");
  eval.flags.add(eval_cmd);

  ExplainArgs expl;
  auto* explain_cmd = app.add_subcommand("explain", "Edge and feature mask explanations");
  add_common(explain_cmd, run);
  explain_cmd->add_option("--model", expl.model, "Checkpoint from train")->required()->check(CLI::ExistingFile);
  explain_cmd->add_option("--in", expl.in, "Contract CSV")->required()->check(CLI::ExistingFile);
  auto* contract_opt = explain_cmd->add_option("--contract", expl.contracts, "Contract id (repeatable)");
  auto* all_opt = explain_cmd->add_flag("--all", expl.all, "Explain every contract");
  contract_opt->excludes(all_opt);
  explain_cmd->add_option("--top-k", expl.top_k, "Entities per kind")->capture_default_str();
  explain_cmd->add_option("--steps", expl.steps, "Mask optimization steps")->capture_default_str();

  try {
    app.parse(argc, argv);
    if (explain_cmd->parsed() && !expl.all && expl.contracts.empty()) {
      throw CLI::ValidationError("explain", "one of --contract or --all is required");
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code != 0 && app.get_subcommands().empty()) err << app.help();
    return code == 0 ? kOk : kUsage;
  }

  const auto start = std::chrono::steady_clock::now();
  CLI::App* cmd = app.get_subcommands().front();
  run.name = cmd->get_name();
  try {
    fs::create_directories(run.out_dir);
    if (cmd == synth_cmd) run_synth(run, synth, out);
    if (cmd == ingest_cmd) run_ingest(run, ingest_in, out);
    if (cmd == topo_cmd) run_topology(run, topo, out);
    if (cmd == train_cmd) run_train(run, train_args, out, err);
    if (cmd == eval_cmd) run_evaluate(run, eval, out, err);
    if (cmd == explain_cmd) run_explain(run, expl, out, err);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    write_manifest(run, *cmd, elapsed.count());
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kOk;
}

}  // namespace catnet::cli
