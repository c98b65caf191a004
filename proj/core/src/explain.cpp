#include "catnet/explain.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "catnet/contract.hpp"
#include "catnet/error.hpp"
#include "catnet/parallel.hpp"

namespace catnet {

namespace {

double sigmoid(double m) { return 1.0 / (1.0 + std::exp(-m)); }

double entropy(double p) {
  const double q = std::clamp(p, 1e-12, 1.0 - 1e-12);
  return -q * std::log(q) - (1.0 - q) * std::log(1.0 - q);
}

double entropy_derivative(double p) {
  const double q = std::clamp(p, 1e-12, 1.0 - 1e-12);
  return std::log((1.0 - q) / q);
}

struct MaskedEval {
  double loss = 0.0;
  double prediction = 0.0;
  std::vector<double> grad_edges;     // over mask positions
  std::vector<double> grad_features;
};

}  // namespace

std::vector<std::size_t> computation_edges(const GraphInput& g, NodeId u, std::size_t layers) {
  if (u >= g.num_nodes) throw DataError("unknown node id " + std::to_string(u));
  if (layers == 0) return {};
  std::vector<std::vector<NodeId>> adj(g.num_nodes);
  for (const Edge& e : g.edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  // Nodes within layers-1 hops; an edge touching one of them carries a message
  // that reaches u within `layers` rounds.
  std::vector<int> dist(g.num_nodes, -1);
  std::vector<NodeId> frontier{u};
  dist[u] = 0;
  for (std::size_t depth = 1; depth < layers; ++depth) {
    std::vector<NodeId> next;
    for (NodeId a : frontier) {
      for (NodeId b : adj[a]) {
        if (dist[b] < 0) {
          dist[b] = static_cast<int>(depth);
          next.push_back(b);
        }
      }
    }
    frontier = std::move(next);
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    if (dist[g.edges[i].u] >= 0 || dist[g.edges[i].v] >= 0) out.push_back(i);
  }
  return out;
}

Explanation explain_node(const RGCNModel& model, const HeteroGraph& graph, const GraphInput& input, const Matrix& x,
                         std::span<const std::string> feature_names, NodeId u, const ExplainConfig& config) {
  if (u >= graph.num_nodes() || graph.node(u).kind != NodeKind::Contract) {
    throw DataError("node " + std::to_string(u) + " is not a contract node");
  }
  if (feature_names.size() != static_cast<std::size_t>(x.cols())) {
    throw DataError("feature name count does not match the feature matrix");
  }
  const auto ui = static_cast<Eigen::Index>(u);
  const double full = forward(model, input, x)(ui);
  const auto active = computation_edges(input, u, model.config().layers);
  const std::size_t n_edges = active.size();
  const std::size_t n_features = feature_names.size();

  std::vector<double> edge_weight(input.edges.size(), 1.0);
  std::vector<double> feature_weight(n_features, 0.0);
  for (std::size_t i : active) edge_weight[i] = 0.0;
  ForwardOptions empty_options;
  empty_options.edge_weight = &edge_weight;
  empty_options.feature_weight = &feature_weight;
  const double empty = forward(model, input, x, empty_options)(ui);
  const double scale = std::abs(full - empty) > 1e-12 ? std::abs(full - empty) : 1.0;

  std::vector<double> edge_logit(n_edges, config.init_logit);
  std::vector<double> feature_logit(n_features, config.init_logit);

  const auto evaluate = [&](bool with_gradient) {
    for (std::size_t i = 0; i < n_edges; ++i) edge_weight[active[i]] = sigmoid(edge_logit[i]);
    for (std::size_t j = 0; j < n_features; ++j) feature_weight[j] = sigmoid(feature_logit[j]);
    ForwardOptions options;
    options.edge_weight = &edge_weight;
    options.feature_weight = &feature_weight;
    ForwardState state;
    MaskedEval out;
    out.prediction = forward(model, input, x, options, with_gradient ? &state : nullptr)(ui);
    const double diff = (out.prediction - full) / scale;
    out.loss = diff * diff;
    for (std::size_t i = 0; i < n_edges; ++i) {
      const double p = edge_weight[active[i]];
      out.loss += config.lambda_size * p + config.lambda_entropy * entropy(p);
    }
    for (double p : feature_weight) out.loss += config.lambda_size * p + config.lambda_entropy * entropy(p);
    if (!with_gradient) return out;

    Vector d_pred = Vector::Zero(static_cast<Eigen::Index>(input.num_nodes));
    d_pred(ui) = 2.0 * diff / scale;
    const Gradients grads = backward(model, input, x, state, d_pred, options);
    out.grad_edges.resize(n_edges);
    for (std::size_t i = 0; i < n_edges; ++i) {
      const double p = edge_weight[active[i]];
      const double dp = grads.edge_weight[active[i]] + config.lambda_size + config.lambda_entropy * entropy_derivative(p);
      out.grad_edges[i] = dp * p * (1.0 - p);
    }
    out.grad_features.resize(n_features);
    for (std::size_t j = 0; j < n_features; ++j) {
      const double p = feature_weight[j];
      const double dp = grads.feature_weight[j] + config.lambda_size + config.lambda_entropy * entropy_derivative(p);
      out.grad_features[j] = dp * p * (1.0 - p);
    }
    return out;
  };

  std::optional<double> previous;
  std::size_t steps = 0;
  while (steps < config.max_steps) {
    const MaskedEval e = evaluate(true);
    if (previous && std::abs(*previous - e.loss) < config.tolerance) break;
    previous = e.loss;
    for (std::size_t i = 0; i < n_edges; ++i) edge_logit[i] -= config.learning_rate * e.grad_edges[i];
    for (std::size_t j = 0; j < n_features; ++j) feature_logit[j] -= config.learning_rate * e.grad_features[j];
    ++steps;
  }
  const MaskedEval final_eval = evaluate(false);

  Explanation ex;
  ex.contract_id = graph.node(u).label;
  ex.node = u;
  ex.prediction = full;
  ex.empty_prediction = empty;
  ex.masked_prediction = final_eval.prediction;
  ex.fidelity = std::abs(final_eval.prediction - full);
  ex.steps = steps;
  ex.final_loss = final_eval.loss;
  ex.feature_names.assign(feature_names.begin(), feature_names.end());
  ex.feature_scores = feature_weight;
  double total = 0.0;
  for (std::size_t i = 0; i < n_edges; ++i) {
    const double s = edge_weight[active[i]];
    ex.edge_scores.push_back({active[i], input.edges[active[i]], s});
    total += s;
  }
  for (double s : feature_weight) total += s;
  ex.sparsity = (n_edges + n_features) > 0 ? total / static_cast<double>(n_edges + n_features) : 0.0;
  return ex;
}

std::vector<Explanation> explain_nodes(const RGCNModel& model, const HeteroGraph& graph, const GraphInput& input,
                                       const Matrix& x, std::span<const std::string> feature_names,
                                       std::span<const NodeId> nodes, const ExplainConfig& config, unsigned workers) {
  std::vector<Explanation> out(nodes.size());
  parallel_for(nodes.size(), workers, [&](std::size_t i) {
    out[i] = explain_node(model, graph, input, x, feature_names, nodes[i], config);
  });
  return out;
}

std::vector<FeatureRank> rank_node_features(std::span<const Explanation> explanations) {
  if (explanations.empty()) throw DataError("no explanations to rank");
  const auto& names = explanations.front().feature_names;
  std::vector<double> sum(names.size(), 0.0);
  for (const auto& ex : explanations) {
    if (ex.feature_names != names) throw DataError("explanations use different feature columns");
    for (std::size_t j = 0; j < names.size(); ++j) sum[j] += ex.feature_scores[j];
  }
  std::vector<FeatureRank> out;
  for (std::size_t j = 0; j < names.size(); ++j) {
    out.push_back({names[j], sum[j] / static_cast<double>(explanations.size())});
  }
  std::stable_sort(out.begin(), out.end(), [](const FeatureRank& a, const FeatureRank& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.feature < b.feature;
  });
  return out;
}

std::vector<KindRank> rank_edge_importance_by_type(std::span<const Explanation> explanations,
                                                   const HeteroGraph& graph) {
  std::map<NodeKind, std::pair<double, std::size_t>> acc;
  for (const auto& ex : explanations) {
    for (const auto& e : ex.edge_scores) {
      for (NodeId end : {e.endpoints.u, e.endpoints.v}) {
        const NodeKind kind = graph.node(end).kind;
        if (kind == NodeKind::Contract) continue;
        acc[kind].first += e.score;
        acc[kind].second += 1;
      }
    }
  }
  std::vector<KindRank> out;
  for (const auto& [kind, v] : acc) out.push_back({kind, v.first / static_cast<double>(v.second), v.second});
  std::stable_sort(out.begin(), out.end(), [](const KindRank& a, const KindRank& b) {
    if (a.score != b.score) return a.score > b.score;
    return to_string(a.kind) < to_string(b.kind);
  });
  return out;
}

std::vector<KindEntities> rank_entities(std::span<const Explanation> explanations, const HeteroGraph& graph,
                                        std::size_t top_k) {
  std::map<NodeId, std::pair<double, std::size_t>> acc;
  for (const auto& ex : explanations) {
    for (const auto& e : ex.edge_scores) {
      for (NodeId end : {e.endpoints.u, e.endpoints.v}) {
        if (graph.node(end).kind == NodeKind::Contract) continue;
        acc[end].first += e.score;
        acc[end].second += 1;
      }
    }
  }
  std::map<NodeKind, std::vector<EntityRank>> by_kind;
  for (const auto& [node, v] : acc) {
    const Node& n = graph.node(node);
    by_kind[n.kind].push_back({n.label, v.first / static_cast<double>(v.second), v.second});
  }
  std::vector<KindEntities> out;
  for (auto& [kind, list] : by_kind) {
    std::sort(list.begin(), list.end(), [](const EntityRank& a, const EntityRank& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.label < b.label;
    });
    if (list.size() > top_k) list.resize(top_k);
    out.push_back({kind, std::move(list)});
  }
  return out;
}

std::string explanations_json(std::span<const Explanation> explanations, const HeteroGraph& graph,
                              const ExplainConfig& config, std::size_t top_k, std::string_view selection) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["selection"] = std::string(selection);
  j["config"] = {{"lambda_size", config.lambda_size},
                 {"lambda_entropy", config.lambda_entropy},
                 {"init_logit", config.init_logit},
                 {"learning_rate", config.learning_rate},
                 {"max_steps", config.max_steps},
                 {"tolerance", config.tolerance},
                 {"top_k", top_k}};
  ordered_json list = ordered_json::array();
  for (const auto& ex : explanations) {
    ordered_json features = ordered_json::object();
    for (std::size_t i = 0; i < ex.feature_names.size(); ++i) features[ex.feature_names[i]] = ex.feature_scores[i];
    ordered_json edges = ordered_json::array();
    for (const auto& e : ex.edge_scores) {
      const Node& a = graph.node(e.endpoints.u);
      const Node& b = graph.node(e.endpoints.v);
      edges.push_back({{"edge", e.edge},
                       {"source", entity_key(a.kind, a.label)},
                       {"relation", graph.relation_label(e.endpoints.r)},
                       {"target", entity_key(b.kind, b.label)},
                       {"score", e.score}});
    }
    list.push_back({{"contract_id", ex.contract_id},
                    {"prediction", ex.prediction},
                    {"empty_prediction", ex.empty_prediction},
                    {"masked_prediction", ex.masked_prediction},
                    {"fidelity", ex.fidelity},
                    {"sparsity", ex.sparsity},
                    {"steps", ex.steps},
                    {"final_loss", ex.final_loss},
                    {"feature_scores", features},
                    {"edge_scores", edges}});
  }
  j["explanations"] = list;
  if (!explanations.empty()) {
    ordered_json fr = ordered_json::array();
    for (const auto& r : rank_node_features(explanations)) fr.push_back({{"feature", r.feature}, {"score", r.score}});
    j["feature_ranking"] = fr;
  }
  ordered_json kr = ordered_json::array();
  for (const auto& r : rank_edge_importance_by_type(explanations, graph)) {
    kr.push_back({{"kind", std::string(to_string(r.kind))}, {"score", r.score}, {"edges", r.edges}});
  }
  j["kind_ranking"] = kr;
  ordered_json er = ordered_json::object();
  for (const auto& k : rank_entities(explanations, graph, top_k)) {
    ordered_json top = ordered_json::array();
    for (const auto& e : k.top) top.push_back({{"label", e.label}, {"score", e.score}, {"edges", e.edges}});
    er[std::string(to_string(k.kind))] = top;
  }
  j["top_entities"] = er;
  return j.dump(2) + "\n";
}

std::string feature_ranking_csv(std::span<const FeatureRank> ranks) {
  std::ostringstream out;
  out << "feature,score\n";
  for (const auto& r : ranks) out << csv_escape(r.feature) << ',' << format_double(r.score) << '\n';
  return out.str();
}

std::string kind_ranking_csv(std::span<const KindRank> ranks) {
  std::ostringstream out;
  out << "kind,score,edges\n";
  for (const auto& r : ranks) out << to_string(r.kind) << ',' << format_double(r.score) << ',' << r.edges << '\n';
  return out.str();
}

std::string entity_ranking_csv(std::span<const KindEntities> ranks) {
  std::ostringstream out;
  out << "kind,rank,label,score,edges\n";
  for (const auto& k : ranks) {
    for (std::size_t i = 0; i < k.top.size(); ++i) {
      out << to_string(k.kind) << ',' << i + 1 << ',' << csv_escape(k.top[i].label) << ','
          << format_double(k.top[i].score) << ',' << k.top[i].edges << '\n';
    }
  }
  return out.str();
}

}  // namespace catnet
