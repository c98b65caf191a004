#include "catnet/topology.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "catnet/contract.hpp"
#include "catnet/error.hpp"

namespace catnet {

namespace {

using nlohmann::ordered_json;

ordered_json optional_number(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

TopologyReport topology_report(const HeteroGraph& g, const IssueYears* issue_years, const TopologyOptions& options) {
  const HomoView view(g);
  TopologyReport r;
  r.degree = degree_stats(view);
  r.mean_multi_degree = mean_multi_degree(g);
  const auto degrees = view.degrees();
  try {
    auto fit = fit_adjusted_powerlaw(degrees);
    if (options.n_bootstrap > 0) {
      fit.bootstrap_p = bootstrap_pvalue(fit, degrees, options.n_bootstrap, options.seed, options.workers);
      fit.n_bootstrap = options.n_bootstrap;
    }
    r.powerlaw = fit;
  } catch (const DataError& e) {
    r.powerlaw_error = e.what();
  } catch (const NumericalError& e) {
    r.powerlaw_error = e.what();
  }
  r.assortativity = assortativity(view);
  r.critical = critical_threshold(r.degree);
  r.paths = path_stats(view, options.workers);
  r.average_clustering = average_clustering(view);
  r.global_clustering = global_clustering(view);
  r.centrality = compute_centralities(view, options.katz_beta, options.workers);
  if (issue_years != nullptr) {
    std::set<int> years;
    for (const auto& [node, year] : *issue_years) years.insert(year);
    if (years.size() >= 2) r.fitness = fitness_series(g, *issue_years);
  }
  return r;
}

std::string to_json(const TopologyReport& r, const HeteroGraph& g) {
  ordered_json j;
  j["nodes"] = r.degree.num_nodes;
  j["edges"] = r.degree.num_edges;
  j["degree"] = {{"mean", r.degree.mean},
                 {"second_moment", r.degree.second_moment},
                 {"mean_multi_relation", r.mean_multi_degree},
                 {"k_min", r.degree.k_min},
                 {"k_max", r.degree.k_max},
                 {"histogram", r.degree.histogram}};
  if (r.powerlaw) {
    const auto& f = *r.powerlaw;
    j["powerlaw"] = {{"gamma", f.gamma},
                     {"k_sat", f.k_sat},
                     {"k_cut", f.k_cut},
                     {"ks_stat", f.ks_stat},
                     {"log_lik", f.log_lik},
                     {"bootstrap_p", optional_number(f.bootstrap_p)},
                     {"n_bootstrap", f.n_bootstrap},
                     {"k_min", f.k_min},
                     {"k_max", f.k_max},
                     {"n", f.n}};
  } else {
    j["powerlaw"] = {{"error", r.powerlaw_error}};
  }
  ordered_json curve = ordered_json::array();
  for (const auto& p : r.assortativity.knn_curve) curve.push_back({{"k", p.k}, {"knn", p.knn}, {"count", p.count}});
  j["assortativity"] = {{"pearson_r", optional_number(r.assortativity.pearson_r)},
                        {"flagged", r.assortativity.flagged},
                        {"knn_correlation", optional_number(r.assortativity.knn_correlation)},
                        {"knn_curve", curve}};
  j["critical_threshold"] = {{"kappa", r.critical.kappa},
                             {"f_c", optional_number(r.critical.f_c)},
                             {"flagged", r.critical.flagged}};
  j["paths"] = {{"diameter", r.paths.diameter},
                {"average_path", r.paths.avg_path},
                {"connected", r.paths.connected},
                {"reachable_pairs", r.paths.reachable_pairs}};
  j["clustering"] = {{"average", r.average_clustering}, {"global", r.global_clustering}};
  j["katz"] = {{"beta", r.centrality.katz_beta}, {"lambda_max", r.centrality.lambda_max}};
  if (r.fitness) {
    ordered_json ranking = ordered_json::array();
    for (NodeId u : rank_by_fitness(*r.fitness)) {
      const Node& node = g.node(u);
      if (node.kind == NodeKind::Contract) continue;
      ranking.push_back({{"node_id", u},
                         {"kind", std::string(to_string(node.kind))},
                         {"label", node.label},
                         {"fitness", *r.fitness->fitness[u]},
                         {"degrees", r.fitness->degrees[u]}});
    }
    j["fitness"] = {{"years", r.fitness->years}, {"entities", ranking}};
  } else {
    j["fitness"] = nullptr;
  }
  return j.dump(2) + "\n";
}

std::string centrality_csv(const HeteroGraph& g, const CentralityTable& t) {
  std::ostringstream out;
  out << "node_id,kind,label,degree,closeness,betweenness,eigenvector,katz,clustering\n";
  for (const Node& node : g.nodes()) {
    const auto i = node.id;
    out << i << ',' << to_string(node.kind) << ',' << csv_field(node.label) << ',' << format_double(t.degree[i])
        << ',' << format_double(t.closeness[i]) << ',' << format_double(t.betweenness[i]) << ','
        << format_double(t.eigenvector[i]) << ',' << format_double(t.katz[i]) << ','
        << format_double(t.clustering[i]) << '\n';
  }
  return out.str();
}

TopoFeatures entity_topo_features(const HeteroGraph& g, const CentralityTable& t) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  TopoFeatures out{Matrix::Zero(n, static_cast<Eigen::Index>(kTopoFeatureCount))};
  std::vector<std::size_t> entity_rows;
  for (const Node& node : g.nodes()) {
    if (node.kind == NodeKind::Contract) continue;
    const auto i = node.id;
    entity_rows.push_back(i);
    out.values(i, 0) = std::log1p(t.degree[i]);
    out.values(i, 1) = t.closeness[i];
    out.values(i, 2) = std::log1p(t.betweenness[i]);
    out.values(i, 3) = t.eigenvector[i];
    out.values(i, 4) = std::log1p(t.katz[i]);
    out.values(i, 5) = t.clustering[i];
  }
  if (entity_rows.empty()) return out;
  for (std::size_t c = 0; c < kTopoFeatureCount; ++c) {
    const auto s = fit_scaler(out.values, c, entity_rows);
    for (auto r : entity_rows) {
      auto& v = out.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      v = s.degenerate ? v - s.mean : (v - s.mean) / s.std;
    }
  }
  return out;
}

TopoFeatures entity_topo_features(const HeteroGraph& g, unsigned workers) {
  const HomoView view(g);
  return entity_topo_features(g, compute_centralities(view, std::nullopt, workers));
}

}  // namespace catnet
