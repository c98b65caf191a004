#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "catnet/centrality.hpp"
#include "catnet/degree.hpp"
#include "catnet/features.hpp"
#include "catnet/fitness.hpp"
#include "catnet/graph.hpp"
#include "catnet/powerlaw.hpp"
#include "catnet/structure.hpp"

namespace catnet {

struct TopologyOptions {
  std::size_t n_bootstrap = 0;
  std::uint64_t seed = 0;
  std::optional<double> katz_beta;
  unsigned workers = 1;
};

struct TopologyReport {
  DegreeStats degree;
  double mean_multi_degree = 0.0;
  std::optional<PowerLawFit> powerlaw;
  std::string powerlaw_error;  // why the fit was skipped, if it was
  Assortativity assortativity;
  CriticalThreshold critical;
  PathStats paths;
  double average_clustering = 0.0;
  double global_clustering = 0.0;
  CentralityTable centrality;
  std::optional<FitnessSeries> fitness;
};

// Fitness is computed when issue_years is given and spans at least 2 years.
TopologyReport topology_report(const HeteroGraph& g, const IssueYears* issue_years, const TopologyOptions& options);

std::string to_json(const TopologyReport& report, const HeteroGraph& g);
// node_id,kind,label,degree,closeness,betweenness,eigenvector,katz,clustering
std::string centrality_csv(const HeteroGraph& g, const CentralityTable& table);

// Model-ready topological block: the six centralities of every entity node,
// with degree, betweenness and Katz passed through log1p, then each column
// z-scored over entity nodes. Contract rows are zero.
TopoFeatures entity_topo_features(const HeteroGraph& g, const CentralityTable& table);
TopoFeatures entity_topo_features(const HeteroGraph& g, unsigned workers = 1);

}  // namespace catnet
