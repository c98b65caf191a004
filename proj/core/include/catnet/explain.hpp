#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "catnet/graph.hpp"
#include "catnet/rgcn.hpp"

namespace catnet {

struct ExplainConfig {
  double lambda_size = 0.05;     // weight on the sum of mask values
  double lambda_entropy = 0.1;   // weight on the summed binary entropy of mask values
  double init_logit = 0.0;
  double learning_rate = 1.0;    // gradient descent on the mask logits
  std::size_t max_steps = 200;
  double tolerance = 1e-7;       // stop once |loss change| falls below this
};

struct EdgeScore {
  std::size_t edge = 0;  // index into GraphInput::edges
  Edge endpoints;
  double score = 0.0;    // sigmoid of the learned logit
};

struct Explanation {
  std::string contract_id;
  NodeId node = 0;
  double prediction = 0.0;         // unmasked model output
  double empty_prediction = 0.0;   // output with every mask at zero
  double masked_prediction = 0.0;  // output under the learned masks
  double fidelity = 0.0;           // |masked_prediction - prediction|
  double sparsity = 0.0;           // mean mask value over edges and features
  std::size_t steps = 0;
  double final_loss = 0.0;
  std::vector<std::string> feature_names;
  std::vector<double> feature_scores;  // per feature column
  std::vector<EdgeScore> edge_scores;  // edges of the K-hop computation subgraph
};

// Edges whose messages can reach `u` within the model's depth, ascending.
std::vector<std::size_t> computation_edges(const GraphInput& g, NodeId u, std::size_t layers);

// Learns a sigmoid edge mask over u's computation subgraph and a feature
// mask over input columns so the masked prediction stays close to the full
// one under size and entropy penalties. The prediction gap is measured in
// units of |full - empty|, the shift caused by masking everything. Throws DataError if u is not a
// contract node.
Explanation explain_node(const RGCNModel& model, const HeteroGraph& graph, const GraphInput& input, const Matrix& x,
                         std::span<const std::string> feature_names, NodeId u, const ExplainConfig& config = {});

// One explanation per node, computed in parallel and returned in input order.
std::vector<Explanation> explain_nodes(const RGCNModel& model, const HeteroGraph& graph, const GraphInput& input,
                                       const Matrix& x, std::span<const std::string> feature_names,
                                       std::span<const NodeId> nodes, const ExplainConfig& config = {},
                                       unsigned workers = 1);

struct FeatureRank {
  std::string feature;
  double score = 0.0;
};

struct KindRank {
  NodeKind kind = NodeKind::Peril;
  double score = 0.0;
  std::size_t edges = 0;
};

struct EntityRank {
  std::string label;
  double score = 0.0;
  std::size_t edges = 0;
};

struct KindEntities {
  NodeKind kind = NodeKind::Peril;
  std::vector<EntityRank> top;
};

// Mean feature score across explanations, descending; ties by name.
std::vector<FeatureRank> rank_node_features(std::span<const Explanation> explanations);

// Edge scores grouped by the entity kind at each non-contract endpoint (an
// entity-entity edge counts for both kinds), averaged, descending.
std::vector<KindRank> rank_edge_importance_by_type(std::span<const Explanation> explanations,
                                                   const HeteroGraph& graph);

// Per entity kind, the top_k entities by mean score of their scored edges;
// ties by label.
std::vector<KindEntities> rank_entities(std::span<const Explanation> explanations, const HeteroGraph& graph,
                                        std::size_t top_k);

std::string explanations_json(std::span<const Explanation> explanations, const HeteroGraph& graph,
                              const ExplainConfig& config, std::size_t top_k, std::string_view selection);
// feature,score
std::string feature_ranking_csv(std::span<const FeatureRank> ranks);
// kind,score,edges
std::string kind_ranking_csv(std::span<const KindRank> ranks);
// kind,rank,label,score,edges
std::string entity_ranking_csv(std::span<const KindEntities> ranks);

}  // namespace catnet
