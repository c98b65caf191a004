#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "catnet/graph.hpp"
#include "catnet/linalg.hpp"

namespace catnet {

enum class Activation { ReLU, LeakyReLU, ELU, GELU, Identity };

std::string_view to_string(Activation a);
// Throws DataError on an unknown name.
Activation parse_activation(std::string_view name);

double activate(Activation a, double z);
double activate_derivative(Activation a, double z);

struct ModelConfig {
  std::size_t feature_dim = 0;
  std::size_t hidden = 32;
  std::size_t layers = 2;  // 0 gives a linear model on the projected features
  std::size_t num_bases = 0;  // 0 means min(4, |R|)
  Activation activation = Activation::ReLU;
  double dropout = 0.0;
};

struct Param {
  std::string name;
  Matrix value;
};

// R-GCN with basis-decomposed relation weights W_r = sum_b a_rb B_b, a
// self-loop weight per layer, trainable embeddings for entity nodes, a
// projection for node features and an affine regression head.
class RGCNModel {
 public:
  RGCNModel() = default;
  // Weights uniform in [-1/sqrt(d_in), 1/sqrt(d_in)] from `seed`; embeddings start at zero.
  RGCNModel(ModelConfig config, std::vector<std::string> relations, std::vector<std::string> entity_keys,
            std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  std::size_t num_bases() const { return bases_; }
  const std::vector<std::string>& relations() const { return relations_; }
  const std::vector<std::string>& entity_keys() const { return entity_keys_; }
  std::optional<std::size_t> entity_row(std::string_view key) const;

  std::vector<Param>& params() { return params_; }
  const std::vector<Param>& params() const { return params_; }
  Param& param(std::string_view name);
  const Param& param(std::string_view name) const;

  // Index helpers into params().
  static constexpr std::size_t kProj = 0;
  static constexpr std::size_t kEmbed = 1;
  std::size_t basis_index(std::size_t layer, std::size_t b) const;
  std::size_t coeff_index(std::size_t layer) const;
  std::size_t self_index(std::size_t layer) const;
  std::size_t head_w_index() const;
  std::size_t head_b_index() const;

  // B*d_in*d_out + |R|*B + d_in*d_out for one layer.
  static std::size_t layer_parameter_count(std::size_t bases, std::size_t relations, std::size_t d_in,
                                           std::size_t d_out);
  std::size_t parameter_count() const;

  // Rebuilds from stored parameters (checkpoint load). Shapes are validated.
  static RGCNModel from_parts(ModelConfig config, std::vector<std::string> relations,
                              std::vector<std::string> entity_keys, std::size_t bases, std::vector<Param> params);

 private:
  void index_entities();

  ModelConfig config_;
  std::size_t bases_ = 0;
  std::vector<std::string> relations_;
  std::vector<std::string> entity_keys_;
  std::vector<std::pair<std::string, std::size_t>> entity_index_;  // sorted by key
  std::vector<Param> params_;
};

// Incoming messages for one relation in CSR form: for target u, sources
// sources[offsets[u]..offsets[u+1]) with weight 1/|N_r(u)|.
struct RelationAdjacency {
  std::vector<std::size_t> offsets;
  std::vector<NodeId> sources;
  std::vector<std::size_t> edge_ids;  // undirected edge index of each message
};

struct GraphInput {
  std::size_t num_nodes = 0;
  std::vector<RelationAdjacency> relations;  // parallel to RGCNModel::relations()
  std::vector<std::int64_t> embedding_row;   // -1 for contract nodes
  std::vector<Edge> edges;                   // mask index space, graph relation ids
};

// Maps graph relations to the model's by label and entity nodes to embedding
// rows by entity_key. Throws DataError on an unknown relation or entity.
GraphInput bind_graph(const HeteroGraph& g, const RGCNModel& model);
// Same binding against an explicit relation list with no entity table
// (every node treated as feature-only). Used by layer-level tests.
GraphInput bind_graph(const HeteroGraph& g, std::span<const std::string> relations);

struct ForwardOptions {
  bool training = false;
  std::uint64_t dropout_seed = 0;
  const std::vector<double>* edge_weight = nullptr;     // per edge in GraphInput::edges
  const std::vector<double>* feature_weight = nullptr;  // per feature column
};

struct ForwardState {
  Matrix x_masked;
  std::vector<Matrix> h;       // h[0..K]
  std::vector<Matrix> inputs;  // layer inputs after dropout, per layer
  std::vector<Matrix> z;       // pre-activations, per layer
  std::vector<Matrix> dropout; // inverted-dropout multipliers, empty when unused
  Vector pred;
};

struct LayerWeights {
  std::span<const Matrix> bases;
  const Matrix& coeff;  // |R| x B
  const Matrix& self;
};

// sigma(sum_r (1/|N_r(u)|) sum_v W_r h_v + W_0 h_u) for every node u.
Matrix forward_layer(const Matrix& h, const GraphInput& g, const LayerWeights& w, Activation activation,
                     const std::vector<double>* edge_weight = nullptr);

// Predictions for every node (only contract rows are meaningful).
Vector forward(const RGCNModel& model, const GraphInput& g, const Matrix& x, const ForwardOptions& options = {},
               ForwardState* state = nullptr);

struct Gradients {
  std::vector<Matrix> params;        // parallel to RGCNModel::params()
  std::vector<double> edge_weight;   // filled when options.edge_weight is set
  std::vector<double> feature_weight;  // filled when options.feature_weight is set
};

// Reverse-mode gradients of sum_u d_pred[u] * pred[u] given a forward state.
Gradients backward(const RGCNModel& model, const GraphInput& g, const Matrix& x, const ForwardState& state,
                   const Vector& d_pred, const ForwardOptions& options = {});

// (1/|D|) sum_{u in D} (y_u - pred_u)^2; throws DataError on an empty mask.
double mse_loss(const Vector& pred, const Vector& target, std::span<const std::size_t> mask);
// Gradient of mse_loss with respect to pred.
Vector mse_gradient(const Vector& pred, const Vector& target, std::span<const std::size_t> mask);

// 1 - SS_res/SS_tot. Throws DataError with fewer than 2 values or zero variance.
double r2_score(std::span<const double> pred, std::span<const double> target);

}  // namespace catnet
