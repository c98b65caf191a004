#include "catnet/rgcn.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "catnet/error.hpp"
#include "catnet/random.hpp"

namespace catnet {

namespace {

struct Message {
  NodeId target;
  NodeId source;
  std::size_t edge;
  friend auto operator<=>(const Message&, const Message&) = default;
};

GraphInput bind_relations(const HeteroGraph& g, std::span<const std::string> relations) {
  GraphInput in;
  in.num_nodes = g.num_nodes();
  in.edges = g.edges();
  std::vector<std::size_t> model_relation(g.num_relations());
  for (RelationId r = 0; r < g.num_relations(); ++r) {
    const auto& label = g.relation_label(r);
    auto it = std::find(relations.begin(), relations.end(), label);
    if (it == relations.end()) throw DataError("graph relation '" + label + "' is unknown to the model");
    model_relation[r] = static_cast<std::size_t>(it - relations.begin());
  }
  std::vector<std::vector<Message>> per(relations.size());
  for (std::size_t e = 0; e < in.edges.size(); ++e) {
    const Edge& edge = in.edges[e];
    auto& list = per[model_relation[edge.r]];
    list.push_back({edge.v, edge.u, e});
    list.push_back({edge.u, edge.v, e});
  }
  in.relations.resize(relations.size());
  for (std::size_t r = 0; r < relations.size(); ++r) {
    auto& list = per[r];
    std::sort(list.begin(), list.end());
    auto& adj = in.relations[r];
    adj.offsets.assign(in.num_nodes + 1, 0);
    for (const auto& m : list) ++adj.offsets[m.target + 1];
    for (std::size_t u = 0; u < in.num_nodes; ++u) adj.offsets[u + 1] += adj.offsets[u];
    adj.sources.reserve(list.size());
    adj.edge_ids.reserve(list.size());
    for (const auto& m : list) {
      adj.sources.push_back(m.source);
      adj.edge_ids.push_back(m.edge);
    }
  }
  in.embedding_row.assign(in.num_nodes, -1);
  return in;
}

double message_weight(const RelationAdjacency& adj, std::size_t u, std::size_t j, const std::vector<double>* edge_weight) {
  const double inv = 1.0 / static_cast<double>(adj.offsets[u + 1] - adj.offsets[u]);
  return edge_weight ? inv * (*edge_weight)[adj.edge_ids[j]] : inv;
}

// M_r = normalized (optionally masked) neighbor mean of h under relation r.
Matrix aggregate(const Matrix& h, const RelationAdjacency& adj, const std::vector<double>* edge_weight) {
  Matrix m = Matrix::Zero(h.rows(), h.cols());
  const std::size_t n = adj.offsets.size() - 1;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t j = adj.offsets[u]; j < adj.offsets[u + 1]; ++j) {
      m.row(static_cast<Eigen::Index>(u)) += message_weight(adj, u, j, edge_weight) * h.row(adj.sources[j]);
    }
  }
  return m;
}

// C_b = sum_r a_rb M_r for every basis b.
std::vector<Matrix> combine(const Matrix& h, const GraphInput& g, const Matrix& coeff,
                            const std::vector<double>* edge_weight) {
  const auto bases = static_cast<std::size_t>(coeff.cols());
  std::vector<Matrix> c(bases, Matrix::Zero(h.rows(), h.cols()));
  for (std::size_t r = 0; r < g.relations.size(); ++r) {
    if (g.relations[r].sources.empty()) continue;
    const Matrix m = aggregate(h, g.relations[r], edge_weight);
    for (std::size_t b = 0; b < bases; ++b) {
      const double a = coeff(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(b));
      if (a != 0.0) c[b] += a * m;
    }
  }
  return c;
}

Matrix pre_activation(const Matrix& h, const std::vector<Matrix>& combined, const LayerWeights& w) {
  Matrix z = h * w.self;
  for (std::size_t b = 0; b < combined.size(); ++b) z += combined[b] * w.bases[b];
  return z;
}

Matrix apply(Activation a, const Matrix& z) { return z.unaryExpr([a](double v) { return activate(a, v); }); }

void check_shapes(const Matrix& h, const GraphInput& g, const LayerWeights& w) {
  if (static_cast<std::size_t>(h.rows()) != g.num_nodes) throw DataError("layer input has the wrong number of rows");
  if (w.self.rows() != h.cols()) throw DataError("layer input width does not match the self weight");
  if (static_cast<std::size_t>(w.coeff.rows()) != g.relations.size() ||
      static_cast<std::size_t>(w.coeff.cols()) != w.bases.size()) {
    throw DataError("relation coefficients have the wrong shape");
  }
  for (const auto& b : w.bases) {
    if (b.rows() != w.self.rows() || b.cols() != w.self.cols()) throw DataError("basis shape mismatch");
  }
}

LayerWeights layer_weights(const RGCNModel& model, std::size_t k) {
  const auto& p = model.params();
  return LayerWeights{std::span<const Matrix>(), p[model.coeff_index(k)].value, p[model.self_index(k)].value};
}

std::vector<Matrix> layer_bases(const RGCNModel& model, std::size_t k) {
  std::vector<Matrix> out;
  for (std::size_t b = 0; b < model.num_bases(); ++b) out.push_back(model.params()[model.basis_index(k, b)].value);
  return out;
}

}  // namespace

GraphInput bind_graph(const HeteroGraph& g, std::span<const std::string> relations) {
  return bind_relations(g, relations);
}

GraphInput bind_graph(const HeteroGraph& g, const RGCNModel& model) {
  GraphInput in = bind_relations(g, model.relations());
  for (const Node& node : g.nodes()) {
    if (node.kind == NodeKind::Contract) continue;
    const auto key = entity_key(node.kind, node.label);
    const auto row = model.entity_row(key);
    if (!row) throw DataError("entity '" + key + "' has no embedding in the model");
    in.embedding_row[node.id] = static_cast<std::int64_t>(*row);
  }
  return in;
}

Matrix forward_layer(const Matrix& h, const GraphInput& g, const LayerWeights& w, Activation activation,
                     const std::vector<double>* edge_weight) {
  check_shapes(h, g, w);
  return apply(activation, pre_activation(h, combine(h, g, w.coeff, edge_weight), w));
}

Vector forward(const RGCNModel& model, const GraphInput& g, const Matrix& x, const ForwardOptions& options,
               ForwardState* state) {
  const auto& cfg = model.config();
  const auto& p = model.params();
  if (static_cast<std::size_t>(x.rows()) != g.num_nodes || static_cast<std::size_t>(x.cols()) != cfg.feature_dim) {
    throw DataError("feature matrix is " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) +
                    ", model expects " + std::to_string(g.num_nodes) + "x" + std::to_string(cfg.feature_dim));
  }
  if (options.feature_weight && options.feature_weight->size() != cfg.feature_dim) {
    throw DataError("feature mask width mismatch");
  }
  if (options.edge_weight && options.edge_weight->size() != g.edges.size()) throw DataError("edge mask size mismatch");

  ForwardState local;
  ForwardState& s = state ? *state : local;
  s = ForwardState{};
  s.x_masked = x;
  if (options.feature_weight) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) s.x_masked.col(j) *= (*options.feature_weight)[static_cast<std::size_t>(j)];
  }
  Matrix h = s.x_masked * p[RGCNModel::kProj].value;
  const Matrix& embed = p[RGCNModel::kEmbed].value;
  for (std::size_t u = 0; u < g.num_nodes; ++u) {
    if (g.embedding_row[u] >= 0) h.row(static_cast<Eigen::Index>(u)) += embed.row(g.embedding_row[u]);
  }
  s.h.push_back(h);

  const bool use_dropout = options.training && cfg.dropout > 0.0;
  for (std::size_t k = 0; k < cfg.layers; ++k) {
    Matrix in = s.h.back();
    if (use_dropout && k > 0) {
      Rng rng(Rng::derive(options.dropout_seed, k));
      const double keep = 1.0 - cfg.dropout;
      Matrix mask(in.rows(), in.cols());
      for (Eigen::Index i = 0; i < mask.size(); ++i) mask.data()[i] = rng.uniform() < keep ? 1.0 / keep : 0.0;
      in = in.cwiseProduct(mask);
      s.dropout.push_back(std::move(mask));
    } else {
      s.dropout.emplace_back();
    }
    const auto bases = layer_bases(model, k);
    LayerWeights w = layer_weights(model, k);
    w.bases = bases;
    check_shapes(in, g, w);
    const auto combined = combine(in, g, w.coeff, options.edge_weight);
    Matrix z = pre_activation(in, combined, w);
    s.h.push_back(apply(cfg.activation, z));
    s.inputs.push_back(std::move(in));
    s.z.push_back(std::move(z));
  }
  s.pred = s.h.back() * p[model.head_w_index()].value;
  s.pred.array() += p[model.head_b_index()].value(0, 0);
  return s.pred;
}

Gradients backward(const RGCNModel& model, const GraphInput& g, const Matrix& x, const ForwardState& s,
                   const Vector& d_pred, const ForwardOptions& options) {
  const auto& cfg = model.config();
  const auto& p = model.params();
  if (static_cast<std::size_t>(d_pred.size()) != g.num_nodes) throw DataError("prediction gradient size mismatch");

  Gradients grad;
  grad.params.reserve(p.size());
  for (const auto& param : p) grad.params.push_back(Matrix::Zero(param.value.rows(), param.value.cols()));
  if (options.edge_weight) grad.edge_weight.assign(g.edges.size(), 0.0);

  const Matrix& top = s.h.back();
  grad.params[model.head_w_index()] = top.transpose() * d_pred;
  grad.params[model.head_b_index()](0, 0) = d_pred.sum();
  Matrix dh = d_pred * p[model.head_w_index()].value.transpose();

  for (std::size_t k = cfg.layers; k-- > 0;) {
    const Matrix& in = s.inputs[k];
    const Matrix& z = s.z[k];
    Matrix dz = dh.cwiseProduct(z.unaryExpr([a = cfg.activation](double v) { return activate_derivative(a, v); }));

    const Matrix& self = p[model.self_index(k)].value;
    const Matrix& coeff = p[model.coeff_index(k)].value;
    grad.params[model.self_index(k)] = in.transpose() * dz;
    Matrix din = dz * self.transpose();

    const std::size_t bases = model.num_bases();
    const auto combined = combine(in, g, coeff, options.edge_weight);
    std::vector<Matrix> dc(bases);
    for (std::size_t b = 0; b < bases; ++b) {
      const Matrix& basis = p[model.basis_index(k, b)].value;
      grad.params[model.basis_index(k, b)] = combined[b].transpose() * dz;
      dc[b] = dz * basis.transpose();
    }
    Matrix& dcoeff = grad.params[model.coeff_index(k)];
    for (std::size_t r = 0; r < g.relations.size(); ++r) {
      const auto& adj = g.relations[r];
      if (adj.sources.empty()) continue;
      const Matrix m = aggregate(in, adj, options.edge_weight);
      Matrix dm = Matrix::Zero(in.rows(), in.cols());
      for (std::size_t b = 0; b < bases; ++b) {
        const auto ri = static_cast<Eigen::Index>(r);
        const auto bi = static_cast<Eigen::Index>(b);
        dcoeff(ri, bi) = m.cwiseProduct(dc[b]).sum();
        dm += coeff(ri, bi) * dc[b];
      }
      for (std::size_t u = 0; u + 1 < adj.offsets.size(); ++u) {
        const auto ui = static_cast<Eigen::Index>(u);
        for (std::size_t j = adj.offsets[u]; j < adj.offsets[u + 1]; ++j) {
          const NodeId v = adj.sources[j];
          din.row(v) += message_weight(adj, u, j, options.edge_weight) * dm.row(ui);
          if (options.edge_weight) {
            const double inv = 1.0 / static_cast<double>(adj.offsets[u + 1] - adj.offsets[u]);
            grad.edge_weight[adj.edge_ids[j]] += inv * in.row(v).dot(dm.row(ui));
          }
        }
      }
    }
    if (s.dropout[k].size() > 0) din = din.cwiseProduct(s.dropout[k]);
    dh = std::move(din);
  }

  const Matrix& proj = p[RGCNModel::kProj].value;
  grad.params[RGCNModel::kProj] = s.x_masked.transpose() * dh;
  Matrix& dembed = grad.params[RGCNModel::kEmbed];
  for (std::size_t u = 0; u < g.num_nodes; ++u) {
    if (g.embedding_row[u] >= 0) dembed.row(g.embedding_row[u]) += dh.row(static_cast<Eigen::Index>(u));
  }
  if (options.feature_weight) {
    const Matrix dx = dh * proj.transpose();
    grad.feature_weight.assign(cfg.feature_dim, 0.0);
    for (Eigen::Index j = 0; j < x.cols(); ++j) grad.feature_weight[static_cast<std::size_t>(j)] = x.col(j).dot(dx.col(j));
  }
  return grad;
}

double mse_loss(const Vector& pred, const Vector& target, std::span<const std::size_t> mask) {
  if (mask.empty()) throw DataError("mse_loss over an empty node set");
  double sum = 0.0;
  for (auto u : mask) {
    const double d = target(static_cast<Eigen::Index>(u)) - pred(static_cast<Eigen::Index>(u));
    sum += d * d;
  }
  return sum / static_cast<double>(mask.size());
}

Vector mse_gradient(const Vector& pred, const Vector& target, std::span<const std::size_t> mask) {
  if (mask.empty()) throw DataError("mse_loss over an empty node set");
  Vector g = Vector::Zero(pred.size());
  const double scale = 2.0 / static_cast<double>(mask.size());
  for (auto u : mask) {
    const auto i = static_cast<Eigen::Index>(u);
    g(i) += scale * (pred(i) - target(i));
  }
  return g;
}

double r2_score(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size()) throw DataError("r2_score: size mismatch");
  if (target.size() < 2) throw DataError("r2_score needs at least 2 targets");
  double mean = 0.0;
  for (double t : target) mean += t;
  mean /= static_cast<double>(target.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    ss_res += (target[i] - pred[i]) * (target[i] - pred[i]);
    ss_tot += (target[i] - mean) * (target[i] - mean);
  }
  if (ss_tot <= 0.0) throw DataError("r2_score: targets have zero variance");
  return 1.0 - ss_res / ss_tot;
}

}  // namespace catnet
