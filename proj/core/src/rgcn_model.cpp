#include "catnet/rgcn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "catnet/error.hpp"
#include "catnet/random.hpp"

namespace catnet {

namespace {

constexpr std::string_view kActivationNames[] = {"ReLU", "LeakyReLU", "ELU", "GELU", "Identity"};

Matrix uniform_matrix(Rng& rng, std::size_t rows, std::size_t cols, double bound) {
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-bound, bound);
  return m;
}

double bound_for(std::size_t d_in) { return 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(1, d_in))); }

}  // namespace

std::string_view to_string(Activation a) { return kActivationNames[static_cast<int>(a)]; }

Activation parse_activation(std::string_view name) {
  for (int i = 0; i < 5; ++i) {
    if (kActivationNames[i] == name) return static_cast<Activation>(i);
  }
  throw DataError("unknown activation '" + std::string(name) + "'");
}

double activate(Activation a, double z) {
  switch (a) {
    case Activation::ReLU: return z > 0.0 ? z : 0.0;
    case Activation::LeakyReLU: return z > 0.0 ? z : 0.01 * z;
    case Activation::ELU: return z > 0.0 ? z : std::expm1(z);
    case Activation::GELU: return 0.5 * z * (1.0 + std::erf(z / std::numbers::sqrt2));
    case Activation::Identity: return z;
  }
  return z;
}

double activate_derivative(Activation a, double z) {
  switch (a) {
    case Activation::ReLU: return z > 0.0 ? 1.0 : 0.0;
    case Activation::LeakyReLU: return z > 0.0 ? 1.0 : 0.01;
    case Activation::ELU: return z > 0.0 ? 1.0 : std::exp(z);
    case Activation::GELU: {
      const double cdf = 0.5 * (1.0 + std::erf(z / std::numbers::sqrt2));
      const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
      return cdf + z * pdf;
    }
    case Activation::Identity: return 1.0;
  }
  return 1.0;
}

RGCNModel::RGCNModel(ModelConfig config, std::vector<std::string> relations, std::vector<std::string> entity_keys,
                     std::uint64_t seed)
    : config_(config), relations_(std::move(relations)), entity_keys_(std::move(entity_keys)) {
  if (config_.hidden == 0) throw DataError("hidden width must be positive");
  if (config_.dropout < 0.0 || config_.dropout >= 1.0) throw DataError("dropout must be in [0, 1)");
  const std::size_t r = relations_.size();
  bases_ = config_.num_bases > 0 ? config_.num_bases : std::min<std::size_t>(4, std::max<std::size_t>(1, r));
  index_entities();

  Rng rng(seed);
  const std::size_t d = config_.hidden;
  params_.push_back({"proj", uniform_matrix(rng, config_.feature_dim, d, bound_for(config_.feature_dim))});
  // Entities that never reach a training target keep a neutral zero row.
  params_.push_back({"embed", Matrix::Zero(static_cast<Eigen::Index>(entity_keys_.size()), static_cast<Eigen::Index>(d))});
  for (std::size_t k = 0; k < config_.layers; ++k) {
    const std::string prefix = "layer" + std::to_string(k) + ".";
    for (std::size_t b = 0; b < bases_; ++b) {
      params_.push_back({prefix + "basis" + std::to_string(b), uniform_matrix(rng, d, d, bound_for(d))});
    }
    params_.push_back({prefix + "coeff", uniform_matrix(rng, r, bases_, bound_for(bases_))});
    params_.push_back({prefix + "self", uniform_matrix(rng, d, d, bound_for(d))});
  }
  params_.push_back({"head.w", uniform_matrix(rng, d, 1, bound_for(d))});
  params_.push_back({"head.b", Matrix::Zero(1, 1)});
}

RGCNModel RGCNModel::from_parts(ModelConfig config, std::vector<std::string> relations,
                                std::vector<std::string> entity_keys, std::size_t bases, std::vector<Param> params) {
  RGCNModel m;
  m.config_ = config;
  m.relations_ = std::move(relations);
  m.entity_keys_ = std::move(entity_keys);
  m.bases_ = bases;
  m.index_entities();
  config.num_bases = bases;
  // Shape check against a freshly initialized model of the same layout.
  const RGCNModel shape(config, m.relations_, m.entity_keys_, 0);
  if (params.size() != shape.params_.size()) throw DataError("checkpoint has the wrong number of parameters");
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& want = shape.params_[i];
    const auto& got = params[i];
    if (got.name != want.name || got.value.rows() != want.value.rows() || got.value.cols() != want.value.cols()) {
      throw DataError("checkpoint parameter '" + got.name + "' does not match expected '" + want.name + "' " +
                      std::to_string(want.value.rows()) + "x" + std::to_string(want.value.cols()));
    }
  }
  m.config_ = config;
  m.params_ = std::move(params);
  return m;
}

void RGCNModel::index_entities() {
  entity_index_.clear();
  for (std::size_t i = 0; i < entity_keys_.size(); ++i) entity_index_.emplace_back(entity_keys_[i], i);
  std::sort(entity_index_.begin(), entity_index_.end());
  for (std::size_t i = 1; i < entity_index_.size(); ++i) {
    if (entity_index_[i].first == entity_index_[i - 1].first) {
      throw DataError("duplicate entity key '" + entity_index_[i].first + "'");
    }
  }
}

std::optional<std::size_t> RGCNModel::entity_row(std::string_view key) const {
  auto it = std::lower_bound(entity_index_.begin(), entity_index_.end(), key,
                             [](const auto& entry, std::string_view k) { return entry.first < k; });
  if (it == entity_index_.end() || it->first != key) return std::nullopt;
  return it->second;
}

Param& RGCNModel::param(std::string_view name) {
  for (auto& p : params_) {
    if (p.name == name) return p;
  }
  throw DataError("no parameter '" + std::string(name) + "'");
}

const Param& RGCNModel::param(std::string_view name) const {
  for (const auto& p : params_) {
    if (p.name == name) return p;
  }
  throw DataError("no parameter '" + std::string(name) + "'");
}

std::size_t RGCNModel::basis_index(std::size_t layer, std::size_t b) const { return 2 + layer * (bases_ + 2) + b; }
std::size_t RGCNModel::coeff_index(std::size_t layer) const { return 2 + layer * (bases_ + 2) + bases_; }
std::size_t RGCNModel::self_index(std::size_t layer) const { return 2 + layer * (bases_ + 2) + bases_ + 1; }
std::size_t RGCNModel::head_w_index() const { return 2 + config_.layers * (bases_ + 2); }
std::size_t RGCNModel::head_b_index() const { return head_w_index() + 1; }

std::size_t RGCNModel::layer_parameter_count(std::size_t bases, std::size_t relations, std::size_t d_in,
                                             std::size_t d_out) {
  return bases * d_in * d_out + relations * bases + d_in * d_out;
}

std::size_t RGCNModel::parameter_count() const {
  std::size_t total = 0;
  for (const auto& p : params_) total += static_cast<std::size_t>(p.value.size());
  return total;
}

}  // namespace catnet
