#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "catnet/contract.hpp"
#include "catnet/graph.hpp"
#include "catnet/linalg.hpp"

namespace catnet {

struct FeatureMatrix {
  std::vector<std::string> columns;
  Matrix values;  // rows follow NodeId for graph features

  std::size_t column(std::string_view name) const;  // throws DataError if absent
  std::optional<std::size_t> find_column(std::string_view name) const;
};

struct TemporalEncoding {
  double years_since_epoch = 0.0;
  double month_sin = 0.0;
  double month_cos = 1.0;
};

// month_sin = sin(2*pi*month/12), month_cos = cos(2*pi*month/12).
// Throws DataError for a month outside 1..12.
TemporalEncoding encode_temporal(const ContractRecord& record, int epoch_year);

// Closed vocabulary for a categorical or list-valued column. Categories are
// kept in sorted order; unseen values encode to zeros.
class CategoryVocabulary {
 public:
  CategoryVocabulary() = default;
  explicit CategoryVocabulary(std::vector<std::string> categories);

  static CategoryVocabulary fit(std::span<const std::vector<std::string>> rows);

  std::size_t size() const { return categories_.size(); }
  const std::vector<std::string>& categories() const { return categories_; }
  std::optional<std::size_t> index(std::string_view category) const;
  // Writes one 0/1 value per category into out (size() entries).
  void encode(std::span<const std::string> row, std::span<double> out) const;
  Matrix encode_all(std::span<const std::vector<std::string>> rows) const;

 private:
  std::vector<std::string> categories_;
};

// Column values for one categorical field, as a list per record.
enum class CategoricalField { SpRating, TriggerTypes, RiskModeler, Perils, Countries, StatesProvinces, Cedent, Underwriters };
std::vector<std::vector<std::string>> categorical_column(std::span<const ContractRecord> records, CategoricalField field);
std::string_view field_name(CategoricalField field);

// Fits a closed vocabulary on `records` and returns the 0/1 block.
FeatureMatrix one_hot_multi(std::span<const ContractRecord> records, CategoricalField field);

struct ColumnScaler {
  double mean = 0.0;
  double std = 1.0;
  bool degenerate = false;  // std == 0: centered only

  friend bool operator==(const ColumnScaler&, const ColumnScaler&) = default;
};

// Fit statistics (population std) on fit_rows only.
ColumnScaler fit_scaler(const Matrix& m, std::size_t column, std::span<const std::size_t> fit_rows);
void apply_scaler(Matrix& m, std::size_t column, const ColumnScaler& scaler);

struct StandardizeResult {
  Matrix values;
  std::vector<ColumnScaler> scalers;  // parallel to the requested columns
  std::vector<std::size_t> flagged;   // degenerate columns
};

// z = (x - mean) / std with statistics from fit_rows, applied to every row.
// Degenerate (constant) columns are centered and flagged.
StandardizeResult standardize(const Matrix& m, std::span<const std::size_t> columns,
                              std::span<const std::size_t> fit_rows);

inline constexpr std::size_t kTopoFeatureCount = 6;
inline constexpr std::string_view kTopoColumns[kTopoFeatureCount] = {
    "topo_degree", "topo_closeness", "topo_betweenness", "topo_eigenvector", "topo_katz", "topo_clustering"};

// Contract-side encoding state, fitted on training records only.
struct EncodingConfig {
  int epoch_year = 0;
  std::vector<std::string> numeric_columns;  // standardized
  std::vector<ColumnScaler> scalers;         // parallel to numeric_columns
  CategoryVocabulary ratings;
  CategoryVocabulary triggers;

  friend bool operator==(const EncodingConfig& a, const EncodingConfig& b) {
    return a.epoch_year == b.epoch_year && a.numeric_columns == b.numeric_columns &&
           a.scalers == b.scalers && a.ratings.categories() == b.ratings.categories() &&
           a.triggers.categories() == b.triggers.categories();
  }
};

// Throws DataError on an empty training set.
EncodingConfig fit_encoding(std::span<const ContractRecord> train);

// Contract feature names in column order for a fitted config.
std::vector<std::string> contract_feature_names(const EncodingConfig& config);

// Encoded contract features: standardized numerics, month sin/cos, then the
// rating and trigger one-hot blocks.
std::vector<double> encode_contract(const ContractRecord& record, const EncodingConfig& config);

// Topological block for entity nodes, one row per graph node (contract rows
// are ignored).
struct TopoFeatures {
  Matrix values;  // N x 6, columns in kTopoColumns order
};

// Node features for a frozen graph. Contract rows carry the encoded contract
// block and zeros in the topo block; entity rows carry zeros in the contract
// block and their topo row (or zeros when topo is null). Records are matched
// to contract nodes by contract_id. Throws DataError on a dimension mismatch
// or a contract node without a record.
FeatureMatrix attach_features(const HeteroGraph& graph, std::span<const ContractRecord> records,
                              const EncodingConfig& config, const TopoFeatures* topo);

// Tabular encoding for graph-free baselines: the contract block plus one-hot
// blocks for every entity field, vocabularies fitted on the training records.
class TabularEncoder {
 public:
  static TabularEncoder fit(std::span<const ContractRecord> train);
  std::vector<std::string> feature_names() const;
  Matrix encode(std::span<const ContractRecord> records) const;
  const EncodingConfig& contract_encoding() const { return contract_; }

 private:
  EncodingConfig contract_;
  std::vector<std::pair<CategoricalField, CategoryVocabulary>> entity_blocks_;
};

}  // namespace catnet
