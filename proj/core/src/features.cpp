#include "catnet/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <unordered_map>

#include "catnet/error.hpp"

namespace catnet {

namespace {

constexpr std::array<std::string_view, 7> kNumericColumns{
    "issue_amount_musd", "expected_loss",        "prob_first_loss", "prob_exhaust",
    "conditional_expected_loss", "exposure_term_months", "years_since_epoch"};

std::array<double, 7> raw_numeric(const ContractRecord& r, int epoch_year) {
  return {r.issue_amount_musd,
          r.expected_loss,
          r.prob_first_loss,
          r.prob_exhaust,
          r.conditional_expected_loss,
          r.exposure_term_months,
          static_cast<double>(r.issue_year - epoch_year)};
}

std::vector<std::string> as_list(const std::string& value) {
  if (value.empty()) return {};
  return {value};
}

double scale(double x, const ColumnScaler& s) {
  const double centered = x - s.mean;
  return s.degenerate ? centered : centered / s.std;
}

}  // namespace

std::optional<std::size_t> FeatureMatrix::find_column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t FeatureMatrix::column(std::string_view name) const {
  if (auto i = find_column(name)) return *i;
  throw DataError("no feature column '" + std::string(name) + "'");
}

TemporalEncoding encode_temporal(const ContractRecord& record, int epoch_year) {
  if (record.issue_month < 1 || record.issue_month > 12) {
    throw DataError("issue_month " + std::to_string(record.issue_month) + " outside 1..12 for " +
                    record.contract_id);
  }
  const double angle = 2.0 * std::numbers::pi * record.issue_month / 12.0;
  TemporalEncoding out;
  out.years_since_epoch = static_cast<double>(record.issue_year - epoch_year);
  out.month_sin = std::sin(angle);
  out.month_cos = std::cos(angle);
  // Snap the exact quarter points so month 12 encodes as (0, 1) bit-exactly.
  if (std::abs(out.month_sin) < 1e-15) out.month_sin = 0.0;
  if (std::abs(out.month_cos) < 1e-15) out.month_cos = 0.0;
  return out;
}

CategoryVocabulary::CategoryVocabulary(std::vector<std::string> categories) : categories_(std::move(categories)) {
  std::sort(categories_.begin(), categories_.end());
  categories_.erase(std::unique(categories_.begin(), categories_.end()), categories_.end());
}

CategoryVocabulary CategoryVocabulary::fit(std::span<const std::vector<std::string>> rows) {
  std::vector<std::string> all;
  for (const auto& row : rows) all.insert(all.end(), row.begin(), row.end());
  return CategoryVocabulary(std::move(all));
}

std::optional<std::size_t> CategoryVocabulary::index(std::string_view category) const {
  auto it = std::lower_bound(categories_.begin(), categories_.end(), category);
  if (it == categories_.end() || *it != category) return std::nullopt;
  return static_cast<std::size_t>(it - categories_.begin());
}

void CategoryVocabulary::encode(std::span<const std::string> row, std::span<double> out) const {
  if (out.size() != categories_.size()) throw DataError("one-hot output width mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& value : row) {
    if (auto i = index(value)) out[*i] = 1.0;
  }
}

Matrix CategoryVocabulary::encode_all(std::span<const std::vector<std::string>> rows) const {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    encode(rows[i], std::span<double>(m.row(static_cast<Eigen::Index>(i)).data(), size()));
  }
  return m;
}

std::string_view field_name(CategoricalField field) {
  switch (field) {
    case CategoricalField::SpRating: return "sp_rating";
    case CategoricalField::TriggerTypes: return "trigger_types";
    case CategoricalField::RiskModeler: return "risk_modeler";
    case CategoricalField::Perils: return "perils";
    case CategoricalField::Countries: return "countries";
    case CategoricalField::StatesProvinces: return "states_provinces";
    case CategoricalField::Cedent: return "cedent";
    case CategoricalField::Underwriters: return "underwriters";
  }
  return "unknown";
}

std::vector<std::vector<std::string>> categorical_column(std::span<const ContractRecord> records,
                                                         CategoricalField field) {
  std::vector<std::vector<std::string>> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    switch (field) {
      case CategoricalField::SpRating: out.push_back(as_list(r.sp_rating)); break;
      case CategoricalField::TriggerTypes: out.push_back(r.trigger_types); break;
      case CategoricalField::RiskModeler: out.push_back(as_list(r.risk_modeler)); break;
      case CategoricalField::Perils: out.push_back(r.perils); break;
      case CategoricalField::Countries: out.push_back(r.countries); break;
      case CategoricalField::StatesProvinces: out.push_back(r.states_provinces); break;
      case CategoricalField::Cedent: out.push_back(as_list(r.cedent)); break;
      case CategoricalField::Underwriters: out.push_back(r.underwriters); break;
    }
  }
  return out;
}

FeatureMatrix one_hot_multi(std::span<const ContractRecord> records, CategoricalField field) {
  const auto rows = categorical_column(records, field);
  const auto vocab = CategoryVocabulary::fit(rows);
  FeatureMatrix out;
  for (const auto& c : vocab.categories()) out.columns.push_back(std::string(field_name(field)) + "=" + c);
  out.values = vocab.encode_all(rows);
  return out;
}

ColumnScaler fit_scaler(const Matrix& m, std::size_t column, std::span<const std::size_t> fit_rows) {
  if (fit_rows.empty()) throw DataError("standardize needs at least one fit row");
  const auto c = static_cast<Eigen::Index>(column);
  if (c >= m.cols()) throw DataError("standardize column out of range");
  double sum = 0.0;
  for (auto r : fit_rows) sum += m(static_cast<Eigen::Index>(r), c);
  const double mean = sum / static_cast<double>(fit_rows.size());
  double ss = 0.0;
  for (auto r : fit_rows) {
    const double d = m(static_cast<Eigen::Index>(r), c) - mean;
    ss += d * d;
  }
  ColumnScaler s;
  s.mean = mean;
  s.std = std::sqrt(ss / static_cast<double>(fit_rows.size()));
  s.degenerate = !(s.std > 1e-12 * std::max(1.0, std::abs(mean)));
  if (s.degenerate) s.std = 0.0;
  return s;
}

void apply_scaler(Matrix& m, std::size_t column, const ColumnScaler& scaler) {
  const auto c = static_cast<Eigen::Index>(column);
  for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = scale(m(r, c), scaler);
}

StandardizeResult standardize(const Matrix& m, std::span<const std::size_t> columns,
                              std::span<const std::size_t> fit_rows) {
  StandardizeResult out{m, {}, {}};
  for (auto c : columns) {
    auto s = fit_scaler(m, c, fit_rows);
    apply_scaler(out.values, c, s);
    if (s.degenerate) out.flagged.push_back(c);
    out.scalers.push_back(s);
  }
  return out;
}

EncodingConfig fit_encoding(std::span<const ContractRecord> train) {
  if (train.empty()) throw DataError("cannot fit an encoding on zero records");
  EncodingConfig config;
  config.epoch_year = std::min_element(train.begin(), train.end(), [](const auto& a, const auto& b) {
                        return a.issue_year < b.issue_year;
                      })->issue_year;

  Matrix raw(static_cast<Eigen::Index>(train.size()), static_cast<Eigen::Index>(kNumericColumns.size()));
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto v = raw_numeric(train[i], config.epoch_year);
    for (std::size_t j = 0; j < v.size(); ++j) raw(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[j];
  }
  std::vector<std::size_t> rows(train.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  for (std::size_t j = 0; j < kNumericColumns.size(); ++j) {
    config.numeric_columns.emplace_back(kNumericColumns[j]);
    config.scalers.push_back(fit_scaler(raw, j, rows));
  }
  config.ratings = CategoryVocabulary::fit(categorical_column(train, CategoricalField::SpRating));
  config.triggers = CategoryVocabulary::fit(categorical_column(train, CategoricalField::TriggerTypes));
  return config;
}

std::vector<std::string> contract_feature_names(const EncodingConfig& config) {
  std::vector<std::string> names = config.numeric_columns;
  names.emplace_back("month_sin");
  names.emplace_back("month_cos");
  for (const auto& c : config.ratings.categories()) names.push_back("rating=" + c);
  for (const auto& c : config.triggers.categories()) names.push_back("trigger=" + c);
  return names;
}

std::vector<double> encode_contract(const ContractRecord& record, const EncodingConfig& config) {
  const auto t = encode_temporal(record, config.epoch_year);
  const auto raw = raw_numeric(record, config.epoch_year);
  if (config.scalers.size() != raw.size()) throw DataError("encoding config has the wrong numeric width");
  std::vector<double> out;
  out.reserve(raw.size() + 2 + config.ratings.size() + config.triggers.size());
  for (std::size_t j = 0; j < raw.size(); ++j) out.push_back(scale(raw[j], config.scalers[j]));
  out.push_back(t.month_sin);
  out.push_back(t.month_cos);
  const std::size_t rating_at = out.size();
  out.resize(rating_at + config.ratings.size() + config.triggers.size(), 0.0);
  const auto rating = as_list(record.sp_rating);
  config.ratings.encode(rating, std::span<double>(out).subspan(rating_at, config.ratings.size()));
  config.triggers.encode(record.trigger_types,
                         std::span<double>(out).subspan(rating_at + config.ratings.size(), config.triggers.size()));
  return out;
}

FeatureMatrix attach_features(const HeteroGraph& graph, std::span<const ContractRecord> records,
                              const EncodingConfig& config, const TopoFeatures* topo) {
  const auto n = static_cast<Eigen::Index>(graph.num_nodes());
  if (topo != nullptr &&
      (topo->values.rows() != n || topo->values.cols() != static_cast<Eigen::Index>(kTopoFeatureCount))) {
    throw DataError("topological block is " + std::to_string(topo->values.rows()) + "x" +
                    std::to_string(topo->values.cols()) + ", expected " + std::to_string(n) + "x6");
  }
  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < records.size(); ++i) by_id.emplace(normalize_label(records[i].contract_id), i);

  FeatureMatrix out;
  out.columns = contract_feature_names(config);
  const auto contract_width = static_cast<Eigen::Index>(out.columns.size());
  for (auto name : kTopoColumns) out.columns.emplace_back(name);
  out.values = Matrix::Zero(n, static_cast<Eigen::Index>(out.columns.size()));

  for (const Node& node : graph.nodes()) {
    const auto row = static_cast<Eigen::Index>(node.id);
    if (node.kind == NodeKind::Contract) {
      auto it = by_id.find(normalize_label(node.label));
      if (it == by_id.end()) throw DataError("no record for contract node '" + node.label + "'");
      const auto encoded = encode_contract(records[it->second], config);
      for (Eigen::Index j = 0; j < contract_width; ++j) out.values(row, j) = encoded[static_cast<std::size_t>(j)];
    } else if (topo != nullptr) {
      out.values.row(row).tail(static_cast<Eigen::Index>(kTopoFeatureCount)) = topo->values.row(row);
    }
  }
  return out;
}

TabularEncoder TabularEncoder::fit(std::span<const ContractRecord> train) {
  TabularEncoder enc;
  enc.contract_ = fit_encoding(train);
  for (auto field : {CategoricalField::RiskModeler, CategoricalField::Perils, CategoricalField::Countries,
                     CategoricalField::StatesProvinces, CategoricalField::Cedent, CategoricalField::Underwriters}) {
    enc.entity_blocks_.emplace_back(field, CategoryVocabulary::fit(categorical_column(train, field)));
  }
  return enc;
}

std::vector<std::string> TabularEncoder::feature_names() const {
  auto names = contract_feature_names(contract_);
  for (const auto& [field, vocab] : entity_blocks_) {
    for (const auto& c : vocab.categories()) names.push_back(std::string(field_name(field)) + "=" + c);
  }
  return names;
}

Matrix TabularEncoder::encode(std::span<const ContractRecord> records) const {
  const auto names = feature_names();
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(records.size()), static_cast<Eigen::Index>(names.size()));
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const auto base = encode_contract(records[i], contract_);
    for (std::size_t j = 0; j < base.size(); ++j) m(row, static_cast<Eigen::Index>(j)) = base[j];
    std::size_t at = base.size();
    for (const auto& [field, vocab] : entity_blocks_) {
      const auto values = categorical_column(std::span<const ContractRecord>(&records[i], 1), field);
      vocab.encode(values.front(), std::span<double>(m.row(row).data() + at, vocab.size()));
      at += vocab.size();
    }
  }
  return m;
}

}  // namespace catnet
