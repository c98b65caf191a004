#include "catnet/checkpoint.hpp"

#include <array>
#include <bit>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "catnet/error.hpp"

namespace catnet {

namespace {

using nlohmann::ordered_json;

constexpr std::string_view kAlphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
constexpr int kVersion = 1;

std::string base64(const std::vector<unsigned char>& bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  for (std::size_t i = 0; i < bytes.size(); i += 3) {
    const std::size_t left = bytes.size() - i;
    std::uint32_t chunk = static_cast<std::uint32_t>(bytes[i]) << 16;
    if (left > 1) chunk |= static_cast<std::uint32_t>(bytes[i + 1]) << 8;
    if (left > 2) chunk |= bytes[i + 2];
    out += kAlphabet[(chunk >> 18) & 63];
    out += kAlphabet[(chunk >> 12) & 63];
    out += left > 1 ? kAlphabet[(chunk >> 6) & 63] : '=';
    out += left > 2 ? kAlphabet[chunk & 63] : '=';
  }
  return out;
}

std::vector<unsigned char> unbase64(std::string_view text) {
  if (text.size() % 4 != 0) throw DataError("base64 length is not a multiple of 4");
  std::array<int, 256> lookup;
  lookup.fill(-1);
  for (std::size_t i = 0; i < kAlphabet.size(); ++i) lookup[static_cast<unsigned char>(kAlphabet[i])] = static_cast<int>(i);
  std::vector<unsigned char> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    std::uint32_t chunk = 0;
    int pad = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      const char c = text[i + j];
      int v = 0;
      if (c == '=' && i + 4 == text.size() && j >= 2) {
        ++pad;
      } else {
        v = lookup[static_cast<unsigned char>(c)];
        if (v < 0 || pad > 0) throw DataError("invalid base64 character");
      }
      chunk = (chunk << 6) | static_cast<std::uint32_t>(v);
    }
    out.push_back(static_cast<unsigned char>(chunk >> 16));
    if (pad < 2) out.push_back(static_cast<unsigned char>(chunk >> 8));
    if (pad < 1) out.push_back(static_cast<unsigned char>(chunk));
  }
  return out;
}

ordered_json scaler_json(const ColumnScaler& s) {
  return {{"mean", s.mean}, {"std", s.std}, {"degenerate", s.degenerate}};
}

template <class T>
T field(const ordered_json& j, const char* key) {
  if (!j.contains(key)) throw DataError(std::string("checkpoint is missing '") + key + "'");
  return j.at(key).get<T>();
}

}  // namespace

std::string encode_doubles(std::span<const double> values) {
  std::vector<unsigned char> bytes;
  bytes.reserve(values.size() * 8);
  for (double v : values) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) bytes.push_back(static_cast<unsigned char>(bits >> (8 * b)));
  }
  return base64(bytes);
}

std::vector<double> decode_doubles(std::string_view text) {
  const auto bytes = unbase64(text);
  if (bytes.size() % 8 != 0) throw DataError("encoded tensor is not a whole number of doubles");
  std::vector<double> out(bytes.size() / 8);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[8 * i + static_cast<std::size_t>(b)]) << (8 * b);
    out[i] = std::bit_cast<double>(bits);
  }
  return out;
}

std::string save_checkpoint(const ModelBundle& bundle) {
  const auto& m = bundle.model;
  const auto& mc = m.config();
  const auto& tc = bundle.train_config;
  ordered_json j;
  j["version"] = kVersion;
  j["config"] = {{"feature_dim", mc.feature_dim},
                 {"hidden", mc.hidden},
                 {"layers", mc.layers},
                 {"num_bases", m.num_bases()},
                 {"activation", std::string(to_string(mc.activation))},
                 {"dropout", mc.dropout},
                 {"learning_rate", tc.learning_rate},
                 {"optimizer", std::string(to_string(tc.optimizer))},
                 {"max_epochs", tc.max_epochs},
                 {"patience", tc.patience},
                 {"seed", tc.seed},
                 {"weight_decay", tc.weight_decay},
                 {"use_topo", bundle.use_topo}};
  j["relations"] = m.relations();
  ordered_json params = ordered_json::object();
  for (const auto& p : m.params()) {
    params[p.name] = {{"shape", {p.value.rows(), p.value.cols()}},
                      {"values", encode_doubles(std::span<const double>(p.value.data(), static_cast<std::size_t>(p.value.size())))}};
  }
  j["params"] = params;
  j["entities"] = m.entity_keys();
  j["features"] = bundle.feature_columns;
  ordered_json scalers = ordered_json::array();
  for (const auto& s : bundle.encoding.scalers) scalers.push_back(scaler_json(s));
  j["encoder"] = {{"epoch_year", bundle.encoding.epoch_year},
                  {"numeric_columns", bundle.encoding.numeric_columns},
                  {"scalers", scalers},
                  {"ratings", bundle.encoding.ratings.categories()},
                  {"triggers", bundle.encoding.triggers.categories()}};
  j["target_scale"] = {{"mean", bundle.target_mean}, {"std", bundle.target_std}};
  return j.dump(2) + "\n";
}

ModelBundle load_checkpoint(std::string_view json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  try {
    if (field<int>(j, "version") != kVersion) throw DataError("unsupported checkpoint version");
    const auto& c = j.at("config");
    ModelConfig mc;
    mc.feature_dim = field<std::size_t>(c, "feature_dim");
    mc.hidden = field<std::size_t>(c, "hidden");
    mc.layers = field<std::size_t>(c, "layers");
    mc.activation = parse_activation(field<std::string>(c, "activation"));
    mc.dropout = field<double>(c, "dropout");
    const auto bases = field<std::size_t>(c, "num_bases");

    ModelBundle b;
    b.train_config.learning_rate = field<double>(c, "learning_rate");
    b.train_config.optimizer = parse_optimizer(field<std::string>(c, "optimizer"));
    b.train_config.max_epochs = field<std::size_t>(c, "max_epochs");
    b.train_config.patience = field<std::size_t>(c, "patience");
    b.train_config.seed = field<std::uint64_t>(c, "seed");
    b.train_config.weight_decay = field<double>(c, "weight_decay");
    b.train_config.dropout = mc.dropout;
    b.train_config.hidden = mc.hidden;
    b.train_config.layers = mc.layers;
    b.train_config.activation = mc.activation;
    b.use_topo = field<bool>(c, "use_topo");

    auto relations = field<std::vector<std::string>>(j, "relations");
    auto entities = field<std::vector<std::string>>(j, "entities");
    // Parameter order is fixed by the layout; names come from a template model.
    mc.num_bases = bases;
    const RGCNModel layout(mc, relations, entities, 0);
    std::vector<Param> params;
    const auto& stored = j.at("params");
    for (const auto& want : layout.params()) {
      if (!stored.contains(want.name)) throw DataError("checkpoint is missing parameter '" + want.name + "'");
      const auto& entry = stored.at(want.name);
      const auto shape = entry.at("shape").get<std::vector<Eigen::Index>>();
      const auto values = decode_doubles(entry.at("values").get<std::string>());
      if (shape.size() != 2 || static_cast<Eigen::Index>(values.size()) != shape[0] * shape[1]) {
        throw DataError("parameter '" + want.name + "' has inconsistent shape and data");
      }
      Matrix v(shape[0], shape[1]);
      std::copy(values.begin(), values.end(), v.data());
      params.push_back({want.name, std::move(v)});
    }
    b.model = RGCNModel::from_parts(mc, std::move(relations), std::move(entities), bases, std::move(params));
    b.feature_columns = field<std::vector<std::string>>(j, "features");

    const auto& e = j.at("encoder");
    b.encoding.epoch_year = field<int>(e, "epoch_year");
    b.encoding.numeric_columns = field<std::vector<std::string>>(e, "numeric_columns");
    for (const auto& s : e.at("scalers")) {
      b.encoding.scalers.push_back({field<double>(s, "mean"), field<double>(s, "std"), field<bool>(s, "degenerate")});
    }
    b.encoding.ratings = CategoryVocabulary(field<std::vector<std::string>>(e, "ratings"));
    b.encoding.triggers = CategoryVocabulary(field<std::vector<std::string>>(e, "triggers"));
    b.target_mean = field<double>(j.at("target_scale"), "mean");
    b.target_std = field<double>(j.at("target_scale"), "std");
    return b;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint_file(const ModelBundle& bundle, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << save_checkpoint(bundle);
}

ModelBundle load_checkpoint_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_checkpoint(buf.str());
}

}  // namespace catnet
