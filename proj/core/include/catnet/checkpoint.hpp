#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "catnet/features.hpp"
#include "catnet/rgcn.hpp"
#include "catnet/train.hpp"

namespace catnet {

// Everything needed to score new contracts with a trained model.
struct ModelBundle {
  RGCNModel model;
  TrainConfig train_config;
  std::vector<std::string> feature_columns;
  EncodingConfig encoding;
  bool use_topo = false;
  double target_mean = 0.0;  // predictions are z * target_std + target_mean
  double target_std = 1.0;
};

// Little-endian IEEE-754 doubles, standard base64 alphabet with padding.
std::string encode_doubles(std::span<const double> values);
std::vector<double> decode_doubles(std::string_view text);

// {"version":1,"config":{...},"relations":[...],"params":{name:{shape,values}},...}
std::string save_checkpoint(const ModelBundle& bundle);
// Throws DataError on a malformed or incompatible checkpoint.
ModelBundle load_checkpoint(std::string_view json_text);

void save_checkpoint_file(const ModelBundle& bundle, const std::filesystem::path& path);
ModelBundle load_checkpoint_file(const std::filesystem::path& path);

}  // namespace catnet
