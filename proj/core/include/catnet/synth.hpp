#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "catnet/contract.hpp"

namespace catnet {

struct MarginalLevel {
  std::string_view label;
  int count = 0;
};

// Observed level counts for one categorical field of the reference corpus.
struct MarginalTable {
  std::string_view field;
  std::vector<MarginalLevel> levels;
  double mean_list_size = 1.0;  // slots per contract

  int total() const;
};

struct NumericMoment {
  std::string_view field;
  double mean = 0.0;
  double sd = 0.0;
};

const MarginalTable& rating_marginal();
const MarginalTable& trigger_marginal();
const MarginalTable& modeler_marginal();
const MarginalTable& peril_marginal();
const MarginalTable& underwriter_marginal();
const MarginalTable& country_marginal();
const MarginalTable& cedent_marginal();
std::span<const NumericMoment> numeric_moments();
std::span<const std::string_view> synthetic_states();

// Coefficients of the planted pricing function:
// spread = intercept + a*EL + b*PFL + c*CEL + mean peril effect + cedent effect
//          + season_amplitude*sin(2*pi*month/12 + season_phase) + N(0, noise_sd),
// clipped below at min_spread.
struct PlantedPricing {
  double intercept = 0.053;
  double a_expected_loss = 62.5;
  double b_prob_first_loss = 0.952;
  double c_conditional_el = 0.188;
  double season_amplitude = 0.01;
  double season_phase = 0.7;
  double noise_sd = 0.006;
  double peril_effect_sd = 0.018;
  double cedent_frequency_slope = -0.012;  // per z-score of log cedent count
  double cedent_effect_sd = 0.008;
  double min_spread = 0.001;
  bool entity_effects = true;
  std::vector<std::pair<std::string, double>> peril_effects;   // filled by synthesize
  std::vector<std::pair<std::string, double>> cedent_effects;  // filled by synthesize
};

struct SynthConfig {
  std::size_t n_contracts = 803;
  std::uint64_t seed = 0;
  int first_year = 1999;
  int last_year = 2021;
  bool entity_effects = true;
};

struct SynthDataset {
  std::vector<ContractRecord> records;
  PlantedPricing pricing;
  SynthConfig config;
};

// Categorical fields follow the marginal tables, numeric risk metrics are
// lognormal with the tabulated means and standard deviations, and the spread
// follows the planted pricing function. Same config, same output.
SynthDataset synth_dataset(const SynthConfig& config);
std::vector<ContractRecord> synth_dataset(std::size_t n_contracts, std::uint64_t seed);

// JSON object with the seed, planted coefficients, entity effects and the
// marginal tables used.
std::string synth_manifest_json(const SynthDataset& data);

}  // namespace catnet
