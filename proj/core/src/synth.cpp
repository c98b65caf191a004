#include "catnet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <json.hpp>

#include "catnet/error.hpp"
#include "catnet/random.hpp"

namespace catnet {

namespace {

constexpr std::array<int, 5> kExposureTerms{12, 24, 36, 48, 60};

std::vector<double> weights_of(const MarginalTable& table) {
  std::vector<double> w;
  w.reserve(table.levels.size());
  for (const auto& level : table.levels) w.push_back(level.count);
  return w;
}

std::string draw_one(Rng& rng, const MarginalTable& table) {
  const auto w = weights_of(table);
  return std::string(table.levels[rng.discrete(w)].label);
}

// Each level is included independently with probability proportional to its
// count, scaled so the expected list size is mean_list_size; an empty draw
// falls back to a single weighted pick.
std::vector<std::string> draw_list(Rng& rng, const MarginalTable& table) {
  const auto w = weights_of(table);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  std::vector<std::string> out;
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (rng.uniform() < std::min(1.0, w[j] * table.mean_list_size / total)) out.emplace_back(table.levels[j].label);
  }
  if (out.empty()) out.emplace_back(table.levels[rng.discrete(w)].label);
  return out;
}

double lognormal(Rng& rng, double mean, double sd) {
  const double s2 = std::log1p((sd * sd) / (mean * mean));
  const double mu = std::log(mean) - 0.5 * s2;
  return std::exp(mu + std::sqrt(s2) * rng.normal());
}

double round_to(double x, double quantum) { return std::round(x / quantum) * quantum; }

const NumericMoment& moment(std::string_view field) {
  for (const auto& m : numeric_moments()) {
    if (m.field == field) return m;
  }
  throw DataError("no numeric moment for " + std::string(field));
}

std::string contract_id(std::size_t index, std::size_t n) {
  const std::size_t width = std::max<std::size_t>(4, std::to_string(n).size());
  std::string digits = std::to_string(index + 1);
  return "CAT_CON" + std::string(width - digits.size(), '0') + digits;
}

double lookup(const std::vector<std::pair<std::string, double>>& effects, const std::string& key) {
  for (const auto& [k, v] : effects) {
    if (k == key) return v;
  }
  return 0.0;
}

void plant_entity_effects(PlantedPricing& p, std::uint64_t seed) {
  Rng rng(Rng::derive(seed, 1));
  for (const auto& level : peril_marginal().levels) {
    p.peril_effects.emplace_back(std::string(level.label), p.peril_effect_sd * rng.normal());
  }
  const auto& cedents = cedent_marginal().levels;
  std::vector<double> logc;
  for (const auto& level : cedents) logc.push_back(std::log(static_cast<double>(level.count)));
  double mean = 0.0;
  for (double v : logc) mean += v;
  mean /= static_cast<double>(logc.size());
  double var = 0.0;
  for (double v : logc) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(logc.size()));
  for (std::size_t i = 0; i < cedents.size(); ++i) {
    const double z = (logc[i] - mean) / sd;
    p.cedent_effects.emplace_back(std::string(cedents[i].label),
                                  p.cedent_frequency_slope * z + p.cedent_effect_sd * rng.normal());
  }
}

}  // namespace

SynthDataset synth_dataset(const SynthConfig& config) {
  if (config.n_contracts < 1) throw DataError("synth_dataset needs n >= 1");
  if (config.last_year < config.first_year) throw DataError("synthetic year range is empty");

  SynthDataset data;
  data.config = config;
  PlantedPricing& pricing = data.pricing;
  pricing.entity_effects = config.entity_effects;
  if (config.entity_effects) plant_entity_effects(pricing, config.seed);

  std::vector<double> year_weights;
  for (int y = config.first_year; y <= config.last_year; ++y) year_weights.push_back(1.0 + 0.1 * (y - config.first_year));
  const auto& amount = moment("issue_amount_musd");
  const auto& el = moment("expected_loss");
  const auto& pfl = moment("prob_first_loss");
  const auto& pe = moment("prob_exhaust");
  const auto& cel = moment("conditional_expected_loss");
  const auto states = synthetic_states();

  Rng rng(Rng::derive(config.seed, 2));
  Rng noise(Rng::derive(config.seed, 3));
  data.records.reserve(config.n_contracts);
  for (std::size_t i = 0; i < config.n_contracts; ++i) {
    ContractRecord r;
    r.contract_id = contract_id(i, config.n_contracts);
    r.issue_year = config.first_year + static_cast<int>(rng.discrete(year_weights));
    r.issue_month = 1 + static_cast<int>(rng.below(12));
    r.issue_amount_musd = round_to(lognormal(rng, amount.mean, amount.sd), 0.01);
    r.expected_loss = round_to(std::min(1.0, lognormal(rng, el.mean, el.sd)), 1e-7);
    r.prob_first_loss = round_to(std::min(1.0, lognormal(rng, pfl.mean, pfl.sd)), 1e-7);
    r.prob_exhaust = round_to(std::min(1.0, lognormal(rng, pe.mean, pe.sd)), 1e-7);
    r.conditional_expected_loss = round_to(std::min(1.0, lognormal(rng, cel.mean, cel.sd)), 1e-7);
    r.sp_rating = draw_one(rng, rating_marginal());
    r.trigger_types = draw_list(rng, trigger_marginal());
    r.risk_modeler = draw_one(rng, modeler_marginal());
    r.perils = draw_list(rng, peril_marginal());
    r.countries = draw_list(rng, country_marginal());
    const std::size_t n_states = rng.discrete(std::array<double, 3>{0.5, 0.35, 0.15});
    std::vector<std::size_t> picks(states.size());
    for (std::size_t j = 0; j < picks.size(); ++j) picks[j] = j;
    rng.shuffle(picks.begin(), picks.end());
    for (std::size_t j = 0; j < n_states; ++j) r.states_provinces.emplace_back(states[picks[j]]);
    r.cedent = draw_one(rng, cedent_marginal());
    r.underwriters = draw_list(rng, underwriter_marginal());
    r.exposure_term_months = kExposureTerms[rng.below(kExposureTerms.size())];

    double spread = pricing.intercept + pricing.a_expected_loss * r.expected_loss +
                    pricing.b_prob_first_loss * r.prob_first_loss +
                    pricing.c_conditional_el * r.conditional_expected_loss +
                    pricing.season_amplitude *
                        std::sin(2.0 * std::numbers::pi * r.issue_month / 12.0 + pricing.season_phase);
    if (config.entity_effects) {
      double peril = 0.0;
      for (const auto& p : r.perils) peril += lookup(pricing.peril_effects, p);
      spread += peril / static_cast<double>(r.perils.size());
      spread += lookup(pricing.cedent_effects, r.cedent);
    }
    spread += pricing.noise_sd * noise.normal();
    r.spread_premium = round_to(std::max(pricing.min_spread, spread), 1e-6);
    data.records.push_back(std::move(r));
  }
  return data;
}

std::vector<ContractRecord> synth_dataset(std::size_t n_contracts, std::uint64_t seed) {
  SynthConfig config;
  config.n_contracts = n_contracts;
  config.seed = seed;
  return synth_dataset(config).records;
}

std::string synth_manifest_json(const SynthDataset& data) {
  using nlohmann::ordered_json;
  const auto& p = data.pricing;
  ordered_json j;
  j["seed"] = data.config.seed;
  j["n_contracts"] = data.config.n_contracts;
  j["years"] = {data.config.first_year, data.config.last_year};
  j["entity_effects"] = data.config.entity_effects;
  j["pricing"] = {{"intercept", p.intercept},
                  {"expected_loss", p.a_expected_loss},
                  {"prob_first_loss", p.b_prob_first_loss},
                  {"conditional_expected_loss", p.c_conditional_el},
                  {"season_amplitude", p.season_amplitude},
                  {"season_phase", p.season_phase},
                  {"noise_sd", p.noise_sd},
                  {"peril_effect_sd", p.peril_effect_sd},
                  {"cedent_frequency_slope", p.cedent_frequency_slope},
                  {"cedent_effect_sd", p.cedent_effect_sd},
                  {"min_spread", p.min_spread}};
  ordered_json perils = ordered_json::object();
  for (const auto& [k, v] : p.peril_effects) perils[k] = v;
  ordered_json cedents = ordered_json::object();
  for (const auto& [k, v] : p.cedent_effects) cedents[k] = v;
  j["peril_effects"] = perils;
  j["cedent_effects"] = cedents;

  ordered_json tables = ordered_json::object();
  for (const MarginalTable* t : {&rating_marginal(), &trigger_marginal(), &modeler_marginal(), &peril_marginal(),
                                 &underwriter_marginal(), &country_marginal(), &cedent_marginal()}) {
    ordered_json levels = ordered_json::object();
    for (const auto& level : t->levels) levels[std::string(level.label)] = level.count;
    tables[std::string(t->field)] = {{"mean_list_size", t->mean_list_size}, {"levels", levels}};
  }
  j["marginals"] = tables;
  ordered_json moments = ordered_json::object();
  for (const auto& m : numeric_moments()) moments[std::string(m.field)] = {{"mean", m.mean}, {"sd", m.sd}};
  j["numeric_moments"] = moments;
  return j.dump(2) + "\n";
}

}  // namespace catnet
