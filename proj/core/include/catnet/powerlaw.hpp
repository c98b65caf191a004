#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace catnet {

// p_k proportional to (k + k_sat)^(-gamma) * exp(-k / k_cut) on [k_min, k_max].
struct PowerLawFit {
  double gamma = 0.0;
  int k_sat = 0;
  int k_cut = 0;
  double ks_stat = 0.0;
  double log_lik = 0.0;
  std::optional<double> bootstrap_p;
  std::size_t n_bootstrap = 0;
  std::size_t k_min = 0;
  std::size_t k_max = 0;
  std::size_t n = 0;  // observations with k >= 1
};

struct PowerLawGrid {
  std::vector<int> k_sat;
  std::vector<int> k_cut;
};

// k_sat in 0..min(100, k_max); k_cut on 30 log-spaced integers in [k_min, 2 k_max].
PowerLawGrid default_powerlaw_grid(std::size_t k_min, std::size_t k_max);

// Normalized pmf over k = k_min..k_max (index 0 is k_min).
std::vector<double> adjusted_powerlaw_pmf(double gamma, int k_sat, int k_cut, std::size_t k_min, std::size_t k_max);

// Sum of log p_{k_i} over observations (zeros ignored); support is the
// observed [k_min, k_max].
double powerlaw_log_likelihood(std::span<const std::size_t> degrees, double gamma, int k_sat, int k_cut);

// Max over the support of |F_empirical(k) - F_model(k)|.
double powerlaw_ks(std::span<const std::size_t> degrees, double gamma, int k_sat, int k_cut);

// Grid scan over (k_sat, k_cut): gamma starts from the footnote estimator and is
// refined by maximum likelihood; the pair with the smallest KS distance wins.
// Zero degrees are dropped. Throws DataError with fewer than 50 positive
// observations and NumericalError when every degree is equal.
PowerLawFit fit_adjusted_powerlaw(std::span<const std::size_t> degrees, const std::optional<PowerLawGrid>& grid = {});

// Maximum-likelihood gamma for fixed (k_sat, k_cut).
double fit_gamma(std::span<const std::size_t> degrees, int k_sat, int k_cut);

// Draws n degrees from the fitted model.
std::vector<std::size_t> sample_adjusted_powerlaw(const PowerLawFit& fit, std::size_t n, std::uint64_t seed);

// Fraction of n_boot model samples (same size, refit each time) whose KS is at
// least the observed KS. Replicate i uses seed derived from (seed, i), so the
// result does not depend on `workers`. Replicates are refit over `grid`, or
// over the default grid of their own support when none is given. Throws
// DataError when n_boot < 1.
double bootstrap_pvalue(const PowerLawFit& fit, std::span<const std::size_t> degrees, std::size_t n_boot,
                        std::uint64_t seed, unsigned workers = 1, const std::optional<PowerLawGrid>& grid = {});

}  // namespace catnet
