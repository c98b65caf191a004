#include "catnet/powerlaw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "catnet/error.hpp"
#include "catnet/parallel.hpp"
#include "catnet/random.hpp"

namespace catnet {

namespace {

constexpr double kGammaLo = 1.0 + 1e-6;
constexpr double kGammaHi = 10.0;
constexpr std::size_t kMinObservations = 50;

// Positive degrees binned over their observed support.
struct Support {
  std::size_t k_min = 0;
  std::size_t k_max = 0;
  std::vector<double> counts;  // counts[j] for k = k_min + j
  double n = 0.0;
};

Support make_support(std::span<const std::size_t> degrees) {
  Support s;
  s.k_min = std::numeric_limits<std::size_t>::max();
  for (auto k : degrees) {
    if (k == 0) continue;
    s.k_min = std::min(s.k_min, k);
    s.k_max = std::max(s.k_max, k);
  }
  if (s.k_max == 0) {
    s.k_min = 0;
    return s;
  }
  s.counts.assign(s.k_max - s.k_min + 1, 0.0);
  for (auto k : degrees) {
    if (k == 0) continue;
    s.counts[k - s.k_min] += 1.0;
    s.n += 1.0;
  }
  return s;
}

// Log-likelihood pieces for one (k_sat, k_cut) pair on a fixed support.
class PairModel {
 public:
  PairModel(const Support& s, int k_sat, int k_cut) : s_(s), k_cut_(k_cut) {
    const std::size_t m = s.counts.size();
    logk_.resize(m);
    lin_.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
      const double k = static_cast<double>(s.k_min + j);
      logk_[j] = std::log(k + k_sat);
      lin_[j] = k / static_cast<double>(k_cut);
      s1_ += s.counts[j] * logk_[j];
      sk_ += s.counts[j] * lin_[j];
    }
  }

  // Returns LL and fills the first two derivatives in gamma.
  double evaluate(double gamma, double* d1 = nullptr, double* d2 = nullptr) const {
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < logk_.size(); ++j) top = std::max(top, -gamma * logk_[j] - lin_[j]);
    double z = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t j = 0; j < logk_.size(); ++j) {
      const double w = std::exp(-gamma * logk_[j] - lin_[j] - top);
      z += w;
      m1 += w * logk_[j];
      m2 += w * logk_[j] * logk_[j];
    }
    m1 /= z;
    m2 /= z;
    if (d1) *d1 = -s1_ + s_.n * m1;
    if (d2) *d2 = -s_.n * std::max(0.0, m2 - m1 * m1);
    return -gamma * s1_ - sk_ - s_.n * (top + std::log(z));
  }

  std::vector<double> pmf(double gamma) const {
    std::vector<double> p(logk_.size());
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < p.size(); ++j) top = std::max(top, -gamma * logk_[j] - lin_[j]);
    double z = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
      p[j] = std::exp(-gamma * logk_[j] - lin_[j] - top);
      z += p[j];
    }
    for (auto& v : p) v /= z;
    return p;
  }

  double ks(double gamma) const {
    const auto p = pmf(gamma);
    double fm = 0.0, fe = 0.0, worst = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
      fm += p[j];
      fe += s_.counts[j] / s_.n;
      worst = std::max(worst, std::abs(fe - fm));
    }
    return worst;
  }

  // gamma = 1 + n [sum log(k_i / (K* - 1/2))]^-1 over k_i >= K*.
  double footnote_gamma(int k_sat) const {
    const double kstar = std::clamp(static_cast<double>(k_sat), static_cast<double>(s_.k_min),
                                    std::max(static_cast<double>(s_.k_min), static_cast<double>(k_cut_)));
    double n = 0.0, sum = 0.0;
    for (std::size_t j = 0; j < s_.counts.size(); ++j) {
      const double k = static_cast<double>(s_.k_min + j);
      if (k < kstar || s_.counts[j] == 0.0) continue;
      n += s_.counts[j];
      sum += s_.counts[j] * std::log(k / (kstar - 0.5));
    }
    if (n == 0.0 || !(sum > 0.0)) return 2.5;
    return 1.0 + n / sum;
  }

  // Safeguarded Newton on the concave log-likelihood over [kGammaLo, kGammaHi].
  double maximize(double start) const {
    double d1 = 0.0, d2 = 0.0;
    evaluate(kGammaLo, &d1);
    if (d1 <= 0.0) return kGammaLo;
    evaluate(kGammaHi, &d1);
    if (d1 >= 0.0) return kGammaHi;
    double lo = kGammaLo, hi = kGammaHi;
    double g = std::clamp(start, lo, hi);
    for (int it = 0; it < 200; ++it) {
      evaluate(g, &d1, &d2);
      if (d1 > 0.0) lo = g; else hi = g;
      double next = (d2 < 0.0) ? g - d1 / d2 : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - g) < 1e-12 * std::max(1.0, g) || hi - lo < 1e-13) return next;
      g = next;
    }
    return g;
  }

 private:
  const Support& s_;
  int k_cut_;
  std::vector<double> logk_;
  std::vector<double> lin_;
  double s1_ = 0.0;
  double sk_ = 0.0;
};

PowerLawFit fit_on_support(const Support& s, const PowerLawGrid& grid) {
  PowerLawFit best;
  best.ks_stat = std::numeric_limits<double>::infinity();
  for (int k_sat : grid.k_sat) {
    for (int k_cut : grid.k_cut) {
      if (k_sat < 0 || k_cut < 1 || k_cut < k_sat) continue;
      PairModel model(s, k_sat, k_cut);
      const double gamma = model.maximize(model.footnote_gamma(k_sat));
      const double ks = model.ks(gamma);
      if (ks < best.ks_stat) {
        best.gamma = gamma;
        best.k_sat = k_sat;
        best.k_cut = k_cut;
        best.ks_stat = ks;
        best.log_lik = model.evaluate(gamma);
      }
    }
  }
  if (!std::isfinite(best.ks_stat)) throw NumericalError("power-law grid has no admissible (k_sat, k_cut) pair");
  best.k_min = s.k_min;
  best.k_max = s.k_max;
  best.n = static_cast<std::size_t>(s.n);
  return best;
}

}  // namespace

PowerLawGrid default_powerlaw_grid(std::size_t k_min, std::size_t k_max) {
  PowerLawGrid grid;
  const auto sat_max = static_cast<int>(std::min<std::size_t>(100, k_max));
  for (int k = 0; k <= sat_max; ++k) grid.k_sat.push_back(k);
  const double lo = std::max<double>(1.0, static_cast<double>(k_min));
  const double hi = std::max(lo, 2.0 * static_cast<double>(k_max));
  constexpr int kPoints = 30;
  for (int i = 0; i < kPoints; ++i) {
    const double t = static_cast<double>(i) / (kPoints - 1);
    const int v = static_cast<int>(std::lround(std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)))));
    if (grid.k_cut.empty() || grid.k_cut.back() != v) grid.k_cut.push_back(v);
  }
  return grid;
}

std::vector<double> adjusted_powerlaw_pmf(double gamma, int k_sat, int k_cut, std::size_t k_min, std::size_t k_max) {
  if (k_min < 1 || k_max < k_min) throw DataError("power-law support must satisfy 1 <= k_min <= k_max");
  Support s;
  s.k_min = k_min;
  s.k_max = k_max;
  s.counts.assign(k_max - k_min + 1, 0.0);
  return PairModel(s, k_sat, k_cut).pmf(gamma);
}

double powerlaw_log_likelihood(std::span<const std::size_t> degrees, double gamma, int k_sat, int k_cut) {
  const Support s = make_support(degrees);
  if (s.n == 0.0) throw DataError("no positive degrees");
  return PairModel(s, k_sat, k_cut).evaluate(gamma);
}

double powerlaw_ks(std::span<const std::size_t> degrees, double gamma, int k_sat, int k_cut) {
  const Support s = make_support(degrees);
  if (s.n == 0.0) throw DataError("no positive degrees");
  return PairModel(s, k_sat, k_cut).ks(gamma);
}

double fit_gamma(std::span<const std::size_t> degrees, int k_sat, int k_cut) {
  const Support s = make_support(degrees);
  if (s.n == 0.0) throw DataError("no positive degrees");
  PairModel model(s, k_sat, k_cut);
  return model.maximize(model.footnote_gamma(k_sat));
}

PowerLawFit fit_adjusted_powerlaw(std::span<const std::size_t> degrees, const std::optional<PowerLawGrid>& grid) {
  const Support s = make_support(degrees);
  if (s.n < static_cast<double>(kMinObservations)) {
    throw DataError("power-law fit needs at least 50 positive degrees, got " +
                    std::to_string(static_cast<std::size_t>(s.n)));
  }
  if (s.k_min == s.k_max) throw NumericalError("all degrees equal " + std::to_string(s.k_min) + "; nothing to fit");
  return fit_on_support(s, grid ? *grid : default_powerlaw_grid(s.k_min, s.k_max));
}

std::vector<std::size_t> sample_adjusted_powerlaw(const PowerLawFit& fit, std::size_t n, std::uint64_t seed) {
  const auto p = adjusted_powerlaw_pmf(fit.gamma, fit.k_sat, fit.k_cut, fit.k_min, fit.k_max);
  std::vector<double> cdf(p.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) cdf[j] = (acc += p[j]);
  cdf.back() = 1.0;
  Rng rng(seed);
  std::vector<std::size_t> out(n);
  for (auto& k : out) {
    const double u = rng.uniform();
    const auto j = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    k = fit.k_min + std::min(j, p.size() - 1);
  }
  return out;
}

double bootstrap_pvalue(const PowerLawFit& fit, std::span<const std::size_t> degrees, std::size_t n_boot,
                        std::uint64_t seed, unsigned workers, const std::optional<PowerLawGrid>& grid) {
  if (n_boot < 1) throw DataError("bootstrap needs n_boot >= 1");
  const Support observed = make_support(degrees);
  const double ks_obs = PairModel(observed, fit.k_sat, fit.k_cut).ks(fit.gamma);
  const auto n = static_cast<std::size_t>(observed.n);
  std::vector<char> exceed(n_boot, 0);
  parallel_for(n_boot, workers, [&](std::size_t i) {
    const auto sample = sample_adjusted_powerlaw(fit, n, Rng::derive(seed, i));
    const Support s = make_support(sample);
    if (s.k_min == s.k_max) {
      exceed[i] = 0;
      return;
    }
    const auto refit = fit_on_support(s, grid ? *grid : default_powerlaw_grid(s.k_min, s.k_max));
    exceed[i] = refit.ks_stat >= ks_obs ? 1 : 0;
  });
  std::size_t count = 0;
  for (char e : exceed) count += static_cast<std::size_t>(e);
  return static_cast<double>(count) / static_cast<double>(n_boot);
}

}  // namespace catnet
