#include "catnet/splits.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "catnet/error.hpp"
#include "catnet/random.hpp"

namespace catnet {

namespace {

void check_fraction(double f, const char* name) {
  if (!(f > 0.0 && f < 1.0)) throw DataError(std::string(name) + " must be in (0, 1)");
}

std::size_t share(std::size_t n, double frac) {
  return static_cast<std::size_t>(std::lround(frac * static_cast<double>(n)));
}

void sort_fold(Fold& f) {
  std::sort(f.train.begin(), f.train.end());
  std::sort(f.val.begin(), f.val.end());
  std::sort(f.test.begin(), f.test.end());
}

}  // namespace

std::string_view to_string(SplitKind k) { return k == SplitKind::OOS ? "oos" : "oot"; }

SplitKind parse_split_kind(std::string_view name) {
  if (name == "oos") return SplitKind::OOS;
  if (name == "oot") return SplitKind::OOT;
  throw DataError("unknown split mode '" + std::string(name) + "'");
}

SplitPlan oos_splits(std::span<const std::string> contract_ids, std::size_t n_folds, double test_frac,
                     double val_frac, std::uint64_t seed) {
  check_fraction(test_frac, "test_frac");
  check_fraction(val_frac, "val_frac");
  if (contract_ids.size() < 10) throw DataError("OOS splits need at least 10 contracts");
  if (n_folds < 1) throw DataError("n_folds must be positive");
  std::vector<std::string> ids(contract_ids.begin(), contract_ids.end());
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) throw DataError("duplicate contract id in split input");

  SplitPlan plan;
  plan.kind = SplitKind::OOS;
  plan.seed = seed;
  plan.test_frac = test_frac;
  plan.val_frac = val_frac;
  const std::size_t n_test = std::max<std::size_t>(1, share(ids.size(), test_frac));
  const std::size_t n_val = share(ids.size() - n_test, val_frac);
  for (std::size_t f = 0; f < n_folds; ++f) {
    Rng rng(Rng::derive(seed, f));
    auto order = ids;
    rng.shuffle(order.begin(), order.end());
    Fold fold;
    fold.test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
    fold.val.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test),
                    order.begin() + static_cast<std::ptrdiff_t>(n_test + n_val));
    fold.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test + n_val), order.end());
    sort_fold(fold);
    plan.folds.push_back(std::move(fold));
  }
  return plan;
}

SplitPlan oot_splits(std::span<const std::pair<std::string, int>> issue_years, int first_test_year, double val_frac,
                     std::uint64_t seed) {
  check_fraction(val_frac, "val_frac");
  std::set<int> years;
  for (const auto& [id, year] : issue_years) years.insert(year);
  if (years.size() < 2) throw DataError("OOT splits need at least 2 distinct issue years");

  SplitPlan plan;
  plan.kind = SplitKind::OOT;
  plan.seed = seed;
  plan.val_frac = val_frac;
  plan.first_test_year = first_test_year;
  for (int y : years) {
    if (y < first_test_year) continue;
    Fold fold;
    fold.test_year = y;
    std::vector<std::string> before;
    for (const auto& [id, year] : issue_years) {
      if (year < y) before.push_back(id);
      if (year == y) fold.test.push_back(id);
    }
    if (before.empty()) continue;
    std::sort(before.begin(), before.end());
    Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(y)));
    rng.shuffle(before.begin(), before.end());
    const std::size_t n_val = std::min(before.size() - 1, share(before.size(), val_frac));
    fold.val.assign(before.begin(), before.begin() + static_cast<std::ptrdiff_t>(n_val));
    fold.train.assign(before.begin() + static_cast<std::ptrdiff_t>(n_val), before.end());
    sort_fold(fold);
    plan.folds.push_back(std::move(fold));
  }
  if (plan.folds.empty()) {
    throw DataError("no test years at or after " + std::to_string(first_test_year) + " with earlier training data");
  }
  return plan;
}

}  // namespace catnet
