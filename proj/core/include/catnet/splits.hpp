#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace catnet {

enum class SplitKind { OOS, OOT };

std::string_view to_string(SplitKind k);
SplitKind parse_split_kind(std::string_view name);  // "oos" / "oot"

struct Fold {
  std::vector<std::string> train;  // contract ids, sorted
  std::vector<std::string> val;
  std::vector<std::string> test;
  std::optional<int> test_year;  // OOT only
};

struct SplitPlan {
  SplitKind kind = SplitKind::OOS;
  std::vector<Fold> folds;
  std::uint64_t seed = 0;
  double test_frac = 0.2;
  double val_frac = 0.15;
  std::optional<int> first_test_year;
};

inline constexpr double kDefaultValFrac = 0.15;

// n_folds independent seeded shuffles; each holds round(test_frac*n) test ids
// and round(val_frac * rest) validation ids. Throws DataError with fewer than
// 10 contracts or a fraction outside (0, 1).
SplitPlan oos_splits(std::span<const std::string> contract_ids, std::size_t n_folds = 10, double test_frac = 0.2,
                     double val_frac = kDefaultValFrac, std::uint64_t seed = 0);

// One fold per year y >= first_test_year that has contracts: test = year y,
// train/val = a seeded val_frac split of all earlier contracts. Throws
// DataError when the years span fewer than 2 values or no test year qualifies.
SplitPlan oot_splits(std::span<const std::pair<std::string, int>> issue_years, int first_test_year,
                     double val_frac = kDefaultValFrac, std::uint64_t seed = 0);

}  // namespace catnet
