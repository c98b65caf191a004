#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "catnet/graph.hpp"

namespace catnet {

struct FitnessSeries {
  std::vector<int> years;                         // ascending, distinct issue years
  std::vector<std::vector<std::size_t>> degrees;  // degrees[node][year index], cumulative subgraph
  std::vector<std::optional<double>> fitness;     // growth exponent per node
};

// OLS slope of log k against log(y - y_first + 1) over the years with k >= 1,
// where y_first is the first such year. Undefined with fewer than 3 such years.
std::optional<double> growth_exponent(std::span<const int> years, std::span<const std::size_t> degrees);

// Throws DataError with fewer than 2 distinct years.
FitnessSeries fitness_series(const HeteroGraph& g, const IssueYears& issue_years);

// Nodes with defined fitness, highest first; ties by node id.
std::vector<NodeId> rank_by_fitness(const FitnessSeries& series);

}  // namespace catnet
