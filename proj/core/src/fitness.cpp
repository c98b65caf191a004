#include "catnet/fitness.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "catnet/error.hpp"

namespace catnet {

std::optional<double> growth_exponent(std::span<const int> years, std::span<const std::size_t> degrees) {
  if (years.size() != degrees.size()) throw DataError("growth_exponent: years and degrees differ in length");
  std::vector<double> x, y;
  int first = 0;
  bool seen = false;
  for (std::size_t i = 0; i < years.size(); ++i) {
    if (degrees[i] == 0) continue;
    if (!seen) {
      first = years[i];
      seen = true;
    }
    x.push_back(std::log(static_cast<double>(years[i] - first + 1)));
    y.push_back(std::log(static_cast<double>(degrees[i])));
  }
  if (x.size() < 3) return std::nullopt;
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx <= 0.0) return std::nullopt;
  return sxy / sxx;
}

FitnessSeries fitness_series(const HeteroGraph& g, const IssueYears& issue_years) {
  std::set<int> distinct;
  for (const auto& [node, year] : issue_years) distinct.insert(year);
  if (distinct.size() < 2) throw DataError("fitness needs at least 2 distinct issue years");

  FitnessSeries out;
  out.years.assign(distinct.begin(), distinct.end());
  out.degrees.assign(g.num_nodes(), std::vector<std::size_t>(out.years.size(), 0));
  for (std::size_t t = 0; t < out.years.size(); ++t) {
    const Subgraph sub = subgraph_by_years(g, out.years[t], issue_years);
    const HomoView view(sub.graph);
    for (NodeId local = 0; local < view.num_nodes(); ++local) {
      out.degrees[sub.parent_ids[local]][t] = view.degree(local);
    }
  }
  out.fitness.reserve(g.num_nodes());
  for (const auto& series : out.degrees) out.fitness.push_back(growth_exponent(out.years, series));
  return out;
}

std::vector<NodeId> rank_by_fitness(const FitnessSeries& series) {
  std::vector<NodeId> ids;
  for (NodeId u = 0; u < series.fitness.size(); ++u) {
    if (series.fitness[u]) ids.push_back(u);
  }
  std::stable_sort(ids.begin(), ids.end(),
                   [&](NodeId a, NodeId b) { return *series.fitness[a] > *series.fitness[b]; });
  return ids;
}

}  // namespace catnet
