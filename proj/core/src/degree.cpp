#include "catnet/degree.hpp"

#include <algorithm>

namespace catnet {

DegreeStats degree_stats(std::span<const std::size_t> degrees) {
  DegreeStats s;
  s.num_nodes = degrees.size();
  if (degrees.empty()) return s;
  s.k_min = *std::min_element(degrees.begin(), degrees.end());
  s.k_max = *std::max_element(degrees.begin(), degrees.end());
  s.histogram.assign(s.k_max + 1, 0);
  std::size_t total = 0;
  double squares = 0.0;
  for (auto k : degrees) {
    ++s.histogram[k];
    total += k;
    squares += static_cast<double>(k) * static_cast<double>(k);
  }
  const auto n = static_cast<double>(degrees.size());
  s.num_edges = total / 2;
  s.mean = static_cast<double>(total) / n;
  s.second_moment = squares / n;
  s.pmf.reserve(s.histogram.size());
  for (auto c : s.histogram) s.pmf.push_back(static_cast<double>(c) / n);
  return s;
}

DegreeStats degree_stats(const HomoView& g) {
  const auto degrees = g.degrees();
  return degree_stats(std::span<const std::size_t>(degrees));
}

double mean_multi_degree(const HeteroGraph& g) {
  if (g.num_nodes() == 0) return 0.0;
  std::size_t total = 0;
  for (NodeId u = 0; u < g.num_nodes(); ++u) total += g.multi_degree(u);
  return static_cast<double>(total) / static_cast<double>(g.num_nodes());
}

CriticalThreshold critical_threshold(double mean_degree, double second_moment) {
  CriticalThreshold t;
  if (mean_degree <= 0.0) {
    t.flagged = true;
    return t;
  }
  t.kappa = second_moment / mean_degree;
  if (t.kappa <= 2.0) {
    t.flagged = true;
    return t;
  }
  t.f_c = 1.0 - 1.0 / (t.kappa - 1.0);
  return t;
}

CriticalThreshold critical_threshold(const DegreeStats& stats) {
  return critical_threshold(stats.mean, stats.second_moment);
}

}  // namespace catnet
