#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "catnet/graph.hpp"

namespace catnet {

struct DegreeStats {
  std::size_t num_nodes = 0;
  std::size_t num_edges = 0;
  std::vector<std::size_t> histogram;  // histogram[k] = N_k, k = 0..k_max
  std::vector<double> pmf;             // N_k / N
  double mean = 0.0;                   // 2L/N
  double second_moment = 0.0;          // (1/N) sum k_i^2
  std::size_t k_min = 0;
  std::size_t k_max = 0;
};

DegreeStats degree_stats(const HomoView& g);
// Same statistics from a raw degree sequence; num_edges = sum/2.
DegreeStats degree_stats(std::span<const std::size_t> degrees);

// Mean over nodes of the multi-relation degree sum_r |N_r(u)|.
double mean_multi_degree(const HeteroGraph& g);

struct CriticalThreshold {
  double kappa = 0.0;          // <k^2>/<k>
  std::optional<double> f_c;   // absent when kappa <= 2
  bool flagged = false;
};

// Molloy-Reed random-removal threshold f_c = 1 - 1/(kappa - 1).
CriticalThreshold critical_threshold(double mean_degree, double second_moment);
CriticalThreshold critical_threshold(const DegreeStats& stats);

}  // namespace catnet
