#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "catnet/graph.hpp"

namespace catnet {

// 3 * triangles / connected triples; 0 when there are no triples.
double global_clustering(const HomoView& g);
// Mean of the local coefficients over all nodes.
double average_clustering(const HomoView& g);

struct KnnPoint {
  std::size_t k = 0;
  double knn = 0.0;  // mean over degree-k nodes of their mean neighbor degree
  std::size_t count = 0;
};

struct Assortativity {
  std::optional<double> pearson_r;  // absent when undefined
  bool flagged = false;             // fewer than 2 edges or zero degree variance
  std::vector<KnnPoint> knn_curve;
  std::optional<double> knn_correlation;  // Pearson(k, knn(k)) over the curve
};

Assortativity assortativity(const HomoView& g);

struct PathStats {
  std::size_t diameter = 0;   // longest finite shortest path
  double avg_path = 0.0;      // over ordered reachable pairs
  bool connected = true;
  std::size_t reachable_pairs = 0;
};

PathStats path_stats(const HomoView& g, unsigned workers = 1);

}  // namespace catnet
