#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "catnet/graph.hpp"
#include "catnet/linalg.hpp"

namespace catnet {

struct CentralityTable {
  std::vector<double> degree;
  std::vector<double> closeness;    // harmonic: sum_{j != i} 1/d(i,j)
  std::vector<double> betweenness;  // unnormalized, endpoints excluded
  std::vector<double> eigenvector;  // unit norm, nonnegative
  std::vector<double> katz;         // row sums of sum_{l>=1} beta^l A^l
  std::vector<double> clustering;   // local, 0 when k < 2
  double katz_beta = 0.0;
  double lambda_max = 0.0;
};

std::vector<double> degree_centrality(const HomoView& g);
std::vector<double> closeness_centrality(const HomoView& g, unsigned workers = 1);
// Reciprocal-mean closeness (N-1)/sum_j d(i,j); only defined on connected graphs.
std::optional<std::vector<double>> classic_closeness(const HomoView& g);
std::vector<double> betweenness_centrality(const HomoView& g, unsigned workers = 1);

// Power iteration on A + I from the all-ones vector until the relative change
// drops below tol.
std::vector<double> eigenvector_centrality(const HomoView& g, double tol = 1e-12, std::size_t max_iter = 1000000);

// Spectral radius of A via power iteration on A + I.
double spectral_radius(const HomoView& g);

// Node scores from (I - beta A) s = beta A 1. Throws NumericalError when
// beta >= 1/lambda_max.
std::vector<double> katz_index(const HomoView& g, double beta);
// Pairwise matrix X solving (I - beta A) X = beta A.
Matrix katz_pairwise(const HomoView& g, double beta);
// 0.9 / lambda_max, or 0 on an edgeless graph.
double default_katz_beta(const HomoView& g);

std::vector<double> clustering_local(const HomoView& g);

// Katz beta defaults to default_katz_beta when not given.
CentralityTable compute_centralities(const HomoView& g, std::optional<double> katz_beta = {}, unsigned workers = 1);

}  // namespace catnet
