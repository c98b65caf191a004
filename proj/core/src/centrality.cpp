#include "catnet/centrality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "catnet/error.hpp"
#include "catnet/parallel.hpp"

namespace catnet {

namespace {

constexpr std::size_t kSourceBlock = 64;
constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();

// Brandes dependency accumulation from one source, added into `acc`.
void accumulate_dependencies(const HomoView& g, NodeId s, std::vector<double>& acc) {
  const std::size_t n = g.num_nodes();
  std::vector<std::size_t> dist(n, kUnreached);
  std::vector<double> sigma(n, 0.0), delta(n, 0.0);
  std::vector<NodeId> order;
  order.reserve(n);
  dist[s] = 0;
  sigma[s] = 1.0;
  order.push_back(s);
  for (std::size_t head = 0; head < order.size(); ++head) {
    const NodeId v = order[head];
    for (NodeId w : g.neighbors(v)) {
      if (dist[w] == kUnreached) {
        dist[w] = dist[v] + 1;
        order.push_back(w);
      }
      if (dist[w] == dist[v] + 1) sigma[w] += sigma[v];
    }
  }
  for (std::size_t i = order.size(); i-- > 1;) {
    const NodeId w = order[i];
    for (NodeId v : g.neighbors(w)) {
      if (dist[v] + 1 == dist[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
    }
    acc[w] += delta[w];
  }
}

std::vector<std::size_t> bfs_distances(const HomoView& g, NodeId s) {
  std::vector<std::size_t> dist(g.num_nodes(), kUnreached);
  std::vector<NodeId> queue{s};
  dist[s] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const NodeId v = queue[head];
    for (NodeId w : g.neighbors(v)) {
      if (dist[w] != kUnreached) continue;
      dist[w] = dist[v] + 1;
      queue.push_back(w);
    }
  }
  return dist;
}

std::vector<double> multiply_shifted(const HomoView& g, const std::vector<double>& x) {
  std::vector<double> y(x);
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    for (NodeId v : g.neighbors(u)) y[u] += x[v];
  }
  return y;
}

double norm2(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

Eigen::SparseMatrix<double> katz_system(const HomoView& g, double beta) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(g.num_nodes() + 2 * g.num_edges());
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    entries.emplace_back(u, u, 1.0);
    for (NodeId v : g.neighbors(u)) entries.emplace_back(u, v, -beta);
  }
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(entries.begin(), entries.end());
  return m;
}

void check_katz_beta(const HomoView& g, double beta) {
  if (!(beta > 0.0)) throw NumericalError("Katz beta must be positive");
  const double lambda = spectral_radius(g);
  if (lambda > 0.0 && beta * lambda >= 1.0) {
    throw NumericalError("Katz series diverges: beta " + std::to_string(beta) + " >= 1/lambda_max = " +
                         std::to_string(1.0 / lambda));
  }
}

}  // namespace

std::vector<double> degree_centrality(const HomoView& g) {
  std::vector<double> out(g.num_nodes());
  for (NodeId u = 0; u < g.num_nodes(); ++u) out[u] = static_cast<double>(g.degree(u));
  return out;
}

std::vector<double> closeness_centrality(const HomoView& g, unsigned workers) {
  std::vector<double> out(g.num_nodes(), 0.0);
  parallel_for(g.num_nodes(), workers, [&](std::size_t s) {
    const auto dist = bfs_distances(g, static_cast<NodeId>(s));
    double sum = 0.0;
    for (std::size_t v = 0; v < dist.size(); ++v) {
      if (v != s && dist[v] != kUnreached) sum += 1.0 / static_cast<double>(dist[v]);
    }
    out[s] = sum;
  });
  return out;
}

std::optional<std::vector<double>> classic_closeness(const HomoView& g) {
  const std::size_t n = g.num_nodes();
  std::vector<double> out(n, 0.0);
  for (NodeId s = 0; s < n; ++s) {
    const auto dist = bfs_distances(g, s);
    double sum = 0.0;
    for (auto d : dist) {
      if (d == kUnreached) return std::nullopt;
      sum += static_cast<double>(d);
    }
    out[s] = sum > 0.0 ? static_cast<double>(n - 1) / sum : 0.0;
  }
  return out;
}

std::vector<double> betweenness_centrality(const HomoView& g, unsigned workers) {
  const std::size_t n = g.num_nodes();
  const std::size_t blocks = (n + kSourceBlock - 1) / kSourceBlock;
  std::vector<std::vector<double>> partial(blocks, std::vector<double>(n, 0.0));
  parallel_for(blocks, workers, [&](std::size_t b) {
    const std::size_t end = std::min(n, (b + 1) * kSourceBlock);
    for (std::size_t s = b * kSourceBlock; s < end; ++s) accumulate_dependencies(g, static_cast<NodeId>(s), partial[b]);
  });
  std::vector<double> out(n, 0.0);
  for (const auto& p : partial) {
    for (std::size_t i = 0; i < n; ++i) out[i] += p[i];
  }
  for (auto& v : out) v *= 0.5;  // each unordered pair was seen from both ends
  return out;
}

std::vector<double> eigenvector_centrality(const HomoView& g, double tol, std::size_t max_iter) {
  const std::size_t n = g.num_nodes();
  if (n == 0) return {};
  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
  for (std::size_t it = 0; it < max_iter; ++it) {
    auto y = multiply_shifted(g, x);
    const double norm = norm2(y);
    for (auto& v : y) v /= norm;
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) change = std::max(change, std::abs(y[i] - x[i]));
    x = std::move(y);
    if (change < tol) return x;
  }
  throw NumericalError("eigenvector centrality did not converge in " + std::to_string(max_iter) + " iterations");
}

double spectral_radius(const HomoView& g) {
  if (g.num_edges() == 0) return 0.0;
  const auto x = eigenvector_centrality(g);
  double rq = 0.0;
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    for (NodeId v : g.neighbors(u)) rq += x[u] * x[v];
  }
  return rq;
}

double default_katz_beta(const HomoView& g) {
  const double lambda = spectral_radius(g);
  return lambda > 0.0 ? 0.9 / lambda : 0.0;
}

std::vector<double> katz_index(const HomoView& g, double beta) {
  const std::size_t n = g.num_nodes();
  if (g.num_edges() == 0) return std::vector<double>(n, 0.0);
  check_katz_beta(g, beta);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
  for (NodeId u = 0; u < n; ++u) rhs(u) = beta * static_cast<double>(g.degree(u));
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(katz_system(g, beta));
  if (solver.info() != Eigen::Success) throw NumericalError("Katz system factorization failed");
  const Eigen::VectorXd s = solver.solve(rhs);
  if (solver.info() != Eigen::Success || !s.allFinite()) throw NumericalError("Katz solve failed");
  return std::vector<double>(s.data(), s.data() + s.size());
}

Matrix katz_pairwise(const HomoView& g, double beta) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  Matrix a = Matrix::Zero(n, n);
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    for (NodeId v : g.neighbors(u)) a(u, v) = 1.0;
  }
  if (g.num_edges() == 0) return a;
  check_katz_beta(g, beta);
  const Matrix system = Matrix::Identity(n, n) - beta * a;
  return system.ldlt().solve(beta * a);
}

std::vector<double> clustering_local(const HomoView& g) {
  std::vector<double> out(g.num_nodes(), 0.0);
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    const auto nb = g.neighbors(i);
    const std::size_t k = nb.size();
    if (k < 2) continue;
    std::size_t links = 0;
    for (NodeId a : nb) {
      const auto na = g.neighbors(a);
      // Count b in N(i) ∩ N(a) with b > a.
      auto p = std::upper_bound(nb.begin(), nb.end(), a);
      auto q = std::upper_bound(na.begin(), na.end(), a);
      while (p != nb.end() && q != na.end()) {
        if (*p < *q) {
          ++p;
        } else if (*q < *p) {
          ++q;
        } else {
          ++links;
          ++p;
          ++q;
        }
      }
    }
    out[i] = 2.0 * static_cast<double>(links) / (static_cast<double>(k) * static_cast<double>(k - 1));
  }
  return out;
}

CentralityTable compute_centralities(const HomoView& g, std::optional<double> katz_beta, unsigned workers) {
  CentralityTable t;
  t.degree = degree_centrality(g);
  t.closeness = closeness_centrality(g, workers);
  t.betweenness = betweenness_centrality(g, workers);
  t.eigenvector = eigenvector_centrality(g);
  t.lambda_max = spectral_radius(g);
  t.katz_beta = katz_beta ? *katz_beta : (t.lambda_max > 0.0 ? 0.9 / t.lambda_max : 0.0);
  t.katz = katz_index(g, t.katz_beta);
  t.clustering = clustering_local(g);
  return t;
}

}  // namespace catnet
