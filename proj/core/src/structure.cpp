#include "catnet/structure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "catnet/centrality.hpp"
#include "catnet/parallel.hpp"

namespace catnet {

namespace {

std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  if (x.size() < 2) return std::nullopt;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

double global_clustering(const HomoView& g) {
  const auto local = clustering_local(g);
  double closed = 0.0, triples = 0.0;
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    const double k = static_cast<double>(g.degree(i));
    const double pairs = k * (k - 1.0) / 2.0;
    triples += pairs;
    closed += local[i] * pairs;  // links among neighbors of i
  }
  return triples > 0.0 ? closed / triples : 0.0;
}

double average_clustering(const HomoView& g) {
  if (g.num_nodes() == 0) return 0.0;
  const auto local = clustering_local(g);
  double sum = 0.0;
  for (double c : local) sum += c;
  return sum / static_cast<double>(local.size());
}

Assortativity assortativity(const HomoView& g) {
  Assortativity out;
  std::vector<double> x, y;
  x.reserve(2 * g.num_edges());
  y.reserve(2 * g.num_edges());
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    for (NodeId v : g.neighbors(u)) {
      x.push_back(static_cast<double>(g.degree(u)));
      y.push_back(static_cast<double>(g.degree(v)));
    }
  }
  if (g.num_edges() >= 2) out.pearson_r = pearson(x, y);
  out.flagged = !out.pearson_r.has_value();

  std::map<std::size_t, std::pair<double, std::size_t>> by_degree;
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    const std::size_t k = g.degree(u);
    if (k == 0) continue;
    double sum = 0.0;
    for (NodeId v : g.neighbors(u)) sum += static_cast<double>(g.degree(v));
    auto& slot = by_degree[k];
    slot.first += sum / static_cast<double>(k);
    ++slot.second;
  }
  std::vector<double> ks, knns;
  for (const auto& [k, slot] : by_degree) {
    const double knn = slot.first / static_cast<double>(slot.second);
    out.knn_curve.push_back(KnnPoint{k, knn, slot.second});
    ks.push_back(static_cast<double>(k));
    knns.push_back(knn);
  }
  out.knn_correlation = pearson(ks, knns);
  return out;
}

PathStats path_stats(const HomoView& g, unsigned workers) {
  const std::size_t n = g.num_nodes();
  struct PerSource {
    std::size_t eccentricity = 0;
    std::size_t total = 0;
    std::size_t reached = 0;
  };
  std::vector<PerSource> per(n);
  parallel_for(n, workers, [&](std::size_t s) {
    std::vector<std::size_t> dist(n, std::numeric_limits<std::size_t>::max());
    std::vector<NodeId> queue{static_cast<NodeId>(s)};
    dist[s] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const NodeId v = queue[head];
      for (NodeId w : g.neighbors(v)) {
        if (dist[w] != std::numeric_limits<std::size_t>::max()) continue;
        dist[w] = dist[v] + 1;
        queue.push_back(w);
        per[s].eccentricity = std::max(per[s].eccentricity, dist[w]);
        per[s].total += dist[w];
        ++per[s].reached;
      }
    }
  });
  PathStats out;
  std::size_t total = 0;
  for (const auto& p : per) {
    out.diameter = std::max(out.diameter, p.eccentricity);
    total += p.total;
    out.reachable_pairs += p.reached;
    if (p.reached + 1 != n) out.connected = false;
  }
  out.avg_path = out.reachable_pairs > 0 ? static_cast<double>(total) / static_cast<double>(out.reachable_pairs) : 0.0;
  return out;
}

}  // namespace catnet
