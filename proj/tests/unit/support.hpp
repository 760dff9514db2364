#pragma once

#include <cmath>
#include <vector>

#include "metriq/metric.hpp"
#include "metriq/random.hpp"

namespace testing_support {

using metriq::Index;
using metriq::Matrix;
using metriq::MetricSpace;
using metriq::PointSet;

/// Integer-valued random metric: shortest paths over a complete graph with
/// integer weights in [1, wmax]. Integer entries keep every sum exact.
inline MetricSpace random_integer_metric(metriq::Rng& rng, std::size_t n, int wmax = 20) {
  Matrix d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d[i][j] = d[j][i] = 1.0 + static_cast<double>(rng.index(wmax));
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return MetricSpace(std::move(d));
}

/// Euclidean random metric in the unit square (generic distances).
inline MetricSpace random_euclidean_metric(metriq::Rng& rng, std::size_t n, std::size_t dim = 2) {
  std::vector<std::vector<double>> pts(n, std::vector<double>(dim));
  for (auto& p : pts)
    for (auto& c : p) c = rng.uniform();
  return MetricSpace::from_points(pts);
}

/// Random partition of a random subset (coverage if `full`).
inline std::vector<PointSet> random_blocks(metriq::Rng& rng, std::size_t n, bool full) {
  const std::size_t k = 1 + rng.index(n);
  std::vector<PointSet> blocks(k);
  for (Index x = 0; x < n; ++x) {
    if (!full && rng.bernoulli(0.2)) continue;
    blocks[rng.index(k)].push_back(x);
  }
  std::vector<PointSet> out;
  for (auto& b : blocks)
    if (!b.empty()) out.push_back(b);
  if (out.empty()) out.push_back({0});
  return out;
}

/// Independent shortest-path oracle: Bellman-Ford style relaxation to a fixed point.
inline Matrix relax_closure(Matrix w) {
  const std::size_t k = w.size();
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j)
        for (std::size_t t = 0; t < k; ++t)
          if (w[i][t] + w[t][j] < w[i][j]) {
            w[i][j] = w[i][t] + w[t][j];
            changed = true;
          }
  }
  return w;
}

inline double brute_set_distance(const MetricSpace& m, const PointSet& u, const PointSet& v) {
  double best = INFINITY;
  for (Index a : u)
    for (Index b : v) best = std::min(best, m(a, b));
  return best;
}

}  // namespace testing_support
