#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "metriq/composition.hpp"
#include "metriq/metric.hpp"
#include "metriq/random.hpp"

namespace metriq {

/// X x [copies]: d_X within a copy, beta across copies. Point (x, i) has index i*|X| + x.
/// beta defaults to diam(X).
MetricSpace gen_padded_copies(const MetricSpace& x, std::size_t copies, std::optional<double> beta = std::nullopt);

struct GraphMetric {
  MetricSpace metric;  // 1 on edges, 2 otherwise
  std::vector<std::pair<Index, Index>> edges;
};

/// G(n, q) random graph as a {1, 2}-valued metric.
GraphMetric gen_random_graph_metric(std::size_t n, double q, RngSeed seed);

/// Realized composition (same as tree.realize()).
MetricSpace gen_composition(const CompositionTree& tree);

/// Random composition tree of the given depth; node spaces are integer metrics with
/// distances in [1, 4] and 1..max_size points.
CompositionTree gen_random_composition_tree(std::size_t depth, std::size_t max_size, double beta, RngSeed seed);

/// Z on Y x [k]: mu^i d_Y within level i (i = 1..k), theta d_X(i, j) across levels.
/// Point (y, i) has index (i-1)*|Y| + y. Requires mu > alpha Phi(Y) and
/// theta >= alpha mu^k diam(Y) / min d_X.
MetricSpace gen_lipcomp_product(const MetricSpace& x, const MetricSpace& y, double mu, double theta, double alpha);

/// Same with the smallest admissible parameters: mu = 2 alpha Phi(Y), theta = alpha mu^k diam(Y) / min d_X.
MetricSpace gen_lipcomp_product(const MetricSpace& x, const MetricSpace& y, double alpha);

/// floor(n/(4m))^2 subsets of [n] of size 2m, pairwise sharing at most one point
/// (lines over Z_P on a 2m x P grid).
std::vector<std::vector<Index>> gen_ktuple_free_family(std::size_t n, std::size_t m);

/// Integer-weight shortest-path metric with distances in [1, wmax].
MetricSpace gen_random_metric(std::size_t n, int wmax, RngSeed seed);

/// n uniform points in the unit cube [0,1]^dim with the Euclidean metric.
MetricSpace gen_random_euclidean(std::size_t n, std::size_t dim, RngSeed seed);

/// Hamming cube {0,1}^d.
MetricSpace gen_cube(int d);

/// Whether a {1,2}-valued metric contains K_{m,m} isometrically (sides at mutual distance 2,
/// cross pairs at distance 1).
bool has_isometric_kmm(const MetricSpace& m, std::size_t mm);

/// Fraction of random QS spaces (random partitions of random subsets keeping at least
/// `min_blocks` blocks) containing K_{m,m}. Statistical evidence only.
double sampled_kmm_rate(const MetricSpace& m, std::size_t mm, std::size_t min_blocks, std::size_t samples, RngSeed seed);

}  // namespace metriq
