#include "metriq/generators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>

#include "metriq/error.hpp"
#include "metriq/quotient.hpp"

namespace metriq {

MetricSpace gen_padded_copies(const MetricSpace& x, std::size_t copies, std::optional<double> beta) {
  if (copies == 0) throw ParameterError("need at least one copy");
  const double diam = x.diameter();
  const double b = beta.value_or(diam);
  if (b < diam * (1.0 - 1e-12)) throw ParameterError("beta must be at least diam(X)");
  const std::size_t n = x.size();
  Matrix d(n * copies, std::vector<double>(n * copies, 0.0));
  for (std::size_t i = 0; i < copies; ++i)
    for (std::size_t j = 0; j < copies; ++j)
      for (Index u = 0; u < n; ++u)
        for (Index v = 0; v < n; ++v) d[i * n + u][j * n + v] = i == j ? x(u, v) : b;
  return MetricSpace(std::move(d));
}

GraphMetric gen_random_graph_metric(std::size_t n, double q, RngSeed seed) {
  if (!(q >= 0.0 && q <= 1.0)) throw ParameterError("edge probability must lie in [0, 1]");
  Rng rng(seed);
  GraphMetric g{MetricSpace::equilateral(n, 2.0), {}};
  Matrix d = g.metric.matrix();
  for (Index u = 0; u < n; ++u)
    for (Index v = u + 1; v < n; ++v)
      if (rng.uniform() < q) {
        d[u][v] = d[v][u] = 1.0;
        g.edges.emplace_back(u, v);
      }
  g.metric = MetricSpace(std::move(d));
  return g;
}

MetricSpace gen_composition(const CompositionTree& tree) { return tree.realize(); }

MetricSpace gen_random_metric(std::size_t n, int wmax, RngSeed seed) {
  if (wmax < 1) throw ParameterError("maximum weight must be at least 1");
  Rng rng(seed);
  Matrix d(n, std::vector<double>(n, 0.0));
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) d[i][j] = d[j][i] = 1.0 + static_cast<double>(rng.index(static_cast<std::size_t>(wmax)));
  for (Index k = 0; k < n; ++k)
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return MetricSpace(std::move(d));
}

MetricSpace gen_random_euclidean(std::size_t n, std::size_t dim, RngSeed seed) {
  if (dim < 1) throw ParameterError("dimension must be at least 1");
  Rng rng(seed);
  std::vector<std::vector<double>> pts(n, std::vector<double>(dim));
  for (auto& x : pts)
    for (auto& c : x) c = rng.uniform();
  return MetricSpace::from_points(pts);
}

namespace {

CompositionTree random_tree(Rng& rng, std::size_t depth, std::size_t max_size, double beta, std::uint64_t& counter,
                            RngSeed seed) {
  CompositionTree t;
  t.space = gen_random_metric(1 + rng.index(max_size), 4, seed.derive(counter++));
  t.beta = beta;
  if (depth > 1)
    for (Index z = 0; z < t.space.size(); ++z) t.children.push_back(random_tree(rng, depth - 1, max_size, beta, counter, seed));
  return t;
}

}  // namespace

CompositionTree gen_random_composition_tree(std::size_t depth, std::size_t max_size, double beta, RngSeed seed) {
  if (depth == 0 || max_size == 0) throw ParameterError("depth and size must be positive");
  Rng rng(seed);
  std::uint64_t counter = 1;
  return random_tree(rng, depth, max_size, beta, counter, seed);
}

MetricSpace gen_lipcomp_product(const MetricSpace& x, const MetricSpace& y, double mu, double theta, double alpha) {
  const std::size_t k = x.size(), ny = y.size();
  if (k == 0 || ny == 0) throw StructuralError("empty factor");
  const double phi = ny >= 2 ? aspect_ratio(y) : 1.0;
  if (!(mu > alpha * phi)) throw ParameterError("lipcomp needs mu > alpha * Phi(Y)");
  if (k >= 2) {
    const double need = alpha * std::pow(mu, static_cast<double>(k)) * y.diameter() / x.min_distance();
    if (theta < need * (1.0 - 1e-12)) throw ParameterError("lipcomp needs theta >= alpha mu^k diam(Y) / min d_X");
  }
  Matrix d(k * ny, std::vector<double>(k * ny, 0.0));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      for (Index u = 0; u < ny; ++u)
        for (Index v = 0; v < ny; ++v)
          d[i * ny + u][j * ny + v] = i == j ? std::pow(mu, static_cast<double>(i + 1)) * y(u, v) : theta * x(i, j);
  return MetricSpace(std::move(d));
}

MetricSpace gen_lipcomp_product(const MetricSpace& x, const MetricSpace& y, double alpha) {
  const double phi = y.size() >= 2 ? aspect_ratio(y) : 1.0;
  const double mu = 2.0 * alpha * phi;
  const double theta =
      x.size() >= 2 ? alpha * std::pow(mu, static_cast<double>(x.size())) * y.diameter() / x.min_distance() : 1.0;
  return gen_lipcomp_product(x, y, mu, theta, alpha);
}

std::vector<std::vector<Index>> gen_ktuple_free_family(std::size_t n, std::size_t m) {
  if (m == 0 || n < 4 * m) throw ParameterError("tuple family needs n >= 4m");
  const std::size_t s = n / (4 * m);
  const std::size_t len = 2 * m;
  std::vector<std::vector<Index>> out;
  if (s == 1) {
    std::vector<Index> t(len);
    for (Index i = 0; i < len; ++i) t[i] = i;
    out.push_back(t);
    return out;
  }
  auto is_prime = [](std::size_t v) {
    if (v < 2) return false;
    for (std::size_t f = 2; f * f <= v; ++f)
      if (v % f == 0) return false;
    return true;
  };
  std::size_t prime = std::max(s, len);
  while (!is_prime(prime)) ++prime;
  if (len * prime > n) {
    // Small n: disjoint tuples suffice when they fit.
    if (s * s * len > n) throw ParameterError("tuple family does not fit in [n] for these parameters");
    for (std::size_t t = 0; t < s * s; ++t) {
      std::vector<Index> tup(len);
      for (Index i = 0; i < len; ++i) tup[i] = t * len + i;
      out.push_back(tup);
    }
    return out;
  }
  // Line {(x, a x + b mod P)} on the len x P grid; two lines share at most one point.
  for (std::size_t a = 0; a < prime && out.size() < s * s; ++a)
    for (std::size_t b = 0; b < prime && out.size() < s * s; ++b) {
      std::vector<Index> tup(len);
      for (std::size_t x = 0; x < len; ++x) tup[x] = x * prime + (a * x + b) % prime;
      out.push_back(tup);
    }
  return out;
}

MetricSpace gen_cube(int d) {
  if (d < 0 || d > 14) throw ParameterError("materialized cube dimension must lie in [0, 14]");
  const std::size_t n = std::size_t{1} << d;
  Matrix m(n, std::vector<double>(n, 0.0));
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) m[x][y] = std::popcount(x ^ y);
  return MetricSpace(std::move(m));
}

bool has_isometric_kmm(const MetricSpace& m, std::size_t mm) {
  const std::size_t n = m.size();
  if (mm == 0) return true;
  // Extend a set whose members are pairwise at distance 2 and (optionally) at distance 1 from `across`.
  std::function<bool(std::vector<Index>&, Index)> left = [&](std::vector<Index>& l, Index from) -> bool {
    if (l.size() == mm) {
      std::vector<Index> cand;
      for (Index v = 0; v < n; ++v) {
        bool ok = true;
        for (Index u : l) ok = ok && m(u, v) == 1.0;
        if (ok) cand.push_back(v);
      }
      std::vector<Index> r;
      std::function<bool(std::size_t)> right = [&](std::size_t from_c) -> bool {
        if (r.size() == mm) return true;
        for (std::size_t c = from_c; c < cand.size(); ++c) {
          bool ok = true;
          for (Index w : r) ok = ok && m(w, cand[c]) == 2.0;
          if (!ok) continue;
          r.push_back(cand[c]);
          if (right(c + 1)) return true;
          r.pop_back();
        }
        return false;
      };
      return right(0);
    }
    for (Index v = from; v < n; ++v) {
      bool ok = true;
      for (Index u : l) ok = ok && m(u, v) == 2.0;
      if (!ok) continue;
      l.push_back(v);
      if (left(l, v + 1)) return true;
      l.pop_back();
    }
    return false;
  };
  std::vector<Index> l;
  return left(l, 0);
}

double sampled_kmm_rate(const MetricSpace& m, std::size_t mm, std::size_t min_blocks, std::size_t samples, RngSeed seed) {
  if (samples == 0) return 0.0;
  const std::size_t n = m.size();
  if (min_blocks > n) throw ParameterError("more blocks requested than points");
  Rng rng(seed);
  std::size_t hits = 0, drawn = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    std::vector<PointSet> blocks;
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const std::size_t k = min_blocks + rng.index(n - min_blocks + 1);
      std::vector<PointSet> b(k);
      for (Index x = 0; x < n; ++x)
        if (rng.bernoulli(0.9)) b[rng.index(k)].push_back(x);
      std::erase_if(b, [](const PointSet& v) { return v.empty(); });
      if (b.size() >= std::max<std::size_t>(min_blocks, 1)) {
        blocks = std::move(b);
        break;
      }
    }
    if (blocks.empty()) continue;
    ++drawn;
    if (has_isometric_kmm(quotient_metric(m, blocks).metric, mm)) ++hits;
  }
  return drawn ? static_cast<double>(hits) / static_cast<double>(drawn) : 0.0;
}

}  // namespace metriq
