#include "metriq/hypercube.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

#include "metriq/embeddings.hpp"
#include "metriq/error.hpp"
#include "metriq/pstable.hpp"

namespace metriq {

namespace {

int ham(std::uint32_t a, std::uint32_t b) { return std::popcount(a ^ b); }

/// XOR masks of weight at most w in d bits.
std::vector<std::uint32_t> ball_masks(int d, int w) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t x = 0; x < (1u << d); ++x)
    if (std::popcount(x) <= w) out.push_back(x);
  return out;
}

/// Multi-source BFS on the cube graph.
std::vector<int> distance_to(int d, const std::vector<std::uint32_t>& sources) {
  const std::size_t n = std::size_t{1} << d;
  std::vector<int> dist(n, -1);
  std::vector<std::uint32_t> frontier;
  for (auto s : sources)
    if (dist[s] < 0) dist[s] = 0, frontier.push_back(s);
  for (int level = 1; !frontier.empty(); ++level) {
    std::vector<std::uint32_t> next;
    for (auto x : frontier)
      for (int b = 0; b < d; ++b) {
        const std::uint32_t y = x ^ (1u << b);
        if (dist[y] < 0) dist[y] = level, next.push_back(y);
      }
    frontier.swap(next);
  }
  return dist;
}

}  // namespace

int cube_radius(int d, double eps) {
  const double l = std::log(1.0 / eps);
  return 2 * static_cast<int>(std::ceil(l / std::log(d / l))) + 2;
}

std::vector<std::uint32_t> greedy_cube_net(int d, int sep) {
  const std::size_t n = std::size_t{1} << d;
  std::vector<char> covered(n, 0);
  const auto masks = ball_masks(d, sep);
  std::vector<std::uint32_t> net;
  for (std::uint32_t x = 0; x < n; ++x) {
    if (covered[x]) continue;
    net.push_back(x);
    for (auto m : masks) covered[x ^ m] = 1;
  }
  return net;
}

int CubeQsResult::to_a(std::size_t block) const {
  return block + 1 == blocks ? 0 : dist_to_a[singles[block]];
}

double CubeQsResult::distance(std::size_t i, std::size_t j) const {
  if (i == j) return 0.0;
  const std::size_t last = blocks - 1;
  if (i == last) return dist_to_a[singles[j]];
  if (j == last) return dist_to_a[singles[i]];
  return std::min(ham(singles[i], singles[j]), dist_to_a[singles[i]] + dist_to_a[singles[j]]);
}

namespace {

double image_of_hamming(int h, int r, double p) {
  if (h == 0) return 0.0;
  if (p == 2.0) return truncated_gauss_distance(std::sqrt(static_cast<double>(h)), std::sqrt(static_cast<double>(r)));
  return pstable_distance(std::pow(h, 1.0 / p), std::pow(r, 1.0 / p), p);
}

}  // namespace

double CubeQsResult::image_distance(std::size_t i, std::size_t j) const {
  if (i == j) return 0.0;
  const std::size_t last = blocks - 1;
  if (i == last || j == last) return image_norm;
  return image_of_hamming(ham(singles[i], singles[j]), r, p);
}

QuotientSpace CubeQsResult::materialize() const {
  const std::size_t n = std::size_t{1} << d;
  Matrix c(n, std::vector<double>(n, 0.0));
  for (std::uint32_t x = 0; x < n; ++x)
    for (std::uint32_t y = 0; y < n; ++y) c[x][y] = ham(x, y);
  QuotientSpace q;
  q.base = std::make_shared<const MetricSpace>(std::move(c));
  for (auto x : singles) q.blocks.push_back({x});
  q.blocks.push_back(PointSet(centers.begin(), centers.end()));
  Matrix m(blocks, std::vector<double>(blocks, 0.0));
  for (std::size_t i = 0; i < blocks; ++i)
    for (std::size_t j = 0; j < blocks; ++j) m[i][j] = distance(i, j);
  q.metric = MetricSpace(std::move(m));
  q.provenance = survivors.size() == n ? Provenance::Q : Provenance::QS;
  return q;
}

VectorEmbedding CubeQsResult::embedding_vectors(std::size_t features, RngSeed seed) const {
  std::vector<std::vector<double>> pts;
  for (auto x : singles) {
    std::vector<double> v(static_cast<std::size_t>(d));
    for (int b = 0; b < d; ++b) v[static_cast<std::size_t>(b)] = (x >> b) & 1u;
    pts.push_back(std::move(v));
  }
  auto e = truncated_gauss_embed(pts, std::sqrt(static_cast<double>(r)), features, seed);
  e.points.push_back(std::vector<double>(2 * features, 0.0));  // A-block at the origin
  return e;
}

CubeQsResult cube_qs_construct(int d, double eps, double p, RngSeed seed, const CubeQsOptions& opt) {
  if (d < 1 || d > 22) throw ParameterError("cube dimension must lie in [1, 22]");
  if (!(eps >= std::ldexp(1.0, -d) && eps < 0.25)) throw ParameterError("eps must lie in [2^-d, 1/4)");
  if (!(p == 2.0 || (p >= 1.0 && p < 2.0))) throw ParameterError("p must be 2 or lie in [1, 2)");
  CubeQsResult res;
  res.d = d;
  res.eps = eps;
  res.p = p;
  res.r = cube_radius(d, eps);
  res.soft_warning = eps < std::exp(-d / 400.0);
  const std::size_t n = std::size_t{1} << d;

  res.centers = greedy_cube_net(d, 2 * res.r);
  res.dist_to_a = distance_to(d, res.centers);
  for (std::uint32_t x = 0; x < n; ++x) {
    const int h = res.dist_to_a[x];
    if (h == 0 || 2 * h > res.r) res.survivors.push_back(x);  // outside every punctured ball B(a, r/2)
    if (2 * h > res.r) res.singles.push_back(x);
  }
  res.blocks = res.singles.size() + 1;
  res.required = static_cast<std::size_t>(std::ceil((1.0 - eps) * static_cast<double>(n) - 1e-9));
  res.size_ok = res.blocks >= res.required;
  if (!res.size_ok && !opt.allow_short) {
    std::ostringstream diag;
    diag << "d=" << d << " eps=" << eps << " r=" << res.r << " |A|=" << res.centers.size() << " blocks=" << res.blocks
         << " required=" << res.required;
    throw ConstructionFailure("cube QS space falls short of (1-eps) 2^d blocks: " + diag.str());
  }

  res.image_norm = p == 2.0 ? std::sqrt(static_cast<double>(res.r)) : std::pow(res.r, 1.0 / p);
  std::vector<double> img(static_cast<std::size_t>(d) + 1);
  for (int h = 0; h <= d; ++h) img[static_cast<std::size_t>(h)] = image_of_hamming(h, res.r, p);

  DistortionReport rep;
  rep.expansion = 0.0;
  rep.contraction = 0.0;
  bool sandwich = true;
  std::size_t pairs = 0;
  auto visit = [&](std::size_t i, std::size_t j) {
    const double s = res.distance(i, j);
    double t;
    const std::size_t last = res.blocks - 1;
    if (i == last || j == last) {
      t = res.image_norm;
    } else {
      const int h = ham(res.singles[i], res.singles[j]);
      t = img[static_cast<std::size_t>(h)];
      if (s < std::min(h, res.r) || s > std::min(h, 4 * res.r)) sandwich = false;
    }
    ++pairs;
    if (t / s > rep.expansion) rep.expansion = t / s, rep.expansion_pair = {i, j};
    if (s / t > rep.contraction) rep.contraction = s / t, rep.contraction_pair = {i, j};
  };
  if (res.blocks >= 2) {
    if (res.blocks <= opt.exhaustive_limit) {
      res.exhaustive = true;
      for (std::size_t i = 0; i < res.blocks; ++i)
        for (std::size_t j = i + 1; j < res.blocks; ++j) visit(i, j);
    } else {
      Rng rng(seed);
      for (std::size_t i = 0; i + 1 < res.blocks; ++i) visit(i, res.blocks - 1);
      for (std::size_t k = 0; k < opt.sampled_pairs; ++k) {
        const std::size_t i = rng.index(res.blocks - 1), j = rng.index(res.blocks - 1);
        if (i != j) visit(std::min(i, j), std::max(i, j));
      }
    }
    rep.distortion = rep.expansion * rep.contraction;
  }
  res.report = rep;
  res.pairs_checked = pairs;
  res.sandwich_ok = sandwich;
  if (p == 2.0) {
    res.bound = 8.0 * std::sqrt(std::numbers::e * res.r / (std::numbers::e - 1.0));
  } else {
    res.normalized = rep.distortion / (std::pow(res.r, 1.0 - 1.0 / p) * std::pow(std::log(res.r), 1.0 / p));
  }
  return res;
}

CubeLowerBound cube_certify_lower(int d, const std::vector<bool>& singleton, double p) {
  if (!(p >= 1.0 && p <= 2.0)) throw ParameterError("cube lower bound needs p in [1, 2]");
  const std::size_t n = std::size_t{1} << d;
  if (singleton.size() != n) throw StructuralError("singleton mask does not match the cube size");
  std::vector<std::uint32_t> bad;
  for (std::uint32_t x = 0; x < n; ++x)
    if (!singleton[x]) bad.push_back(x);
  CubeLowerBound out;
  out.r = -1;
  if (bad.size() == n) return out;
  std::vector<int> dist = bad.empty() ? std::vector<int>(n, d + 1) : distance_to(d, bad);
  for (std::uint32_t x = 0; x < n; ++x) {
    if (!singleton[x]) continue;
    const int r = std::min(d, dist[x] - 1);
    if (r > out.r) out.r = r, out.center = x;
  }
  out.m = out.r >= 3 ? out.r / 3 : 0;
  out.bound = out.m > 0 ? std::pow(out.m, 1.0 - 1.0 / p) : 0.0;
  return out;
}

CubeLowerBound cube_certify_lower(const QuotientSpace& q, double p) {
  if (!q.base) throw StructuralError("quotient has no base space");
  const std::size_t n = q.base->size();
  if (n == 0 || !std::has_single_bit(n)) throw StructuralError("base space is not a hypercube");
  const int d = std::countr_zero(n);
  // Hamming check: exhaustive for small cubes, rows of a few points otherwise.
  const std::size_t rows = n <= 4096 ? n : 64;
  for (std::size_t x = 0; x < rows; ++x) {
    const std::size_t xi = n <= 4096 ? x : (x * 2654435761u) % n;
    for (std::size_t y = 0; y < n; ++y)
      if ((*q.base)(xi, y) != ham(static_cast<std::uint32_t>(xi), static_cast<std::uint32_t>(y)))
        throw StructuralError("base space is not the Hamming cube");
  }
  std::vector<bool> single(n, false);
  for (const auto& b : q.blocks)
    if (b.size() == 1) single[b[0]] = true;
  return cube_certify_lower(d, single, p);
}

CubeLowerBound cube_certify_lower(const CubeQsResult& res, double p) {
  std::vector<bool> single(std::size_t{1} << res.d, false);
  for (auto x : res.singles) single[x] = true;
  if (res.centers.size() == 1) single[res.centers[0]] = true;  // a one-point A-block is a singleton
  return cube_certify_lower(res.d, single, p);
}

}  // namespace metriq
