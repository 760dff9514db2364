#pragma once

#include <cstdint>
#include <vector>

#include "metriq/embedding.hpp"
#include "metriq/quotient.hpp"
#include "metriq/random.hpp"

namespace metriq {

/// Smallest even integer exceeding 2 ceil(ln(1/eps) / ln(d / ln(1/eps))).
int cube_radius(int d, double eps);

/// Greedy maximal net in lexicographic order: keeps x when it is farther than `sep` from every kept center.
std::vector<std::uint32_t> greedy_cube_net(int d, int sep);

struct CubeQsOptions {
  bool allow_short = false;             // return instead of throwing when the size bound fails
  std::size_t exhaustive_limit = 1u << 16;  // block count up to which all pairs are scanned
  std::size_t sampled_pairs = 4'000'000;
};

/// S/A for the hypercube: S = cube minus the punctured balls B(x, r/2) around the net A.
/// Blocks: the points of S \ A in increasing order, then the A-block last. Distances are
/// computed on demand from the block structure.
struct CubeQsResult {
  int d = 0;
  double eps = 0.0;
  double p = 2.0;
  int r = 0;
  std::vector<std::uint32_t> centers;
  std::vector<std::uint32_t> survivors;  // S, increasing
  std::vector<std::uint32_t> singles;    // S \ A, increasing (block i <-> singles[i])
  std::vector<int> dist_to_a;            // Hamming distance to A for every cube point
  std::size_t blocks = 0;
  std::size_t required = 0;  // ceil((1 - eps) 2^d)
  bool size_ok = false;
  bool soft_warning = false;  // eps < exp(-d/400)
  DistortionReport report;    // closed-form image against d_U
  bool exhaustive = false;
  std::size_t pairs_checked = 0;
  bool sandwich_ok = false;
  double bound = 0.0;       // 8 sqrt(e r / (e-1)) for p = 2; 0 when no traced constant exists
  double normalized = 0.0;  // p < 2: distortion / (r^{1-1/p} (ln r)^{1/p})
  double image_norm = 0.0;

  int to_a(std::size_t block) const;
  /// Quotient metric between blocks.
  double distance(std::size_t i, std::size_t j) const;
  /// Closed-form image distance between blocks (A-block at the origin).
  double image_distance(std::size_t i, std::size_t j) const;
  /// Full QS space over the materialized cube; intended for d <= 12.
  QuotientSpace materialize() const;
  /// Gaussian phase-feature vectors of the p = 2 embedding (Monte Carlo).
  VectorEmbedding embedding_vectors(std::size_t features, RngSeed seed) const;
};

CubeQsResult cube_qs_construct(int d, double eps, double p, RngSeed seed, const CubeQsOptions& opt = {});

struct CubeLowerBound {
  int r = 0;       // largest radius of a ball made of singleton blocks (-1: no singleton at all)
  int m = 0;       // floor(r / 3)
  double bound = 0.0;  // m^{1-1/p}, 0 when r < 3
  std::uint32_t center = 0;
};

CubeLowerBound cube_certify_lower(int d, const std::vector<bool>& singleton, double p);
CubeLowerBound cube_certify_lower(const QuotientSpace& q, double p);
CubeLowerBound cube_certify_lower(const CubeQsResult& res, double p);

}  // namespace metriq
