#pragma once

#include <optional>
#include <string>
#include <vector>

#include "metriq/embedding.hpp"
#include "metriq/hst.hpp"
#include "metriq/metric.hpp"
#include "metriq/quotient.hpp"
#include "metriq/random.hpp"

namespace metriq {

struct EmbedResult {
  VectorEmbedding embedding;
  DistortionReport report;
  double bound = 0.0;
};

/// Subset-distance embedding of an m-centered space. Exact mode enumerates all
/// nonempty subsets (n <= 15); Monte Carlo samples 256q subsets per scale.
EmbedResult bourgain_embed(const MetricSpace& m, double mparam, double p, VectorEmbedding::Mode mode, RngSeed seed);

inline constexpr std::size_t kExactSubsetCap = 15;

struct PipelineResult {
  QuotientSpace q;
  std::string target;  // lp | UM
  std::optional<VectorEmbedding> embedding;
  std::optional<HstTree> tree;
  DistortionReport report;
  double mparam = 0.0;
  double bound = 0.0;
};

/// m-center quotient followed by an lp embedding or an HST.
PipelineResult pipeline_quotient_then_embed(const MetricSpace& m, double eps, double p, const std::string& target,
                                            RngSeed seed);

/// Isometric embedding of the star (root = point 0) into a finite weighted L_p
/// over the product space {0,1}^n.
VectorEmbedding star_to_lp(std::size_t n, double tau, double p, std::size_t max_points = kExactSubsetCap);

/// sqrt(2) D sqrt(1 - exp(-d^2 / (2 D^2))).
double truncated_gauss_distance(double d, double D);

/// Gaussian phase features; norms equal D.
VectorEmbedding truncated_gauss_embed(const std::vector<std::vector<double>>& points, double D, std::size_t features,
                                      RngSeed seed);

struct TransformResult {
  MetricSpace image;
  DistortionReport report;  // image against min{D, d}
  double bound = 0.0;
  double image_norm = 0.0;
  double lower = 0.0;  // uptolog envelope constants
  double upper = 0.0;
};

/// min{D, d} -> truncated Gaussian of sqrt(d) at level sqrt(D), for spaces whose
/// square root is Euclidean. Requires min distance >= 1.
TransformResult snowflake_sqrt_embed(const MetricSpace& x, double D);

/// psi distances for an l1 space: p-stable phase features of d^{1/p} at level D^{1/p}.
/// lower = min psi D^{1-1/p} / min{d, D}; upper = max psi / ((log D)^{1/p} min{d, D}).
TransformResult uptolog_embed(const MetricSpace& l1, double D, double p);

struct PoincareCheck {
  bool holds = false;
  double lhs = 0.0;
  double rhs = 0.0;
  double star_bound = 0.0;
};

/// Lower bound for c_p of the n-leaf star with leaf distances 2.
double star_bound(double p, std::size_t n);

/// Checks sum (|x_i-x_j|^p + |y_i-y_j|^p) <= c sum |x_i-y_j|^p with c = 2 (p <= 2) or 2^{p-1} (p >= 2).
PoincareCheck star_poincare_lower(const std::vector<std::vector<double>>& xs, const std::vector<std::vector<double>>& ys,
                                  double p);

/// 2 sqrt(5 - sqrt 7) / 3.
double truncation_witness_bound();

/// {(0,0), (D,0), (D/2,D), (D/2,0)} under min{|.|_2, D}.
MetricSpace truncation_witness(double D);

struct SearchResult {
  double distortion = 0.0;
  std::vector<std::vector<double>> points;
};

/// Nelder-Mead over point placements in R^dim with restarts; an upper bound on c_2.
SearchResult search_l2_distortion(const MetricSpace& m, std::size_t dim, std::size_t restarts, RngSeed seed);

}  // namespace metriq
