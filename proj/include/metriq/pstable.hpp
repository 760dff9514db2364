#pragma once

#include <cstddef>
#include <vector>

#include "metriq/embedding.hpp"
#include "metriq/random.hpp"

namespace metriq {

// Symmetric p-stable law normalized by E[exp(i t g)] = exp(-|t|^p).

/// Density at x; Cauchy closed form at p = 1, integral representation otherwise.
double pstable_density(double x, double p);

/// Chambers-Mallows-Stuck sample.
double pstable_sample(Rng& rng, double p);

/// E[(1 - cos(a g))^{p/2}] by quadrature against the density.
double pstable_cos_moment(double a, double p);

/// Same moment by Monte Carlo over `samples` draws.
double pstable_cos_moment_mc(double a, double p, std::size_t samples, RngSeed seed);

/// Distance between phase features at separation d and level D:
/// D * (E|exp(i a g) - 1|^p)^{1/p} with a = d / D, i.e. D * (2^{p/2} E[(1-cos(a g))^{p/2}])^{1/p}.
double pstable_distance(double d, double D, double p);

/// Complex phase features F(x)_j = D exp(i <x, g_j> / D), each with weight 1/features.
/// Image norms equal D by construction.
VectorEmbedding phase_embed(const std::vector<std::vector<double>>& points, double D, double p,
                            const std::vector<std::vector<double>>& directions);

/// Phase features with i.i.d. p-stable directions.
VectorEmbedding pstable_embed(const std::vector<std::vector<double>>& points, double D, double p,
                              std::size_t features, RngSeed seed);

/// Fitted two-sided envelope: extremes of moment / min{a^p log(1/a + 1), 1} over the grid.
struct Envelope {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t samples = 0;
};
Envelope pstable_envelope(double p, const std::vector<double>& a_grid);

}  // namespace metriq
