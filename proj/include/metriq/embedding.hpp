#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "metriq/metric.hpp"

namespace metriq {

/// Finite list of coordinate vectors with a weighted p-norm.
///
/// With complex_coords set, consecutive entries (re, im) form one coordinate and
/// the norm is taken over moduli. Weights are per coordinate; empty means all 1.
struct VectorEmbedding {
  enum class Mode { Exact, MonteCarlo };

  double p = 2.0;
  Mode mode = Mode::Exact;
  std::size_t samples = 0;
  bool complex_coords = false;
  std::vector<std::vector<double>> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
  std::size_t coordinates() const;
  double distance(Index i, Index j) const;
  double norm(Index i) const;
  MetricSpace induced_metric() const;
  /// Throws StructuralError on ragged vectors or a weight count mismatch.
  void check() const;
};

std::string to_string(VectorEmbedding::Mode m);

}  // namespace metriq
