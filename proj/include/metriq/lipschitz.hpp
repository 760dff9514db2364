#pragma once

#include <vector>

#include "metriq/metric.hpp"

namespace metriq {

/// Surjection from source points onto target points.
struct QuotientMap {
  MetricSpace source;
  MetricSpace target;
  std::vector<Index> assign;  // source point -> target point

  /// Throws StructuralError unless the assignment is a surjection onto the target.
  void check() const;
  std::vector<PointSet> preimages() const;
};

struct LipColip {
  double lip = 1.0;
  double colip = 1.0;
  bool degenerate = false;  // single target point: no pairs, (1, 1) by convention
  double product() const { return lip * colip; }
};

/// lip = max d_Y(y,z) / d_X(f^-1 y, f^-1 z); colip = max H_X(f^-1 y, f^-1 z) / d_Y(y,z).
LipColip lip_colip(const QuotientMap& qm);

/// lip * colip <= alpha + 1e-9.
bool certify_lip_quotient(const QuotientMap& qm, double alpha);

/// Map from the union of the blocks (as a subspace, points in increasing order) onto
/// an equilateral space with one point per block.
QuotientMap quotient_map_onto_equilateral(const MetricSpace& m, const std::vector<PointSet>& blocks, double edge = 1.0);

}  // namespace metriq
