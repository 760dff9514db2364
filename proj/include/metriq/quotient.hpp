#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "metriq/metric.hpp"

namespace metriq {

enum class Provenance { Q, QS, SQ };
std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

/// Partition of (part of) a base space together with the geodesic metric on blocks.
struct QuotientSpace {
  std::shared_ptr<const MetricSpace> base;
  std::vector<PointSet> blocks;
  MetricSpace metric;
  Provenance provenance = Provenance::Q;

  std::size_t size() const { return blocks.size(); }
  /// Block index of each base point, or npos for uncovered points.
  std::vector<std::size_t> block_of() const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

/// Shortest-path closure of the complete graph on blocks weighted by set distance.
QuotientSpace quotient_metric(const MetricSpace& m, std::vector<PointSet> blocks);
QuotientSpace quotient_metric(std::shared_ptr<const MetricSpace> m, std::vector<PointSet> blocks);
/// M/A via the closed form; singletons in increasing order, the A-block last.
QuotientSpace quotient_by_subset(const MetricSpace& m, const PointSet& a);
QuotientSpace quotient_by_subset(std::shared_ptr<const MetricSpace> m, const PointSet& a);
/// Subspace of a quotient on the kept blocks (in the given order).
QuotientSpace sq_space(const QuotientSpace& q, const std::vector<std::size_t>& keep);

/// Checks disjointness, range and non-emptiness; throws StructuralError.
void check_blocks(std::size_t n, const std::vector<PointSet>& blocks);

struct PairArg {
  Index i = 0, j = 0;
};

struct DistortionReport {
  double expansion = 1.0;
  double contraction = 1.0;
  double distortion = 1.0;
  PairArg expansion_pair;
  PairArg contraction_pair;
};

/// Distortion of f: src -> tgt with f(i) = map[i]; identity if map is empty.
DistortionReport distortion_between(const MetricSpace& src, const MetricSpace& tgt,
                                    const std::vector<Index>& map = {});
/// Distortion between two distance oracles on the same n points.
DistortionReport distortion_of(std::size_t n, const std::function<double(Index, Index)>& src,
                               const std::function<double(Index, Index)>& tgt);

}  // namespace metriq
