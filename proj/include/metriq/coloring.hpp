#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "metriq/metric.hpp"
#include "metriq/random.hpp"

namespace metriq {

/// Symmetric coloring of unordered pairs of [n] with colors 1..k.
class PairColoring {
 public:
  PairColoring(std::size_t n, int k);

  std::size_t size() const { return n_; }
  int colors() const { return k_; }
  int operator()(Index i, Index j) const { return c_[i * n_ + j]; }
  void set(Index i, Index j, int color);

 private:
  std::size_t n_;
  int k_;
  std::vector<std::uint16_t> c_;
};

struct ColoringResult {
  std::vector<PointSet> blocks;
  int color = 1;
  std::size_t attempts = 0;
  std::size_t size() const { return blocks.size(); }
};

struct ColoringOptions {
  std::size_t max_attempts = 64;
  /// After the first valid dense split, also try doubling block counts.
  bool grow = true;
};

/// floor(n^{1/k} / (8 ln n)), the guaranteed block count.
std::size_t coloring_size_bound(std::size_t n, int k);

/// Disjoint blocks whose cross pairs all have minimum color `color`, with a
/// witness of that color for every point against every other block.
ColoringResult coloring_partition(const PairColoring& chi, RngSeed seed, const ColoringOptions& opt = {});
/// Same, restricted to the points of `domain`.
ColoringResult coloring_partition(const PairColoring& chi, const PointSet& domain, RngSeed seed,
                                  const ColoringOptions& opt = {});

/// Empty string when `r` satisfies both invariants; otherwise a description of the first failure.
std::string verify_coloring(const PairColoring& chi, const ColoringResult& r);

struct WeightedColoringResult {
  ColoringResult coloring;
  double sigma = 0.0;
  double lhs = 0.0;  // sum over blocks of max weight^sigma
  double rhs = 0.0;  // (total weight)^sigma
  bool check = false;
  bool two_point_branch = false;
};

WeightedColoringResult weighted_coloring_partition(const PairColoring& chi, const std::vector<double>& w,
                                                   RngSeed seed, const ColoringOptions& opt = {});

}  // namespace metriq
