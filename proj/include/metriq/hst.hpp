#pragma once

#include <optional>
#include <string>
#include <vector>

#include "metriq/embedding.hpp"
#include "metriq/metric.hpp"

namespace metriq {

struct HstNode {
  double delta = 0.0;
  std::optional<Index> leaf;
  std::vector<std::size_t> children;
};

/// Rooted labelled tree; node 0 is the root. Leaf ids must be 0..L-1.
class HstTree {
 public:
  HstTree() = default;
  explicit HstTree(std::vector<HstNode> nodes) : nodes_(std::move(nodes)) {}

  static HstTree leaf(Index id);
  static HstTree join(double delta, const std::vector<HstTree>& children);

  const std::vector<HstNode>& nodes() const { return nodes_; }
  const HstNode& node(std::size_t i) const { return nodes_[i]; }
  std::size_t root() const { return 0; }
  double root_label() const { return nodes_.empty() ? 0.0 : nodes_[0].delta; }
  std::size_t leaf_count() const;
  /// Leaf ids in depth-first order below `node`.
  std::vector<Index> leaves_below(std::size_t node) const;
  /// Copy with every leaf id replaced by map[id].
  HstTree relabeled(const std::vector<Index>& map) const;
  HstTree scaled(double c) const;

 private:
  std::vector<HstNode> nodes_;
};

struct HstViolation {
  enum class Kind { LeafLabel, InternalLabel, Ratio };
  Kind kind;
  std::size_t node = 0;
  std::size_t parent = 0;
  std::string describe() const;
};

struct HstReport {
  std::vector<HstViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Structural sanity (single parent, reachability, leaf ids 0..L-1); throws StructuralError.
void check_tree_structure(const HstTree& t);
/// Label violations against the k-HST conditions.
HstReport validate_khst(const HstTree& t, double k);
/// Leaf metric d(x,y) = label of lca(x,y).
MetricSpace hst_to_metric(const HstTree& t);
/// Single-linkage tree of a metric; exactly reproduces the input when it is an ultrametric.
HstTree ultrametric_to_hst(const MetricSpace& m);
/// Splices out internal nodes whose label equals the parent's label.
HstTree compress(const HstTree& t);
/// Exactly isometric Euclidean vectors for the leaf metric (one coordinate per tree edge).
VectorEmbedding ultrametric_to_l2(const HstTree& t);
/// (a_n - a_1) / max gap for a strictly increasing sequence.
double line_um_lower_bound(const std::vector<double>& a);
bool is_ultrametric(const MetricSpace& m, double tol = kMetricTol);

}  // namespace metriq
