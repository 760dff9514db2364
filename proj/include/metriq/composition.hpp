#pragma once

#include <optional>
#include <vector>

#include "metriq/constructions.hpp"
#include "metriq/hst.hpp"
#include "metriq/metric.hpp"
#include "metriq/quotient.hpp"

namespace metriq {

/// Explicit metric composition: either a base space (no children) or an outer
/// space whose every point is replaced by a child composition.
struct CompositionTree {
  MetricSpace space;
  std::vector<CompositionTree> children;
  double beta = 1.0;

  bool is_leaf() const { return children.empty(); }
  std::size_t size() const;
  std::size_t depth() const;
  /// max child diameter / min outer distance; 1 when every child is a single point.
  double gamma() const;
  /// Composed metric; points are listed child by child.
  MetricSpace realize() const;
  /// Smallest beta over internal nodes (infinity for a base space).
  double min_beta() const;
  double max_aspect_ratio() const;
};

struct CompositionResult {
  QuotientSpace q;
  HstTree tree;        // leaf i <-> block i of q
  Certificate cert;    // q against the tree metric
  double k = 1.0;
  bool khst_ok = false;
  bool non_contracting = false;
  double sigma = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool sigma_check = false;
  /// Sandwich beta*gamma*d_U <= d_V <= (beta+1)*gamma*d_U at the root, when the root is composite.
  std::optional<bool> sandwich_ok;
};

/// Weighted QS space of a composition, certified against a glued k-HST.
/// Requires every node space to have aspect ratio <= 4 and beta >= alpha*k at internal nodes.
CompositionResult composition_qs(const CompositionTree& tree, double k, double alpha, RngSeed seed,
                                 std::optional<std::vector<double>> weights = std::nullopt);

}  // namespace metriq
