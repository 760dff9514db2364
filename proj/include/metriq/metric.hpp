#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace metriq {

using Index = std::size_t;
using PointSet = std::vector<Index>;
using Matrix = std::vector<std::vector<double>>;

/// Additive tolerance used by every metric check in the library.
inline constexpr double kMetricTol = 1e-9;

/// Finite metric space stored as a dense distance matrix. The matrix is kept
/// exactly as supplied (validation may report asymmetry); index is identity.
class MetricSpace {
 public:
  MetricSpace() = default;
  /// Throws StructuralError if `dist` is not square.
  explicit MetricSpace(Matrix dist, std::vector<std::string> labels = {});

  static MetricSpace from_points(const std::vector<std::vector<double>>& pts, double p = 2.0);
  static MetricSpace equilateral(std::size_t n, double edge = 1.0);

  std::size_t size() const { return dist_.size(); }
  double operator()(Index i, Index j) const { return dist_[i][j]; }
  const std::vector<double>& row(Index i) const { return dist_[i]; }
  const Matrix& matrix() const { return dist_; }
  const std::vector<std::string>& labels() const { return labels_; }

  MetricSpace restrict(const PointSet& keep) const;
  MetricSpace scaled(double c) const;
  double diameter() const;
  /// Smallest distance between distinct points; throws for n < 2.
  double min_distance() const;

 private:
  Matrix dist_;
  std::vector<std::string> labels_;
};

struct Violation {
  enum class Kind { Diagonal, Symmetry, Positivity, Triangle, NonFinite };
  Kind kind;
  Index i = 0, j = 0, k = 0;
  double amount = 0.0;
  std::string describe() const;
};

struct ValidationReport {
  std::vector<Violation> violations;
  /// Set when the report was truncated at `limit` entries.
  bool truncated = false;
  bool ok() const { return violations.empty(); }
};

/// Checks zero diagonal, symmetry, positivity and the triangle inequality
/// within kMetricTol. `limit` caps the number of recorded violations.
ValidationReport validate_metric(const MetricSpace& m, std::size_t limit = 1000);
/// validate_metric on a raw matrix; throws StructuralError if not square.
ValidationReport validate_metric(const Matrix& m, std::size_t limit = 1000);

struct WeightedMetricSpace {
  MetricSpace base;
  std::vector<double> weights;

  WeightedMetricSpace(MetricSpace b, std::vector<double> w);
  double total() const;
  double max_weight(const PointSet& s) const;
};

double aspect_ratio(const MetricSpace& m);
/// r_M(x): distance from x to its closest other point.
double nearest_radius(const MetricSpace& m, Index x);
std::vector<double> nearest_radii(const MetricSpace& m);
/// {x : a <= r_M(x) < b}, increasing indices.
PointSet band(const MetricSpace& m, double a, double b);
double point_set_distance(const MetricSpace& m, Index x, const PointSet& s);
double set_distance(const MetricSpace& m, const PointSet& u, const PointSet& v);
double hausdorff(const MetricSpace& m, const PointSet& u, const PointSet& v);
PointSet complement(std::size_t n, const PointSet& s);

struct StarSpec {
  std::size_t n;
  double tau;
};
struct LacunarySpec {
  std::vector<double> a;  // a_1 >= ... >= a_{n-1}
  double k;
};
struct EquilateralSpec {
  std::size_t n;
  double edge;
};
using SpecialMetric = std::variant<StarSpec, LacunarySpec, EquilateralSpec>;

/// Star has n+1 points with the root at index 0; lacunary has a.size()+1 points.
MetricSpace realize_special(const SpecialMetric& s);

}  // namespace metriq
