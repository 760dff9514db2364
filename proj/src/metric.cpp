#include "metriq/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "metriq/error.hpp"

namespace metriq {

MetricSpace::MetricSpace(Matrix dist, std::vector<std::string> labels)
    : dist_(std::move(dist)), labels_(std::move(labels)) {
  for (const auto& r : dist_)
    if (r.size() != dist_.size()) throw StructuralError("distance matrix is not square");
  if (!labels_.empty() && labels_.size() != dist_.size())
    throw StructuralError("label count does not match point count");
}

MetricSpace MetricSpace::from_points(const std::vector<std::vector<double>>& pts, double p) {
  const std::size_t n = pts.size();
  Matrix d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (pts[i].size() != pts[j].size()) throw StructuralError("point dimensions differ");
      double s = 0.0;
      for (std::size_t c = 0; c < pts[i].size(); ++c) s += std::pow(std::abs(pts[i][c] - pts[j][c]), p);
      d[i][j] = d[j][i] = std::pow(s, 1.0 / p);
    }
  return MetricSpace(std::move(d));
}

MetricSpace MetricSpace::equilateral(std::size_t n, double edge) {
  Matrix d(n, std::vector<double>(n, edge));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0.0;
  return MetricSpace(std::move(d));
}

MetricSpace MetricSpace::restrict(const PointSet& keep) const {
  Matrix d(keep.size(), std::vector<double>(keep.size()));
  std::vector<std::string> lab;
  for (std::size_t a = 0; a < keep.size(); ++a) {
    if (keep[a] >= size()) throw StructuralError("restriction index out of range");
    for (std::size_t b = 0; b < keep.size(); ++b) d[a][b] = dist_[keep[a]][keep[b]];
    if (!labels_.empty()) lab.push_back(labels_[keep[a]]);
  }
  return MetricSpace(std::move(d), std::move(lab));
}

MetricSpace MetricSpace::scaled(double c) const {
  Matrix d = dist_;
  for (auto& r : d)
    for (auto& x : r) x *= c;
  return MetricSpace(std::move(d), labels_);
}

double MetricSpace::diameter() const {
  double m = 0.0;
  for (const auto& r : dist_)
    for (double x : r) m = std::max(m, x);
  return m;
}

double MetricSpace::min_distance() const {
  if (size() < 2) throw UndefinedInputError("minimum distance needs at least two points");
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = 0; j < size(); ++j)
      if (i != j) m = std::min(m, dist_[i][j]);
  return m;
}

std::string Violation::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Diagonal: os << "nonzero diagonal at (" << i << "," << i << ")"; break;
    case Kind::Symmetry: os << "asymmetric pair (" << i << "," << j << ")"; break;
    case Kind::Positivity: os << "nonpositive distance at (" << i << "," << j << ")"; break;
    case Kind::Triangle: os << "triangle violation at (" << i << "," << j << "," << k << ")"; break;
    case Kind::NonFinite: os << "non-finite entry at (" << i << "," << j << ")"; break;
  }
  os << " by " << amount;
  return os.str();
}

ValidationReport validate_metric(const Matrix& d, std::size_t limit) {
  const std::size_t n = d.size();
  for (const auto& r : d)
    if (r.size() != n) throw StructuralError("distance matrix is not square");
  ValidationReport rep;
  auto push = [&](Violation v) {
    if (rep.violations.size() >= limit) {
      rep.truncated = true;
      return false;
    }
    rep.violations.push_back(v);
    return true;
  };
  using K = Violation::Kind;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(d[i][i]) > kMetricTol) push({K::Diagonal, i, i, 0, d[i][i]});
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(d[i][j])) push({K::NonFinite, i, j, 0, d[i][j]});
      if (i < j) {
        if (std::abs(d[i][j] - d[j][i]) > kMetricTol) push({K::Symmetry, i, j, 0, d[i][j] - d[j][i]});
        if (!(d[i][j] > 0.0)) push({K::Positivity, i, j, 0, d[i][j]});
      }
    }
  }
  // i -- j -- k: report unordered endpoints once (i < k), any middle j.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = i + 1; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i || j == k) continue;
        const double excess = d[i][k] - d[i][j] - d[j][k];
        if (excess > kMetricTol && !push({K::Triangle, i, j, k, excess})) return rep;
      }
  return rep;
}

ValidationReport validate_metric(const MetricSpace& m, std::size_t limit) {
  return validate_metric(m.matrix(), limit);
}

WeightedMetricSpace::WeightedMetricSpace(MetricSpace b, std::vector<double> w)
    : base(std::move(b)), weights(std::move(w)) {
  if (weights.size() != base.size()) throw StructuralError("weight count does not match point count");
  for (double x : weights)
    if (!(x >= 0.0)) throw ParameterError("weights must be nonnegative");
}

double WeightedMetricSpace::total() const {
  double s = 0.0;
  for (double x : weights) s += x;
  return s;
}

double WeightedMetricSpace::max_weight(const PointSet& s) const {
  double m = 0.0;
  for (Index i : s) m = std::max(m, weights[i]);
  return m;
}

double aspect_ratio(const MetricSpace& m) {
  if (m.size() < 2) throw UndefinedInputError("aspect ratio needs at least two points");
  return m.diameter() / m.min_distance();
}

double nearest_radius(const MetricSpace& m, Index x) {
  if (m.size() < 2) throw UndefinedInputError("nearest radius needs at least two points");
  double r = std::numeric_limits<double>::infinity();
  for (Index y = 0; y < m.size(); ++y)
    if (y != x) r = std::min(r, m(x, y));
  return r;
}

std::vector<double> nearest_radii(const MetricSpace& m) {
  std::vector<double> r(m.size());
  for (Index x = 0; x < m.size(); ++x) r[x] = nearest_radius(m, x);
  return r;
}

PointSet band(const MetricSpace& m, double a, double b) {
  PointSet out;
  for (Index x = 0; x < m.size(); ++x) {
    const double r = nearest_radius(m, x);
    if (a <= r && r < b) out.push_back(x);
  }
  return out;
}

double point_set_distance(const MetricSpace& m, Index x, const PointSet& s) {
  if (s.empty()) throw UndefinedInputError("distance to an empty set");
  double r = std::numeric_limits<double>::infinity();
  for (Index y : s) r = std::min(r, m(x, y));
  return r;
}

double set_distance(const MetricSpace& m, const PointSet& u, const PointSet& v) {
  if (u.empty() || v.empty()) throw UndefinedInputError("set distance of an empty set");
  double r = std::numeric_limits<double>::infinity();
  for (Index x : u) r = std::min(r, point_set_distance(m, x, v));
  return r;
}

double hausdorff(const MetricSpace& m, const PointSet& u, const PointSet& v) {
  if (u.empty() || v.empty()) throw UndefinedInputError("Hausdorff distance of an empty set");
  double h = 0.0;
  for (Index x : u) h = std::max(h, point_set_distance(m, x, v));
  for (Index y : v) h = std::max(h, point_set_distance(m, y, u));
  return h;
}

PointSet complement(std::size_t n, const PointSet& s) {
  std::vector<char> in(n, 0);
  for (Index i : s) in.at(i) = 1;
  PointSet out;
  for (Index i = 0; i < n; ++i)
    if (!in[i]) out.push_back(i);
  return out;
}

namespace {

MetricSpace star_metric(const StarSpec& s) {
  if (!(s.tau > 0.0 && s.tau <= 2.0)) throw StructuralError("star parameter tau must lie in (0,2]");
  Matrix d(s.n + 1, std::vector<double>(s.n + 1, s.tau));
  for (std::size_t i = 0; i <= s.n; ++i) {
    d[i][i] = 0.0;
    if (i > 0) d[0][i] = d[i][0] = 1.0;
  }
  return MetricSpace(std::move(d));
}

MetricSpace lacunary_metric(const LacunarySpec& s) {
  if (!(s.k >= 1.0)) throw StructuralError("lacunarity must be at least 1");
  for (std::size_t i = 0; i < s.a.size(); ++i) {
    if (!(s.a[i] > 0.0)) throw StructuralError("lacunary sequence must be positive");
    if (i + 1 < s.a.size() && s.a[i + 1] > s.a[i] / s.k * (1.0 + 1e-12))
      throw StructuralError("sequence is not k-lacunary at index " + std::to_string(i));
  }
  const std::size_t n = s.a.size() + 1;
  Matrix d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d[i][j] = d[j][i] = s.a[i];
  return MetricSpace(std::move(d));
}

}  // namespace

MetricSpace realize_special(const SpecialMetric& s) {
  return std::visit(
      [](const auto& v) -> MetricSpace {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, StarSpec>) {
          return star_metric(v);
        } else if constexpr (std::is_same_v<T, LacunarySpec>) {
          return lacunary_metric(v);
        } else {
          if (!(v.edge > 0.0)) throw StructuralError("equilateral edge must be positive");
          return MetricSpace::equilateral(v.n, v.edge);
        }
      },
      s);
}

}  // namespace metriq
