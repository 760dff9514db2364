#include "metriq/embedding.hpp"

#include <cmath>

#include "metriq/error.hpp"

namespace metriq {

std::string to_string(VectorEmbedding::Mode m) { return m == VectorEmbedding::Mode::Exact ? "exact" : "monte-carlo"; }

std::size_t VectorEmbedding::coordinates() const {
  if (points.empty()) return 0;
  return complex_coords ? points[0].size() / 2 : points[0].size();
}

void VectorEmbedding::check() const {
  if (!(p >= 1.0)) throw ParameterError("norm exponent must be at least 1");
  for (const auto& v : points)
    if (v.size() != points[0].size()) throw StructuralError("embedding vectors have different lengths");
  if (complex_coords && !points.empty() && points[0].size() % 2 != 0)
    throw StructuralError("complex coordinates need an even number of entries");
  if (!weights.empty() && weights.size() != coordinates())
    throw StructuralError("weight count does not match coordinate count");
}

namespace {

template <typename Diff>
double weighted_norm(const VectorEmbedding& e, std::size_t coords, Diff diff) {
  double s = 0.0;
  const bool two = e.p == 2.0;
  for (std::size_t c = 0; c < coords; ++c) {
    const double a = diff(c);
    if (a == 0.0) continue;
    const double term = two ? a * a : std::pow(a, e.p);
    s += e.weights.empty() ? term : e.weights[c] * term;
  }
  return two ? std::sqrt(s) : std::pow(s, 1.0 / e.p);
}

}  // namespace

double VectorEmbedding::distance(Index i, Index j) const {
  const auto& x = points[i];
  const auto& y = points[j];
  if (complex_coords)
    return weighted_norm(*this, coordinates(),
                         [&](std::size_t c) { return std::hypot(x[2 * c] - y[2 * c], x[2 * c + 1] - y[2 * c + 1]); });
  return weighted_norm(*this, coordinates(), [&](std::size_t c) { return std::abs(x[c] - y[c]); });
}

double VectorEmbedding::norm(Index i) const {
  const auto& x = points[i];
  if (complex_coords)
    return weighted_norm(*this, coordinates(), [&](std::size_t c) { return std::hypot(x[2 * c], x[2 * c + 1]); });
  return weighted_norm(*this, coordinates(), [&](std::size_t c) { return std::abs(x[c]); });
}

MetricSpace VectorEmbedding::induced_metric() const {
  check();
  const std::size_t n = size();
  Matrix d(n, std::vector<double>(n, 0.0));
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) d[i][j] = d[j][i] = distance(i, j);
  return MetricSpace(std::move(d));
}

}  // namespace metriq
