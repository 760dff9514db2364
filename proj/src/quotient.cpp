#include "metriq/quotient.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "metriq/error.hpp"

namespace metriq {

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::Q: return "Q";
    case Provenance::QS: return "QS";
    case Provenance::SQ: return "SQ";
  }
  return "?";
}

Provenance provenance_from_string(const std::string& s) {
  if (s == "Q") return Provenance::Q;
  if (s == "QS") return Provenance::QS;
  if (s == "SQ") return Provenance::SQ;
  throw StructuralError("unknown provenance '" + s + "'");
}

std::vector<std::size_t> QuotientSpace::block_of() const {
  std::vector<std::size_t> out(base ? base->size() : 0, npos);
  for (std::size_t b = 0; b < blocks.size(); ++b)
    for (Index x : blocks[b]) out[x] = b;
  return out;
}

void check_blocks(std::size_t n, const std::vector<PointSet>& blocks) {
  std::vector<char> seen(n, 0);
  for (const auto& b : blocks) {
    if (b.empty()) throw StructuralError("empty block");
    for (Index x : b) {
      if (x >= n) throw StructuralError("block index " + std::to_string(x) + " out of range");
      if (seen[x]) throw StructuralError("blocks overlap at point " + std::to_string(x));
      seen[x] = 1;
    }
  }
}

QuotientSpace quotient_metric(std::shared_ptr<const MetricSpace> m, std::vector<PointSet> blocks) {
  check_blocks(m->size(), blocks);
  const std::size_t k = blocks.size();
  Matrix d(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) d[i][j] = d[j][i] = set_distance(*m, blocks[i], blocks[j]);
  for (std::size_t via = 0; via < k; ++via)
    for (std::size_t i = 0; i < k; ++i) {
      const double di = d[i][via];
      for (std::size_t j = 0; j < k; ++j) {
        const double alt = di + d[via][j];
        if (alt < d[i][j]) d[i][j] = alt;
      }
    }
  std::size_t covered = 0;
  for (const auto& b : blocks) covered += b.size();
  QuotientSpace q;
  q.provenance = covered == m->size() ? Provenance::Q : Provenance::QS;
  q.base = std::move(m);
  q.blocks = std::move(blocks);
  q.metric = MetricSpace(std::move(d));
  return q;
}

QuotientSpace quotient_metric(const MetricSpace& m, std::vector<PointSet> blocks) {
  return quotient_metric(std::make_shared<const MetricSpace>(m), std::move(blocks));
}

QuotientSpace quotient_by_subset(std::shared_ptr<const MetricSpace> m, const PointSet& a) {
  if (a.empty()) throw StructuralError("collapsed subset must be nonempty");
  check_blocks(m->size(), {a});
  const PointSet rest = complement(m->size(), a);
  const std::size_t k = rest.size() + 1;
  std::vector<double> to_a(rest.size());
  for (std::size_t i = 0; i < rest.size(); ++i) to_a[i] = point_set_distance(*m, rest[i], a);
  Matrix d(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < rest.size(); ++i) {
    for (std::size_t j = i + 1; j < rest.size(); ++j)
      d[i][j] = d[j][i] = std::min((*m)(rest[i], rest[j]), to_a[i] + to_a[j]);
    d[i][k - 1] = d[k - 1][i] = to_a[i];
  }
  QuotientSpace q;
  q.provenance = Provenance::Q;
  for (Index x : rest) q.blocks.push_back({x});
  q.blocks.push_back(a);
  q.base = std::move(m);
  q.metric = MetricSpace(std::move(d));
  return q;
}

QuotientSpace quotient_by_subset(const MetricSpace& m, const PointSet& a) {
  return quotient_by_subset(std::make_shared<const MetricSpace>(m), a);
}

QuotientSpace sq_space(const QuotientSpace& q, const std::vector<std::size_t>& keep) {
  for (std::size_t b : keep)
    if (b >= q.blocks.size()) throw StructuralError("kept block index out of range");
  QuotientSpace out;
  out.base = q.base;
  out.provenance = keep.size() == q.blocks.size() ? q.provenance : Provenance::SQ;
  for (std::size_t b : keep) out.blocks.push_back(q.blocks[b]);
  check_blocks(q.base->size(), out.blocks);
  out.metric = q.metric.restrict(PointSet(keep.begin(), keep.end()));
  return out;
}

DistortionReport distortion_of(std::size_t n, const std::function<double(Index, Index)>& src,
                               const std::function<double(Index, Index)>& tgt) {
  DistortionReport r;
  r.expansion = 0.0;
  r.contraction = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      const double s = src(i, j);
      const double t = tgt(i, j);
      if (!(s > 0.0)) throw StructuralError("source distance is not positive");
      if (!(t > 0.0)) throw StructuralError("map is not injective (zero image distance)");
      if (t / s > r.expansion) {
        r.expansion = t / s;
        r.expansion_pair = {i, j};
      }
      if (s / t > r.contraction) {
        r.contraction = s / t;
        r.contraction_pair = {i, j};
      }
    }
  if (n < 2) {
    r.expansion = r.contraction = 1.0;
  }
  r.distortion = r.expansion * r.contraction;
  return r;
}

DistortionReport distortion_between(const MetricSpace& src, const MetricSpace& tgt,
                                    const std::vector<Index>& map) {
  std::vector<Index> f = map;
  if (f.empty()) {
    f.resize(src.size());
    for (Index i = 0; i < f.size(); ++i) f[i] = i;
  }
  if (f.size() != src.size()) throw StructuralError("map length does not match source size");
  std::vector<char> used(tgt.size(), 0);
  for (Index v : f) {
    if (v >= tgt.size()) throw StructuralError("map image out of range");
    if (used[v]) throw StructuralError("map is not injective");
    used[v] = 1;
  }
  return distortion_of(
      src.size(), [&](Index i, Index j) { return src(i, j); },
      [&](Index i, Index j) { return tgt(f[i], f[j]); });
}

}  // namespace metriq
