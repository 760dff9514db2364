#include "metriq/lipschitz.hpp"

#include <algorithm>

#include "metriq/error.hpp"

namespace metriq {

void QuotientMap::check() const {
  if (assign.size() != source.size()) throw StructuralError("assignment size does not match the source");
  std::vector<char> hit(target.size(), 0);
  for (Index y : assign) {
    if (y >= target.size()) throw StructuralError("assignment points outside the target");
    hit[y] = 1;
  }
  if (std::find(hit.begin(), hit.end(), 0) != hit.end()) throw StructuralError("assignment is not surjective");
}

std::vector<PointSet> QuotientMap::preimages() const {
  std::vector<PointSet> pre(target.size());
  for (Index x = 0; x < assign.size(); ++x) pre[assign[x]].push_back(x);
  return pre;
}

LipColip lip_colip(const QuotientMap& qm) {
  qm.check();
  LipColip out;
  if (qm.target.size() < 2) {
    out.degenerate = true;
    return out;
  }
  const auto pre = qm.preimages();
  out.lip = 0.0;
  out.colip = 0.0;
  for (Index y = 0; y < qm.target.size(); ++y)
    for (Index z = y + 1; z < qm.target.size(); ++z) {
      const double dy = qm.target(y, z);
      out.lip = std::max(out.lip, dy / set_distance(qm.source, pre[y], pre[z]));
      out.colip = std::max(out.colip, hausdorff(qm.source, pre[y], pre[z]) / dy);
    }
  return out;
}

bool certify_lip_quotient(const QuotientMap& qm, double alpha) { return lip_colip(qm).product() <= alpha + 1e-9; }

QuotientMap quotient_map_onto_equilateral(const MetricSpace& m, const std::vector<PointSet>& blocks, double edge) {
  PointSet all;
  for (const auto& b : blocks) all.insert(all.end(), b.begin(), b.end());
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) throw StructuralError("blocks overlap");
  std::vector<Index> assign(all.size());
  for (std::size_t i = 0; i < blocks.size(); ++i)
    for (Index x : blocks[i]) assign[static_cast<std::size_t>(std::lower_bound(all.begin(), all.end(), x) - all.begin())] = i;
  return QuotientMap{m.restrict(all), MetricSpace::equilateral(blocks.size(), edge), std::move(assign)};
}

}  // namespace metriq
