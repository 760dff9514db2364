#include "metriq/hst.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "metriq/error.hpp"

namespace metriq {

HstTree HstTree::leaf(Index id) {
  HstNode n;
  n.leaf = id;
  return HstTree({n});
}

HstTree HstTree::join(double delta, const std::vector<HstTree>& children) {
  std::vector<HstNode> nodes(1);
  nodes[0].delta = delta;
  for (const auto& c : children) {
    const std::size_t offset = nodes.size();
    nodes[0].children.push_back(offset);
    for (HstNode n : c.nodes()) {
      for (auto& ch : n.children) ch += offset;
      nodes.push_back(std::move(n));
    }
  }
  return HstTree(std::move(nodes));
}

std::size_t HstTree::leaf_count() const {
  std::size_t c = 0;
  for (const auto& n : nodes_)
    if (n.leaf) ++c;
  return c;
}

std::vector<Index> HstTree::leaves_below(std::size_t node) const {
  std::vector<Index> out;
  std::vector<std::size_t> stack{node};
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    if (nodes_[u].leaf) out.push_back(*nodes_[u].leaf);
    for (auto it = nodes_[u].children.rbegin(); it != nodes_[u].children.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

HstTree HstTree::relabeled(const std::vector<Index>& map) const {
  auto nodes = nodes_;
  for (auto& n : nodes)
    if (n.leaf) n.leaf = map.at(*n.leaf);
  return HstTree(std::move(nodes));
}

HstTree HstTree::scaled(double c) const {
  auto nodes = nodes_;
  for (auto& n : nodes) n.delta *= c;
  return HstTree(std::move(nodes));
}

std::string HstViolation::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::LeafLabel: os << "leaf node " << node << " has a nonzero label"; break;
    case Kind::InternalLabel: os << "internal node " << node << " has a nonpositive label"; break;
    case Kind::Ratio: os << "node " << node << " label exceeds parent " << parent << " label / k"; break;
  }
  return os.str();
}

void check_tree_structure(const HstTree& t) {
  const auto& nodes = t.nodes();
  if (nodes.empty()) throw StructuralError("empty tree");
  std::vector<int> parents(nodes.size(), 0);
  for (const auto& n : nodes) {
    if (n.leaf && !n.children.empty()) throw StructuralError("leaf node with children");
    for (auto c : n.children) {
      if (c >= nodes.size() || c == 0) throw StructuralError("child index out of range or points at root");
      if (++parents[c] > 1) throw StructuralError("node with several parents (cycle or DAG)");
    }
  }
  std::vector<char> seen(nodes.size(), 0);
  std::vector<std::size_t> stack{0};
  std::size_t reached = 0;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    if (seen[u]) throw StructuralError("cycle in tree");
    seen[u] = 1;
    ++reached;
    for (auto c : nodes[u].children) stack.push_back(c);
  }
  if (reached != nodes.size()) throw StructuralError("disconnected tree");
  std::vector<char> ids(nodes.size(), 0);
  std::size_t leaves = 0;
  for (const auto& n : nodes) {
    if (!n.leaf) {
      if (n.children.empty()) throw StructuralError("internal node without children");
      continue;
    }
    ++leaves;
    if (*n.leaf >= nodes.size() || ids[*n.leaf]) throw StructuralError("leaf ids must be distinct");
    ids[*n.leaf] = 1;
  }
  for (std::size_t i = 0; i < leaves; ++i)
    if (!ids[i]) throw StructuralError("leaf ids must be 0..L-1");
}

HstReport validate_khst(const HstTree& t, double k) {
  check_tree_structure(t);
  HstReport rep;
  const auto& nodes = t.nodes();
  for (std::size_t u = 0; u < nodes.size(); ++u) {
    if (nodes[u].leaf && nodes[u].delta != 0.0) rep.violations.push_back({HstViolation::Kind::LeafLabel, u, u});
    if (!nodes[u].leaf && !(nodes[u].delta > 0.0))
      rep.violations.push_back({HstViolation::Kind::InternalLabel, u, u});
    for (auto c : nodes[u].children)
      if (nodes[c].delta > nodes[u].delta / k * (1.0 + 1e-12))
        rep.violations.push_back({HstViolation::Kind::Ratio, c, u});
  }
  return rep;
}

MetricSpace hst_to_metric(const HstTree& t) {
  check_tree_structure(t);
  const std::size_t n = t.leaf_count();
  Matrix d(n, std::vector<double>(n, 0.0));
  const auto& nodes = t.nodes();
  for (std::size_t u = 0; u < nodes.size(); ++u) {
    const auto& ch = nodes[u].children;
    std::vector<std::vector<Index>> groups;
    for (auto c : ch) groups.push_back(t.leaves_below(c));
    for (std::size_t a = 0; a < groups.size(); ++a)
      for (std::size_t b = a + 1; b < groups.size(); ++b)
        for (Index x : groups[a])
          for (Index y : groups[b]) d[x][y] = d[y][x] = nodes[u].delta;
  }
  return MetricSpace(std::move(d));
}

namespace {

/// Largest edge of a minimum spanning tree of `s` (Prim), i.e. the single-linkage merge height.
double mst_height(const MetricSpace& m, const PointSet& s) {
  if (s.size() < 2) return 0.0;
  std::vector<double> best(s.size(), std::numeric_limits<double>::infinity());
  std::vector<char> in(s.size(), 0);
  best[0] = 0.0;
  double height = 0.0;
  for (std::size_t it = 0; it < s.size(); ++it) {
    std::size_t u = s.size();
    for (std::size_t i = 0; i < s.size(); ++i)
      if (!in[i] && (u == s.size() || best[i] < best[u])) u = i;
    in[u] = 1;
    height = std::max(height, best[u]);
    for (std::size_t i = 0; i < s.size(); ++i)
      if (!in[i]) best[i] = std::min(best[i], m(s[u], s[i]));
  }
  return height;
}

/// Components of the graph on s with edges strictly below `h`.
std::vector<PointSet> split_below(const MetricSpace& m, const PointSet& s, double h) {
  std::vector<int> comp(s.size(), -1);
  std::vector<PointSet> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (comp[i] >= 0) continue;
    const int id = static_cast<int>(out.size());
    out.emplace_back();
    std::vector<std::size_t> stack{i};
    comp[i] = id;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      out.back().push_back(s[u]);
      for (std::size_t v = 0; v < s.size(); ++v)
        if (comp[v] < 0 && m(s[u], s[v]) < h) {
          comp[v] = id;
          stack.push_back(v);
        }
    }
    std::sort(out.back().begin(), out.back().end());
  }
  return out;
}

HstTree linkage(const MetricSpace& m, const PointSet& s) {
  if (s.size() == 1) return HstTree::leaf(s[0]);
  const double h = mst_height(m, s);
  std::vector<HstTree> kids;
  for (const auto& part : split_below(m, s, h)) kids.push_back(linkage(m, part));
  return HstTree::join(h, kids);
}

}  // namespace

HstTree ultrametric_to_hst(const MetricSpace& m) {
  if (m.size() == 0) throw UndefinedInputError("empty metric has no tree");
  PointSet all(m.size());
  for (Index i = 0; i < m.size(); ++i) all[i] = i;
  return linkage(m, all);
}

HstTree compress(const HstTree& t) {
  check_tree_structure(t);
  const auto& nodes = t.nodes();
  std::function<HstTree(std::size_t)> build = [&](std::size_t u) -> HstTree {
    if (nodes[u].leaf) return HstTree::leaf(*nodes[u].leaf);
    std::vector<HstTree> kids;
    std::vector<std::size_t> frontier = nodes[u].children;
    while (!frontier.empty()) {
      std::vector<std::size_t> next;
      for (auto c : frontier) {
        if (!nodes[c].leaf && nodes[c].delta == nodes[u].delta)
          next.insert(next.end(), nodes[c].children.begin(), nodes[c].children.end());
        else
          kids.push_back(build(c));
      }
      frontier = std::move(next);
    }
    if (kids.size() == 1) return kids[0].scaled(1.0);
    return HstTree::join(nodes[u].delta, kids);
  };
  return build(0);
}

VectorEmbedding ultrametric_to_l2(const HstTree& t) {
  check_tree_structure(t);
  const auto& nodes = t.nodes();
  const std::size_t n = t.leaf_count();
  VectorEmbedding e;
  e.p = 2.0;
  // Coordinate index = node index - 1 (every non-root node owns its parent edge).
  const std::size_t dim = nodes.size() > 1 ? nodes.size() - 1 : 1;
  e.points.assign(n, std::vector<double>(dim, 0.0));
  std::function<void(std::size_t, std::vector<std::pair<std::size_t, double>>&)> walk =
      [&](std::size_t u, std::vector<std::pair<std::size_t, double>>& path) {
        if (nodes[u].leaf) {
          for (auto [c, w] : path) e.points[*nodes[u].leaf][c] = w;
          return;
        }
        for (auto c : nodes[u].children) {
          const double w = std::sqrt(std::max(0.0, (nodes[u].delta * nodes[u].delta - nodes[c].delta * nodes[c].delta) / 2.0));
          path.emplace_back(c - 1, w);
          walk(c, path);
          path.pop_back();
        }
      };
  std::vector<std::pair<std::size_t, double>> path;
  walk(0, path);
  return e;
}

double line_um_lower_bound(const std::vector<double>& a) {
  if (a.size() < 2) throw StructuralError("sequence needs at least two points");
  double gap = 0.0;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    if (!(a[i + 1] > a[i])) throw StructuralError("sequence is not strictly increasing");
    gap = std::max(gap, a[i + 1] - a[i]);
  }
  return (a.back() - a.front()) / gap;
}

bool is_ultrametric(const MetricSpace& m, double tol) {
  const std::size_t n = m.size();
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      for (Index k = 0; k < n; ++k)
        if (m(i, j) > std::max(m(i, k), m(k, j)) + tol) return false;
  return true;
}

}  // namespace metriq
