#include "metriq/composition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "metriq/error.hpp"

namespace metriq {

std::size_t CompositionTree::size() const {
  if (is_leaf()) return space.size();
  std::size_t s = 0;
  for (const auto& c : children) s += c.size();
  return s;
}

std::size_t CompositionTree::depth() const {
  std::size_t d = 0;
  for (const auto& c : children) d = std::max(d, c.depth());
  return is_leaf() ? 1 : d + 1;
}

double CompositionTree::gamma() const {
  if (is_leaf() || space.size() < 2) return 1.0;
  double diam = 0.0;
  for (const auto& c : children) diam = std::max(diam, c.realize().diameter());
  if (diam == 0.0) return 1.0;
  return diam / space.min_distance();
}

MetricSpace CompositionTree::realize() const {
  if (is_leaf()) return space;
  if (children.size() != space.size()) throw StructuralError("composition needs one child per outer point");
  if (!(beta >= 0.5)) throw ParameterError("composition beta must be at least 1/2");
  std::vector<MetricSpace> kids;
  double diam = 0.0;
  for (const auto& c : children) {
    kids.push_back(c.realize());
    diam = std::max(diam, kids.back().diameter());
  }
  const double g = (space.size() < 2 || diam == 0.0) ? 1.0 : diam / space.min_distance();
  const std::size_t n = size();
  Matrix d(n, std::vector<double>(n, 0.0));
  std::vector<std::size_t> offset(kids.size() + 1, 0);
  for (std::size_t z = 0; z < kids.size(); ++z) offset[z + 1] = offset[z] + kids[z].size();
  for (std::size_t x = 0; x < kids.size(); ++x)
    for (std::size_t y = 0; y < kids.size(); ++y)
      for (std::size_t u = 0; u < kids[x].size(); ++u)
        for (std::size_t v = 0; v < kids[y].size(); ++v)
          d[offset[x] + u][offset[y] + v] = x == y ? kids[x](u, v) : beta * g * space(x, y);
  return MetricSpace(std::move(d));
}

double CompositionTree::min_beta() const {
  if (is_leaf()) return std::numeric_limits<double>::infinity();
  double b = beta;
  for (const auto& c : children) b = std::min(b, c.min_beta());
  return b;
}

double CompositionTree::max_aspect_ratio() const {
  double a = space.size() >= 2 ? aspect_ratio(space) : 1.0;
  for (const auto& c : children) a = std::max(a, c.max_aspect_ratio());
  return a;
}

namespace {

struct Partial {
  std::vector<PointSet> blocks;  // indices local to the node's realized space
  HstTree tree;                  // leaf i <-> blocks[i]
};

/// Replaces leaf i of `outer` by `inner[i]`, scaling the outer labels by c.
HstTree graft(const HstTree& outer, std::size_t u, double c, const std::vector<HstTree>& inner) {
  const auto& node = outer.node(u);
  if (node.leaf) return inner.at(*node.leaf);
  std::vector<HstTree> kids;
  for (auto ch : node.children) kids.push_back(graft(outer, ch, c, inner));
  return HstTree::join(node.delta * c, kids);
}

struct Solver {
  double k;
  double alpha;
  int palette;

  /// Weighted aspect quotient of a base space with an equilateral (star) tree on top.
  Partial base(const MetricSpace& m, const std::vector<double>& w, RngSeed seed) const {
    Partial out;
    if (m.size() == 1) {
      out.blocks = {{0}};
      out.tree = HstTree::leaf(0);
      return out;
    }
    AspectOptions opt;
    opt.weights = w;
    opt.palette = palette;
    auto res = aspect_quotient(m, alpha, seed, opt);
    out.blocks = res.q.blocks;
    if (out.blocks.size() == 1) {
      out.tree = HstTree::leaf(0);
      return out;
    }
    std::vector<HstTree> leaves;
    for (Index i = 0; i < out.blocks.size(); ++i) leaves.push_back(HstTree::leaf(i));
    out.tree = HstTree::join(res.q.metric.diameter(), leaves);
    return out;
  }

  Partial solve(const CompositionTree& t, const std::vector<double>& w, RngSeed seed) const {
    if (t.is_leaf()) return base(t.space, w, seed);
    if (t.beta < alpha * k * (1.0 - 1e-12)) throw ParameterError("composition needs beta >= alpha * k at every node");
    const std::size_t outer_n = t.space.size();
    std::vector<std::size_t> offset(outer_n + 1, 0);
    for (std::size_t z = 0; z < outer_n; ++z) offset[z + 1] = offset[z] + t.children[z].size();
    std::vector<double> wz(outer_n, 0.0);
    for (std::size_t z = 0; z < outer_n; ++z)
      for (std::size_t u = offset[z]; u < offset[z + 1]; ++u) wz[z] += w[u];
    Partial top = base(t.space, wz, seed.derive(0));

    Partial out;
    std::vector<HstTree> inner;
    for (std::size_t i = 0; i < top.blocks.size(); ++i) {
      const auto& ui = top.blocks[i];
      Index zi = ui[0];
      for (Index z : ui)
        if (wz[z] > wz[zi]) zi = z;
      std::vector<double> wc(w.begin() + static_cast<long>(offset[zi]), w.begin() + static_cast<long>(offset[zi + 1]));
      Partial child = solve(t.children[zi], wc, seed.derive(1 + zi));
      const std::size_t first = out.blocks.size();
      for (std::size_t j = 0; j < child.blocks.size(); ++j) {
        PointSet v;
        for (Index u : child.blocks[j]) v.push_back(offset[zi] + u);
        if (j == 0)
          for (Index z : ui)
            if (z != zi)
              for (std::size_t u = offset[z]; u < offset[z + 1]; ++u) v.push_back(u);
        std::sort(v.begin(), v.end());
        out.blocks.push_back(std::move(v));
      }
      std::vector<Index> relabel(child.blocks.size());
      for (std::size_t j = 0; j < relabel.size(); ++j) relabel[j] = first + j;
      inner.push_back(child.tree.relabeled(relabel));
    }
    out.tree = graft(top.tree, 0, (t.beta + 1.0) * t.gamma(), inner);
    return out;
  }
};

}  // namespace

CompositionResult composition_qs(const CompositionTree& tree, double k, double alpha, RngSeed seed,
                                 std::optional<std::vector<double>> weights) {
  if (!(k >= 1.0)) throw ParameterError("k must be at least 1");
  if (!(alpha > 1.0 && alpha <= 2.0)) throw ParameterError("alpha must lie in (1,2]");
  if (tree.max_aspect_ratio() > 4.0 * (1.0 + 1e-12))
    throw PreconditionError("composition node spaces must have aspect ratio at most 4");
  const MetricSpace x = tree.realize();
  std::vector<double> w = weights ? *weights : std::vector<double>(x.size(), 1.0);
  if (w.size() != x.size()) throw StructuralError("weight count does not match point count");

  Solver solver{k, alpha, static_cast<int>(std::floor(std::log(4.0) / std::log(alpha))) + 1};
  Partial p = solver.solve(tree, w, seed);

  CompositionResult out;
  out.k = k;
  out.q = quotient_metric(x, p.blocks);
  out.tree = p.tree;
  const double bmin = tree.min_beta();
  const double bound = std::isinf(bmin) ? alpha : (1.0 + 1.0 / bmin) * alpha;
  if (out.q.size() >= 2) {
    out.cert = make_certificate("UM", out.q.metric, hst_to_metric(out.tree), {}, bound);
  } else {
    out.cert.target = "UM";
    out.cert.model = hst_to_metric(out.tree);
    out.cert.bound = bound;
  }
  out.non_contracting = out.cert.report.contraction <= 1.0 + 1e-12;
  out.khst_ok = validate_khst(out.tree, k).ok();
  out.sigma = 1.0 / (8.0 * solver.palette * std::log(solver.palette + 1.0));
  double total = 0.0;
  for (double v : w) total += v;
  for (const auto& b : out.q.blocks) {
    double mx = 0.0;
    for (Index u : b) mx = std::max(mx, w[u]);
    out.lhs += std::pow(mx, out.sigma);
  }
  out.rhs = std::pow(total, out.sigma);
  out.sigma_check = out.lhs >= out.rhs * (1.0 - 1e-12);

  if (!tree.is_leaf()) {
    // Claim check at the root: recompute U on the outer space from the V-blocks.
    const std::size_t outer_n = tree.space.size();
    std::vector<std::size_t> owner(x.size());
    std::size_t pos = 0;
    for (std::size_t z = 0; z < outer_n; ++z)
      for (std::size_t u = 0; u < tree.children[z].size(); ++u) owner[pos++] = z;
    // Each V-block's owners form one U block (or lie inside a single child).
    std::vector<PointSet> ublocks;
    std::vector<std::size_t> v_to_u;
    for (const auto& v : out.q.blocks) {
      PointSet zs;
      for (Index u : v) zs.push_back(owner[u]);
      std::sort(zs.begin(), zs.end());
      zs.erase(std::unique(zs.begin(), zs.end()), zs.end());
      std::size_t found = ublocks.size();
      for (std::size_t i = 0; i < ublocks.size(); ++i)
        if (std::find(ublocks[i].begin(), ublocks[i].end(), zs[0]) != ublocks[i].end()) found = i;
      if (found == ublocks.size()) {
        ublocks.push_back(zs);
      } else {
        PointSet merged = ublocks[found];
        merged.insert(merged.end(), zs.begin(), zs.end());
        std::sort(merged.begin(), merged.end());
        merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
        ublocks[found] = merged;
      }
      v_to_u.push_back(found);
    }
    const auto uq = quotient_metric(tree.space, ublocks);
    const double g = tree.gamma();
    bool ok = true;
    for (std::size_t p1 = 0; p1 < out.q.size(); ++p1)
      for (std::size_t p2 = p1 + 1; p2 < out.q.size(); ++p2) {
        if (v_to_u[p1] == v_to_u[p2]) continue;
        const double du = uq.metric(v_to_u[p1], v_to_u[p2]);
        const double dv = out.q.metric(p1, p2);
        if (dv < tree.beta * g * du * (1.0 - 1e-12) || dv > (tree.beta + 1.0) * g * du * (1.0 + 1e-12)) ok = false;
      }
    out.sandwich_ok = ok;
  }
  return out;
}

}  // namespace metriq
