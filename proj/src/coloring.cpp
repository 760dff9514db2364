#include "metriq/coloring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "metriq/error.hpp"

namespace metriq {

PairColoring::PairColoring(std::size_t n, int k) : n_(n), k_(k), c_(n * n, 1) {
  if (k < 1) throw ParameterError("a coloring needs at least one color");
}

void PairColoring::set(Index i, Index j, int color) {
  if (color < 1 || color > k_) throw ParameterError("color out of range");
  c_[i * n_ + j] = c_[j * n_ + i] = static_cast<std::uint16_t>(color);
}

std::size_t coloring_size_bound(std::size_t n, int k) {
  if (n < 2) return 0;
  const double nd = static_cast<double>(n);
  return static_cast<std::size_t>(std::floor(std::pow(nd, 1.0 / k) / (8.0 * std::log(nd))));
}

namespace {

struct Solver {
  const PairColoring& chi;
  Rng rng;
  ColoringOptions opt;
  std::size_t attempts = 0;

  /// Random split of `c` into s parts satisfying the dense-case event, or empty.
  std::vector<PointSet> try_split(const PointSet& c, std::size_t s, int color, std::size_t tries) {
    for (std::size_t t = 0; t < tries; ++t) {
      ++attempts;
      std::vector<PointSet> parts(s);
      for (Index x : c) parts[rng.index(s)].push_back(x);
      bool ok = true;
      for (const auto& p : parts) ok = ok && !p.empty();
      for (std::size_t u = 0; ok && u < s; ++u)
        for (Index x : parts[u]) {
          for (std::size_t v = 0; ok && v < s; ++v) {
            if (v == u) continue;
            bool hit = false;
            for (Index y : parts[v])
              if (chi(x, y) == color) {
                hit = true;
                break;
              }
            ok = hit;
          }
          if (!ok) break;
        }
      if (ok) return parts;
    }
    return {};
  }

  ColoringResult fallback(const PointSet& pts) {
    ColoringResult r;
    if (pts.size() < 2) {
      if (!pts.empty()) r.blocks = {{pts[0]}};
      return r;
    }
    r.blocks = {{pts[0]}, {pts[1]}};
    r.color = chi(pts[0], pts[1]);
    return r;
  }

  /// Colors below `lo` never occur among pairs of `pts`.
  ColoringResult solve(const PointSet& pts, int lo) {
    const int k = chi.colors();
    if (pts.size() < 2) return fallback(pts);
    // Skip colors that do not occur; a single remaining color gives singletons.
    int present_lo = k + 1, present_hi = 0;
    for (std::size_t a = 0; a < pts.size(); ++a)
      for (std::size_t b = a + 1; b < pts.size(); ++b) {
        const int c = chi(pts[a], pts[b]);
        present_lo = std::min(present_lo, c);
        present_hi = std::max(present_hi, c);
      }
    lo = std::max(lo, present_lo);
    if (present_lo == present_hi) {
      ColoringResult r;
      for (Index x : pts) r.blocks.push_back({x});
      r.color = present_lo;
      return r;
    }
    const int kk = k - lo + 1;  // colors still in play
    const double n = static_cast<double>(pts.size());
    const double root = std::pow(n, 1.0 / kk);
    std::vector<std::size_t> deg(pts.size(), 0);
    std::size_t m = 0;
    for (std::size_t a = 0; a < pts.size(); ++a)
      for (std::size_t b = 0; b < pts.size(); ++b)
        if (a != b && chi(pts[a], pts[b]) == lo) ++deg[a], ++m;

    if (static_cast<double>(m) >= 0.5 * n * root) {
      PointSet c;
      for (std::size_t a = 0; a < pts.size(); ++a)
        if (static_cast<double>(deg[a]) >= root / 4.0) c.push_back(pts[a]);
      const std::size_t s0 = std::max<std::size_t>(2, coloring_size_bound(pts.size(), kk));
      std::vector<PointSet> best;
      if (s0 <= c.size()) best = try_split(c, s0, lo, opt.max_attempts);
      if (!best.empty() && opt.grow) {
        for (std::size_t s = 2 * best.size(); s <= c.size(); s *= 2) {
          auto parts = try_split(c, s, lo, 8);
          if (parts.empty()) break;
          best = std::move(parts);
        }
      }
      if (best.empty()) return fallback(pts);
      ColoringResult r;
      r.blocks = std::move(best);
      r.color = lo;
      return r;
    }

    // Sparse case: greedy coloring of the low-degree points, keep the largest class.
    PointSet d;
    for (std::size_t a = 0; a < pts.size(); ++a)
      if (static_cast<double>(deg[a]) < root) d.push_back(pts[a]);
    std::vector<int> cls(d.size(), -1);
    int classes = 0;
    for (std::size_t a = 0; a < d.size(); ++a) {
      std::vector<char> used(d.size() + 1, 0);
      for (std::size_t b = 0; b < a; ++b)
        if (chi(d[a], d[b]) == lo) used[static_cast<std::size_t>(cls[b])] = 1;
      int c = 0;
      while (used[static_cast<std::size_t>(c)]) ++c;
      cls[a] = c;
      classes = std::max(classes, c + 1);
    }
    std::vector<std::size_t> count(static_cast<std::size_t>(classes), 0);
    for (int c : cls) ++count[static_cast<std::size_t>(c)];
    const int pick = static_cast<int>(std::max_element(count.begin(), count.end()) - count.begin());
    PointSet indep;
    for (std::size_t a = 0; a < d.size(); ++a)
      if (cls[a] == pick) indep.push_back(d[a]);
    if (indep.size() < 2) return fallback(pts);
    return solve(indep, lo + 1);
  }
};

}  // namespace

ColoringResult coloring_partition(const PairColoring& chi, const PointSet& domain, RngSeed seed,
                                  const ColoringOptions& opt) {
  if (domain.size() < 2) throw ParameterError("coloring needs at least two points");
  Solver solver{chi, Rng(seed), opt};
  ColoringResult r = solver.solve(domain, 1);
  r.attempts = solver.attempts;
  const std::string err = verify_coloring(chi, r);
  if (!err.empty()) throw ProbabilisticFailure("coloring invariant check failed: " + err, r.attempts, err);
  const std::size_t bound = coloring_size_bound(domain.size(), chi.colors());
  if (r.size() < bound) {
    std::ostringstream os;
    os << "reached " << r.size() << " blocks, bound " << bound;
    throw ProbabilisticFailure("coloring partition below the guaranteed size", r.attempts, os.str());
  }
  return r;
}

ColoringResult coloring_partition(const PairColoring& chi, RngSeed seed, const ColoringOptions& opt) {
  PointSet all(chi.size());
  std::iota(all.begin(), all.end(), Index{0});
  return coloring_partition(chi, all, seed, opt);
}

std::string verify_coloring(const PairColoring& chi, const ColoringResult& r) {
  std::vector<char> seen(chi.size(), 0);
  for (const auto& b : r.blocks) {
    if (b.empty()) return "empty block";
    for (Index x : b) {
      if (x >= chi.size() || seen[x]) return "blocks overlap or leave the ground set";
      seen[x] = 1;
    }
  }
  for (std::size_t i = 0; i < r.blocks.size(); ++i)
    for (std::size_t j = 0; j < r.blocks.size(); ++j) {
      if (i == j) continue;
      for (Index p : r.blocks[i]) {
        bool witness = false;
        for (Index q : r.blocks[j]) {
          const int c = chi(p, q);
          if (c < r.color) {
            std::ostringstream os;
            os << "pair (" << p << "," << q << ") has color " << c << " below " << r.color;
            return os.str();
          }
          witness = witness || c == r.color;
        }
        if (!witness) {
          std::ostringstream os;
          os << "point " << p << " has no color-" << r.color << " partner in block " << j;
          return os.str();
        }
      }
    }
  return {};
}

WeightedColoringResult weighted_coloring_partition(const PairColoring& chi, const std::vector<double>& w,
                                                   RngSeed seed, const ColoringOptions& opt) {
  const std::size_t n = chi.size();
  if (n < 2) throw ParameterError("coloring needs at least two points");
  if (w.size() != n) throw StructuralError("weight count does not match point count");
  for (double x : w)
    if (!(x >= 0.0)) throw ParameterError("weights must be nonnegative");
  const int k = chi.colors();
  WeightedColoringResult out;
  out.sigma = 1.0 / (8.0 * k * std::log(k + 1.0));
  double total = 0.0;
  for (double x : w) total += x;
  out.rhs = std::pow(total, out.sigma);

  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return w[a] > w[b]; });

  auto score = [&](const ColoringResult& r) {
    double s = 0.0;
    for (const auto& b : r.blocks) {
      double mx = 0.0;
      for (Index x : b) mx = std::max(mx, w[x]);
      s += std::pow(mx, out.sigma);
    }
    return s;
  };

  // Two heavy singletons.
  ColoringResult two;
  two.blocks = {{std::min(order[0], order[1])}, {std::max(order[0], order[1])}};
  two.color = chi(order[0], order[1]);
  const double two_score = score(two);

  // Level set {i : w(i) >= w*} maximizing |A| sqrt(w*); whole ties are kept together.
  std::size_t best_t = 0;
  double best_val = -1.0;
  for (std::size_t t = 1; t <= n; ++t) {
    if (t < n && w[order[t]] == w[order[t - 1]]) continue;
    const double val = static_cast<double>(t) * std::sqrt(w[order[t - 1]]);
    if (val > best_val) {
      best_val = val;
      best_t = t;
    }
  }
  ColoringResult level;
  double level_score = -1.0;
  if (best_t >= 2) {
    PointSet a(order.begin(), order.begin() + static_cast<long>(best_t));
    std::sort(a.begin(), a.end());
    level = coloring_partition(chi, a, seed, opt);
    level_score = score(level);
  }
  if (level_score > two_score) {
    out.coloring = std::move(level);
    out.lhs = level_score;
  } else {
    out.coloring = std::move(two);
    out.lhs = two_score;
    out.two_point_branch = true;
  }
  out.check = out.lhs >= out.rhs * (1.0 - 1e-12);
  return out;
}

}  // namespace metriq
