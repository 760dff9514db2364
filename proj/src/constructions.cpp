#include "metriq/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "metriq/error.hpp"

namespace metriq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t count_needed(double mparam) { return static_cast<std::size_t>(std::ceil(mparam)); }

/// Integer j with base^j <= x < base^(j+1), robust to rounding in log.
int scale_index(double x, double base) {
  int j = static_cast<int>(std::floor(std::log(x) / std::log(base)));
  while (std::pow(base, j) > x) --j;
  while (std::pow(base, j + 1) <= x) ++j;
  return j;
}

PointSet iota_set(std::size_t n) {
  PointSet s(n);
  std::iota(s.begin(), s.end(), Index{0});
  return s;
}

}  // namespace

Certificate make_certificate(std::string target, const MetricSpace& quotient, MetricSpace model,
                             std::vector<Index> map, double bound) {
  Certificate c;
  c.target = std::move(target);
  c.report = distortion_between(quotient, model, map);
  c.model = std::move(model);
  c.map = std::move(map);
  c.bound = bound;
  return c;
}

QuotientSpace permute_blocks(const QuotientSpace& q, const std::vector<std::size_t>& order) {
  if (order.size() != q.size()) throw StructuralError("block order has the wrong length");
  QuotientSpace out;
  out.base = q.base;
  out.provenance = q.provenance;
  for (std::size_t b : order) out.blocks.push_back(q.blocks.at(b));
  out.metric = q.metric.restrict(PointSet(order.begin(), order.end()));
  return out;
}

// ---------------------------------------------------------------- m-centers

double ball_radius_for_count(const MetricSpace& m, Index x, double mparam) {
  const std::size_t need = count_needed(mparam);
  if (need == 0) return 0.0;
  if (need > m.size()) return kInf;
  std::vector<double> row = m.row(x);
  std::nth_element(row.begin(), row.begin() + static_cast<long>(need - 1), row.end());
  return row[need - 1];
}

bool is_m_center(const MetricSpace& m, Index x, double mparam) {
  if (!(mparam >= 1.0)) throw ParameterError("m must be at least 1");
  for (Index y = 0; y < m.size(); ++y)
    if (m(x, y) > ball_radius_for_count(m, y, mparam)) return false;
  return true;
}

std::optional<Index> find_m_center(const MetricSpace& m, double mparam) {
  for (Index x = 0; x < m.size(); ++x)
    if (is_m_center(m, x, mparam)) return x;
  return std::nullopt;
}

MCenterResult m_center_quotient(const MetricSpace& m, double eps, RngSeed seed, const ConstructionOptions& opt) {
  if (!(eps > 0.0 && eps < 1.0)) throw ParameterError("eps must lie in (0,1)");
  const std::size_t n = m.size();
  if (n < 2) throw ParameterError("m-center quotient needs at least two points");
  MCenterResult out;
  out.mparam = 2.0 * std::log(2.0 / eps) / eps;
  std::vector<double> rho(n);
  for (Index x = 0; x < n; ++x) rho[x] = ball_radius_for_count(m, x, out.mparam);

  Rng rng(seed);
  std::size_t best = n + 1;
  for (std::size_t attempt = 1; attempt <= opt.max_attempts; ++attempt) {
    PointSet s;
    for (Index x = 0; x < n; ++x)
      if (rng.bernoulli(eps / 2.0)) s.push_back(x);
    PointSet t;
    for (Index x = 0; x < n; ++x) {
      if (std::binary_search(s.begin(), s.end(), x)) {
        t.push_back(x);
        continue;
      }
      // x joins T when S misses its smallest ball with at least m points.
      bool hit = false;
      for (Index y : s) {
        if (m(x, y) <= rho[x]) {
          hit = true;
          break;
        }
      }
      if (!hit) t.push_back(x);
    }
    best = std::min(best, t.size());
    if (static_cast<double>(t.size()) <= eps * static_cast<double>(n)) {
      out.t = std::move(t);
      out.attempts = attempt;
      out.rejected = attempt - 1;
      out.q = quotient_by_subset(m, out.t);
      if (!is_m_center(out.q.metric, out.q.size() - 1, out.mparam))
        throw ConstructionFailure("collapsed block is not an m-center of the quotient");
      return out;
    }
  }
  std::ostringstream os;
  os << "smallest |T| = " << best << ", allowed " << eps * static_cast<double>(n);
  throw ProbabilisticFailure("m-center sampling", opt.max_attempts, os.str());
}

HstResult hst_from_m_centered(const MetricSpace& m, std::size_t mparam) {
  if (mparam < 1) throw ParameterError("m must be at least 1");
  if (m.size() == 0) throw UndefinedInputError("empty metric");
  const auto center = find_m_center(m, static_cast<double>(mparam));
  if (!center) throw NoMCenter("no point is an m-center for m = " + std::to_string(mparam));
  const double twom = 2.0 * static_cast<double>(mparam);

  std::function<HstTree(const PointSet&, std::optional<Index>)> build = [&](const PointSet& x,
                                                                            std::optional<Index> c) -> HstTree {
    if (x.size() == 1) return HstTree::leaf(x[0]);
    double delta = -1.0;
    Index a = x[0], b = x[0];
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t j = i + 1; j < x.size(); ++j)
        if (m(x[i], x[j]) > delta) {
          delta = m(x[i], x[j]);
          a = x[i];
          b = x[j];
        }
    if (c && m(*c, a) < delta / 2.0) std::swap(a, b);
    std::size_t split = 0;
    for (std::size_t i = 1; i < mparam && split == 0; ++i) {
      const double lo = delta * static_cast<double>(i) / twom;
      const double hi = delta * static_cast<double>(i + 1) / twom;
      bool empty = true;
      for (Index y : x)
        if (m(y, a) >= lo && m(y, a) < hi) empty = false;
      if (empty) split = i;
    }
    if (split == 0) throw ConstructionFailure("no empty band around the far point");
    const double radius = delta * static_cast<double>(split) / twom;
    PointSet inner, outer;
    for (Index y : x) (m(y, a) < radius ? inner : outer).push_back(y);
    if (inner.empty() || outer.empty()) throw ConstructionFailure("degenerate ball split");
    std::optional<Index> keep = c;
    if (c && std::find(outer.begin(), outer.end(), *c) == outer.end()) keep.reset();
    return HstTree::join(delta, {build(inner, std::nullopt), build(outer, keep)});
  };
  HstResult out;
  out.tree = compress(build(iota_set(m.size()), center));
  out.bound = twom;
  if (m.size() >= 2) {
    out.report = distortion_between(m, hst_to_metric(out.tree));
    out.non_contracting = out.report.contraction <= 1.0;
  } else {
    out.non_contracting = true;
  }
  return out;
}

// ---------------------------------------------------------------- S and T sets

TsSets ts_sets(const MetricSpace& m, RngSeed seed, const ConstructionOptions& opt) {
  const std::size_t n = m.size();
  if (n < 2) throw ParameterError("S and T sets need at least two points");
  const auto r = nearest_radii(m);
  Rng rng(seed);
  std::size_t best = 0;
  for (std::size_t attempt = 1; attempt <= opt.max_attempts; ++attempt) {
    TsSets out;
    for (Index x = 0; x < n; ++x)
      if (rng.bernoulli(0.5)) out.s.push_back(x);
    if (!out.s.empty()) {
      for (Index x = 0; x < n; ++x) {
        if (std::binary_search(out.s.begin(), out.s.end(), x)) continue;
        if (point_set_distance(m, x, out.s) == r[x]) out.t.push_back(x);
      }
    }
    best = std::max(best, out.t.size());
    if (4 * out.t.size() >= n) {
      out.attempts = attempt;
      return out;
    }
  }
  throw ProbabilisticFailure("S and T set sampling", opt.max_attempts,
                             "largest |T| = " + std::to_string(best) + ", needed n/4");
}

// ---------------------------------------------------------------- aspect ratio

AspectResult aspect_quotient(const MetricSpace& m, double alpha, RngSeed seed, const AspectOptions& opt) {
  const std::size_t n = m.size();
  if (n < 2) throw ParameterError("aspect quotient needs at least two points");
  if (!(alpha > 1.0 && alpha <= 2.0)) throw ParameterError("alpha must lie in (1,2]");
  if (opt.weights && opt.weights->size() != n) throw StructuralError("weight count does not match point count");
  AspectResult out;
  out.scale = m.min_distance();
  const double phi = aspect_ratio(m);
  out.palette = opt.palette > 0 ? opt.palette : static_cast<int>(std::floor(std::log(phi) / std::log(alpha))) + 1;

  std::vector<PointSet> blocks;
  if (phi < alpha) {
    // One band: the whole space is already alpha-equivalent to equilateral.
    for (Index x = 0; x < n; ++x) blocks.push_back({x});
    out.band = 1;
    out.size_bound = n;
    if (opt.weights) {
      WeightedColoringResult w;
      w.coloring.blocks = blocks;
      w.sigma = 1.0 / (8.0 * out.palette * std::log(out.palette + 1.0));
      double total = 0.0;
      for (double x : *opt.weights) {
        total += x;
        w.lhs += std::pow(x, w.sigma);
      }
      w.rhs = std::pow(total, w.sigma);
      w.check = w.lhs >= w.rhs * (1.0 - 1e-12);
      out.weighted = w;
    }
  } else {
    PairColoring chi(n, out.palette);
    for (Index x = 0; x < n; ++x)
      for (Index y = x + 1; y < n; ++y) {
        const int j = scale_index(m(x, y) / out.scale, alpha) + 1;
        if (j < 1 || j > out.palette) throw ParameterError("distance outside the band palette (aspect ratio too large)");
        chi.set(x, y, j);
      }
    const double nd = static_cast<double>(n);
    out.size_bound = static_cast<std::size_t>(
        std::floor(std::pow(nd, std::log(alpha) / (2.0 * std::log(phi))) / (8.0 * std::log(nd))));
    ColoringResult col;
    if (opt.weights) {
      out.weighted = weighted_coloring_partition(chi, *opt.weights, seed, opt.coloring);
      col = out.weighted->coloring;
    } else {
      col = coloring_partition(chi, seed, opt.coloring);
    }
    out.attempts = col.attempts;
    out.band = col.color;
    blocks = col.blocks;
  }

  out.q = quotient_metric(m, blocks);
  out.cert = make_certificate("equilateral", out.q.metric, MetricSpace::equilateral(blocks.size(), 1.0), {}, alpha);
  const double lo = out.scale * std::pow(alpha, out.band - 1);
  const double hi = out.scale * std::pow(alpha, out.band);
  out.hausdorff_in_band = true;
  if (opt.lipschitz)
    for (std::size_t i = 0; i < blocks.size(); ++i)
      for (std::size_t j = i + 1; j < blocks.size(); ++j) {
        const double h = hausdorff(m, blocks[i], blocks[j]);
        const double d = set_distance(m, blocks[i], blocks[j]);
        if (!(h >= lo && h < hi && d >= lo && d < hi)) out.hausdorff_in_band = false;
      }
  return out;
}

// ---------------------------------------------------------------- stars

StarResult find_star_quotient(const MetricSpace& m, const TsSets& st, double a, double b, double alpha,
                              RngSeed seed, const ConstructionOptions& opt) {
  constexpr double tol = 1e-12;
  if (!(a > 0.0 && a < b && b < 2.0 * a)) throw ParameterError("need 0 < a < b < 2a");
  if (!(alpha >= b / a * (1.0 - tol) && alpha <= 2.0 * b / a * (1.0 + tol)))
    throw ParameterError("need b/a <= alpha <= 2b/a");
  const auto r = nearest_radii(m);
  PointSet band_pts;
  for (Index x : st.t)
    if (a <= r[x] && r[x] < b) band_pts.push_back(x);
  if (band_pts.size() < 2) throw InsufficientBand("band T cap M[a,b) has fewer than two points");

  const int k = static_cast<int>(std::ceil(std::log(2.0 * b / a) / std::log(alpha))) - 1;
  if (k > 64) throw ParameterError("too many distance buckets (alpha too close to b/a)");
  const int kk = std::max(k, 0);
  StarResult out;
  out.palette = kk + 1;
  out.band_points = band_pts.size();
  const double md = static_cast<double>(band_pts.size());
  out.size_bound = static_cast<std::size_t>(std::floor(std::pow(md, std::log(alpha) / 6.0) / (8.0 * std::log(md))));

  PairColoring chi(band_pts.size(), kk + 1);
  for (std::size_t i = 0; i < band_pts.size(); ++i)
    for (std::size_t j = i + 1; j < band_pts.size(); ++j) {
      const Index x = band_pts[i], y = band_pts[j];
      const double w = std::min(m(x, y), r[x] + r[y]);
      int c = static_cast<int>(std::ceil(std::log(2.0 * b / w) / std::log(alpha))) - 1;
      while (c > 0 && 2.0 * b / std::pow(alpha, c) <= w) --c;
      while (2.0 * b / std::pow(alpha, c + 1) > w) ++c;
      c = std::clamp(c, 0, kk);
      // Reversed so that the minimum color across blocks bounds distances from below.
      chi.set(i, j, kk - c + 1);
    }
  ColoringOptions copt;
  copt.max_attempts = opt.max_attempts;
  auto col = coloring_partition(chi, seed, copt);
  out.attempts = col.attempts;
  out.ell = kk - (col.color - 1);
  out.tau = 2.0 * b / (a * std::pow(alpha, out.ell + 1));

  std::vector<PointSet> blocks;
  PointSet used;
  for (const auto& blk : col.blocks) {
    PointSet mapped;
    for (Index i : blk) mapped.push_back(band_pts[i]);
    std::sort(mapped.begin(), mapped.end());
    used.insert(used.end(), mapped.begin(), mapped.end());
    blocks.push_back(std::move(mapped));
  }
  std::sort(used.begin(), used.end());
  blocks.push_back(complement(m.size(), used));
  out.q = quotient_metric(m, blocks);
  const std::size_t s = blocks.size() - 1;
  std::vector<Index> map(s + 1);
  for (std::size_t i = 0; i < s; ++i) map[i] = i + 1;
  map[s] = 0;
  out.root_claim = true;
  for (std::size_t i = 0; i < s; ++i) {
    const double d = out.q.metric(i, s);
    if (!(d >= a && d < b)) out.root_claim = false;
  }
  out.cert = make_certificate("star", out.q.metric, realize_special(StarSpec{s, std::min(out.tau, 2.0)}), map, alpha);
  return out;
}

StarResult find_star_quotient(const MetricSpace& m, double a, double b, double alpha, RngSeed seed,
                              const ConstructionOptions& opt) {
  const auto st = ts_sets(m, seed.derive(0), opt);
  auto out = find_star_quotient(m, st, a, b, alpha, seed.derive(1), opt);
  out.attempts += st.attempts;
  return out;
}

// ---------------------------------------------------------------- dichotomy

DichotomyResult q_dichotomy(const MetricSpace& m, double k, double beta, double alpha, RngSeed seed,
                            bool drop_root, const ConstructionOptions& opt) {
  const std::size_t n = m.size();
  if (n < 2) throw ParameterError("dichotomy needs at least two points");
  if (!(k >= 1.0)) throw ParameterError("k must be at least 1");
  if (!(beta > 1.0 && beta <= 2.0)) throw ParameterError("beta must lie in (1,2]");
  if (!(alpha > beta && alpha < 2.0 * beta)) throw ParameterError("alpha must lie in (beta, 2 beta)");
  const double rho = alpha / beta;
  const auto st = ts_sets(m, seed.derive(0), opt);
  const auto r = nearest_radii(m);

  DichotomyResult out;
  out.attempts = st.attempts;
  const double top = std::max(std::log(k), std::log(1.0 / (beta - 1.0)));
  out.classes_modulus = static_cast<std::size_t>(std::max(1.0, std::ceil(top / std::log(rho))));
  const long mm = static_cast<long>(out.classes_modulus);

  std::map<long, PointSet> classes;
  for (Index x : st.t) classes[scale_index(r[x], rho)].push_back(x);
  std::vector<std::size_t> residue(out.classes_modulus, 0);
  for (const auto& [i, pts] : classes) residue[static_cast<std::size_t>(((i % mm) + mm) % mm)] += pts.size();
  const long q = static_cast<long>(std::max_element(residue.begin(), residue.end()) - residue.begin());

  // Lacunary branch: one representative per nonempty class of residue q, largest scale first.
  std::vector<std::pair<long, Index>> reps;
  for (auto it = classes.rbegin(); it != classes.rend(); ++it)
    if (((it->first % mm) + mm) % mm == q) reps.emplace_back(it->first, it->second.front());
  PointSet vs;
  for (auto [i, v] : reps) vs.push_back(v);
  PointSet sorted_vs = vs;
  std::sort(sorted_vs.begin(), sorted_vs.end());
  const PointSet rest = complement(n, sorted_vs);
  auto lac_q = quotient_by_subset(m, rest);
  std::vector<std::size_t> order;
  for (Index v : vs) order.push_back(static_cast<std::size_t>(std::lower_bound(sorted_vs.begin(), sorted_vs.end(), v) - sorted_vs.begin()));
  order.push_back(vs.size());
  lac_q = permute_blocks(lac_q, order);
  std::vector<double> seq;
  for (auto [i, v] : reps) seq.push_back(std::pow(rho, static_cast<double>(i)));
  out.lacunary_size = lac_q.size();

  // Star branch on the largest class of residue q.
  std::optional<StarResult> star;
  long best_class = 0;
  std::size_t best_size = 0;
  for (const auto& [i, pts] : classes)
    if (((i % mm) + mm) % mm == q && pts.size() > best_size) {
      best_size = pts.size();
      best_class = i;
    }
  if (best_size >= 2) {
    const double a = std::pow(rho, static_cast<double>(best_class));
    const double b = std::pow(rho, static_cast<double>(best_class + 1));
    try {
      star = find_star_quotient(m, st, a, b, alpha, seed.derive(1), opt);
      out.attempts += star->attempts;
      out.star_size = drop_root ? star->q.size() - 1 : star->q.size();
    } catch (const InsufficientBand&) {
      star.reset();
    }
  }

  if (star && out.star_size > out.lacunary_size) {
    out.branch = "star";
    out.tau = star->tau;
    if (drop_root) {
      std::vector<std::size_t> keep(star->q.size() - 1);
      std::iota(keep.begin(), keep.end(), std::size_t{0});
      out.q = sq_space(star->q, keep);
      out.q.provenance = Provenance::SQ;
      out.cert = make_certificate("equilateral", out.q.metric,
                                  MetricSpace::equilateral(keep.size(), std::min(star->tau, 2.0)), {}, alpha);
    } else {
      out.q = star->q;
      out.cert = star->cert;
    }
  } else {
    out.branch = "lacunary";
    out.q = lac_q;
    out.cert = make_certificate("lacunary", out.q.metric, realize_special(LacunarySpec{seq, k}), {}, alpha);
  }
  return out;
}

Q2Result q2_lacunary(const MetricSpace& m, RngSeed seed, const ConstructionOptions& opt) {
  const std::size_t n = m.size();
  if (n < 2) throw ParameterError("q2 construction needs at least two points");
  const auto st = ts_sets(m, seed, opt);
  const auto r = nearest_radii(m);
  PointSet t = st.t;
  std::stable_sort(t.begin(), t.end(), [&](Index x, Index y) { return r[x] > r[y]; });
  auto q = quotient_by_subset(m, complement(n, st.t));
  // quotient_by_subset lists singletons in increasing index order.
  std::vector<std::size_t> order;
  for (Index x : t)
    order.push_back(static_cast<std::size_t>(std::lower_bound(st.t.begin(), st.t.end(), x) - st.t.begin()));
  order.push_back(t.size());
  Q2Result out;
  out.q = permute_blocks(q, order);
  std::vector<double> seq;
  for (Index x : t) seq.push_back(r[x]);
  out.cert = make_certificate("lacunary", out.q.metric, realize_special(LacunarySpec{seq, 1.0}), {}, 2.0);
  out.attempts = st.attempts;
  return out;
}

}  // namespace metriq
