// Acceptance suite: one PASS/FAIL line per criterion. Every tolerance is pinned below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include "metriq/coloring.hpp"
#include "metriq/composition.hpp"
#include "metriq/constructions.hpp"
#include "metriq/embeddings.hpp"
#include "metriq/error.hpp"
#include "metriq/experiment.hpp"
#include "metriq/generators.hpp"
#include "metriq/hst.hpp"
#include "metriq/hypercube.hpp"
#include "metriq/io.hpp"
#include "metriq/lipschitz.hpp"
#include "metriq/pstable.hpp"
#include "metriq/quotient.hpp"

using namespace metriq;

namespace {

// ---- pinned tolerances and limits
constexpr double kC1MaxSeconds = 10.0;
constexpr double kC2DistortionSlack = 1e-9;
constexpr double kC2MaxSeconds = 30.0;
constexpr double kC3MaxFailureRate = 0.5;
constexpr double kC5ExpansionSlack = 1e-12;  // relative
constexpr double kC6Isometry = 1e-9;         // absolute
constexpr double kC6MaxSeconds = 60.0;
constexpr double kC7SandwichSlack = 1e-12;   // relative
constexpr double kC7McRelative = 0.01;
constexpr double kC7NormRelative = 1e-12;
constexpr double kC7WitnessFormula = 1e-15;
constexpr double kC7SearchFloor = 1.02;
constexpr double kC8MaxSecondsD14 = 300.0;
constexpr double kC11Slack = 1e-9;           // relative
constexpr double kC12ScaleRelative = 1e-12;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void fail(const std::string& why) {
    if (pass) detail << "FIRST FAILURE: " << why << "; ";
    pass = false;
  }
};

std::string fmt(double x, int prec = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, x);
  return buf;
}

std::vector<PointSet> random_partition(Rng& rng, std::size_t n) {
  const std::size_t k = 1 + rng.index(n);
  std::vector<PointSet> blocks(k);
  std::vector<Index> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.index(i)]);
  for (std::size_t i = 0; i < k; ++i) blocks[i].push_back(perm[i]);  // nonempty
  for (std::size_t i = k; i < n; ++i) blocks[rng.index(k)].push_back(perm[i]);
  for (auto& b : blocks) std::sort(b.begin(), b.end());
  return blocks;
}

// Dijkstra on the block graph with set-distance edge weights.
Matrix block_shortest_paths(const MetricSpace& m, const std::vector<PointSet>& blocks) {
  const std::size_t k = blocks.size();
  Matrix w(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      double best = std::numeric_limits<double>::infinity();
      for (Index x : blocks[i])
        for (Index y : blocks[j]) best = std::min(best, m(x, y));
      w[i][j] = i == j ? 0.0 : best;
    }
  Matrix out(k, std::vector<double>(k, std::numeric_limits<double>::infinity()));
  for (std::size_t s = 0; s < k; ++s) {
    auto& dist = out[s];
    std::vector<char> done(k, 0);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[s] = 0.0;
    pq.push({0.0, s});
    while (!pq.empty()) {
      auto [du, u] = pq.top();
      pq.pop();
      if (done[u]) continue;
      done[u] = 1;
      for (std::size_t v = 0; v < k; ++v)
        if (!done[v] && du + w[u][v] < dist[v]) {
          dist[v] = du + w[u][v];
          pq.push({dist[v], v});
        }
    }
  }
  return out;
}

// ---------------------------------------------------------------- 1
Outcome criterion1() {
  Outcome o;
  const auto t0 = Clock::now();
  Rng rng({1001, 0});
  std::size_t compared = 0;
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 1 + rng.index(12);
    auto m = gen_random_metric(n, 20, {1001, static_cast<std::uint64_t>(t)});
    auto blocks = random_partition(rng, n);
    auto q = quotient_metric(m, blocks);
    auto oracle = block_shortest_paths(m, blocks);
    if (q.metric.matrix() != oracle) o.fail("quotient_metric differs from the shortest-path oracle at trial " + std::to_string(t));
    // M/A against the generic quotient on {A} and singletons, same block order.
    PointSet a;
    for (Index x = 0; x < n; ++x)
      if (rng.bernoulli(0.4)) a.push_back(x);
    if (a.empty()) a.push_back(rng.index(n));
    auto qa = quotient_by_subset(m, a);
    auto qg = quotient_metric(m, qa.blocks);
    if (qa.metric.matrix() != qg.metric.matrix()) o.fail("quotient_by_subset differs at trial " + std::to_string(t));
    compared += 2;
  }
  const double secs = seconds_since(t0);
  if (secs >= kC1MaxSeconds) o.fail("runtime " + fmt(secs) + " s");
  o.detail << compared << " exact matrix comparisons on integer metrics, n <= 12; " << fmt(secs, 3) << " s (limit "
           << kC1MaxSeconds << " s)";
  return o;
}

// ---------------------------------------------------------------- 2
bool is_one_lacunary_model(const MetricSpace& model) {
  const std::size_t n = model.size();
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (model(i, j) != model(i, n - 1)) return false;
  for (Index i = 0; i + 2 < n; ++i)
    if (model(i, n - 1) < model(i + 1, n - 1)) return false;
  return true;
}

Outcome criterion2() {
  Outcome o;
  const auto t0 = Clock::now();
  const std::size_t n = 100;
  double worst = 0.0;
  std::size_t min_blocks = n;
  for (int t = 0; t < 100; ++t) {
    auto m = gen_random_metric(n, 20, {2002, static_cast<std::uint64_t>(t)});
    auto r = q2_lacunary(m, {2003, static_cast<std::uint64_t>(t)});
    min_blocks = std::min(min_blocks, r.q.size());
    if (r.q.size() < n / 4 + 1) o.fail("only " + std::to_string(r.q.size()) + " blocks at trial " + std::to_string(t));
    auto rec = distortion_between(r.q.metric, r.cert.model, r.cert.map);
    worst = std::max(worst, rec.distortion);
    if (rec.distortion > 2.0 + kC2DistortionSlack) o.fail("distortion " + fmt(rec.distortion) + " at trial " + std::to_string(t));
    auto remapped = r.cert.map.empty() ? r.cert.model : r.cert.model.restrict(r.cert.map);
    if (!is_one_lacunary_model(remapped)) o.fail("model is not 1-lacunary at trial " + std::to_string(t));
  }
  const double secs = seconds_since(t0);
  if (secs >= kC2MaxSeconds) o.fail("runtime " + fmt(secs) + " s");
  o.detail << "100 trials n=100: min blocks " << min_blocks << " (need >= " << n / 4 + 1 << "), worst recomputed distortion "
           << fmt(worst, 10) << " (limit 2 + " << kC2DistortionSlack << "); " << fmt(secs, 3) << " s";
  return o;
}

// ---------------------------------------------------------------- 3
Outcome criterion3() {
  Outcome o;
  const std::size_t n = 200;
  const double eps = 0.2;
  const double mparam = 2.0 * std::log(10.0) / 0.2;
  std::size_t attempts = 0, rejected = 0, accepted = 0, failed = 0, max_t = 0;
  for (int t = 0; t < 100; ++t) {
    auto m = t % 2 ? gen_random_metric(n, 50, {3003, static_cast<std::uint64_t>(t)})
                   : gen_random_euclidean(n, 2, {3003, static_cast<std::uint64_t>(t)});
    try {
      auto r = m_center_quotient(m, eps, {3004, static_cast<std::uint64_t>(t)});
      ++accepted;
      attempts += r.attempts;
      rejected += r.rejected;
      max_t = std::max(max_t, r.t.size());
      if (static_cast<double>(r.t.size()) > eps * static_cast<double>(n)) o.fail("|T| too large at trial " + std::to_string(t));
      if (!is_m_center(r.q.metric, r.q.size() - 1, mparam)) o.fail("T-block is not an m-center at trial " + std::to_string(t));
    } catch (const ProbabilisticFailure&) {
      ++failed;
      attempts += ConstructionOptions{}.max_attempts;
      rejected += ConstructionOptions{}.max_attempts;
    }
  }
  const double rate = attempts ? static_cast<double>(rejected) / static_cast<double>(attempts) : 1.0;
  if (rate >= kC3MaxFailureRate) o.fail("rejection rate " + fmt(rate));
  o.detail << accepted << "/100 accepted (" << failed << " exhausted), max |T| " << max_t << " (limit " << eps * n
           << "), per-attempt rejection rate " << fmt(rate, 4) << " (limit " << kC3MaxFailureRate << "), m = " << fmt(mparam);
  return o;
}

// ---------------------------------------------------------------- 4
Outcome criterion4() {
  Outcome o;
  std::size_t done = 0;
  double worst_ratio = 0.0;
  for (int t = 0; done < 100 && t < 1000; ++t) {
    auto base = t % 2 ? gen_random_metric(60, 30, {4004, static_cast<std::uint64_t>(t)})
                      : gen_random_euclidean(60, 3, {4004, static_cast<std::uint64_t>(t)});
    MCenterResult mc;
    try {
      mc = m_center_quotient(base, 0.3, {4005, static_cast<std::uint64_t>(t)});
    } catch (const ProbabilisticFailure&) {
      continue;
    }
    const auto& m = mc.q.metric;
    const auto mm = static_cast<std::size_t>(std::ceil(mc.mparam));
    if (!find_m_center(m, static_cast<double>(mm))) {
      o.fail("instance is not m-centered");
      continue;
    }
    auto r = hst_from_m_centered(m, mm);
    auto tm = hst_to_metric(r.tree);
    bool non_contracting = true;
    for (Index i = 0; i < m.size(); ++i)
      for (Index j = 0; j < m.size(); ++j) non_contracting = non_contracting && tm(i, j) >= m(i, j);
    auto rec = distortion_between(m, tm);
    if (!non_contracting) o.fail("contracting pair at trial " + std::to_string(t));
    if (rec.distortion > 2.0 * static_cast<double>(mm)) o.fail("distortion above 2m at trial " + std::to_string(t));
    if (r.tree.root_label() != m.diameter()) o.fail("root label differs from the diameter at trial " + std::to_string(t));
    worst_ratio = std::max(worst_ratio, rec.distortion / (2.0 * static_cast<double>(mm)));
    ++done;
  }
  if (done < 100) o.fail("only " + std::to_string(done) + " instances");
  o.detail << done << " m-centered quotient instances; non-contracting, root label == diameter; worst distortion / 2m = "
           << fmt(worst_ratio, 4);
  return o;
}

// ---------------------------------------------------------------- 5
Outcome criterion5() {
  Outcome o;
  std::ostringstream typical;
  for (double p : {1.0, 2.0}) {
    std::vector<double> ds;
    for (int t = 0; t < 40; ++t) {
      const std::size_t n = 4 + static_cast<std::size_t>(t % 9);
      auto m = t % 2 ? gen_random_metric(n, 20, {5005, static_cast<std::uint64_t>(t)})
                     : gen_random_euclidean(n, 2, {5005, static_cast<std::uint64_t>(t)});
      std::size_t mm = 1;
      while (!find_m_center(m, static_cast<double>(mm))) ++mm;
      auto r = bourgain_embed(m, static_cast<double>(mm), p, VectorEmbedding::Mode::Exact, {5006, static_cast<std::uint64_t>(t)});
      for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j)
          if (r.embedding.distance(i, j) > m(i, j) * (1.0 + kC5ExpansionSlack)) o.fail("expanding pair");
      auto rec = distortion_between(m, r.embedding.induced_metric());
      const double q = std::max(1.0, std::ceil(std::log(static_cast<double>(mm)) / p));
      if (rec.distortion > 96.0 * q) o.fail("distortion above 96 ceil(ln m / p)");
      ds.push_back(rec.distortion);
    }
    std::sort(ds.begin(), ds.end());
    typical << "p=" << p << ": median " << fmt(ds[ds.size() / 2], 4) << ", max " << fmt(ds.back(), 4) << "; ";
  }
  o.detail << "80 exact-mode embeddings, n in [4,12], m = least centered size; " << typical.str();
  return o;
}

// ---------------------------------------------------------------- 6
Outcome criterion6() {
  Outcome o;
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::size_t cells = 0;
  for (double p : {1.0, 1.5, 2.0, 3.0, 4.0}) {
    const double top = p <= 2.0 ? std::pow(2.0, 1.0 - 1.0 / p) : std::pow(2.0, 1.0 / p);
    for (double frac : {0.25, 0.6, 1.0}) {
      const double tau = frac * top;
      for (std::size_t n = 2; n <= 12; ++n) {
        VectorEmbedding e;
        try {
          e = star_to_lp(n, tau, p);
        } catch (const std::exception& ex) {
          o.fail(std::string("star_to_lp threw: ") + ex.what());
          continue;
        }
        auto star = realize_special(StarSpec{n, tau});
        for (Index i = 0; i <= n; ++i)
          for (Index j = i + 1; j <= n; ++j) worst = std::max(worst, std::abs(e.distance(i, j) - star(i, j)));
        ++cells;
      }
    }
  }
  const double secs = seconds_since(t0);
  if (worst > kC6Isometry) o.fail("max error " + fmt(worst));
  if (secs >= kC6MaxSeconds) o.fail("runtime " + fmt(secs) + " s");
  o.detail << cells << " (n, p, tau) cells, max |error| " << fmt(worst, 3) << " (limit " << kC6Isometry << "); "
           << fmt(secs, 3) << " s";
  return o;
}

// ---------------------------------------------------------------- 7
Outcome criterion7() {
  Outcome o;
  const double lo_c = std::sqrt((std::exp(1.0) - 1.0) / std::exp(1.0));
  std::size_t lower_bad = 0, derived_bad = 0, literal_bad = 0, points = 0;
  for (int i = 0; i < 100; ++i)
    for (int j = 0; j < 100; ++j) {
      const double d = std::pow(10.0, -2.0 + 4.0 * i / 99.0);
      const double D = std::pow(10.0, -2.0 + 4.0 * j / 99.0);
      const double f = truncated_gauss_distance(d, D);
      ++points;
      if (f < lo_c * std::min(D, d) * (1.0 - kC7SandwichSlack)) ++lower_bad;
      if (f > std::min(std::sqrt(2.0) * D, d) * (1.0 + kC7SandwichSlack)) ++derived_bad;
      if (f > std::min(D, d) * (1.0 + kC7SandwichSlack)) ++literal_bad;
    }
  if (lower_bad) o.fail(std::to_string(lower_bad) + " lower-bound violations");
  if (derived_bad) o.fail(std::to_string(derived_bad) + " upper-bound violations");

  Rng rng({7007, 0});
  const double D = 2.0;
  std::vector<std::vector<double>> pts(60, std::vector<double>(3));
  for (auto& x : pts)
    for (auto& c : x) c = 3.0 * rng.uniform();
  auto e = truncated_gauss_embed(pts, D, 100000, {7008, 0});
  double worst_mc = 0.0, worst_norm = 0.0;
  for (int t = 0; t < 100; ++t) {
    Index a = rng.index(pts.size()), b = rng.index(pts.size());
    while (b == a) b = rng.index(pts.size());
    double d2 = 0.0;
    for (std::size_t c = 0; c < 3; ++c) d2 += (pts[a][c] - pts[b][c]) * (pts[a][c] - pts[b][c]);
    const double cf = truncated_gauss_distance(std::sqrt(d2), D);
    worst_mc = std::max(worst_mc, std::abs(e.distance(a, b) - cf) / cf);
  }
  for (Index i = 0; i < pts.size(); ++i) worst_norm = std::max(worst_norm, std::abs(e.norm(i) - D) / D);
  if (worst_mc > kC7McRelative) o.fail("Monte Carlo relative error " + fmt(worst_mc));
  if (worst_norm > kC7NormRelative) o.fail("image norm error " + fmt(worst_norm));

  const double formula = 2.0 * std::sqrt(5.0 - std::sqrt(7.0)) / 3.0;
  const double w = truncation_witness_bound();
  if (std::abs(w - formula) > kC7WitnessFormula) o.fail("witness constant differs from 2 sqrt(5 - sqrt 7)/3");
  auto best = search_l2_distortion(truncation_witness(2.0), 3, 20, {7009, 0});
  if (best.distortion < kC7SearchFloor) o.fail("searched optimum " + fmt(best.distortion));

  o.detail << points << " grid points: lower sqrt((e-1)/e) min{D,d} holds everywhere; upper bound checked as min{d, sqrt2 D} ("
           << derived_bad << " violations); the printed min{D,d} fails at " << literal_bad
           << " points with d > D (see README); MC 1e5 features max rel err " << fmt(worst_mc, 3) << " (limit "
           << kC7McRelative << "); norms max rel err " << fmt(worst_norm, 3) << "; witness constant " << fmt(w, 11)
           << " (= 2 sqrt(5 - sqrt 7)/3); searched optimum " << fmt(best.distortion, 6);
  return o;
}

// ---------------------------------------------------------------- 8
Outcome criterion8() {
  Outcome o;
  std::ostringstream cells;
  double d14_secs = 0.0;
  for (int d : {10, 12, 14})
    for (double eps : {0.05, 0.1, 0.2}) {
      const auto t0 = Clock::now();
      CubeQsOptions opt;
      opt.allow_short = true;
      auto r = cube_qs_construct(d, eps, 2.0, {8008, static_cast<std::uint64_t>(d * 100 + eps * 100)}, opt);
      const double secs = seconds_since(t0);
      if (d == 14) d14_secs += secs;
      const bool dist_ok = r.report.distortion <= r.bound;
      const double expected_bound = 8.0 * std::sqrt(std::exp(1.0) * r.r / (std::exp(1.0) - 1.0));
      if (std::abs(r.bound - expected_bound) > 1e-12 * expected_bound) o.fail("bound constant mismatch");
      if (!r.size_ok) o.fail("size at (" + std::to_string(d) + "," + fmt(eps) + ")");
      if (!dist_ok) o.fail("distortion at (" + std::to_string(d) + "," + fmt(eps) + ")");
      if (!r.sandwich_ok) o.fail("sandwich at (" + std::to_string(d) + "," + fmt(eps) + ")");
      cells << "(" << d << "," << eps << "): " << r.blocks << "/" << r.required << (r.size_ok ? " ok" : " SHORT")
            << ", dist " << fmt(r.report.distortion, 4) << "<=" << fmt(r.bound, 4) << (r.sandwich_ok ? "" : " SANDWICH-FAIL")
            << (r.exhaustive ? "" : " (sampled)") << "; ";
    }
  if (d14_secs >= kC8MaxSecondsD14) o.fail("d = 14 runtime " + fmt(d14_secs) + " s");
  o.detail << cells.str() << "d=14 total " << fmt(d14_secs, 3) << " s";
  return o;
}

// ---------------------------------------------------------------- 9
Outcome criterion9() {
  Outcome o;
  Rng rng({9009, 0});
  std::size_t checked = 0;
  double tightest = std::numeric_limits<double>::infinity();
  for (double p : {1.0, 1.5, 2.0, 3.0})
    for (int t = 0; t < 1000; ++t) {
      const std::size_t n = 2 + rng.index(7), dim = 1 + rng.index(4);
      std::vector<std::vector<double>> xs(n, std::vector<double>(dim)), ys(n, std::vector<double>(dim));
      for (auto& v : xs)
        for (auto& c : v) c = rng.normal();
      for (auto& v : ys)
        for (auto& c : v) c = t % 3 ? rng.normal() : rng.uniform();
      auto r = star_poincare_lower(xs, ys, p);
      if (!r.holds) o.fail("inequality fails at p = " + fmt(p));
      if (r.rhs > 0) tightest = std::min(tightest, r.rhs / std::max(r.lhs, 1e-300));
      ++checked;
    }
  const double v = star_bound(2.0, 2);
  if (v != 1.0) o.fail("star bound at (p=2, n=2) is " + fmt(v, 17));
  o.detail << checked << " random configurations; smallest rhs/lhs " << fmt(tightest, 4) << "; star bound (p=2, n=2) = "
           << fmt(v, 17);
  return o;
}

// ---------------------------------------------------------------- 10
Outcome criterion10() {
  Outcome o;
  Rng rng({10010, 0});
  std::size_t accepted = 0, rejected = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + rng.index(255);
    const int k = 1 + static_cast<int>(rng.index(3));
    PairColoring chi(n, k);
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) chi.set(i, j, 1 + static_cast<int>(rng.index(static_cast<std::size_t>(k))));
    ColoringResult r;
    try {
      r = coloring_partition(chi, {10011, static_cast<std::uint64_t>(t)});
    } catch (const ProbabilisticFailure&) {
      ++rejected;
      continue;
    }
    ++accepted;
    // Independent scan: every cross pair has color >= c, every point sees color c in every other block.
    bool ok = true;
    for (std::size_t a = 0; a < r.blocks.size() && ok; ++a)
      for (std::size_t b = 0; b < r.blocks.size() && ok; ++b) {
        if (a == b) continue;
        for (Index x : r.blocks[a]) {
          bool witness = false;
          for (Index y : r.blocks[b]) {
            if (chi(x, y) < r.color) ok = false;
            witness = witness || chi(x, y) == r.color;
          }
          ok = ok && witness;
        }
      }
    if (!ok) o.fail("invariant scan fails at trial " + std::to_string(t));
    if (!verify_coloring(chi, r).empty()) o.fail("library verifier disagrees at trial " + std::to_string(t));
    if (r.size() < coloring_size_bound(n, k)) o.fail("size below the bound at trial " + std::to_string(t));
  }
  o.detail << accepted << " accepted runs scanned exhaustively (" << rejected << " raised ProbabilisticFailure)";
  return o;
}

// ---------------------------------------------------------------- 11
Outcome criterion11() {
  Outcome o;
  const double k = 2.0, alpha = 2.0;
  const int palette = static_cast<int>(std::floor(std::log(4.0) / std::log(alpha))) + 1;
  const double sigma = 1.0 / (8.0 * palette * std::log(palette + 1.0));
  Rng rng({11010, 0});
  double worst = 0.0, tightest = std::numeric_limits<double>::infinity();
  std::size_t sigma_ok = 0, done = 0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t depth = 1 + static_cast<std::size_t>(t % 3);
    const double beta = t % 2 ? 4.0 : 8.0;
    auto tree = gen_random_composition_tree(depth, 4, beta, {11011, static_cast<std::uint64_t>(t)});
    std::vector<double> w(tree.size(), 1.0);
    if (t % 2 == 0)
      for (auto& x : w) x = 0.1 + 10.0 * rng.uniform();
    CompositionResult r;
    try {
      r = composition_qs(tree, k, alpha, {11012, static_cast<std::uint64_t>(t)}, w);
    } catch (const std::exception& e) {
      o.fail(std::string("composition_qs threw: ") + e.what());
      continue;
    }
    ++done;
    auto rec = distortion_between(r.q.metric, hst_to_metric(r.tree));
    const double bmin = std::isfinite(tree.min_beta()) ? tree.min_beta() : beta;
    const double bound = (1.0 + 1.0 / bmin) * alpha;
    worst = std::max(worst, rec.distortion / bound);
    if (rec.distortion > bound * (1.0 + kC11Slack)) o.fail("distortion above (1 + 1/beta) alpha at trial " + std::to_string(t));
    // Weighted sigma-sum: sum over blocks of (max weight)^sigma >= (total weight)^sigma.
    double lhs = 0.0, total = 0.0;
    for (double x : w) total += x;
    for (const auto& b : r.q.blocks) {
      double mx = 0.0;
      for (Index u : b) mx = std::max(mx, w[u]);
      lhs += std::pow(mx, sigma);
    }
    const double rhs = std::pow(total, sigma);
    tightest = std::min(tightest, lhs / rhs);
    const bool sig = lhs >= rhs * (1.0 - kC11Slack);
    if (!sig) o.fail("sigma-sum inequality fails at trial " + std::to_string(t));
    if (std::abs(r.sigma - sigma) > 1e-15) o.fail("sigma differs from 1/(8K ln(K+1))");
    sigma_ok += sig;
  }
  o.detail << done << " trees of depth 1..3 (half with random weights); worst distortion / (1+1/beta)alpha "
           << fmt(worst, 4) << "; sigma = " << fmt(sigma, 6) << ", sigma-sum holds on " << sigma_ok << "/" << done
           << " (smallest lhs/rhs " << fmt(tightest, 4) << ")";
  return o;
}

// ---------------------------------------------------------------- 12
Outcome criterion12() {
  Outcome o;
  Rng rng({12012, 0});
  std::size_t exact = 0;
  double worst_scale = 0.0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + rng.index(11);
    auto x = gen_random_metric(n, 20, {12013, static_cast<std::uint64_t>(t)});
    auto y = t % 2 ? gen_random_metric(n, 20, {12014, static_cast<std::uint64_t>(t)})
                   : gen_random_euclidean(n, 2, {12014, static_cast<std::uint64_t>(t)});
    std::vector<Index> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.index(i)]);
    auto lc = lip_colip({x, y, perm});
    auto rep = distortion_between(x, y, perm);
    if (lc.product() == rep.distortion) ++exact;
    else o.fail("lip * colip != distortion at trial " + std::to_string(t));
    const double c = 0.1 + 10.0 * rng.uniform();
    auto sc = lip_colip({x, y.scaled(c), perm});
    const double e1 = std::abs(sc.lip - c * lc.lip) / (c * lc.lip);
    const double e2 = std::abs(sc.colip - lc.colip / c) / (lc.colip / c);
    const double e3 = std::abs(sc.product() - lc.product()) / lc.product();
    worst_scale = std::max({worst_scale, e1, e2, e3});
  }
  if (worst_scale > kC12ScaleRelative) o.fail("scale covariance error " + fmt(worst_scale));
  o.detail << exact << "/200 exact equalities; worst scale-covariance relative error " << fmt(worst_scale, 3) << " (limit "
           << kC12ScaleRelative << ")";
  return o;
}

// ---------------------------------------------------------------- 13
Outcome criterion13() {
  Outcome o;
  struct Case {
    json instance;
    PipelineOp op;
  };
  std::vector<Case> cases = {
      {{{"variant", "random"}, {"n", 40}}, {"q2", json::object()}},
      {{{"variant", "random"}, {"n", 60}}, {"mcenter", json{{"eps", 0.3}}}},
      {{{"variant", "random"}, {"n", 40}, {"wmax", 3}}, {"aspect", json{{"alpha", 2}}}},
      {{{"variant", "padded"}, {"k", 4}, {"copies", 6}}, {"star", json{{"a", 1.0}, {"b", 1.5}, {"alpha", 2.0}}}},
      {{{"variant", "random"}, {"n", 40}}, {"dichotomy", json{{"k", 2}, {"beta", 1.5}, {"alpha", 2}}}},
      {{{"variant", "composition"}, {"depth", 3}, {"max_size", 3}, {"beta", 8}}, {"composition", json{{"k", 2}, {"alpha", 2}}}},
      {{{"variant", "cube"}, {"d", 8}}, {"cube-qs", json{{"eps", 0.2}, {"allow_short", true}}}},
      {{{"variant", "euclidean"}, {"n", 30}}, {"bourgain", json{{"mode", "mc"}}}},
      {{{"variant", "random"}, {"n", 50}}, {"pipeline-lp", json{{"eps", 0.5}, {"p", 1.5}}}},
      {{{"variant", "random"}, {"n", 50}}, {"pipeline-um", json{{"eps", 0.5}}}},
  };
  std::size_t identical = 0, errors = 0;
  for (const auto& c : cases) {
    std::string first;
    for (int rep = 0; rep < 2; ++rep) {
      auto inst = realize_instance(c.instance, {13013, 0});
      json bundle;
      auto row = run_op(inst, c.op, {13014, 0}, &bundle);
      if (!row.error.empty()) ++errors;
      const auto text = dump_canonical(bundle) + rows_to_csv({row});
      if (rep == 0) first = text;
      else if (text == first) ++identical;
      else o.fail("artifacts of '" + c.op.op + "' differ between runs");
    }
  }
  std::vector<std::vector<double>> pts = {{0, 0}, {1, 0}, {0, 2}, {3, 1}};
  const bool emb_same = dump_canonical(to_json(pstable_embed(pts, 2.0, 1.5, 256, {13015, 0}))) ==
                            dump_canonical(to_json(pstable_embed(pts, 2.0, 1.5, 256, {13015, 0}))) &&
                        dump_canonical(to_json(truncated_gauss_embed(pts, 2.0, 256, {13016, 0}))) ==
                            dump_canonical(to_json(truncated_gauss_embed(pts, 2.0, 256, {13016, 0})));
  if (!emb_same) o.fail("feature embeddings differ between runs");
  auto plan_j = json{{"instance", {{"variant", "random"}, {"n", 40}}},
                     {"pipeline", json::array({{{"op", "q2"}}, {{"op", "pipeline-um"}, {"eps", 0.5}}})},
                     {"trials", 12},
                     {"seed", 13017}};
  plan_j["threads"] = 1;
  auto a = run_experiment(ExperimentPlan::from_json(plan_j));
  plan_j["threads"] = 8;
  auto b = run_experiment(ExperimentPlan::from_json(plan_j));
  if (a.csv != b.csv) o.fail("experiment CSV depends on the thread count");
  o.detail << identical << "/" << cases.size() << " operations byte-identical on re-run (" << errors
           << " recorded operation errors, also identical); feature embeddings identical; 12-trial experiment CSV identical at 1 and 8 threads";
  return o;
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* title;
    Outcome (*fn)();
  };
  const Entry entries[] = {
      {1, "quotient metric equals the shortest-path oracle", criterion1},
      {2, "q2 lacunary certificate (n=100)", criterion2},
      {3, "m-center quotient (n=200, eps=0.2)", criterion3},
      {4, "HST from m-centered spaces", criterion4},
      {5, "Bourgain exact mode", criterion5},
      {6, "star into lp isometry", criterion6},
      {7, "truncated Gaussian constants and witness", criterion7},
      {8, "hypercube QS at desk scale", criterion8},
      {9, "star Poincare inequality", criterion9},
      {10, "coloring partition invariants", criterion10},
      {11, "composition QS certificates", criterion11},
      {12, "lip * colip versus distortion", criterion12},
      {13, "determinism", criterion13},
  };
  int failures = 0;
  for (const auto& e : entries) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = e.fn();
    } catch (const std::exception& ex) {
      o.fail(std::string("exception: ") + ex.what());
    }
    const double secs = seconds_since(t0);
    std::printf("criterion %2d %s | %s | %s [%.2f s]\n", e.id, o.pass ? "PASS" : "FAIL", e.title, o.detail.str().c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  std::printf("%d of %zu criteria pass\n", static_cast<int>(std::size(entries)) - failures, std::size(entries));
  return failures ? 1 : 0;
}
