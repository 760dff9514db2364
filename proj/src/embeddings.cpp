#include "metriq/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "metriq/constructions.hpp"
#include "metriq/error.hpp"
#include "metriq/pstable.hpp"

namespace metriq {

namespace {

std::size_t scale_count(double mparam, double p) {
  return static_cast<std::size_t>(std::max(1.0, std::ceil(std::log(mparam) / p)));
}

MetricSpace truncate(const MetricSpace& m, double D) {
  Matrix d = m.matrix();
  for (auto& row : d)
    for (auto& v : row) v = std::min(v, D);
  return MetricSpace(std::move(d));
}

double lp_norm_pow(const std::vector<double>& a, const std::vector<double>& b, double p) {
  if (a.size() != b.size()) throw StructuralError("vectors have different lengths");
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) s += std::pow(std::abs(a[c] - b[c]), p);
  return s;
}

}  // namespace

EmbedResult bourgain_embed(const MetricSpace& m, double mparam, double p, VectorEmbedding::Mode mode, RngSeed seed) {
  if (!(p >= 1.0)) throw ParameterError("p must be at least 1");
  if (!(mparam >= 1.0)) throw ParameterError("m must be at least 1");
  const std::size_t n = m.size();
  if (n < 2) throw StructuralError("embedding needs at least two points");
  if (mode == VectorEmbedding::Mode::Exact && n > kExactSubsetCap)
    throw CapacityError("exact subset enumeration is limited to 15 points");
  if (!find_m_center(m, mparam)) throw PreconditionError("space has no m-center");
  const std::size_t q = scale_count(mparam, p);

  EmbedResult out;
  auto& e = out.embedding;
  e.p = p;
  e.mode = mode;
  e.points.assign(n, {});
  if (mode == VectorEmbedding::Mode::Exact) {
    const std::size_t full = std::size_t{1} << n;
    // dist[u][mask] = d(u, mask) by peeling the lowest set bit.
    std::vector<std::vector<double>> dist(n, std::vector<double>(full, INFINITY));
    for (std::size_t mask = 1; mask < full; ++mask) {
      const std::size_t low = static_cast<std::size_t>(__builtin_ctzll(mask));
      const std::size_t rest = mask & (mask - 1);
      for (Index u = 0; u < n; ++u) dist[u][mask] = std::min(dist[u][rest], m(u, low));
    }
    e.weights.reserve(full - 1);
    std::vector<double> pr(q), lq(q), lr(q);
    for (std::size_t i = 0; i < q; ++i) {
      pr[i] = std::exp(-p * static_cast<double>(i + 1));
      lq[i] = std::log(pr[i]);
      lr[i] = std::log1p(-pr[i]);
    }
    for (std::size_t mask = 1; mask < full; ++mask) {
      const double k = static_cast<double>(__builtin_popcountll(mask));
      double a = 0.0;
      for (std::size_t i = 0; i < q; ++i) a += std::exp(k * lq[i] + (static_cast<double>(n) - k) * lr[i]);
      e.weights.push_back(a / static_cast<double>(q));
      for (Index u = 0; u < n; ++u) e.points[u].push_back(dist[u][mask]);
    }
  } else {
    const std::size_t per_scale = 256 * q;
    Rng rng(seed);
    e.samples = per_scale * q;
    const double w = 1.0 / static_cast<double>(q * per_scale);
    for (std::size_t i = 1; i <= q; ++i) {
      const double pr = std::exp(-p * static_cast<double>(i));
      for (std::size_t j = 0; j < per_scale; ++j) {
        PointSet a;
        for (Index x = 0; x < n; ++x)
          if (rng.bernoulli(pr)) a.push_back(x);
        if (a.empty()) continue;  // contributes nothing; weights still sum to <= 1
        e.weights.push_back(w);
        for (Index u = 0; u < n; ++u) e.points[u].push_back(point_set_distance(m, u, a));
      }
    }
    if (e.weights.empty()) throw ProbabilisticFailure("every sampled subset was empty", per_scale * q, "");
  }
  out.report = distortion_between(m, e.induced_metric());
  out.bound = 96.0 * static_cast<double>(q);
  return out;
}

PipelineResult pipeline_quotient_then_embed(const MetricSpace& m, double eps, double p, const std::string& target,
                                            RngSeed seed) {
  if (!(eps > 0.0 && eps < 1.0)) throw ParameterError("eps must lie in (0, 1)");
  if (target != "lp" && target != "UM") throw ParameterError("target must be lp or UM");
  auto mc = m_center_quotient(m, eps, seed.derive(0));
  PipelineResult out;
  out.q = mc.q;
  out.target = target;
  out.mparam = mc.mparam;
  if (out.q.size() < 2) return out;
  if (target == "lp") {
    const auto mode = out.q.size() <= kExactSubsetCap ? VectorEmbedding::Mode::Exact : VectorEmbedding::Mode::MonteCarlo;
    auto r = bourgain_embed(out.q.metric, mc.mparam, p, mode, seed.derive(1));
    out.embedding = std::move(r.embedding);
    out.report = r.report;
    out.bound = r.bound;
  } else {
    auto h = hst_from_m_centered(out.q.metric, static_cast<std::size_t>(std::ceil(mc.mparam)));
    out.tree = std::move(h.tree);
    out.report = h.report;
    out.bound = h.bound;
  }
  return out;
}

VectorEmbedding star_to_lp(std::size_t n, double tau, double p, std::size_t max_points) {
  if (!(p >= 1.0)) throw ParameterError("p must be at least 1");
  if (n > max_points) throw CapacityError("star embedding over 2^n atoms is capped");
  const double theta = std::min(1.0 / p, 1.0 - 1.0 / p);
  const double top = std::pow(2.0, 1.0 - theta);
  if (!(tau > 0.0 && tau <= top * (1.0 + 1e-12))) throw ParameterError("tau outside (0, 2^{1-theta(p)}]");
  VectorEmbedding e;
  e.p = p;
  e.mode = VectorEmbedding::Mode::Exact;
  double delta = 0.0;
  if (p <= 2.0) {
    delta = 1.0 - std::pow(tau, p) / 2.0;
    if (delta <= 1e-14) {
      // Limit case: standard unit vectors.
      e.points.assign(n + 1, std::vector<double>(n, 0.0));
      for (std::size_t i = 0; i < n; ++i) e.points[i + 1][i] = 1.0;
      return e;
    }
  } else {
    const double t = std::pow(tau / std::pow(2.0, 1.0 + 1.0 / p), p);
    delta = (1.0 - std::sqrt(std::max(0.0, 1.0 - 4.0 * t))) / 2.0;
  }
  const std::size_t atoms = std::size_t{1} << n;
  e.weights.resize(atoms);
  e.points.assign(n + 1, std::vector<double>(atoms, 0.0));
  const double hi = p <= 2.0 ? std::pow(delta, -1.0 / p) : 1.0;
  const double lo = p <= 2.0 ? 0.0 : -1.0;
  for (std::size_t w = 0; w < atoms; ++w) {
    const double k = static_cast<double>(__builtin_popcountll(w));
    e.weights[w] = std::pow(delta, k) * std::pow(1.0 - delta, static_cast<double>(n) - k);
    for (std::size_t i = 0; i < n; ++i) e.points[i + 1][w] = (w >> i & 1) ? hi : lo;
  }
  return e;
}

double truncated_gauss_distance(double d, double D) {
  if (!(D > 0.0)) throw ParameterError("truncation level must be positive");
  return std::sqrt(2.0) * D * std::sqrt(-std::expm1(-d * d / (2.0 * D * D)));
}

VectorEmbedding truncated_gauss_embed(const std::vector<std::vector<double>>& points, double D, std::size_t features,
                                      RngSeed seed) {
  const std::size_t dim = points.empty() ? 0 : points[0].size();
  Rng rng(seed);
  std::vector<std::vector<double>> dirs(features, std::vector<double>(dim));
  for (auto& g : dirs)
    for (auto& c : g) c = rng.normal();
  return phase_embed(points, D, 2.0, dirs);
}

TransformResult snowflake_sqrt_embed(const MetricSpace& x, double D) {
  if (!(D >= 1.0)) throw ParameterError("truncation level must be at least 1");
  if (x.size() >= 2 && x.min_distance() < 1.0) throw ParameterError("minimum distance must be at least 1");
  const std::size_t n = x.size();
  Matrix img(n, std::vector<double>(n, 0.0));
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) img[i][j] = img[j][i] = truncated_gauss_distance(std::sqrt(x(i, j)), std::sqrt(D));
  TransformResult out{MetricSpace(std::move(img)), {}, std::sqrt(std::numbers::e * D / (std::numbers::e - 1.0)),
                      std::sqrt(D)};
  if (n >= 2) out.report = distortion_between(truncate(x, D), out.image);
  return out;
}

TransformResult uptolog_embed(const MetricSpace& l1, double D, double p) {
  if (!(D >= 2.0)) throw ParameterError("truncation level must be at least 2");
  if (!(p >= 1.0 && p < 2.0)) throw ParameterError("p must lie in [1, 2)");
  const std::size_t n = l1.size();
  if (n >= 2 && l1.min_distance() < 1.0) throw ParameterError("minimum distance must be at least 1");
  const double level = std::pow(D, 1.0 / p);
  Matrix img(n, std::vector<double>(n, 0.0));
  double lower = INFINITY, upper = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      const double v = pstable_distance(std::pow(l1(i, j), 1.0 / p), level, p);
      img[i][j] = img[j][i] = v;
      const double base = std::min(l1(i, j), D);
      lower = std::min(lower, v * std::pow(D, 1.0 - 1.0 / p) / base);
      upper = std::max(upper, v / (std::pow(std::log(D), 1.0 / p) * base));
    }
  TransformResult out{MetricSpace(std::move(img)), {}, 0.0, level, lower, upper};
  if (n >= 2) {
    out.report = distortion_between(truncate(l1, D), out.image);
    out.bound = out.report.distortion;
  }
  return out;
}

double star_bound(double p, std::size_t n) {
  if (!(p >= 1.0)) throw ParameterError("p must be at least 1");
  const double f = 1.0 - 1.0 / static_cast<double>(n);
  return p <= 2.0 ? std::pow(std::pow(2.0, p - 1.0) * f, 1.0 / p) : std::pow(2.0 * f, 1.0 / p);
}

PoincareCheck star_poincare_lower(const std::vector<std::vector<double>>& xs, const std::vector<std::vector<double>>& ys,
                                  double p) {
  if (xs.size() != ys.size() || xs.empty()) throw StructuralError("Poincare check needs two lists of equal nonzero length");
  const std::size_t n = xs.size();
  PoincareCheck out;
  double cross = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      out.lhs += lp_norm_pow(xs[i], xs[j], p) + lp_norm_pow(ys[i], ys[j], p);
      cross += lp_norm_pow(xs[i], ys[j], p);
    }
  out.rhs = (p <= 2.0 ? 2.0 : std::pow(2.0, p - 1.0)) * cross;
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-12);
  out.star_bound = star_bound(p, n);
  return out;
}

double truncation_witness_bound() { return 2.0 * std::sqrt(5.0 - std::sqrt(7.0)) / 3.0; }

MetricSpace truncation_witness(double D) {
  if (!(D > 0.0)) throw ParameterError("truncation level must be positive");
  auto m = MetricSpace::from_points({{0.0, 0.0}, {D, 0.0}, {D / 2, D}, {D / 2, 0.0}});
  return truncate(m, D);
}

SearchResult search_l2_distortion(const MetricSpace& m, std::size_t dim, std::size_t restarts, RngSeed seed) {
  const std::size_t n = m.size();
  if (n < 2) throw StructuralError("need at least two points");
  const std::size_t dof = (n - 1) * dim;  // point 0 pinned at the origin
  auto objective = [&](const std::vector<double>& x) {
    double hi = 0.0, lo = INFINITY;
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) {
        double s = 0.0;
        for (std::size_t c = 0; c < dim; ++c) {
          const double a = i == 0 ? 0.0 : x[(i - 1) * dim + c];
          const double b = x[(j - 1) * dim + c];
          s += (a - b) * (a - b);
        }
        const double r = std::sqrt(s) / m(i, j);
        hi = std::max(hi, r);
        lo = std::min(lo, r);
      }
    return lo > 0.0 ? hi / lo : 1e300;
  };
  // Nelder-Mead with standard coefficients.
  auto minimize = [&](std::vector<double> start, double step) {
    std::vector<std::vector<double>> simplex(dof + 1, start);
    for (std::size_t i = 0; i < dof; ++i) simplex[i + 1][i] += step;
    std::vector<double> f(dof + 1);
    for (std::size_t i = 0; i <= dof; ++i) f[i] = objective(simplex[i]);
    for (int it = 0; it < 20000; ++it) {
      std::vector<std::size_t> order(dof + 1);
      for (std::size_t i = 0; i <= dof; ++i) order[i] = i;
      std::sort(order.begin(), order.end(), [&](auto a, auto b) { return f[a] < f[b]; });
      const std::size_t best = order.front(), worst = order.back(), second = order[dof - 1];
      if (f[worst] - f[best] < 1e-13) break;
      std::vector<double> c(dof, 0.0);
      for (std::size_t i = 0; i <= dof; ++i)
        if (i != worst)
          for (std::size_t k = 0; k < dof; ++k) c[k] += simplex[i][k] / static_cast<double>(dof);
      auto along = [&](double t) {
        std::vector<double> v(dof);
        for (std::size_t k = 0; k < dof; ++k) v[k] = c[k] + t * (simplex[worst][k] - c[k]);
        return v;
      };
      auto r = along(-1.0);
      const double fr = objective(r);
      if (fr < f[best]) {
        auto e = along(-2.0);
        const double fe = objective(e);
        if (fe < fr) simplex[worst] = e, f[worst] = fe;
        else simplex[worst] = r, f[worst] = fr;
      } else if (fr < f[second]) {
        simplex[worst] = r, f[worst] = fr;
      } else {
        auto k = along(fr < f[worst] ? -0.5 : 0.5);
        const double fk = objective(k);
        if (fk < std::min(fr, f[worst])) {
          simplex[worst] = k, f[worst] = fk;
        } else {
          for (std::size_t i = 0; i <= dof; ++i)
            if (i != best) {
              for (std::size_t t = 0; t < dof; ++t) simplex[i][t] = simplex[best][t] + 0.5 * (simplex[i][t] - simplex[best][t]);
              f[i] = objective(simplex[i]);
            }
        }
      }
    }
    const auto it = std::min_element(f.begin(), f.end());
    return std::make_pair(*it, simplex[static_cast<std::size_t>(it - f.begin())]);
  };
  Rng rng(seed);
  const double scale = m.diameter();
  SearchResult best{INFINITY, {}};
  std::vector<double> arg;
  for (std::size_t r = 0; r < std::max<std::size_t>(1, restarts); ++r) {
    std::vector<double> x(dof);
    for (auto& v : x) v = rng.normal() * scale;
    auto [fv, xv] = minimize(x, 0.1 * scale);
    for (int polish = 0; polish < 4; ++polish) std::tie(fv, xv) = minimize(xv, 0.01 * scale);
    if (fv < best.distortion) best.distortion = fv, arg = xv;
  }
  best.points.assign(n, std::vector<double>(dim, 0.0));
  for (Index i = 1; i < n; ++i)
    for (std::size_t c = 0; c < dim; ++c) best.points[i][c] = arg[(i - 1) * dim + c];
  return best;
}

}  // namespace metriq
