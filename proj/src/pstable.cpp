#include "metriq/pstable.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "metriq/error.hpp"

namespace metriq {

namespace {

using boost::math::quadrature::gauss_kronrod;
constexpr double kPi = std::numbers::pi;

void check_p(double p) {
  if (!(p >= 1.0 && p < 2.0)) throw ParameterError("p-stable routines need p in [1, 2)");
}

/// Power series around 0; converges for p > 1 (radius 1 at p = 1).
double density_series(double x, double p) {
  double s = 0.0, x2k = 1.0;
  for (int k = 0; k < 80; ++k) {
    const double term = std::exp(std::lgamma((2.0 * k + 1.0) / p) - std::lgamma(2.0 * k + 1.0)) * x2k;
    s += (k % 2 == 0 ? term : -term);
    if (term < 1e-17 * std::abs(s)) break;
    x2k *= x * x;
  }
  return s / (kPi * p);
}

constexpr int kTailTerms = 6;

/// Leading terms of the large-x expansion.
double density_tail(double x, double p) {
  double s = 0.0;
  for (int k = 1; k <= kTailTerms; ++k) {
    const double c = std::exp(std::lgamma(k * p + 1.0) - std::lgamma(k + 1.0)) * std::sin(k * kPi * p / 2.0);
    s += (k % 2 == 1 ? c : -c) * std::pow(x, -k * p - 1.0);
  }
  return s / kPi;
}

/// Integral representation of the symmetric density for p in (1, 2), x > 0.
double density_integral(double x, double p) {
  const double e = p / (p - 1.0);
  const double lx = std::log(x);
  auto integrand = [&](double th) {
    if (th <= 0.0 || th >= kPi / 2) return 0.0;
    const double lg = e * (lx + std::log(std::cos(th) / std::sin(p * th))) + std::log(std::cos((p - 1.0) * th) / std::cos(th));
    if (lg > 700.0) return 0.0;
    const double g = std::exp(lg);
    return g * std::exp(-g);
  };
  const double v = gauss_kronrod<double, 31>::integrate(integrand, 0.0, kPi / 2, 12, 1e-12);
  return p / (kPi * (p - 1.0) * x) * v;
}

double h(double u, double p) { return std::pow(2.0, p / 2.0) * std::pow(std::abs(std::sin(u / 2.0)), p); }

/// Mean of (1 - cos u)^{p/2} over a period.
double period_mean(double p) {
  auto f = [p](double u) { return h(u, p); };
  return gauss_kronrod<double, 61>::integrate(f, 0.0, 2 * kPi, 15, 1e-14) / (2 * kPi);
}

constexpr double kSplit = 50.0;

double moment_quadrature(double a, double p) {
  const double period = 2 * kPi / a;
  // Body [0, kSplit]: breakpoints at the period grid and a dyadic grid near the mode.
  std::vector<double> br = {0.0, kSplit};
  for (double t = 0.125; t < kSplit; t *= 2) br.push_back(t);
  for (double t = period; t < kSplit; t += period) br.push_back(t);
  std::sort(br.begin(), br.end());
  auto body = [&](double x) { return h(a * x, p) * pstable_density(x, p); };
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < br.size(); ++i)
    if (br[i + 1] > br[i]) s += gauss_kronrod<double, 21>::integrate(body, br[i], br[i + 1], 0, 0);
  // Tail: asymptotic density, oscillation resolved over 1000 periods, then averaged.
  auto tail = [&](double x) { return h(a * x, p) * density_tail(x, p); };
  const double stop = kSplit + 1000.0 * period;
  double lo = kSplit;
  double hi = std::ceil(kSplit / period) * period;
  while (lo < stop) {
    if (hi > lo) s += gauss_kronrod<double, 21>::integrate(tail, lo, hi, 0, 0);
    lo = hi;
    hi += period;
  }
  const double mean = period_mean(p);
  for (int k = 1; k <= kTailTerms; ++k) {
    const double c = std::exp(std::lgamma(k * p + 1.0) - std::lgamma(k + 1.0)) * std::sin(k * kPi * p / 2.0) / kPi;
    s += (k % 2 == 1 ? c : -c) * mean * std::pow(lo, -k * p) / (k * p);
  }
  return 2.0 * s;
}

}  // namespace

double pstable_density(double x, double p) {
  check_p(p);
  x = std::abs(x);
  if (p == 1.0) return 1.0 / (kPi * (1.0 + x * x));
  if (x <= 0.5) return density_series(x, p);
  if (x >= kSplit) return density_tail(x, p);
  return density_integral(x, p);
}

double pstable_sample(Rng& rng, double p) {
  check_p(p);
  const double u = kPi * (rng.uniform_open() - 0.5);
  if (p == 1.0) return std::tan(u);
  const double w = rng.exponential();
  return std::sin(p * u) / std::pow(std::cos(u), 1.0 / p) * std::pow(std::cos((1.0 - p) * u) / w, (1.0 - p) / p);
}

double pstable_cos_moment(double a, double p) {
  check_p(p);
  a = std::abs(a);
  if (a == 0.0) return 0.0;
  static std::mutex mu;
  static std::map<std::pair<double, double>, double> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({a, p});
    if (it != cache.end()) return it->second;
  }
  const double v = moment_quadrature(a, p);
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(std::make_pair(a, p), v);
  return v;
}

double pstable_cos_moment_mc(double a, double p, std::size_t samples, RngSeed seed) {
  check_p(p);
  if (samples == 0) throw ParameterError("Monte Carlo needs at least one sample");
  Rng rng(seed);
  double s = 0.0;
  for (std::size_t i = 0; i < samples; ++i) s += h(a * pstable_sample(rng, p), p);
  return s / static_cast<double>(samples);
}

double pstable_distance(double d, double D, double p) {
  check_p(p);
  if (!(D > 0.0)) throw ParameterError("truncation level must be positive");
  if (d == 0.0) return 0.0;
  return D * std::pow(std::pow(2.0, p / 2.0) * pstable_cos_moment(d / D, p), 1.0 / p);
}

VectorEmbedding phase_embed(const std::vector<std::vector<double>>& points, double D, double p,
                            const std::vector<std::vector<double>>& directions) {
  if (!(D > 0.0)) throw ParameterError("truncation level must be positive");
  if (directions.empty()) throw ParameterError("need at least one feature");
  VectorEmbedding e;
  e.p = p;
  e.mode = VectorEmbedding::Mode::MonteCarlo;
  e.samples = directions.size();
  e.complex_coords = true;
  e.weights.assign(directions.size(), 1.0 / static_cast<double>(directions.size()));
  for (const auto& x : points) {
    std::vector<double> v;
    v.reserve(2 * directions.size());
    for (const auto& g : directions) {
      if (g.size() != x.size()) throw StructuralError("direction dimension does not match point dimension");
      double t = 0.0;
      for (std::size_t c = 0; c < x.size(); ++c) t += x[c] * g[c];
      v.push_back(D * std::cos(t / D));
      v.push_back(D * std::sin(t / D));
    }
    e.points.push_back(std::move(v));
  }
  return e;
}

VectorEmbedding pstable_embed(const std::vector<std::vector<double>>& points, double D, double p,
                              std::size_t features, RngSeed seed) {
  check_p(p);
  const std::size_t dim = points.empty() ? 0 : points[0].size();
  Rng rng(seed);
  std::vector<std::vector<double>> dirs(features, std::vector<double>(dim));
  for (auto& g : dirs)
    for (auto& c : g) c = pstable_sample(rng, p);
  return phase_embed(points, D, p, dirs);
}

Envelope pstable_envelope(double p, const std::vector<double>& a_grid) {
  check_p(p);
  Envelope env;
  env.lower = INFINITY;
  env.upper = 0.0;
  for (double a : a_grid) {
    if (!(a > 0.0)) continue;
    const double ref = std::min(std::pow(a, p) * std::log(1.0 / a + 1.0), 1.0);
    const double r = pstable_cos_moment(a, p) / ref;
    env.lower = std::min(env.lower, r);
    env.upper = std::max(env.upper, r);
    ++env.samples;
  }
  return env;
}

}  // namespace metriq
