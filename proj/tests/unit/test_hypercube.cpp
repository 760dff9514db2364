#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "metriq/embeddings.hpp"
#include "metriq/error.hpp"
#include "metriq/hypercube.hpp"

using namespace metriq;

namespace {

int ham(std::uint32_t a, std::uint32_t b) { return std::popcount(a ^ b); }

MetricSpace cube(int d) {
  const std::size_t n = std::size_t{1} << d;
  Matrix m(n, std::vector<double>(n, 0.0));
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) m[x][y] = ham(static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y));
  return MetricSpace(std::move(m));
}

/// Largest r such that some closed ball of radius r contains only singleton blocks.
int brute_lower_radius(int d, const std::vector<bool>& singleton) {
  int best = -1;
  for (std::uint32_t x = 0; x < (1u << d); ++x) {
    for (int r = d; r >= 0; --r) {
      bool ok = true;
      for (std::uint32_t y = 0; y < (1u << d) && ok; ++y)
        if (ham(x, y) <= r && !singleton[y]) ok = false;
      if (ok) {
        best = std::max(best, r);
        break;
      }
    }
  }
  return best;
}

}  // namespace

TEST_CASE("radius formula") {
  // r = smallest even integer exceeding 2 ceil(ln(1/eps) / ln(d / ln(1/eps)))
  const double l = std::log(1 / 0.2);
  CHECK(cube_radius(10, 0.2) == 2 * static_cast<int>(std::ceil(l / std::log(10 / l))) + 2);
  CHECK(cube_radius(14, 0.1) % 2 == 0);
}

TEST_CASE("net is separated and maximal") {
  for (int d : {6, 8, 10, 12})
    for (double eps : {0.1, 0.2}) {
      const int r = cube_radius(d, eps);
      auto a = greedy_cube_net(d, 2 * r);
      for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j) CHECK(ham(a[i], a[j]) > 2 * r);
      for (std::uint32_t x = 0; x < (1u << d); ++x) {
        int best = d + 1;
        for (auto c : a) best = std::min(best, ham(x, c));
        CHECK(best <= 2 * r);
      }
    }
}

TEST_CASE("construction matches the M/A closed form on the materialized subspace") {
  CubeQsOptions opt;
  opt.allow_short = true;
  auto res = cube_qs_construct(8, 0.2, 2.0, {1, 0}, opt);
  auto q = res.materialize();
  // Oracle: restrict the cube to S and collapse A with the generic quotient code.
  auto c = cube(8);
  PointSet s(res.survivors.begin(), res.survivors.end());
  auto sub = c.restrict(s);
  PointSet a_local;
  for (auto x : res.centers) a_local.push_back(static_cast<Index>(std::lower_bound(s.begin(), s.end(), x) - s.begin()));
  auto oracle = quotient_by_subset(sub, a_local);
  REQUIRE(oracle.size() == q.size());
  for (Index i = 0; i < q.size(); ++i)
    for (Index j = 0; j < q.size(); ++j) CHECK(q.metric(i, j) == oracle.metric(i, j));
  CHECK(q.provenance == Provenance::QS);
}

TEST_CASE("size, sandwich and distortion certificate") {
  auto res = cube_qs_construct(10, 0.2, 2.0, {1, 0});
  CHECK(res.blocks >= 820);
  CHECK(res.size_ok);
  CHECK(res.sandwich_ok);
  CHECK(res.exhaustive);
  CHECK(res.bound == doctest::Approx(8 * std::sqrt(std::numbers::e * res.r / (std::numbers::e - 1))));
  CHECK(res.report.distortion <= res.bound);
  CHECK(res.image_norm == doctest::Approx(std::sqrt(static_cast<double>(res.r))));
  for (std::size_t i = 0; i + 1 < res.blocks; ++i) {
    CHECK(res.to_a(i) >= res.r / 2);
    CHECK(res.to_a(i) <= 2 * res.r);
  }
  // closed-form image vs min{Hamming, r} pieces
  CHECK(res.image_distance(0, res.blocks - 1) == doctest::Approx(std::sqrt(static_cast<double>(res.r))));
}

TEST_CASE("p < 2 route reports a fitted constant") {
  auto res = cube_qs_construct(10, 0.2, 1.5, {1, 0});
  CHECK(res.report.distortion >= 1.0);
  CHECK(res.normalized > 0.0);
  CHECK(res.image_norm == doctest::Approx(std::pow(res.r, 1 / 1.5)));
}

TEST_CASE("construction errors") {
  CHECK_THROWS_AS(cube_qs_construct(10, 0.3, 2.0, {1, 0}), ParameterError);
  CHECK_THROWS_AS(cube_qs_construct(10, 1e-4, 2.0, {1, 0}), ParameterError);
  CHECK_THROWS_AS(cube_qs_construct(23, 0.1, 2.0, {1, 0}), ParameterError);
  CHECK_THROWS_AS(cube_qs_construct(10, 0.05, 2.0, {1, 0}), ConstructionFailure);
}

TEST_CASE("certify lower: identity, exclusion, values") {
  std::vector<bool> all(1u << 9, true);
  auto id = cube_certify_lower(9, all, 2.0);
  CHECK(id.r == 9);
  CHECK(id.m == 3);
  CHECK(id.bound == doctest::Approx(std::sqrt(3.0)));
  CHECK(cube_certify_lower(9, all, 1.0).bound == 1.0);
  // one block = ball of radius 2 around 0 in Omega_8
  for (int d : {6, 8}) {
    std::vector<bool> sing(1u << d, true);
    for (std::uint32_t x = 0; x < (1u << d); ++x)
      if (ham(x, 0) <= 2) sing[x] = false;
    auto c = cube_certify_lower(d, sing, 2.0);
    CHECK(c.r == brute_lower_radius(d, sing));
  }
  // via a QuotientSpace over Omega_6 with a hemisphere block
  auto c6 = cube(6);
  std::vector<PointSet> blocks(1);
  for (Index x = 0; x < 64; ++x) {
    if (x & 1) blocks[0].push_back(x);
    else blocks.push_back({x});
  }
  auto q = quotient_metric(c6, blocks);
  auto lb = cube_certify_lower(q, 2.0);
  CHECK(lb.r == 0);
  CHECK(lb.bound == 0.0);
  CHECK_THROWS_AS(cube_certify_lower(quotient_metric(MetricSpace::equilateral(5), {{0}, {1}}), 2.0), StructuralError);
}
