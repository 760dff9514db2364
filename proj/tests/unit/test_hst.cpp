#include <doctest.h>

#include <cmath>
#include <functional>

#include "metriq/error.hpp"
#include "metriq/hst.hpp"
#include "metriq/quotient.hpp"
#include "support.hpp"

using namespace metriq;

namespace {

HstTree star_tree(std::size_t leaves, double delta) {
  std::vector<HstTree> kids;
  for (Index i = 0; i < leaves; ++i) kids.push_back(HstTree::leaf(i));
  return HstTree::join(delta, kids);
}

/// Random binary tree on `leaves` leaves with labels halving per level.
HstTree random_binary(Rng& rng, std::vector<Index> ids, double delta) {
  if (ids.size() == 1) return HstTree::leaf(ids[0]);
  const std::size_t cut = 1 + rng.index(ids.size() - 1);
  std::vector<Index> l(ids.begin(), ids.begin() + static_cast<long>(cut));
  std::vector<Index> r(ids.begin() + static_cast<long>(cut), ids.end());
  return HstTree::join(delta, {random_binary(rng, l, delta / 2), random_binary(rng, r, delta / 2)});
}

/// Ultrametric from single-linkage heights of random points (independent recipe).
MetricSpace random_ultrametric(Rng& rng, std::size_t n) {
  auto base = testing_support::random_integer_metric(rng, n, 9);
  Matrix u = base.matrix();
  // Minimax path closure gives the subdominant ultrametric.
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) u[i][j] = std::min(u[i][j], std::max(u[i][k], u[k][j]));
  for (std::size_t i = 0; i < n; ++i) u[i][i] = 0;
  return MetricSpace(u);
}

}  // namespace

TEST_CASE("validate_khst label checks") {
  auto star = star_tree(5, 1.0);
  for (double k : {1.0, 2.0, 100.0}) CHECK(validate_khst(star, k).ok());
  auto chain = HstTree::join(4, {HstTree::join(2, {HstTree::leaf(0), HstTree::leaf(1)}), HstTree::leaf(2)});
  CHECK(validate_khst(chain, 2).ok());
  auto bad = validate_khst(chain, 3);
  REQUIRE(bad.violations.size() == 1);
  CHECK(bad.violations[0].kind == HstViolation::Kind::Ratio);
  Rng rng({11, 0});
  for (int t = 0; t < 20; ++t) {
    std::vector<Index> ids(2 + rng.index(14));
    for (Index i = 0; i < ids.size(); ++i) ids[i] = i;
    CHECK(validate_khst(random_binary(rng, ids, 64), 2).ok());
  }
}

TEST_CASE("malformed trees are structural errors") {
  std::vector<HstNode> cyc(2);
  cyc[0].delta = 1;
  cyc[0].children = {1};
  cyc[1].delta = 1;
  cyc[1].children = {1};
  CHECK_THROWS_AS(validate_khst(HstTree(cyc), 1), StructuralError);
  std::vector<HstNode> orphan(3);
  orphan[0].delta = 1;
  orphan[0].children = {1};
  orphan[1].leaf = 0;
  orphan[2].leaf = 1;
  CHECK_THROWS_AS(hst_to_metric(HstTree(orphan)), StructuralError);
}

TEST_CASE("leaf metric") {
  auto eq = hst_to_metric(star_tree(4, 3.0));
  CHECK(eq.matrix() == MetricSpace::equilateral(4, 3.0).matrix());
  auto cat = HstTree::join(
      8, {HstTree::leaf(0), HstTree::join(4, {HstTree::leaf(1), HstTree::join(2, {HstTree::leaf(2), HstTree::leaf(3)})})});
  CHECK(hst_to_metric(cat).matrix() == realize_special(LacunarySpec{{8, 4, 2}, 1}).matrix());
  Rng rng({12, 0});
  std::vector<Index> ids(12);
  for (Index i = 0; i < 12; ++i) ids[i] = i;
  auto m = hst_to_metric(random_binary(rng, ids, 100));
  CHECK(validate_metric(m).ok());
  CHECK(is_ultrametric(m, 0.0));
}

TEST_CASE("single-linkage round trip on ultrametrics") {
  Rng rng({13, 0});
  for (int t = 0; t < 50; ++t) {
    auto u = random_ultrametric(rng, 2 + rng.index(15));
    REQUIRE(is_ultrametric(u, 0.0));
    auto tree = ultrametric_to_hst(u);
    CHECK(validate_khst(tree, 1.0).ok());
    CHECK(hst_to_metric(tree).matrix() == u.matrix());
  }
  auto star = ultrametric_to_hst(MetricSpace::equilateral(6, 2.0));
  CHECK(star.node(0).children.size() == 6);
}

TEST_CASE("compress splices equal labels") {
  auto t = HstTree::join(4, {HstTree::join(4, {HstTree::leaf(0), HstTree::leaf(1)}), HstTree::leaf(2)});
  auto c = compress(t);
  CHECK(c.node(0).children.size() == 3);
  CHECK(hst_to_metric(c).matrix() == hst_to_metric(t).matrix());
}

TEST_CASE("Euclidean realization is isometric") {
  auto two = ultrametric_to_l2(star_tree(2, 5.0));
  CHECK(two.distance(0, 1) == doctest::Approx(5.0).epsilon(1e-12));
  auto tri = ultrametric_to_l2(star_tree(3, std::sqrt(2.0)));
  for (Index i = 0; i < 3; ++i)
    for (Index j = i + 1; j < 3; ++j) CHECK(std::abs(tri.distance(i, j) - std::sqrt(2.0)) < 1e-9);
  Rng rng({14, 0});
  for (int t = 0; t < 30; ++t) {
    std::vector<Index> ids(2 + rng.index(63));
    for (Index i = 0; i < ids.size(); ++i) ids[i] = i;
    auto tree = t % 2 ? random_binary(rng, ids, 1000) : ultrametric_to_hst(random_ultrametric(rng, ids.size()));
    auto e = ultrametric_to_l2(tree);
    auto target = hst_to_metric(tree);
    auto induced = e.induced_metric();
    for (Index i = 0; i < ids.size(); ++i)
      for (Index j = 0; j < ids.size(); ++j) CHECK(std::abs(induced(i, j) - target(i, j)) < 1e-9 * std::max(1.0, target(i, j)));
    if (ids.size() == 8 || t == 3) CHECK(std::abs(distortion_between(target, induced).distortion - 1.0) < 1e-9);
  }
}

TEST_CASE("line into ultrametric bound") {
  for (std::size_t n = 2; n < 20; ++n) {
    std::vector<double> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = static_cast<double>(i + 1);
    CHECK(line_um_lower_bound(a) == static_cast<double>(n - 1));
    // The equilateral embedding at edge a_n - a_1 attains the bound here.
    auto line = MetricSpace::from_points([&] {
      std::vector<std::vector<double>> p;
      for (double x : a) p.push_back({x});
      return p;
    }());
    auto eq = MetricSpace::equilateral(n, a.back() - a.front());
    CHECK(distortion_between(line, eq).distortion == doctest::Approx(static_cast<double>(n - 1)));
  }
  CHECK(line_um_lower_bound({0, 1}) == 1.0);
  CHECK(line_um_lower_bound({0, 1, 2, 10}) == 1.25);
  CHECK_THROWS_AS(line_um_lower_bound({0, 2, 1}), StructuralError);
  Rng rng({15, 0});
  for (int t = 0; t < 50; ++t) {
    std::vector<double> a{0};
    for (int i = 0; i < 6; ++i) a.push_back(a.back() + 0.1 + rng.uniform());
    double mingap = INFINITY;
    for (std::size_t i = 0; i + 1 < a.size(); ++i) mingap = std::min(mingap, a[i + 1] - a[i]);
    CHECK((a.back() - a.front()) / mingap >= line_um_lower_bound(a));
  }
}
