#pragma once

#include <optional>
#include <string>
#include <vector>

#include "metriq/coloring.hpp"
#include "metriq/hst.hpp"
#include "metriq/metric.hpp"
#include "metriq/quotient.hpp"
#include "metriq/random.hpp"

namespace metriq {

/// Comparison of a quotient with a realized model space, recomputed exactly.
struct Certificate {
  std::string target;  // equilateral | star | lacunary | UM | lp
  MetricSpace model;
  std::vector<Index> map;  // quotient block -> model point (empty: identity)
  DistortionReport report;
  double bound = 1.0;
  bool holds(double rel_tol = 1e-12) const { return report.distortion <= bound * (1.0 + rel_tol); }
};

Certificate make_certificate(std::string target, const MetricSpace& quotient, MetricSpace model,
                             std::vector<Index> map, double bound);

struct ConstructionOptions {
  std::size_t max_attempts = 64;
};

/// Exhaustive m-center test: every ball with at least `mparam` points contains x.
bool is_m_center(const MetricSpace& m, Index x, double mparam);
/// First m-center in index order, if any.
std::optional<Index> find_m_center(const MetricSpace& m, double mparam);
/// Smallest radius whose closed ball around x holds at least `mparam` points (infinity if none).
double ball_radius_for_count(const MetricSpace& m, Index x, double mparam);

struct MCenterResult {
  PointSet t;
  QuotientSpace q;  // M/T, T-block last
  double mparam = 0.0;
  std::size_t attempts = 0;
  std::size_t rejected = 0;
};

/// Random T with |T| <= eps n whose block is a (2 ln(2/eps)/eps)-center of M/T.
MCenterResult m_center_quotient(const MetricSpace& m, double eps, RngSeed seed, const ConstructionOptions& opt = {});

struct HstResult {
  HstTree tree;
  DistortionReport report;
  bool non_contracting = false;
  double bound = 0.0;  // 2m
};

/// Recursive ball-splitting tree of an m-centered space.
HstResult hst_from_m_centered(const MetricSpace& m, std::size_t mparam);

struct TsSets {
  PointSet s;
  PointSet t;
  std::size_t attempts = 0;
};

TsSets ts_sets(const MetricSpace& m, RngSeed seed, const ConstructionOptions& opt = {});

struct AspectOptions {
  std::optional<std::vector<double>> weights;
  bool lipschitz = false;
  /// Number of distance bands; 0 derives it from the aspect ratio of the input.
  int palette = 0;
  ColoringOptions coloring;
};

struct AspectResult {
  QuotientSpace q;
  int band = 0;          // ell: every cross-block set distance lies in [alpha^(ell-1), alpha^ell) * scale
  double scale = 1.0;    // minimum distance of the input
  int palette = 0;
  std::size_t size_bound = 0;
  Certificate cert;      // against an equilateral space
  bool hausdorff_in_band = false;
  std::optional<WeightedColoringResult> weighted;
  std::size_t attempts = 0;
};

AspectResult aspect_quotient(const MetricSpace& m, double alpha, RngSeed seed, const AspectOptions& opt = {});

struct StarResult {
  QuotientSpace q;  // blocks A_1..A_s then A_0 (root) last
  double tau = 0.0;
  int ell = 0;
  int palette = 0;
  std::size_t band_points = 0;  // |T cap M[a,b)|
  std::size_t size_bound = 0;
  Certificate cert;  // against the star with root = last model point mapped to index 0
  bool root_claim = false;  // every d(A_i, A_0) in [a, b)
  std::size_t attempts = 0;
};

StarResult find_star_quotient(const MetricSpace& m, double a, double b, double alpha, RngSeed seed,
                              const ConstructionOptions& opt = {});
StarResult find_star_quotient(const MetricSpace& m, const TsSets& st, double a, double b, double alpha,
                              RngSeed seed, const ConstructionOptions& opt = {});

struct DichotomyResult {
  QuotientSpace q;
  Certificate cert;
  std::string branch;  // lacunary | star
  std::size_t lacunary_size = 0;
  std::size_t star_size = 0;
  std::size_t classes_modulus = 0;  // m in the residue-class selection
  double tau = 0.0;
  std::size_t attempts = 0;
};

DichotomyResult q_dichotomy(const MetricSpace& m, double k, double beta, double alpha, RngSeed seed,
                            bool drop_root = false, const ConstructionOptions& opt = {});

struct Q2Result {
  QuotientSpace q;  // T points by decreasing r_M, complement block last
  Certificate cert;
  std::size_t attempts = 0;
};

Q2Result q2_lacunary(const MetricSpace& m, RngSeed seed, const ConstructionOptions& opt = {});

/// Reorders blocks (and the metric) of a quotient.
QuotientSpace permute_blocks(const QuotientSpace& q, const std::vector<std::size_t>& order);

}  // namespace metriq
