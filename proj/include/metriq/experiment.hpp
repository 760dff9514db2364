#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "metriq/composition.hpp"
#include "metriq/io.hpp"
#include "metriq/metric.hpp"
#include "metriq/random.hpp"

namespace metriq {

/// Realized instance. Cube instances keep the dimension and build the matrix on demand.
struct Instance {
  std::string variant;
  MetricSpace metric;
  std::optional<CompositionTree> tree;
  int cube_d = 0;

  std::size_t size() const;
  const MetricSpace& space();
};

/// Instance JSON: {"variant": random|euclidean|gnp|padded|composition|cube|star|lacunary|lipcomp|inline, ...}.
/// Unknown variants and out-of-range parameters raise ParameterError.
Instance realize_instance(const json& spec, RngSeed seed);
void validate_instance_spec(const json& spec);

/// Operation names accepted in a pipeline.
const std::vector<std::string>& pipeline_ops();

struct PipelineOp {
  std::string op;
  json params = json::object();
};

struct ExperimentPlan {
  json instance;
  std::vector<PipelineOp> pipeline;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  bool timing = false;
  bool keep_artifacts = false;
  std::size_t threads = 0;  // 0: hardware concurrency

  static ExperimentPlan from_json(const json& j);
  json to_json() const;
  /// Checks op names and parameter ranges; throws ParameterError.
  void validate() const;
};

struct TrialRow {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t quotient_size = 0;
  std::string provenance;
  std::string target_class;
  std::optional<double> p;
  std::optional<double> certified_distortion;
  std::optional<double> bound;
  std::optional<std::size_t> attempts;
  std::optional<double> millis;
  std::string op;
  std::string error;  // empty on success
};

struct ReportBundle {
  std::vector<TrialRow> rows;
  std::string csv;
  json summary;
  std::vector<json> bundles;  // one per successful row when keep_artifacts
};

inline constexpr const char* kCsvHeader =
    "trial,seed,n,quotient_size,provenance,target_class,p,certified_distortion,paper_bound,attempts,millis";

/// Seed of trial t: {splitmix64(base ^ splitmix64(0x7269616c + t)), 0}. Inside a trial,
/// derive(0) realizes the instance and derive(i + 1) drives pipeline operation i.
RngSeed trial_seed(std::uint64_t base, std::size_t trial);

/// One pipeline operation on an instance; returns the row and, on request, the artifact bundle.
TrialRow run_op(Instance& inst, const PipelineOp& op, RngSeed seed, json* bundle = nullptr);

ReportBundle run_experiment(const ExperimentPlan& plan);
std::string rows_to_csv(const std::vector<TrialRow>& rows);

/// Bundle: {"format": "metriq-bundle", "version": 1, "kind", "seed", "artifacts", "digest"}.
/// Artifact keys: metric, quotient, certificate, embedding, tree, report, bound, k, recipe, cube.
json make_bundle(const std::string& kind, std::uint64_t seed, json artifacts);
/// Recomputes the digest after edits.
void reseal_bundle(json& bundle);

struct BundleIssue {
  std::string artifact;
  std::string check;
  std::optional<std::size_t> i, j;
  double expected = 0.0;
  double found = 0.0;
  std::string message;
};

struct BundleReport {
  std::vector<BundleIssue> issues;
  std::size_t checks = 0;
  bool ok() const { return issues.empty(); }
  json to_json() const;
};

struct VerifyOptions {
  double tolerance = 1e-9;        // relative, for recomputed quantities
  double mc_tolerance = 0.35;     // relative, for re-sampled Monte Carlo distortion
  std::uint64_t fresh_seed = 0x5eed;
};

/// Independent re-check of every certificate in a bundle. Schema or digest mismatch
/// raises StructuralError; failed checks are listed in the report.
BundleReport verify_bundle(const json& bundle, const VerifyOptions& opt = {});

}  // namespace metriq
