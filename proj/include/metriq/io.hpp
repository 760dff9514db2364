#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"
#include "metriq/composition.hpp"
#include "metriq/constructions.hpp"
#include "metriq/embedding.hpp"
#include "metriq/hst.hpp"
#include "metriq/hypercube.hpp"
#include "metriq/lipschitz.hpp"
#include "metriq/metric.hpp"
#include "metriq/quotient.hpp"

namespace metriq {

using nlohmann::json;

// Metric: {"n": int, "labels": [str]?, "dist": [[float]]}
json to_json(const MetricSpace& m);
MetricSpace metric_from_json(const json& j);

// Quotient: {"provenance", "blocks": [[int]], "metric": metric, "base": metric?}
json to_json(const QuotientSpace& q, bool with_base = true);
QuotientSpace quotient_from_json(const json& j);

// Embedding: {"p", "mode", "samples", "complex", "vectors": [[float]], "weights": [float]?}
json to_json(const VectorEmbedding& e);
VectorEmbedding embedding_from_json(const json& j);

// HST: {"nodes": [{"delta", "leaf": int|null, "children": [int]}]}, node 0 is the root.
json to_json(const HstTree& t);
HstTree hst_from_json(const json& j);

json to_json(const DistortionReport& r);
DistortionReport distortion_report_from_json(const json& j);

// Certificate: {"target", "model": metric, "map": [int], "report", "bound"}
json to_json(const Certificate& c);
Certificate certificate_from_json(const json& j);

// QuotientMap: {"source": metric, "target": metric, "assign": [int]}
json to_json(const QuotientMap& qm);
QuotientMap quotient_map_from_json(const json& j);

// CompositionTree: {"space": metric, "beta", "children": [tree]}
json to_json(const CompositionTree& t);
CompositionTree composition_from_json(const json& j);

/// Cube QS result without the 2^d matrix; distances are recomputed from the block structure.
json to_json(const CubeQsResult& r);

json to_json(const RngSeed& s);
RngSeed seed_from_json(const json& j);

/// n lines of n comma-separated values.
std::string metric_to_csv(const MetricSpace& m);
MetricSpace metric_from_csv(const std::string& text);
/// JSON (a metric, or any object with a "metric" field) or CSV, detected by the first character.
MetricSpace load_metric(const std::string& path);

/// Deterministic text form (sorted keys, shortest round-trip numbers).
std::string dump_canonical(const json& j);
std::uint64_t fnv1a(const std::string& bytes);
std::string digest_hex(const json& j);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace metriq
