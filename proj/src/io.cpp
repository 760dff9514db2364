#include "metriq/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "metriq/error.hpp"

namespace metriq {

namespace {

template <typename T>
T field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw StructuralError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw StructuralError(std::string("bad field '") + key + "': " + e.what());
  }
}

json pair_json(const PairArg& p) { return json::array({p.i, p.j}); }

PairArg pair_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw StructuralError("pair must be a two-element array");
  return {j[0].get<Index>(), j[1].get<Index>()};
}

}  // namespace

json to_json(const MetricSpace& m) {
  json j{{"n", m.size()}, {"dist", m.matrix()}};
  if (!m.labels().empty()) j["labels"] = m.labels();
  return j;
}

MetricSpace metric_from_json(const json& j) {
  auto d = field<Matrix>(j, "dist");
  const auto n = field<std::size_t>(j, "n");
  if (d.size() != n) throw StructuralError("metric size does not match 'n'");
  for (const auto& row : d)
    if (row.size() != n) throw StructuralError("metric matrix is not square");
  std::vector<std::string> labels;
  if (j.contains("labels")) labels = field<std::vector<std::string>>(j, "labels");
  return MetricSpace(std::move(d), std::move(labels));
}

json to_json(const QuotientSpace& q, bool with_base) {
  json j{{"provenance", to_string(q.provenance)}, {"blocks", q.blocks}, {"metric", to_json(q.metric)}};
  if (with_base && q.base) j["base"] = to_json(*q.base);
  return j;
}

QuotientSpace quotient_from_json(const json& j) {
  QuotientSpace q;
  q.provenance = provenance_from_string(field<std::string>(j, "provenance"));
  q.blocks = field<std::vector<PointSet>>(j, "blocks");
  q.metric = metric_from_json(field<json>(j, "metric"));
  if (j.contains("base")) {
    q.base = std::make_shared<const MetricSpace>(metric_from_json(j.at("base")));
    check_blocks(q.base->size(), q.blocks);
  }
  if (q.metric.size() != q.blocks.size()) throw StructuralError("quotient metric size does not match block count");
  return q;
}

json to_json(const VectorEmbedding& e) {
  json j{{"p", e.p}, {"mode", to_string(e.mode)}, {"samples", e.samples}, {"complex", e.complex_coords}, {"vectors", e.points}};
  if (!e.weights.empty()) j["weights"] = e.weights;
  return j;
}

VectorEmbedding embedding_from_json(const json& j) {
  VectorEmbedding e;
  e.p = field<double>(j, "p");
  const auto mode = field<std::string>(j, "mode");
  if (mode == "exact") e.mode = VectorEmbedding::Mode::Exact;
  else if (mode == "monte-carlo") e.mode = VectorEmbedding::Mode::MonteCarlo;
  else throw StructuralError("unknown embedding mode '" + mode + "'");
  if (j.contains("samples")) e.samples = field<std::size_t>(j, "samples");
  if (j.contains("complex")) e.complex_coords = field<bool>(j, "complex");
  e.points = field<std::vector<std::vector<double>>>(j, "vectors");
  if (j.contains("weights")) e.weights = field<std::vector<double>>(j, "weights");
  e.check();
  return e;
}

json to_json(const HstTree& t) {
  json nodes = json::array();
  for (const auto& n : t.nodes()) {
    json jn{{"delta", n.delta}, {"children", n.children}};
    jn["leaf"] = n.leaf ? json(*n.leaf) : json(nullptr);
    nodes.push_back(jn);
  }
  return json{{"nodes", nodes}};
}

HstTree hst_from_json(const json& j) {
  std::vector<HstNode> nodes;
  for (const auto& jn : field<json>(j, "nodes")) {
    HstNode n;
    n.delta = field<double>(jn, "delta");
    n.children = field<std::vector<std::size_t>>(jn, "children");
    if (jn.contains("leaf") && !jn.at("leaf").is_null()) n.leaf = jn.at("leaf").get<Index>();
    nodes.push_back(std::move(n));
  }
  for (const auto& n : nodes)
    for (auto c : n.children)
      if (c >= nodes.size()) throw StructuralError("tree child index out of range");
  HstTree t(std::move(nodes));
  check_tree_structure(t);
  return t;
}

json to_json(const DistortionReport& r) {
  return json{{"expansion", r.expansion},
              {"contraction", r.contraction},
              {"distortion", r.distortion},
              {"expansion_pair", pair_json(r.expansion_pair)},
              {"contraction_pair", pair_json(r.contraction_pair)}};
}

DistortionReport distortion_report_from_json(const json& j) {
  DistortionReport r;
  r.expansion = field<double>(j, "expansion");
  r.contraction = field<double>(j, "contraction");
  r.distortion = field<double>(j, "distortion");
  if (j.contains("expansion_pair")) r.expansion_pair = pair_from(j.at("expansion_pair"));
  if (j.contains("contraction_pair")) r.contraction_pair = pair_from(j.at("contraction_pair"));
  return r;
}

json to_json(const Certificate& c) {
  return json{{"target", c.target}, {"model", to_json(c.model)}, {"map", c.map}, {"report", to_json(c.report)}, {"bound", c.bound}};
}

Certificate certificate_from_json(const json& j) {
  Certificate c;
  c.target = field<std::string>(j, "target");
  c.model = metric_from_json(field<json>(j, "model"));
  c.map = field<std::vector<Index>>(j, "map");
  c.report = distortion_report_from_json(field<json>(j, "report"));
  c.bound = field<double>(j, "bound");
  return c;
}

json to_json(const QuotientMap& qm) {
  return json{{"source", to_json(qm.source)}, {"target", to_json(qm.target)}, {"assign", qm.assign}};
}

QuotientMap quotient_map_from_json(const json& j) {
  QuotientMap qm{metric_from_json(field<json>(j, "source")), metric_from_json(field<json>(j, "target")),
                 field<std::vector<Index>>(j, "assign")};
  qm.check();
  return qm;
}

json to_json(const CompositionTree& t) {
  json kids = json::array();
  for (const auto& c : t.children) kids.push_back(to_json(c));
  return json{{"space", to_json(t.space)}, {"beta", t.beta}, {"children", kids}};
}

CompositionTree composition_from_json(const json& j) {
  CompositionTree t;
  t.space = metric_from_json(field<json>(j, "space"));
  if (j.contains("beta")) t.beta = field<double>(j, "beta");
  if (j.contains("children"))
    for (const auto& c : j.at("children")) t.children.push_back(composition_from_json(c));
  if (!t.children.empty() && t.children.size() != t.space.size())
    throw StructuralError("composition needs one child per outer point");
  return t;
}

json to_json(const CubeQsResult& r) {
  return json{{"d", r.d},
              {"eps", r.eps},
              {"p", r.p},
              {"r", r.r},
              {"centers", r.centers},
              {"singles", r.singles},
              {"blocks", r.blocks},
              {"required", r.required},
              {"size_ok", r.size_ok},
              {"soft_warning", r.soft_warning},
              {"report", to_json(r.report)},
              {"exhaustive", r.exhaustive},
              {"pairs_checked", r.pairs_checked},
              {"sandwich_ok", r.sandwich_ok},
              {"bound", r.bound},
              {"normalized", r.normalized},
              {"image_norm", r.image_norm}};
}

json to_json(const RngSeed& s) { return json{{"seed", s.seed}, {"stream", s.stream}}; }

RngSeed seed_from_json(const json& j) {
  if (j.is_number_unsigned() || j.is_number_integer()) return {j.get<std::uint64_t>(), 0};
  return {field<std::uint64_t>(j, "seed"), j.contains("stream") ? field<std::uint64_t>(j, "stream") : 0};
}

std::string metric_to_csv(const MetricSpace& m) {
  std::string out;
  char buf[32];
  for (Index i = 0; i < m.size(); ++i) {
    for (Index j = 0; j < m.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      if (j) out += ',';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

MetricSpace metric_from_csv(const std::string& text) {
  Matrix d;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw StructuralError("bad CSV cell '" + cell + "'");
      }
    }
    d.push_back(std::move(row));
  }
  for (const auto& row : d)
    if (row.size() != d.size()) throw StructuralError("CSV metric is not square");
  return MetricSpace(std::move(d));
}

MetricSpace load_metric(const std::string& path) {
  const auto text = read_text_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw StructuralError(std::string("invalid JSON: ") + e.what());
    }
    return metric_from_json(j.contains("dist") ? j : field<json>(j, "metric"));
  }
  return metric_from_csv(text);
}

std::string dump_canonical(const json& j) { return j.dump(); }

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string digest_hex(const json& j) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(dump_canonical(j))));
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

}  // namespace metriq
