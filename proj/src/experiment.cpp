#include "metriq/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

#include "metriq/constructions.hpp"
#include "metriq/embeddings.hpp"
#include "metriq/error.hpp"
#include "metriq/generators.hpp"
#include "metriq/hst.hpp"
#include "metriq/hypercube.hpp"

namespace metriq {

namespace {

constexpr const char* kBundleFormat = "metriq-bundle";
constexpr int kBundleVersion = 1;
// Cube bundles carry the full quotient (and can be re-verified) only up to this dimension.
constexpr int kCubeBundleMaxD = 8;

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParameterError(std::string("parameter '") + key + "' has the wrong type");
  }
}

template <typename T>
T need(const json& j, const char* key) {
  if (!j.contains(key)) throw ParameterError(std::string("missing parameter '") + key + "'");
  return get_or<T>(j, key, T{});
}

void require(bool cond, const std::string& msg) {
  if (!cond) throw ParameterError(msg);
}

const std::vector<std::string>& variants() {
  static const std::vector<std::string> v = {"random", "euclidean", "gnp",      "padded", "composition",
                                             "cube",   "star",      "lacunary", "lipcomp", "inline"};
  return v;
}

std::string quote(const std::string& s) { return "'" + s + "'"; }

}  // namespace

// ---------------------------------------------------------------- instances

std::size_t Instance::size() const {
  if (cube_d > 0 && metric.size() == 0) return std::size_t{1} << cube_d;
  return metric.size();
}

const MetricSpace& Instance::space() {
  if (cube_d > 0 && metric.size() == 0) metric = gen_cube(cube_d);
  return metric;
}

void validate_instance_spec(const json& s) {
  require(s.is_object(), "instance must be an object");
  const auto v = need<std::string>(s, "variant");
  require(std::find(variants().begin(), variants().end(), v) != variants().end(), "unknown instance variant " + quote(v));
  if (v == "random") {
    require(need<std::size_t>(s, "n") >= 1, "n must be at least 1");
    require(get_or<int>(s, "wmax", 20) >= 1, "wmax must be at least 1");
  } else if (v == "euclidean") {
    require(need<std::size_t>(s, "n") >= 1, "n must be at least 1");
    require(get_or<std::size_t>(s, "dim", 2) >= 1, "dim must be at least 1");
  } else if (v == "gnp") {
    require(need<std::size_t>(s, "n") >= 1, "n must be at least 1");
    const double q = need<double>(s, "q");
    require(q >= 0.0 && q <= 1.0, "q must lie in [0,1]");
  } else if (v == "padded") {
    if (!s.contains("x")) require(need<std::size_t>(s, "k") >= 1, "k must be at least 1");
    require(need<std::size_t>(s, "copies") >= 1, "copies must be at least 1");
    if (s.contains("beta")) require(need<double>(s, "beta") > 0.0, "beta must be positive");
  } else if (v == "composition") {
    require(need<std::size_t>(s, "depth") >= 1, "depth must be at least 1");
    require(need<std::size_t>(s, "max_size") >= 1, "max_size must be at least 1");
    require(need<double>(s, "beta") > 0.0, "beta must be positive");
  } else if (v == "cube") {
    const int d = need<int>(s, "d");
    require(d >= 1 && d <= 20, "cube dimension must lie in [1,20]");
  } else if (v == "star") {
    require(need<std::size_t>(s, "n") >= 1, "n must be at least 1");
    const double tau = need<double>(s, "tau");
    require(tau > 0.0 && tau <= 1.0, "tau must lie in (0,1]");
  } else if (v == "lacunary") {
    const auto a = need<std::vector<double>>(s, "a");
    require(!a.empty(), "lacunary sequence must be nonempty");
    require(need<double>(s, "k") >= 1.0, "k must be at least 1");
  } else if (v == "lipcomp") {
    if (!s.contains("x")) require(need<std::size_t>(s, "kx") >= 1, "kx must be at least 1");
    if (!s.contains("y")) require(need<std::size_t>(s, "ky") >= 1, "ky must be at least 1");
    require(need<double>(s, "alpha") > 1.0, "alpha must exceed 1");
  } else if (v == "inline") {
    (void)metric_from_json(need<json>(s, "metric"));
  }
}

Instance realize_instance(const json& s, RngSeed seed) {
  validate_instance_spec(s);
  Instance inst;
  inst.variant = s.at("variant").get<std::string>();
  const auto& v = inst.variant;
  if (v == "random") {
    inst.metric = gen_random_metric(s.at("n").get<std::size_t>(), get_or<int>(s, "wmax", 20), seed);
  } else if (v == "euclidean") {
    inst.metric = gen_random_euclidean(s.at("n").get<std::size_t>(), get_or<std::size_t>(s, "dim", 2), seed);
  } else if (v == "gnp") {
    inst.metric = gen_random_graph_metric(s.at("n").get<std::size_t>(), s.at("q").get<double>(), seed).metric;
  } else if (v == "padded") {
    MetricSpace x = s.contains("x") ? metric_from_json(s.at("x"))
                                    : gen_random_metric(s.at("k").get<std::size_t>(), get_or<int>(s, "wmax", 4), seed.derive(1));
    std::optional<double> beta;
    if (s.contains("beta")) beta = s.at("beta").get<double>();
    inst.metric = gen_padded_copies(x, s.at("copies").get<std::size_t>(), beta);
  } else if (v == "composition") {
    inst.tree = gen_random_composition_tree(s.at("depth").get<std::size_t>(), s.at("max_size").get<std::size_t>(),
                                            s.at("beta").get<double>(), seed);
    inst.metric = inst.tree->realize();
  } else if (v == "cube") {
    inst.cube_d = s.at("d").get<int>();
  } else if (v == "star") {
    inst.metric = realize_special(StarSpec{s.at("n").get<std::size_t>(), s.at("tau").get<double>()});
  } else if (v == "lacunary") {
    inst.metric = realize_special(LacunarySpec{s.at("a").get<std::vector<double>>(), s.at("k").get<double>()});
  } else if (v == "lipcomp") {
    MetricSpace x = s.contains("x") ? metric_from_json(s.at("x"))
                                    : gen_random_metric(s.at("kx").get<std::size_t>(), get_or<int>(s, "wmax", 4), seed.derive(1));
    MetricSpace y = s.contains("y") ? metric_from_json(s.at("y"))
                                    : gen_random_metric(s.at("ky").get<std::size_t>(), get_or<int>(s, "wmax", 4), seed.derive(2));
    const double alpha = s.at("alpha").get<double>();
    inst.metric = s.contains("mu") && s.contains("theta")
                      ? gen_lipcomp_product(x, y, s.at("mu").get<double>(), s.at("theta").get<double>(), alpha)
                      : gen_lipcomp_product(x, y, alpha);
  } else {
    inst.metric = metric_from_json(s.at("metric"));
  }
  return inst;
}

// ---------------------------------------------------------------- plans

const std::vector<std::string>& pipeline_ops() {
  static const std::vector<std::string> ops = {"q2",      "mcenter",     "aspect",      "star", "dichotomy", "composition",
                                               "cube-qs", "bourgain",    "pipeline-lp", "pipeline-um", "hst"};
  return ops;
}

namespace {

void validate_op(const PipelineOp& op, const std::string& variant) {
  const auto& ops = pipeline_ops();
  require(std::find(ops.begin(), ops.end(), op.op) != ops.end(), "unknown pipeline operation " + quote(op.op));
  const json& p = op.params;
  auto p_ok = [&](double pv) { require(pv >= 1.0 && pv <= 2.0, "p must lie in [1,2]"); };
  if (op.op == "aspect") {
    const double a = need<double>(p, "alpha");
    require(a > 1.0 && a <= 2.0, "alpha must lie in (1,2]");
  } else if (op.op == "star") {
    const double a = need<double>(p, "a"), b = need<double>(p, "b");
    require(a > 0.0 && a < b && b < 2.0 * a, "need 0 < a < b < 2a");
    (void)need<double>(p, "alpha");
  } else if (op.op == "dichotomy") {
    require(need<double>(p, "k") >= 1.0, "k must be at least 1");
    const double beta = need<double>(p, "beta"), alpha = need<double>(p, "alpha");
    require(beta > 1.0 && beta <= 2.0, "beta must lie in (1,2]");
    require(alpha > beta && alpha < 2.0 * beta, "alpha must lie in (beta, 2 beta)");
  } else if (op.op == "composition") {
    require(variant == "composition", "composition operation needs a composition instance");
    require(need<double>(p, "k") >= 1.0, "k must be at least 1");
    const double a = need<double>(p, "alpha");
    require(a > 1.0 && a <= 2.0, "alpha must lie in (1,2]");
  } else if (op.op == "cube-qs") {
    require(variant == "cube", "cube-qs operation needs a cube instance");
    const double e = need<double>(p, "eps");
    require(e > 0.0 && e < 0.25, "eps must lie in (0,1/4)");
    p_ok(get_or<double>(p, "p", 2.0));
    (void)get_or<bool>(p, "allow_short", false);
  } else if (op.op == "bourgain") {
    require(get_or<double>(p, "p", 2.0) >= 1.0, "p must be at least 1");
    if (p.contains("m")) require(need<double>(p, "m") >= 1.0, "m must be at least 1");
    const auto mode = get_or<std::string>(p, "mode", "auto");
    require(mode == "auto" || mode == "exact" || mode == "mc", "mode must be auto, exact or mc");
  } else if (op.op == "pipeline-lp" || op.op == "pipeline-um" || op.op == "mcenter") {
    const double e = need<double>(p, "eps");
    require(e > 0.0 && e < 1.0, "eps must lie in (0,1)");
    if (op.op == "pipeline-lp") require(get_or<double>(p, "p", 2.0) >= 1.0, "p must be at least 1");
  } else if (op.op == "hst") {
    require(need<std::size_t>(p, "m") >= 1, "m must be at least 1");
  }
}

}  // namespace

ExperimentPlan ExperimentPlan::from_json(const json& j) {
  if (!j.is_object()) throw ParameterError("plan must be a JSON object");
  ExperimentPlan plan;
  plan.instance = need<json>(j, "instance");
  for (const auto& o : need<json>(j, "pipeline")) {
    PipelineOp op;
    op.op = need<std::string>(o, "op");
    op.params = json::object();
    for (auto it = o.begin(); it != o.end(); ++it)
      if (it.key() != "op") op.params[it.key()] = it.value();
    plan.pipeline.push_back(std::move(op));
  }
  plan.trials = get_or<std::size_t>(j, "trials", 1);
  plan.seed = get_or<std::uint64_t>(j, "seed", 0);
  plan.timing = get_or<bool>(j, "timing", false);
  plan.keep_artifacts = get_or<bool>(j, "artifacts", false);
  plan.threads = get_or<std::size_t>(j, "threads", 0);
  plan.validate();
  return plan;
}

json ExperimentPlan::to_json() const {
  json ops = json::array();
  for (const auto& op : pipeline) {
    json o = op.params;
    o["op"] = op.op;
    ops.push_back(o);
  }
  return json{{"instance", instance}, {"pipeline", ops},      {"trials", trials},  {"seed", seed},
              {"timing", timing},     {"artifacts", keep_artifacts}, {"threads", threads}};
}

void ExperimentPlan::validate() const {
  validate_instance_spec(instance);
  require(!pipeline.empty(), "pipeline must name at least one operation");
  const auto variant = instance.at("variant").get<std::string>();
  for (const auto& op : pipeline) validate_op(op, variant);
}

RngSeed trial_seed(std::uint64_t base, std::size_t trial) {
  return RngSeed{splitmix64(base ^ splitmix64(0x7269616cULL + trial)), 0};
}

// ---------------------------------------------------------------- operations

namespace {

json quotient_artifact(const QuotientSpace& q) { return to_json(q, false); }

VectorEmbedding::Mode pick_mode(const json& p, std::size_t n) {
  const auto mode = get_or<std::string>(p, "mode", "auto");
  if (mode == "exact") return VectorEmbedding::Mode::Exact;
  if (mode == "mc") return VectorEmbedding::Mode::MonteCarlo;
  return n <= kExactSubsetCap ? VectorEmbedding::Mode::Exact : VectorEmbedding::Mode::MonteCarlo;
}

void fill_cert(TrialRow& row, const QuotientSpace& q, const Certificate& c, std::size_t attempts) {
  row.quotient_size = q.size();
  row.provenance = to_string(q.provenance);
  row.target_class = c.target;
  row.certified_distortion = c.report.distortion;
  row.bound = c.bound;
  row.attempts = attempts;
}

json cert_artifacts(const MetricSpace& m, const QuotientSpace& q, const Certificate& c) {
  return json{{"metric", to_json(m)}, {"quotient", quotient_artifact(q)}, {"certificate", to_json(c)}};
}

json embedding_check(const DistortionReport& r, double bound, const VectorEmbedding& e, double mparam) {
  json chk{{"report", to_json(r)}, {"bound", bound}};
  if (e.mode == VectorEmbedding::Mode::MonteCarlo)
    chk["recipe"] = json{{"op", "bourgain"}, {"m", mparam}, {"p", e.p}};
  return chk;
}

}  // namespace

TrialRow run_op(Instance& inst, const PipelineOp& op, RngSeed seed, json* bundle) {
  TrialRow row;
  row.op = op.op;
  row.seed = seed.seed;
  row.n = inst.size();
  const json& p = op.params;
  json art;
  try {
    validate_op(op, inst.variant);
    if (op.op == "q2") {
      const auto& m = inst.space();
      auto r = q2_lacunary(m, seed);
      fill_cert(row, r.q, r.cert, r.attempts);
      art = cert_artifacts(m, r.q, r.cert);
    } else if (op.op == "mcenter") {
      const auto& m = inst.space();
      auto r = m_center_quotient(m, p.at("eps").get<double>(), seed);
      row.quotient_size = r.q.size();
      row.provenance = to_string(r.q.provenance);
      row.attempts = r.attempts;
      art = json{{"metric", to_json(m)},
                 {"quotient", quotient_artifact(r.q)},
                 {"mcenter", json{{"t", r.t}, {"m", r.mparam}, {"block", r.q.size() - 1}}}};
    } else if (op.op == "aspect") {
      const auto& m = inst.space();
      auto r = aspect_quotient(m, p.at("alpha").get<double>(), seed);
      fill_cert(row, r.q, r.cert, r.attempts);
      art = cert_artifacts(m, r.q, r.cert);
    } else if (op.op == "star") {
      const auto& m = inst.space();
      auto r = find_star_quotient(m, p.at("a").get<double>(), p.at("b").get<double>(), p.at("alpha").get<double>(), seed);
      fill_cert(row, r.q, r.cert, r.attempts);
      art = cert_artifacts(m, r.q, r.cert);
    } else if (op.op == "dichotomy") {
      const auto& m = inst.space();
      auto r = q_dichotomy(m, p.at("k").get<double>(), p.at("beta").get<double>(), p.at("alpha").get<double>(), seed);
      fill_cert(row, r.q, r.cert, r.attempts);
      art = cert_artifacts(m, r.q, r.cert);
    } else if (op.op == "composition") {
      const double k = p.at("k").get<double>();
      auto r = composition_qs(*inst.tree, k, p.at("alpha").get<double>(), seed);
      fill_cert(row, r.q, r.cert, 1);
      art = cert_artifacts(inst.space(), r.q, r.cert);
      art["tree"] = to_json(r.tree);
      art["tree_check"] = json{{"report", to_json(r.cert.report)}, {"bound", r.cert.bound}, {"k", k}};
    } else if (op.op == "cube-qs") {
      CubeQsOptions opt;
      opt.allow_short = get_or<bool>(p, "allow_short", false);
      auto r = cube_qs_construct(inst.cube_d, p.at("eps").get<double>(), get_or<double>(p, "p", 2.0), seed, opt);
      row.quotient_size = r.blocks;
      row.provenance = "QS";
      row.target_class = "lp";
      row.p = r.p;
      row.certified_distortion = r.report.distortion;
      if (r.bound > 0.0) row.bound = r.bound;
      row.attempts = 1;
      art = json{{"cube", to_json(r)}};
      if (r.d <= kCubeBundleMaxD && r.bound > 0.0) {
        auto q = r.materialize();
        Matrix img(r.blocks, std::vector<double>(r.blocks, 0.0));
        for (std::size_t i = 0; i < r.blocks; ++i)
          for (std::size_t j = i + 1; j < r.blocks; ++j) img[i][j] = img[j][i] = r.image_distance(i, j);
        auto cert = make_certificate("lp", q.metric, MetricSpace(std::move(img)), {}, r.bound);
        art["metric"] = to_json(*q.base);
        art["quotient"] = quotient_artifact(q);
        art["certificate"] = to_json(cert);
      }
    } else if (op.op == "bourgain") {
      const auto& m = inst.space();
      const double mparam = get_or<double>(p, "m", static_cast<double>(m.size()));
      const double pv = get_or<double>(p, "p", 2.0);
      auto r = bourgain_embed(m, mparam, pv, pick_mode(p, m.size()), seed);
      row.quotient_size = m.size();
      row.provenance = "none";
      row.target_class = "lp";
      row.p = pv;
      row.certified_distortion = r.report.distortion;
      row.bound = r.bound;
      row.attempts = 1;
      art = json{{"metric", to_json(m)},
                 {"embedding", to_json(r.embedding)},
                 {"embedding_check", embedding_check(r.report, r.bound, r.embedding, mparam)}};
    } else if (op.op == "pipeline-lp" || op.op == "pipeline-um") {
      const auto& m = inst.space();
      const bool lp = op.op == "pipeline-lp";
      const double pv = lp ? get_or<double>(p, "p", 2.0) : 2.0;
      auto r = pipeline_quotient_then_embed(m, p.at("eps").get<double>(), pv, lp ? "lp" : "UM", seed);
      row.quotient_size = r.q.size();
      row.provenance = to_string(r.q.provenance);
      row.target_class = r.target;
      if (lp) row.p = pv;
      row.certified_distortion = r.report.distortion;
      row.bound = r.bound;
      row.attempts = 1;
      art = json{{"metric", to_json(m)}, {"quotient", quotient_artifact(r.q)}};
      if (r.embedding) {
        art["embedding"] = to_json(*r.embedding);
        art["embedding_check"] = embedding_check(r.report, r.bound, *r.embedding, r.mparam);
      }
      if (r.tree) {
        art["tree"] = to_json(*r.tree);
        art["tree_check"] = json{{"report", to_json(r.report)}, {"bound", r.bound}};
      }
    } else if (op.op == "hst") {
      const auto& m = inst.space();
      auto r = hst_from_m_centered(m, p.at("m").get<std::size_t>());
      row.quotient_size = m.size();
      row.provenance = "none";
      row.target_class = "UM";
      row.certified_distortion = r.report.distortion;
      row.bound = r.bound;
      row.attempts = 1;
      art = json{{"metric", to_json(m)},
                 {"tree", to_json(r.tree)},
                 {"tree_check", json{{"report", to_json(r.report)}, {"bound", r.bound}}}};
    }
  } catch (const std::exception& e) {
    row = TrialRow{};
    row.op = op.op;
    row.seed = seed.seed;
    row.n = inst.size();
    row.error = e.what();
    return row;
  }
  if (bundle) *bundle = make_bundle(op.op, seed.seed, std::move(art));
  return row;
}

// ---------------------------------------------------------------- experiments

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

json quantiles(const std::vector<double>& v) {
  if (v.empty()) return nullptr;
  return json{{"min", quantile(v, 0.0)},  {"q25", quantile(v, 0.25)}, {"median", quantile(v, 0.5)},
              {"q75", quantile(v, 0.75)}, {"max", quantile(v, 1.0)}};
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string rows_to_csv(const std::vector<TrialRow>& rows) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : rows) {
    out += std::to_string(r.trial) + ',' + std::to_string(r.seed) + ',' + std::to_string(r.n) + ',' +
           std::to_string(r.quotient_size) + ',' + r.provenance + ',' + r.target_class + ',' + (r.p ? num(*r.p) : "") +
           ',' + (r.certified_distortion ? num(*r.certified_distortion) : "") + ',' +
           (r.bound ? num(*r.bound) : "") + ',' + (r.attempts ? std::to_string(*r.attempts) : "") + ',';
    if (r.millis) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.3f", *r.millis);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

ReportBundle run_experiment(const ExperimentPlan& plan) {
  plan.validate();
  const std::size_t per_trial = plan.pipeline.size();
  std::vector<TrialRow> rows(plan.trials * per_trial);
  std::vector<json> bundles(plan.keep_artifacts ? rows.size() : 0);
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;

  auto worker = [&] {
    for (std::size_t t = next++; t < plan.trials; t = next++) {
      const RngSeed ts = trial_seed(plan.seed, t);
      std::optional<Instance> inst;
      std::string inst_error;
      try {
        inst = realize_instance(plan.instance, ts.derive(0));
      } catch (const std::exception& e) {
        inst_error = e.what();
      }
      for (std::size_t i = 0; i < per_trial; ++i) {
        const std::size_t slot = t * per_trial + i;
        TrialRow row;
        const auto start = std::chrono::steady_clock::now();
        if (inst) {
          row = run_op(*inst, plan.pipeline[i], ts.derive(i + 1), plan.keep_artifacts ? &bundles[slot] : nullptr);
        } else {
          row.op = plan.pipeline[i].op;
          row.error = inst_error;
        }
        const auto stop = std::chrono::steady_clock::now();
        row.trial = t;
        row.seed = ts.seed;
        if (plan.timing) row.millis = std::chrono::duration<double, std::milli>(stop - start).count();
        rows[slot] = std::move(row);
      }
    }
  };
  std::size_t threads = plan.threads ? plan.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(plan.trials, 1));
  std::vector<std::thread> pool;
  for (std::size_t k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  ReportBundle out;
  out.csv = rows_to_csv(rows);
  std::size_t failures = 0;
  json per_op = json::array();
  json errors = json::array();
  for (std::size_t i = 0; i < per_trial; ++i) {
    std::vector<double> dist, sizes, millis;
    std::size_t fails = 0;
    for (std::size_t t = 0; t < plan.trials; ++t) {
      const auto& r = rows[t * per_trial + i];
      if (!r.error.empty()) {
        ++fails;
        errors.push_back(json{{"trial", t}, {"op", r.op}, {"error", r.error}});
        continue;
      }
      if (r.certified_distortion) dist.push_back(*r.certified_distortion);
      sizes.push_back(static_cast<double>(r.quotient_size));
      if (r.millis) millis.push_back(*r.millis);
    }
    failures += fails;
    json s{{"op", plan.pipeline[i].op},
           {"params", plan.pipeline[i].params},
           {"failures", fails},
           {"failure_rate", plan.trials ? static_cast<double>(fails) / static_cast<double>(plan.trials) : 0.0},
           {"certified_distortion", quantiles(dist)},
           {"quotient_size", quantiles(sizes)}};
    if (plan.timing) s["millis"] = quantiles(millis);
    per_op.push_back(s);
  }
  out.summary = json{{"plan", plan.to_json()},
                     {"rows", rows.size()},
                     {"failures", failures},
                     {"failure_rate", rows.empty() ? 0.0 : static_cast<double>(failures) / static_cast<double>(rows.size())},
                     {"operations", per_op},
                     {"errors", errors},
                     {"generated_at", utc_now()}};
  for (std::size_t k = 0; k < bundles.size(); ++k)
    if (rows[k].error.empty()) out.bundles.push_back(std::move(bundles[k]));
  out.rows = std::move(rows);
  return out;
}

// ---------------------------------------------------------------- bundles

namespace {

json sealed_body(const json& b) {
  json body = b;
  body.erase("digest");
  return body;
}

}  // namespace

json make_bundle(const std::string& kind, std::uint64_t seed, json artifacts) {
  json b{{"format", kBundleFormat}, {"version", kBundleVersion}, {"kind", kind}, {"seed", seed}, {"artifacts", std::move(artifacts)}};
  reseal_bundle(b);
  return b;
}

void reseal_bundle(json& b) { b["digest"] = digest_hex(sealed_body(b)); }

json BundleReport::to_json() const {
  json issues_j = json::array();
  for (const auto& is : issues) {
    json j{{"artifact", is.artifact}, {"check", is.check}, {"expected", is.expected}, {"found", is.found},
           {"message", is.message}};
    if (is.i) j["i"] = *is.i;
    if (is.j) j["j"] = *is.j;
    issues_j.push_back(j);
  }
  return json{{"ok", ok()}, {"checks", checks}, {"issues", issues_j}};
}

namespace {

bool close_rel(double a, double b, double tol) {
  if (a == b) return true;
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

struct Verifier {
  const VerifyOptions& opt;
  BundleReport rep;

  void issue(std::string artifact, std::string check, std::string message, double expected = 0.0, double found = 0.0,
             std::optional<std::size_t> i = std::nullopt, std::optional<std::size_t> j = std::nullopt) {
    rep.issues.push_back({std::move(artifact), std::move(check), i, j, expected, found, std::move(message)});
  }

  void metric_axioms(const std::string& name, const MetricSpace& m) {
    ++rep.checks;
    auto v = validate_metric(m, 20);
    for (const auto& x : v.violations)
      issue(name, "metric-axiom", x.describe(), 0.0, x.amount, x.i, x.j);
  }

  void compare_matrices(const std::string& name, const std::string& check, const MetricSpace& expected,
                        const MetricSpace& found) {
    ++rep.checks;
    if (expected.size() != found.size()) {
      issue(name, check, "size mismatch", static_cast<double>(expected.size()), static_cast<double>(found.size()));
      return;
    }
    std::size_t reported = 0;
    for (Index i = 0; i < expected.size(); ++i)
      for (Index j = i + 1; j < expected.size(); ++j)
        if (!close_rel(expected(i, j), found(i, j), opt.tolerance) || !close_rel(expected(j, i), found(j, i), opt.tolerance)) {
          if (reported++ < 100)
            issue(name, check, "distance (" + std::to_string(i) + "," + std::to_string(j) + ") differs from recomputation",
                  expected(i, j), found(i, j), i, j);
        }
  }

  void distortion_claim(const std::string& name, const DistortionReport& recomputed, const json& check_j) {
    ++rep.checks;
    const auto claimed = distortion_report_from_json(check_j.at("report"));
    if (!close_rel(recomputed.distortion, claimed.distortion, opt.tolerance))
      issue(name, "distortion", "recomputed distortion differs from the claim", claimed.distortion, recomputed.distortion,
            recomputed.expansion_pair.i, recomputed.expansion_pair.j);
    if (check_j.contains("bound")) {
      ++rep.checks;
      const double bound = check_j.at("bound").get<double>();
      if (bound > 0.0 && recomputed.distortion > bound * (1.0 + opt.tolerance))
        issue(name, "bound", "distortion exceeds the stated bound", bound, recomputed.distortion);
    }
  }
};

}  // namespace

BundleReport verify_bundle(const json& b, const VerifyOptions& opt) {
  if (!b.is_object()) throw StructuralError("bundle must be a JSON object");
  if (!b.contains("format") || b.at("format") != kBundleFormat) throw StructuralError("not a metriq bundle");
  if (!b.contains("version") || b.at("version") != kBundleVersion) throw StructuralError("unsupported bundle version");
  if (!b.contains("digest") || !b.at("digest").is_string()) throw StructuralError("bundle has no digest");
  if (b.at("digest").get<std::string>() != digest_hex(sealed_body(b)))
    throw StructuralError("bundle digest mismatch (contents changed after sealing)");
  if (!b.contains("artifacts") || !b.at("artifacts").is_object()) throw StructuralError("bundle has no artifacts");
  const json& a = b.at("artifacts");

  Verifier v{opt, {}};
  std::optional<MetricSpace> base;
  if (a.contains("metric")) {
    base = metric_from_json(a.at("metric"));
    v.metric_axioms("metric", *base);
  }

  // Space the certificates refer to: the recomputed quotient when present, else the base metric.
  std::optional<MetricSpace> space = base;
  if (a.contains("quotient")) {
    if (!base) throw StructuralError("quotient artifact without its base metric");
    const json& qj = a.at("quotient");
    auto claimed = quotient_from_json(qj);
    std::optional<QuotientSpace> truth;
    if (claimed.provenance == Provenance::SQ) {
      if (!a.contains("parent_blocks")) {
        v.issue("quotient", "quotient-metric", "SQ quotient without parent blocks cannot be recomputed");
      } else {
        auto parent = quotient_metric(*base, a.at("parent_blocks").get<std::vector<PointSet>>());
        std::vector<std::size_t> keep;
        for (const auto& blk : claimed.blocks) {
          auto it = std::find(parent.blocks.begin(), parent.blocks.end(), blk);
          if (it == parent.blocks.end()) throw StructuralError("SQ block is not a parent block");
          keep.push_back(static_cast<std::size_t>(it - parent.blocks.begin()));
        }
        truth = sq_space(parent, keep);
      }
    } else {
      truth = quotient_metric(*base, claimed.blocks);
      ++v.rep.checks;
      if (truth->provenance != claimed.provenance)
        v.issue("quotient", "provenance", "block coverage implies provenance " + to_string(truth->provenance) +
                                              " but the bundle says " + to_string(claimed.provenance));
    }
    if (truth) {
      v.compare_matrices("quotient", "quotient-metric", truth->metric, claimed.metric);
      space = truth->metric;
    } else {
      space = claimed.metric;
    }
  }

  if (a.contains("mcenter")) {
    if (!space) throw StructuralError("m-center claim without a metric");
    const json& mc = a.at("mcenter");
    const auto block = mc.at("block").get<std::size_t>();
    const double mparam = mc.at("m").get<double>();
    ++v.rep.checks;
    if (block >= space->size() || !is_m_center(*space, block, mparam))
      v.issue("mcenter", "m-center", "collapsed block is not an m-center of the quotient", mparam, 0.0, block);
  }

  if (a.contains("certificate")) {
    if (!space) throw StructuralError("certificate without a metric");
    auto c = certificate_from_json(a.at("certificate"));
    auto rec = distortion_between(*space, c.model, c.map);
    v.distortion_claim("certificate", rec, json{{"report", to_json(c.report)}, {"bound", c.bound}});
  }

  if (a.contains("embedding")) {
    if (!space) throw StructuralError("embedding without a metric");
    auto e = embedding_from_json(a.at("embedding"));
    if (e.size() != space->size()) throw StructuralError("embedding size does not match the metric");
    const json chk = a.contains("embedding_check") ? a.at("embedding_check") : json::object();
    auto rec = distortion_between(*space, e.induced_metric());
    if (chk.contains("report")) v.distortion_claim("embedding", rec, chk);
    if (e.mode == VectorEmbedding::Mode::MonteCarlo && chk.contains("recipe")) {
      const json& r = chk.at("recipe");
      if (r.value("op", "") != "bourgain") throw StructuralError("unknown Monte Carlo recipe");
      auto fresh = bourgain_embed(*space, r.at("m").get<double>(), r.at("p").get<double>(), VectorEmbedding::Mode::MonteCarlo,
                                  RngSeed{opt.fresh_seed, b.at("seed").get<std::uint64_t>()});
      ++v.rep.checks;
      const double claimed = rec.distortion;
      if (std::abs(fresh.report.distortion - claimed) > opt.mc_tolerance * claimed)
        v.issue("embedding", "mc-reestimate", "fresh-seed distortion outside the tolerance", claimed, fresh.report.distortion);
      ++v.rep.checks;
      const double bound = chk.value("bound", 0.0);
      if (bound > 0.0 && fresh.report.distortion > bound)
        v.issue("embedding", "mc-bound", "fresh-seed distortion exceeds the bound", bound, fresh.report.distortion);
    }
  }

  if (a.contains("tree")) {
    if (!space) throw StructuralError("tree without a metric");
    auto t = hst_from_json(a.at("tree"));
    const json chk = a.contains("tree_check") ? a.at("tree_check") : json::object();
    ++v.rep.checks;
    auto leaves = t.leaves_below(t.root());
    std::sort(leaves.begin(), leaves.end());
    bool perm = leaves.size() == space->size();
    for (std::size_t i = 0; perm && i < leaves.size(); ++i) perm = leaves[i] == i;
    if (!perm) {
      v.issue("tree", "leaves", "tree leaves are not exactly the points of the space", static_cast<double>(space->size()),
              static_cast<double>(leaves.size()));
    } else {
      const double k = chk.value("k", 1.0);
      ++v.rep.checks;
      auto hr = validate_khst(t, k);
      for (const auto& x : hr.violations) v.issue("tree", "khst", x.describe(), k, 0.0, x.node, x.parent);
      auto rec = distortion_between(*space, hst_to_metric(t));
      if (chk.contains("report")) v.distortion_claim("tree", rec, chk);
      if (a.contains("certificate")) {
        auto c = certificate_from_json(a.at("certificate"));
        if (c.map.empty()) v.compare_matrices("tree", "tree-model", hst_to_metric(t), c.model);
      }
    }
  }

  if (a.contains("cube")) {
    const json& c = a.at("cube");
    const int d = c.at("d").get<int>();
    const double eps = c.at("eps").get<double>();
    const auto blocks = c.at("blocks").get<std::size_t>();
    const auto required = c.at("required").get<std::size_t>();
    ++v.rep.checks;
    const auto want = static_cast<std::size_t>(std::ceil((1.0 - eps) * std::ldexp(1.0, d) - 1e-9));
    if (required != want) v.issue("cube", "required", "required block count is inconsistent", double(want), double(required));
    ++v.rep.checks;
    if (c.at("singles").size() + 1 != blocks)
      v.issue("cube", "blocks", "block count does not match the singles plus one", double(c.at("singles").size() + 1), double(blocks));
    ++v.rep.checks;
    if (c.at("size_ok").get<bool>() != (blocks >= required))
      v.issue("cube", "size_ok", "size flag is inconsistent", double(required), double(blocks));
    ++v.rep.checks;
    const double bound = c.at("bound").get<double>();
    const double dist = c.at("report").at("distortion").get<double>();
    if (bound > 0.0 && dist > bound) v.issue("cube", "bound", "distortion exceeds the stated bound", bound, dist);
    if (a.contains("quotient")) {
      auto q = quotient_from_json(a.at("quotient"));
      ++v.rep.checks;
      if (q.size() != blocks) v.issue("cube", "blocks", "materialized quotient size differs", double(blocks), double(q.size()));
    }
  }
  return v.rep;
}

}  // namespace metriq
