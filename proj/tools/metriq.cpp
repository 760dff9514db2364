#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "metriq/embeddings.hpp"
#include "metriq/error.hpp"
#include "metriq/experiment.hpp"
#include "metriq/hst.hpp"
#include "metriq/hypercube.hpp"
#include "metriq/io.hpp"
#include "metriq/lipschitz.hpp"
#include "metriq/pstable.hpp"

using namespace metriq;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::size_t trials = 1;
  std::string out = "-";
  std::string format = "json";
  double tolerance = 1e-9;
};

// Every per-command parameter; only the ones given on the command line are forwarded.
struct Params {
  std::string variant, metric, target, points, plan, bundle, quotient, blocks, subset, map, assign, mode, kind, summary,
      bundles_out;
  std::optional<double> n, q, k, copies, beta, depth, max_size, d, tau, alpha, mu, theta, wmax, dim, kx, ky, eps, p, m,
      a, b, D, features;
  std::vector<double> seq;
  bool allow_short = false;
};

Globals g;
Params P;

void emit(const std::string& text) {
  if (g.out == "-" || g.out.empty()) {
    std::cout << text;
    std::cout.flush();
  } else {
    write_text_file(g.out, text);
  }
}

// Small documents are indented; large ones (matrices, bundles) stay compact.
void emit_json(const json& j) {
  auto text = j.dump();
  if (text.size() < 4096) text = j.dump(2);
  emit(text + "\n");
}

std::vector<Index> parse_index_list(const std::string& s) {
  std::vector<Index> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (cell.empty()) continue;
    try {
      out.push_back(static_cast<Index>(std::stoull(cell)));
    } catch (const std::exception&) {
      throw ParameterError("bad index '" + cell + "'");
    }
  }
  return out;
}

// "0,1/2/3,4" (or ';' separated) -> {{0,1},{2},{3,4}}
std::vector<PointSet> parse_blocks(std::string s) {
  std::replace(s.begin(), s.end(), '/', ';');
  std::vector<PointSet> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ';')) out.push_back(parse_index_list(part));
  return out;
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw StructuralError("invalid JSON in '" + path + "': " + e.what());
  }
}

std::vector<std::vector<double>> load_points(const std::string& path) {
  json j = read_json(path);
  if (j.is_object()) j = j.contains("points") ? j.at("points") : j.at("vectors");
  try {
    return j.get<std::vector<std::vector<double>>>();
  } catch (const json::exception& e) {
    throw StructuralError(std::string("points must be an array of vectors: ") + e.what());
  }
}

// Metric file (JSON or CSV); a "tree" key turns it into a composition instance.
Instance load_instance(const std::string& path) {
  if (path.empty()) throw ParameterError("--metric is required");
  Instance inst;
  inst.variant = "inline";
  inst.metric = load_metric(path);
  const auto text = read_text_file(path);
  if (!text.empty() && text.find_first_not_of(" \t\r\n") != std::string::npos &&
      text[text.find_first_not_of(" \t\r\n")] == '{') {
    json j = json::parse(text);
    if (j.contains("tree")) {
      inst.tree = composition_from_json(j.at("tree"));
      inst.variant = "composition";
    }
  }
  return inst;
}

void put(json& j, const char* key, const std::optional<double>& v) {
  if (v) j[key] = *v;
}

void put_int(json& j, const char* key, const std::optional<double>& v) {
  if (v) {
    if (*v < 0 || *v != static_cast<double>(static_cast<long long>(*v)))
      throw ParameterError(std::string("--") + key + " must be a nonnegative integer");
    j[key] = static_cast<long long>(*v);
  }
}

json op_params() {
  json j = json::object();
  put(j, "eps", P.eps);
  put(j, "p", P.p);
  put(j, "m", P.m);
  put(j, "k", P.k);
  put(j, "alpha", P.alpha);
  put(j, "beta", P.beta);
  put(j, "a", P.a);
  put(j, "b", P.b);
  if (!P.mode.empty()) j["mode"] = P.mode;
  if (P.allow_short) j["allow_short"] = true;
  return j;
}

// Runs one pipeline operation per trial; a single trial prints the bundle, several print an array.
int run_ops(Instance& inst, const std::string& op) {
  json params = op_params();
  if (op == "hst" && params.contains("m")) params["m"] = static_cast<std::size_t>(params["m"].get<double>());
  json out = json::array();
  for (std::size_t t = 0; t < g.trials; ++t) {
    const RngSeed s = g.trials == 1 ? RngSeed{g.seed, 0} : trial_seed(g.seed, t);
    json bundle;
    auto row = run_op(inst, {op, params}, s, &bundle);
    if (!row.error.empty()) {
      std::cerr << "error: " << row.error << "\n";
      return 2;
    }
    if (g.format == "csv") {
      row.trial = t;
      out.push_back(rows_to_csv({row}).substr(std::string(kCsvHeader).size() + 1));
    } else {
      out.push_back(bundle);
    }
  }
  if (g.format == "csv") {
    std::string csv = std::string(kCsvHeader) + "\n";
    for (const auto& line : out) csv += line.get<std::string>();
    emit(csv);
  } else {
    emit_json(g.trials == 1 ? out[0] : out);
  }
  return 0;
}

int cmd_gen() {
  json spec{{"variant", P.variant}};
  put_int(spec, "n", P.n);
  put(spec, "q", P.q);
  if (P.k) {
    if (P.variant == "padded") put_int(spec, "k", P.k);
    else spec["k"] = *P.k;
  }
  put_int(spec, "copies", P.copies);
  put(spec, "beta", P.beta);
  put_int(spec, "depth", P.depth);
  put_int(spec, "max_size", P.max_size);
  put_int(spec, "d", P.d);
  put(spec, "tau", P.tau);
  put(spec, "alpha", P.alpha);
  put(spec, "mu", P.mu);
  put(spec, "theta", P.theta);
  put_int(spec, "wmax", P.wmax);
  put_int(spec, "dim", P.dim);
  put_int(spec, "kx", P.kx);
  put_int(spec, "ky", P.ky);
  if (!P.seq.empty()) spec["a"] = P.seq;
  auto inst = realize_instance(spec, {g.seed, 0});
  const auto& m = inst.space();
  if (g.format == "csv") {
    emit(metric_to_csv(m));
    return 0;
  }
  json j = to_json(m);
  j["variant"] = P.variant;
  j["seed"] = g.seed;
  if (inst.tree) j["tree"] = to_json(*inst.tree);
  emit_json(j);
  return 0;
}

int cmd_quotient() {
  auto m = load_metric(P.metric);
  QuotientSpace q;
  if (!P.subset.empty()) q = quotient_by_subset(m, parse_index_list(P.subset));
  else if (!P.blocks.empty()) q = quotient_metric(m, parse_blocks(P.blocks));
  else throw ParameterError("give --blocks or --subset");
  if (g.format == "csv") emit(metric_to_csv(q.metric));
  else emit_json(to_json(q, true));
  return 0;
}

int cmd_embed(const std::string& kind) {
  if (kind == "bourgain") {
    auto inst = load_instance(P.metric);
    return run_ops(inst, "bourgain");
  }
  if (kind == "star") {
    if (!P.n || !P.tau) throw ParameterError("embed star needs --n and --tau");
    const auto n = static_cast<std::size_t>(*P.n);
    const double p = P.p.value_or(2.0);
    auto star = realize_special(StarSpec{n, *P.tau});
    auto e = star_to_lp(n, *P.tau, p);
    auto rep = distortion_between(star, e.induced_metric());
    emit_json(make_bundle("embed-star", g.seed,
                          json{{"metric", to_json(star)},
                               {"embedding", to_json(e)},
                               {"embedding_check", json{{"report", to_json(rep)}, {"bound", 1.0}}}}));
    return 0;
  }
  if (kind == "gauss-trunc" || kind == "pstable") {
    if (P.points.empty() || !P.D) throw ParameterError("embed " + kind + " needs --points and --D");
    const auto pts = load_points(P.points);
    const auto features = static_cast<std::size_t>(P.features.value_or(4096));
    const double p = kind == "pstable" ? P.p.value_or(1.0) : 2.0;
    auto e = kind == "pstable" ? pstable_embed(pts, *P.D, p, features, {g.seed, 0})
                               : truncated_gauss_embed(pts, *P.D, features, {g.seed, 0});
    auto src = MetricSpace::from_points(pts, kind == "pstable" ? p : 2.0);
    Matrix trunc = src.matrix();
    for (auto& row : trunc)
      for (auto& x : row) x = std::min(x, *P.D);
    auto rep = distortion_between(MetricSpace(trunc), e.induced_metric());
    emit_json(make_bundle("embed-" + kind, g.seed,
                          json{{"metric", to_json(MetricSpace(trunc))},
                               {"embedding", to_json(e)},
                               {"embedding_check", json{{"report", to_json(rep)}}}}));
    return 0;
  }
  if (kind == "uptolog") {
    if (!P.D) throw ParameterError("embed uptolog needs --D");
    auto m = P.points.empty() ? load_metric(P.metric) : MetricSpace::from_points(load_points(P.points), 1.0);
    auto r = uptolog_embed(m, *P.D, P.p.value_or(1.0));
    emit_json(json{{"image", to_json(r.image)},
                   {"report", to_json(r.report)},
                   {"lower", r.lower},
                   {"upper", r.upper},
                   {"image_norm", r.image_norm}});
    return 0;
  }
  throw ParameterError("unknown embedding '" + kind + "'");
}

int cmd_certify(const std::string& kind) {
  if (kind == "distortion") {
    auto src = load_metric(P.metric);
    auto tgt = load_metric(P.target);
    std::vector<Index> map = P.map.empty() ? std::vector<Index>{} : parse_index_list(P.map);
    auto rep = distortion_between(src, tgt, map);
    json j = to_json(rep);
    if (P.b) {
      j["bound"] = *P.b;
      j["holds"] = rep.distortion <= *P.b * (1.0 + g.tolerance);
    }
    emit_json(j);
    return P.b && rep.distortion > *P.b * (1.0 + g.tolerance) ? 1 : 0;
  }
  if (kind == "lipq") {
    QuotientMap qm{load_metric(P.metric), load_metric(P.target), parse_index_list(P.assign)};
    qm.check();
    auto lc = lip_colip(qm);
    json j{{"lip", lc.lip}, {"colip", lc.colip}, {"product", lc.product()}, {"degenerate", lc.degenerate}};
    if (P.alpha) {
      const bool ok = certify_lip_quotient(qm, *P.alpha);
      j["alpha"] = *P.alpha;
      j["certified"] = ok;
      emit_json(j);
      return ok ? 0 : 1;
    }
    emit_json(j);
    return 0;
  }
  if (kind == "cube-lower") {
    const double p = P.p.value_or(2.0);
    json j = read_json(P.quotient);
    QuotientSpace q;
    if (j.contains("artifacts")) {
      const auto& a = j.at("artifacts");
      if (!a.contains("quotient") || !a.contains("metric")) throw StructuralError("bundle carries no cube quotient");
      q = quotient_from_json(a.at("quotient"));
      q.base = std::make_shared<const MetricSpace>(metric_from_json(a.at("metric")));
    } else {
      q = quotient_from_json(j);
      if (!q.base) throw StructuralError("quotient needs its base cube");
    }
    auto lb = cube_certify_lower(q, p);
    emit_json(json{{"r", lb.r}, {"m", lb.m}, {"bound", lb.bound}, {"center", lb.center}});
    return 0;
  }
  throw ParameterError("unknown certificate '" + kind + "'");
}

int cmd_transform() {
  if (!P.D || !P.d) throw ParameterError("transform needs --D and --d");
  double value = 0.0;
  json j{{"kind", P.kind}, {"D", *P.D}, {"d", *P.d}};
  if (P.kind == "gauss-trunc") {
    value = truncated_gauss_distance(*P.d, *P.D);
  } else if (P.kind == "pstable") {
    const double p = P.p.value_or(1.0);
    j["p"] = p;
    value = pstable_distance(*P.d, *P.D, p);
  } else {
    throw ParameterError("unknown transform '" + P.kind + "'");
  }
  j["value"] = value;
  emit_json(j);
  return 0;
}

int cmd_run(const CLI::App& app) {
  json pj = read_json(P.plan);
  if (app.get_option("--seed")->count()) pj["seed"] = g.seed;
  if (app.get_option("--trials")->count()) pj["trials"] = g.trials;
  if (!P.bundles_out.empty()) pj["artifacts"] = true;
  auto plan = ExperimentPlan::from_json(pj);
  auto r = run_experiment(plan);
  if (g.format == "json") emit_json(r.summary);
  else emit(r.csv);
  if (!P.summary.empty()) write_text_file(P.summary, r.summary.dump(2) + "\n");
  if (!P.bundles_out.empty()) write_text_file(P.bundles_out, json(r.bundles).dump(2) + "\n");
  return 0;
}

int cmd_verify() {
  json j = read_json(P.bundle);
  VerifyOptions opt;
  opt.tolerance = g.tolerance;
  json reports = json::array();
  bool ok = true;
  auto one = [&](const json& b) {
    auto rep = verify_bundle(b, opt);
    ok = ok && rep.ok();
    reports.push_back(rep.to_json());
  };
  if (j.is_array()) {
    for (const auto& b : j) one(b);
  } else {
    one(j);
  }
  emit_json(j.is_array() ? json{{"ok", ok}, {"bundles", reports}} : reports[0]);
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"metriq: quotients of finite metric spaces"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", g.seed, "Base random seed");
  app.add_option("--trials", g.trials, "Number of trials")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output file ('-' for stdout)");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--tolerance", g.tolerance, "Relative tolerance for recomputed quantities");

  auto num = [](CLI::App* c, const std::string& name, std::optional<double>& v, const std::string& help) {
    c->add_option(name, v, help);
  };

  auto* gen = app.add_subcommand("gen", "Generate an instance metric");
  gen->add_option("--variant", P.variant, "Instance family")
      ->required()
      ->check(CLI::IsMember({"random", "euclidean", "gnp", "padded", "composition", "lipcomp", "cube", "star", "lacunary"}));
  for (auto [name, ref] : std::vector<std::pair<std::string, std::optional<double>*>>{
           {"--n", &P.n}, {"--q", &P.q}, {"--k", &P.k}, {"--copies", &P.copies}, {"--beta", &P.beta},
           {"--depth", &P.depth}, {"--max-size", &P.max_size}, {"--d", &P.d}, {"--tau", &P.tau},
           {"--alpha", &P.alpha}, {"--mu", &P.mu}, {"--theta", &P.theta}, {"--wmax", &P.wmax},
           {"--dim", &P.dim}, {"--kx", &P.kx}, {"--ky", &P.ky}})
    num(gen, name, *ref, "Instance parameter");
  gen->add_option("--a", P.seq, "Lacunary sequence")->delimiter(',');

  auto* quo = app.add_subcommand("quotient", "Quotient metric of a partition or a collapsed subset");
  quo->add_option("--metric", P.metric, "Metric file (JSON or CSV)")->required();
  quo->add_option("--blocks", P.blocks, "Blocks as '0,1/2/3,4'");
  quo->add_option("--subset", P.subset, "Subset to collapse, '1,4,6'");

  auto* con = app.add_subcommand("construct", "Run a quotient construction");
  con->require_subcommand(1);
  con->fallthrough();
  for (const std::string kind : {"mcenter", "hst", "star", "lacunary", "dichotomy", "q2", "aspect", "composition"}) {
    auto* c = con->add_subcommand(kind, "Construction '" + kind + "'");
    c->fallthrough();
    c->add_option("--metric", P.metric, "Metric file (JSON or CSV)")->required();
    for (auto [name, ref] : std::vector<std::pair<std::string, std::optional<double>*>>{
             {"--eps", &P.eps}, {"--m", &P.m}, {"--a", &P.a}, {"--b", &P.b}, {"--alpha", &P.alpha},
             {"--k", &P.k}, {"--beta", &P.beta}})
      num(c, name, *ref, "Construction parameter");
  }

  auto* emb = app.add_subcommand("embed", "Run an embedding");
  emb->require_subcommand(1);
  emb->fallthrough();
  for (const std::string kind : {"bourgain", "star", "gauss-trunc", "pstable", "uptolog"}) {
    auto* c = emb->add_subcommand(kind, "Embedding '" + kind + "'");
    c->fallthrough();
    c->add_option("--metric", P.metric, "Metric file (JSON or CSV)");
    c->add_option("--points", P.points, "Point file: JSON array of vectors");
    c->add_option("--mode", P.mode, "Bourgain mode")->check(CLI::IsMember({"auto", "exact", "mc"}));
    for (auto [name, ref] : std::vector<std::pair<std::string, std::optional<double>*>>{
             {"--p", &P.p}, {"--m", &P.m}, {"--n", &P.n}, {"--tau", &P.tau}, {"--D", &P.D}, {"--features", &P.features}})
      num(c, name, *ref, "Embedding parameter");
  }

  auto* cube = app.add_subcommand("cube-qs", "Hypercube QS construction");
  num(cube, "--d", P.d, "Cube dimension");
  num(cube, "--eps", P.eps, "Fraction of points allowed to be lost");
  num(cube, "--p", P.p, "Target lp exponent");
  cube->add_flag("--allow-short", P.allow_short, "Return a result even below the size requirement");

  auto* cert = app.add_subcommand("certify", "Independent certificate checks");
  cert->require_subcommand(1);
  cert->fallthrough();
  auto* cd = cert->add_subcommand("distortion", "Distortion between two metrics");
  cd->fallthrough();
  cd->add_option("--metric", P.metric, "Source metric")->required();
  cd->add_option("--target", P.target, "Target metric")->required();
  cd->add_option("--map", P.map, "Source point -> target point, '0,2,1'");
  num(cd, "--bound", P.b, "Fail (exit 1) if the distortion exceeds this");
  auto* cl = cert->add_subcommand("lipq", "Lipschitz quotient constants");
  cl->fallthrough();
  cl->add_option("--metric", P.metric, "Source metric")->required();
  cl->add_option("--target", P.target, "Target metric")->required();
  cl->add_option("--assign", P.assign, "Source point -> target point")->required();
  num(cl, "--alpha", P.alpha, "Certify lip * colip <= alpha");
  auto* cc = cert->add_subcommand("cube-lower", "Lower bound for a quotient of the cube");
  cc->fallthrough();
  cc->add_option("--quotient", P.quotient, "Quotient JSON with base, or a cube-qs bundle")->required();
  num(cc, "--p", P.p, "Target lp exponent");

  auto* tr = app.add_subcommand("transform", "Evaluate a distance transform");
  tr->add_option("--kind", P.kind, "Transform")->required()->check(CLI::IsMember({"gauss-trunc", "pstable"}));
  num(tr, "--D", P.D, "Truncation level");
  num(tr, "--d", P.d, "Distance");
  num(tr, "--p", P.p, "Stability index");

  auto* run = app.add_subcommand("run", "Run an experiment plan");
  run->add_option("--plan", P.plan, "Plan JSON")->required();
  run->add_option("--summary", P.summary, "Write the JSON summary here");
  run->add_option("--bundles", P.bundles_out, "Write artifact bundles here");

  auto* ver = app.add_subcommand("verify", "Re-check a bundle (or an array of bundles)");
  ver->add_option("--bundle", P.bundle, "Bundle JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen();
    if (quo->parsed()) return cmd_quotient();
    if (con->parsed()) {
      auto* sub = con->get_subcommands().front();
      auto inst = load_instance(P.metric);
      const std::string kind = sub->get_name() == "lacunary" ? "q2" : sub->get_name();
      return run_ops(inst, kind);
    }
    if (emb->parsed()) return cmd_embed(emb->get_subcommands().front()->get_name());
    if (cube->parsed()) {
      if (!P.d || !P.eps) throw ParameterError("cube-qs needs --d and --eps");
      Instance inst;
      inst.variant = "cube";
      inst.cube_d = static_cast<int>(*P.d);
      return run_ops(inst, "cube-qs");
    }
    if (cert->parsed()) return cmd_certify(cert->get_subcommands().front()->get_name());
    if (tr->parsed()) return cmd_transform();
    if (run->parsed()) return cmd_run(app);
    if (ver->parsed()) return cmd_verify();
  } catch (const StructuralError& e) {
    std::cerr << "structural error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
