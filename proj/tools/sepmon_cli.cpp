// Command line front end: graph ingestion, the full verification pipeline,
// and machine readable reports. Exit codes: 0 verified/valid, 1 certified
// violation, 2 input error, 3 undecided within bounds.

#include <cstdlib>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sepmon/blocks.hpp"
#include "sepmon/cover.hpp"
#include "sepmon/graph.hpp"
#include "sepmon/io.hpp"
#include "sepmon/kernel_lemma.hpp"
#include "sepmon/ktheory.hpp"
#include "sepmon/monoid.hpp"
#include "sepmon/pushout.hpp"

using nlohmann::json;
using namespace sepmon;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitInput = 2;
constexpr int kExitUnknown = 3;

struct Config {
  int depth = 8;
  long long size = 64;
  long long degree = 4;
  std::string format = "json";
  unsigned seed = 12345;
};

Bounds bounds_of(const Config& c) { return Bounds{c.depth, c.size}; }

void apply_env_defaults(Config& c) {
  const char* env = std::getenv("SEPMON_DEFAULT_BOUNDS");
  if (!env) return;
  std::istringstream is(env);
  std::string tok;
  std::vector<long long> vals;
  while (std::getline(is, tok, ',')) vals.push_back(std::stoll(tok));
  if (vals.size() > 0) c.depth = static_cast<int>(vals[0]);
  if (vals.size() > 1) c.size = vals[1];
  if (vals.size() > 2) c.degree = vals[2];
}

MonoidElement parse_element(const SeparatedGraph& g, const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what());
  }
  if (!j.is_object()) throw ParseError("elements are objects {vertex: coefficient}");
  std::map<Token, long long> m;
  for (const auto& [v, k] : j.items()) {
    if (!g.has_vertex(v)) throw ParseError("unknown vertex " + v);
    m[v] = k.get<long long>();
  }
  return MonoidElement(g, m);
}

json eq_to_json(const EqVerdict& v) {
  json j;
  j["status"] = v.status == EqStatus::EqualCertified     ? "EqualCertified"
                : v.status == EqStatus::UnequalCertified ? "UnequalCertified"
                                                         : "Unknown";
  if (v.common_reduct) j["common_reduct"] = element_to_json(*v.common_reduct);
  if (!v.refuting_invariant.empty()) j["refuting_invariant"] = v.refuting_invariant;
  j["bounds"] = {{"depth", v.bounds.depth}, {"size", v.bounds.size}};
  return j;
}

// Eligible pullback configurations: every free non-sink vertex with more
// than one group, paired with the lower set of everything below it plus all
// sinks.
std::vector<std::pair<std::set<Token>, Token>> eligible_pullbacks(const SeparatedGraph& g,
                                                                 const AdaptableDecoration& dec) {
  std::vector<std::pair<std::set<Token>, Token>> out;
  std::set<Token> free;
  for (int c : dec.free_comps) free.insert(dec.poset.label(c));
  for (const Token& v : free) {
    if (g.is_sink(g.vertex_index(v)) || g.groups_at(v).size() < 2) continue;
    std::set<Token> j;
    int cv = dec.poset.component_of.at(v);
    for (const Token& w : free)
      if (w != v &&
          (g.is_sink(g.vertex_index(w)) || dec.poset.lt(dec.poset.component_of.at(w), cv)))
        j.insert(w);
    out.push_back({std::move(j), v});
  }
  return out;
}

int cmd_validate(const std::string& path, const Config&) {
  SeparatedGraph g = load_graph(path);
  json rep;
  try {
    AdaptableDecoration dec = classify_adaptable(g);
    rep["adaptable"] = true;
    json free = json::array(), regular = json::array();
    for (int c : dec.free_comps) free.push_back(dec.poset.label(c));
    for (int c : dec.regular_comps) regular.push_back(dec.poset.label(c));
    rep["free"] = free;
    rep["regular"] = regular;
    ConditionFVerdict f = check_condition_F(g, dec);
    rep["conditionF"]["holds"] = f.holds;
    if (!f.holds && f.witness)
      rep["conditionF"]["witness"] = dec.poset.label(f.witness->component);
    rep["forest"] = is_forest(dec.poset);
  } catch (const NotAdaptableError& e) {
    rep["adaptable"] = false;
    rep["reason"] = e.what();
  }
  std::cout << rep.dump(2) << "\n";
  return kExitOk;
}

int cmd_cover(const std::string& path, const Config& cfg) {
  SeparatedGraph g = load_graph(path);
  auto [aux, cover] = build_auxiliary(g, classify_adaptable(g));
  if (cfg.format == "dot") {
    std::cout << dot_graph(aux);
    return kExitOk;
  }
  json rep;
  rep["graph"] = graph_to_json(aux);
  rep["cover"] = cover_to_json(cover);
  std::cout << rep.dump(2) << "\n";
  return kExitOk;
}

int cmd_chain(const std::string& path, const Config&) {
  SeparatedGraph g = load_graph(path);
  CrownedChain chain = build_crowned_chain(g, classify_adaptable(g));
  json rep;
  rep["length"] = chain.maps.size();
  rep["steps"] = json::array();
  for (size_t i = 0; i < chain.maps.size(); ++i) {
    json step;
    step["graph"] = graph_to_json(chain.graphs[i]);
    step["map"] = cover_to_json(chain.maps[i]);
    step["crown"] = {{"v1", chain.crowns[i].v1}, {"v2", chain.crowns[i].v2},
                     {"v", chain.crowns[i].v}};
    rep["steps"].push_back(std::move(step));
  }
  rep["target"] = graph_to_json(chain.graphs.back());
  std::cout << rep.dump(2) << "\n";
  return kExitOk;
}

int cmd_blocks(const std::string& path, const Config&) {
  SeparatedGraph g = load_graph(path);
  json rep = json::array();
  for (const SeparatedGraph& b : building_blocks(g, classify_adaptable(g)))
    rep.push_back(graph_to_json(b));
  std::cout << rep.dump(2) << "\n";
  return kExitOk;
}

int cmd_eq(const std::string& path, const std::string& xs, const std::string& ys,
           const Config& cfg) {
  SeparatedGraph g = load_graph(path);
  MonoidCalc calc(g, bounds_of(cfg));
  EqVerdict v = calc.equal(parse_element(g, xs), parse_element(g, ys));
  std::cout << eq_to_json(v).dump(2) << "\n";
  return v.status == EqStatus::EqualCertified     ? kExitOk
         : v.status == EqStatus::UnequalCertified ? kExitViolation
                                                  : kExitUnknown;
}

int cmd_enumerate(const std::string& path, const Config& cfg) {
  SeparatedGraph g = load_graph(path);
  MonoidCalc calc(g, bounds_of(cfg));
  const ClassPartition& part = calc.enumerate_classes(cfg.degree);
  json rep;
  rep["degree"] = cfg.degree;
  rep["classes"] = json::array();
  for (const MonoidClass& c : part.classes) {
    json cls;
    cls["rep"] = element_to_json(c.rep);
    cls["size"] = c.members.size();
    rep["classes"].push_back(std::move(cls));
  }
  rep["unknown_pairs"] = json::array();
  for (const auto& [a, b] : part.unknown_pairs)
    rep["unknown_pairs"].push_back({element_to_json(a), element_to_json(b)});
  std::cout << rep.dump(2) << "\n";
  return part.unknown_pairs.empty() ? kExitOk : kExitUnknown;
}

int cmd_refine(const std::string& path, const std::vector<std::string>& elems,
               const Config& cfg) {
  SeparatedGraph g = load_graph(path);
  MonoidCalc calc(g, bounds_of(cfg));
  MonoidElement a = parse_element(g, elems[0]), b = parse_element(g, elems[1]),
                c = parse_element(g, elems[2]), d = parse_element(g, elems[3]);
  RefinementResult r;
  try {
    r = calc.check_refinement(a, b, c, d);
  } catch (const PreconditionUnverified& e) {
    std::cout << json{{"error", e.what()}}.dump(2) << "\n";
    return kExitInput;
  }
  json rep;
  rep["found"] = r.found;
  if (r.found)
    rep["square"] = {{"x", element_to_json(r.square->x)}, {"y", element_to_json(r.square->y)},
                     {"z", element_to_json(r.square->z)}, {"t", element_to_json(r.square->t)}};
  std::cout << rep.dump(2) << "\n";
  return r.found ? kExitOk : kExitUnknown;
}

int cmd_pullback_verify(const std::string& path, const Config& cfg) {
  SeparatedGraph g = load_graph(path);
  AdaptableDecoration dec = classify_adaptable(g);
  json rep = json::array();
  int worst = kExitOk;
  for (const auto& [j, v] : eligible_pullbacks(g, dec)) {
    PullbackData d = pullback_data(g, dec, j, v);
    PullbackReport r = verify_pullback_bounded(d, cfg.degree, bounds_of(cfg));
    json entry;
    entry["v"] = v;
    entry["status"] = r.status == PullbackStatus::Verified    ? "Verified"
                      : r.status == PullbackStatus::Violation ? "Violation"
                                                              : "Unknown";
    entry["violations"] = r.violations;
    entry["unknowns"] = r.unknowns;
    rep.push_back(std::move(entry));
    if (r.status == PullbackStatus::Violation) worst = kExitViolation;
    if (r.status == PullbackStatus::Unknown && worst == kExitOk) worst = kExitUnknown;
  }
  std::cout << rep.dump(2) << "\n";
  return worst;
}

int cmd_pushout_verify(const std::string& path, const Config& cfg) {
  SeparatedGraph g = load_graph(path);
  CrownedChain chain = build_crowned_chain(g, classify_adaptable(g));
  json rep = json::array();
  int worst = kExitOk;
  for (size_t i = 0; i < chain.maps.size(); ++i) {
    CrownedPair p = make_crowned_pair(chain.graphs[i], chain.graphs[i + 1], chain.maps[i],
                                      chain.crowns[i].v1, chain.crowns[i].v2);
    PushoutReport r = verify_pushout_is_target(p, bounds_of(cfg));
    json entry;
    entry["step"] = i;
    entry["crown"] = {{"v1", chain.crowns[i].v1}, {"v2", chain.crowns[i].v2},
                      {"v", chain.crowns[i].v}};
    entry["status"] = r.status == PushoutVerdict::Verified ? "Verified"
                      : r.status == PushoutVerdict::Fails  ? "Fails"
                                                           : "Unknown";
    if (!r.witness.empty()) entry["witness"] = r.witness;
    rep.push_back(std::move(entry));
    if (r.status == PushoutVerdict::Fails) worst = kExitViolation;
    if (r.status == PushoutVerdict::Unknown && worst == kExitOk) worst = kExitUnknown;
  }
  std::cout << rep.dump(2) << "\n";
  return worst;
}

int cmd_k0(const std::string& path, const Config&) {
  SeparatedGraph g = load_graph(path);
  ktheory::FgAbelianGroup grp = grothendieck_group(g);
  json rep;
  rep["free_rank"] = grp.free_rank;
  rep["torsion"] = json::array();
  for (const auto& d : grp.torsion) rep["torsion"].push_back(d.convert_to<long long>());
  std::cout << rep.dump(2) << "\n";
  return kExitOk;
}

int cmd_kernel_lemma(const std::string& path, const Config&) {
  SeparatedGraph g = load_graph(path);
  AdaptableDecoration dec = classify_adaptable(g);
  json rep = json::array();
  int worst = kExitOk;
  for (const auto& [j, v] : eligible_pullbacks(g, dec)) {
    PullbackData d = pullback_data(g, dec, j, v);
    for (int i = 1; i <= static_cast<int>(d.factors.size()); ++i) {
      KernelLemmaVerdict kv = check_kernel_cyclic_lemma(d, i);
      rep.push_back({{"v", v}, {"factor", i}, {"verified", kv.verified}});
      if (!kv.verified) worst = kExitViolation;
    }
  }
  std::cout << rep.dump(2) << "\n";
  return worst;
}

int cmd_dot(const std::string& path, const std::string& what, const Config&) {
  SeparatedGraph g = load_graph(path);
  if (what == "graph")
    std::cout << dot_graph(g);
  else if (what == "reduced")
    std::cout << dot_reduced(g);
  else
    std::cout << dot_poset(g);
  return kExitOk;
}

int cmd_pipeline(const std::string& path, const Config& cfg) {
  SeparatedGraph g = load_graph(path);
  AdaptableDecoration dec = classify_adaptable(g);
  bool violation = false, unknown = false;
  auto emit = [](const json& j) { std::cout << j.dump() << "\n"; };

  ConditionFVerdict f = check_condition_F(g, dec);
  emit({{"step", "validate"}, {"adaptable", true}, {"conditionF", f.holds}});

  auto [aux, cover] = build_auxiliary(g, dec);
  emit({{"step", "cover"}, {"vertices", aux.num_vertices()}, {"edges", aux.num_edges()}});

  CrownedChain chain = build_crowned_chain(g, dec);
  emit({{"step", "chain"}, {"length", chain.maps.size()}});

  std::vector<CrownedPair> pairs;
  for (size_t i = 0; i < chain.maps.size(); ++i) {
    CrownedPair p = make_crowned_pair(chain.graphs[i], chain.graphs[i + 1], chain.maps[i],
                                      chain.crowns[i].v1, chain.crowns[i].v2);
    PairVerdict v = validate_crowned_pair(p);
    emit({{"step", "crowned-pair"}, {"index", i}, {"holds", v.holds}, {"clause", v.clause}});
    if (!v.holds) violation = true;
    pairs.push_back(std::move(p));
  }

  emit({{"step", "blocks"}, {"count", building_blocks(g, dec).size()}});

  AdaptableDecoration aux_dec = classify_adaptable(aux);
  for (const auto& [j, v] : eligible_pullbacks(aux, aux_dec)) {
    PullbackData d = pullback_data(aux, aux_dec, j, v);
    PullbackReport r = verify_pullback_bounded(d, cfg.degree, bounds_of(cfg));
    std::string status = r.status == PullbackStatus::Verified    ? "Verified"
                         : r.status == PullbackStatus::Violation ? "Violation"
                                                                 : "Unknown";
    emit({{"step", "pullback"}, {"graph", "auxiliary"}, {"v", v}, {"status", status}});
    if (r.status == PullbackStatus::Violation) violation = true;
    if (r.status == PullbackStatus::Unknown) unknown = true;

    for (int i = 1; i <= static_cast<int>(d.factors.size()); ++i) {
      KernelLemmaVerdict kv = check_kernel_cyclic_lemma(d, i);
      emit({{"step", "kernel-lemma"}, {"v", v}, {"factor", i}, {"verified", kv.verified}});
      if (!kv.verified) violation = true;
    }
  }

  for (size_t i = 0; i < pairs.size(); ++i) {
    PushoutReport r = verify_pushout_is_target(pairs[i], bounds_of(cfg));
    std::string status = r.status == PushoutVerdict::Verified ? "Verified"
                         : r.status == PushoutVerdict::Fails  ? "Fails"
                                                              : "Unknown";
    emit({{"step", "pushout"}, {"index", i}, {"status", status}});
    if (r.status == PushoutVerdict::Fails) violation = true;
    if (r.status == PushoutVerdict::Unknown) unknown = true;
  }

  // seeded refinement sweep: random certified sums refined into squares
  {
    MonoidCalc calc(g, bounds_of(cfg));
    std::mt19937 rng(cfg.seed);
    std::vector<Coeffs> win = window_vectors(g, std::max<long long>(1, cfg.degree / 2));
    long long cases = 0, found = 0, undecided = 0;
    if (win.size() > 1) {
      std::uniform_int_distribution<size_t> pick(0, win.size() - 1);
      for (int it = 0; it < 20; ++it) {
        MonoidElement a(g, win[pick(rng)]), b(g, win[pick(rng)]);
        MonoidElement s = a + b;
        if (s.is_zero()) continue;
        const ReachResult& rr = calc.reach(s);
        size_t n = rr.elems.size();
        if (n == 0) continue;
        auto itr = rr.elems.begin();
        std::advance(itr, std::uniform_int_distribution<size_t>(0, n - 1)(rng));
        // split a reduct of a+b into a random pair (c, d)
        Coeffs cc(*itr), dd(itr->size(), 0);
        for (size_t k = 0; k < cc.size(); ++k) {
          long long move = std::uniform_int_distribution<long long>(0, cc[k])(rng);
          cc[k] -= move;
          dd[k] += move;
        }
        MonoidElement c(g, cc), d(g, dd);
        if (calc.equal(a + b, c + d).status != EqStatus::EqualCertified) continue;
        ++cases;
        if (calc.check_refinement(a, b, c, d).found)
          ++found;
        else
          ++undecided;
      }
    }
    emit({{"step", "refinement-sweep"}, {"cases", cases}, {"found", found},
          {"undecided", undecided}});
    if (undecided > 0) unknown = true;
  }

  return violation ? kExitViolation : unknown ? kExitUnknown : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"separated graph monoid toolkit"};
  app.require_subcommand(1);

  Config cfg;
  apply_env_defaults(cfg);
  app.add_option("--depth", cfg.depth, "rewrite depth bound");
  app.add_option("--size", cfg.size, "rewrite size bound");
  app.add_option("--degree", cfg.degree, "window degree bound");
  app.add_option("--format", cfg.format, "output format: json, dot or text");
  app.add_option("--seed", cfg.seed, "seed for randomized sweeps");

  std::string path, xs, ys, what = "graph";
  std::vector<std::string> quad;

  auto* validate = app.add_subcommand("validate", "classify a graph");
  validate->add_option("input", path)->required();
  auto* pipeline = app.add_subcommand("pipeline", "run the full verification pipeline");
  pipeline->add_option("input", path)->required();
  auto* cover = app.add_subcommand("cover", "unfold until condition F holds");
  cover->add_option("input", path)->required();
  auto* chain = app.add_subcommand("chain", "two-copy unfolding chain");
  chain->add_option("input", path)->required();
  auto* blocks = app.add_subcommand("blocks", "building blocks");
  blocks->add_option("input", path)->required();
  auto* eq = app.add_subcommand("eq", "decide equality of two elements");
  eq->add_option("input", path)->required();
  eq->add_option("x", xs)->required();
  eq->add_option("y", ys)->required();
  auto* enumerate = app.add_subcommand("enumerate", "equality classes in a window");
  enumerate->add_option("input", path)->required();
  auto* refine = app.add_subcommand("refine", "search a refinement square for a+b = c+d");
  refine->add_option("input", path)->required();
  refine->add_option("elements", quad, "four elements a b c d")->expected(4);
  auto* pullback = app.add_subcommand("pullback-verify", "verify the pullback decompositions");
  pullback->add_option("input", path)->required();
  auto* pushout = app.add_subcommand("pushout-verify", "verify every chain step pushout");
  pushout->add_option("input", path)->required();
  auto* k0 = app.add_subcommand("k0", "Grothendieck group of the monoid");
  k0->add_option("input", path)->required();
  auto* kernel = app.add_subcommand("kernel-lemma", "check the cyclic kernel property");
  kernel->add_option("input", path)->required();
  auto* dot = app.add_subcommand("dot", "render DOT output");
  dot->add_option("input", path)->required();
  dot->add_option("--what", what, "graph, reduced or poset");

  for (CLI::App* s : app.get_subcommands([](const CLI::App*) { return true; }))
    s->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(path, cfg);
    if (pipeline->parsed()) return cmd_pipeline(path, cfg);
    if (cover->parsed()) return cmd_cover(path, cfg);
    if (chain->parsed()) return cmd_chain(path, cfg);
    if (blocks->parsed()) return cmd_blocks(path, cfg);
    if (eq->parsed()) return cmd_eq(path, xs, ys, cfg);
    if (enumerate->parsed()) return cmd_enumerate(path, cfg);
    if (refine->parsed()) return cmd_refine(path, quad, cfg);
    if (pullback->parsed()) return cmd_pullback_verify(path, cfg);
    if (pushout->parsed()) return cmd_pushout_verify(path, cfg);
    if (k0->parsed()) return cmd_k0(path, cfg);
    if (kernel->parsed()) return cmd_kernel_lemma(path, cfg);
    if (dot->parsed()) return cmd_dot(path, what, cfg);
  } catch (const ParseError& e) {
    std::cerr << json{{"error", e.what()}}.dump() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", e.what()}}.dump() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
