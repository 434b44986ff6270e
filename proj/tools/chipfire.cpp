// Command-line front end: runs stabilizations, enumerations, verification
// suites, sampling experiments, and conjecture checks, and prints one JSON
// report per invocation on standard output. Exit codes: 0 all requested
// checks passed, 1 a check failed, 2 usage or input error.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "chipfire/chipfire.hpp"

using nlohmann::json;
using namespace chipfire;

namespace {

json to_json(const UnlabeledConfig& c) {
  json out = json::array();
  for (const auto& [v, k] : c.counts()) out.push_back({v, k});
  return out;
}

json to_json(const LabeledConfig& c) {
  json out = json::array();
  for (const auto& [label, v] : c.positions()) out.push_back({label, v});
  return out;
}

template <typename K, typename V>
json to_json(const std::map<K, V>& m) {
  json out = json::array();
  for (const auto& [k, v] : m) out.push_back({k, v});
  return out;
}

json to_json(const std::vector<FiringMove>& moves) {
  json out = json::array();
  for (const FiringMove& mv : moves) {
    json j;
    j["vertex"] = mv.vertex;
    j["chips"] = mv.chips;
    out.push_back(j);
  }
  return out;
}

std::uint64_t master_seed_default() {
  if (const char* env = std::getenv("CHIPFIRE_SEED")) {
    try {
      std::size_t used = 0;
      const std::uint64_t v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("CHIPFIRE_SEED must be an unsigned integer");
  }
  return 0;
}

void emit(const std::string& command, const json& inputs, const json& results, bool exact) {
  json report;
  report["command"] = command;
  report["inputs"] = inputs;
  report["results"] = results;
  report["version"] = kVersion;
  report["exact"] = exact;
  std::cout << report.dump(2) << "\n";
}

ConjectureParams parse_conjecture_params(const std::string& text) {
  ConjectureParams p;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("param '" + item + "' is not key=value");
    const std::string key = item.substr(0, eq);
    const std::string val = item.substr(eq + 1);
    if (key == "r") {
      p.r = std::stoll(val);
    } else if (key == "n") {
      p.n = static_cast<int>(std::stoll(val));
    } else if (key == "s") {
      std::istringstream sv(val);
      std::string part;
      while (std::getline(sv, part, ':')) p.s.push_back(std::stoll(part));
    } else {
      throw std::invalid_argument("unknown conjecture param '" + key + "' (expected r, n, or s)");
    }
  }
  return p;
}

int run_stabilize(const std::string& graph_spec, int n, bool labeled, const std::string& strategy_name_in,
                  std::optional<std::uint64_t> seed, bool trace, std::int64_t trace_limit) {
  const PathGraph g = PathGraph::parse(graph_spec);
  const auto kind = strategy_kind_from_name(strategy_name_in);
  if (!kind || *kind == Strategy::Kind::scripted) {
    throw std::invalid_argument("unknown strategy '" + strategy_name_in + "'");
  }
  Strategy strat;
  strat.kind = *kind;
  strat.seed = seed.value_or(master_seed_default());
  StabilizeOptions opt;
  opt.trace = trace;
  opt.trace_limit = trace_limit;

  json inputs;
  inputs["graph"] = g.spec();
  inputs["n"] = n;
  inputs["labeled"] = labeled;
  inputs["strategy"] = strategy_name(strat.kind);
  inputs["seed"] = strat.seed;
  inputs["trace"] = trace;

  json results;
  if (labeled) {
    const StabilizationReport rep = stabilize(g, LabeledConfig::stacked_at_origin(n), strat, opt);
    results["final_labeled"] = to_json(*rep.final_labeled);
    results["final"] = to_json(rep.final_config);
    results["total_firings"] = rep.total_firings;
    results["odometer"] = to_json(rep.odometer);
    const SortCheck sc = check_sorted(g, *rep.final_labeled, n);
    results["sorted"] = sc.sorted;
    if (sc.matches_closed_form) results["matches_closed_form"] = *sc.matches_closed_form;
    if (!rep.cross_firings.empty()) results["cross_firings"] = to_json(rep.cross_firings);
    if (trace) {
      results["trace"] = to_json(rep.trace);
      results["trace_truncated"] = rep.trace_truncated;
    }
  } else {
    const StabilizationReport rep = stabilize(g, n_delta0(n), strat, opt);
    results["final"] = to_json(rep.final_config);
    results["total_firings"] = rep.total_firings;
    results["odometer"] = to_json(rep.odometer);
    if (trace) {
      results["trace"] = to_json(rep.trace);
      results["trace_truncated"] = rep.trace_truncated;
    }
  }
  emit("stabilize", inputs, results, true);
  return 0;
}

int run_enumerate(const std::string& graph_spec, int n, std::int64_t max_states, bool dump_perms) {
  const PathGraph g = PathGraph::parse(graph_spec);
  EnumLimits lim;
  if (max_states > 0) lim.max_states = max_states;
  const StableSet set = enumerate_stables(g, LabeledConfig::stacked_at_origin(n), lim);

  json inputs;
  inputs["graph"] = g.spec();
  inputs["n"] = n;
  inputs["max_states"] = lim.max_states;

  json results;
  results["count"] = set.stables.size();
  results["reachable_states"] = set.reachable_states;
  bool perm_identifiable = !set.stables.empty();
  for (const LabeledConfig& c : set.stables) {
    if (!perm_view(c)) {
      perm_identifiable = false;
      break;
    }
  }
  if (set.exact && perm_identifiable) {
    const AnalyzeReport rep = analyze(set);
    results["max_inversions"] = rep.max_inversions;
    if (dump_perms) {
      json perms = json::array();
      for (const PermReport& p : rep.per_perm) {
        json entry;
        entry["perm"] = p.perm;
        entry["inversions"] = p.inversions;
        perms.push_back(entry);
      }
      results["perms"] = perms;
    }
  } else {
    results["max_inversions"] = nullptr;
  }
  emit("enumerate", inputs, results, set.exact);
  return 0;
}

int run_verify(const std::string& suite, int max_n, int seeds, std::int64_t pairs, std::int64_t walks,
               std::optional<std::uint64_t> seed) {
  SuiteParams params;
  params.max_n = max_n;
  params.seeds = seeds;
  params.pairs = pairs;
  params.walks = walks;
  params.master_seed = seed.value_or(master_seed_default());
  const SuiteResult res = run_suite(suite, params);

  json inputs;
  inputs["suite"] = suite;
  inputs["max_n"] = params.max_n;
  inputs["seeds"] = params.seeds;
  inputs["pairs"] = params.pairs;
  inputs["walks"] = params.walks;
  inputs["seed"] = params.master_seed;

  json cases = json::array();
  for (const CaseResult& c : res.cases) {
    json entry;
    entry["name"] = c.name;
    entry["pass"] = c.pass;
    if (!c.pass) entry["counterexample"] = c.detail;
    cases.push_back(entry);
  }
  json results;
  results["cases"] = cases;
  results["all_pass"] = res.all_pass();
  emit("verify", inputs, results, true);
  return res.all_pass() ? 0 : 1;
}

int run_montecarlo(int n, const std::string& protocol_in, std::int64_t trials,
                   std::optional<std::uint64_t> seed, int threads, bool exact_mode, int guard) {
  const auto proto = protocol_from_name(protocol_in);
  if (!proto) throw std::invalid_argument("unknown protocol '" + protocol_in + "'");

  json inputs;
  inputs["n"] = n;
  inputs["protocol"] = protocol_name(*proto);

  if (exact_mode) {
    inputs["guard"] = guard;
    const Rational p = exact_sort_probability(n, *proto, guard);
    json results;
    results["probability"] = {{"num", boost::multiprecision::numerator(p).str()},
                              {"den", boost::multiprecision::denominator(p).str()}};
    results["estimate"] = static_cast<double>(p);
    emit("montecarlo", inputs, results, true);
    return 0;
  }

  const std::uint64_t master = seed.value_or(master_seed_default());
  inputs["trials"] = trials;
  inputs["seed"] = master;
  inputs["threads"] = threads;
  const ProtocolRun run = estimate_sort_probability(n, *proto, trials, master, threads);
  json results;
  results["sorted_count"] = run.sorted_count;
  results["estimate"] = run.estimate();
  results["ci_lo"] = run.ci_lo;
  results["ci_hi"] = run.ci_hi;
  emit("montecarlo", inputs, results, false);
  return 0;
}

int run_conjecture(const std::string& id, const std::string& params_text) {
  const ConjectureParams params = parse_conjecture_params(params_text);
  const ConjectureReport rep = check_conjecture(id, params);

  json inputs;
  inputs["id"] = id;
  inputs["params"] = params_text;

  json results;
  results["applicable"] = rep.applicable;
  if (rep.hyp_min_drop) results["hyp_min_drop"] = *rep.hyp_min_drop;
  if (rep.hyp_max_rise) results["hyp_max_rise"] = *rep.hyp_max_rise;
  if (rep.balanced_sum) results["balanced_sum"] = *rep.balanced_sum;
  results["triple_consistent"] = rep.triple_consistent;
  if (rep.sorts) results["sorts"] = *rep.sorts;
  if (rep.conclusion_holds) results["conclusion_holds"] = *rep.conclusion_holds;
  if (rep.exhaustive) results["exhaustive"] = *rep.exhaustive;
  results["reachable_states"] = rep.reachable_states;
  results["stable_count"] = rep.stable_count;
  if (rep.max_inversions) results["max_inversions"] = *rep.max_inversions;
  if (rep.expected_max_inversions) results["expected_max_inversions"] = *rep.expected_max_inversions;
  if (!rep.note.empty()) results["note"] = rep.note;
  const bool exhaustive = rep.exhaustive.value_or(false);
  emit("conjecture", inputs, results, exhaustive);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chip-firing on path-like graphs: simulate, enumerate, verify"};
  app.require_subcommand(1);

  // stabilize
  std::string st_graph = "Z", st_strategy = "uniform_move";
  int st_n = 0;
  bool st_labeled = false, st_trace = false;
  std::optional<std::uint64_t> st_seed;
  std::int64_t st_trace_limit = 1 << 20;
  auto* stab = app.add_subcommand("stabilize", "run one stabilization");
  stab->add_option("--graph", st_graph, "graph spec, e.g. \"Z\", \"N\", \"Z loops=0:2 r=2\"");
  stab->add_option("--n", st_n, "chips stacked at the origin")->required();
  stab->add_flag("--labeled", st_labeled, "track chip labels");
  stab->add_option("--strategy", st_strategy, "firing strategy name");
  stab->add_option("--seed", st_seed, "strategy seed (default CHIPFIRE_SEED or 0)");
  stab->add_flag("--trace", st_trace, "record the move sequence");
  stab->add_option("--trace-limit", st_trace_limit, "cap on recorded moves");

  // enumerate
  std::string en_graph = "Z";
  int en_n = 0;
  std::int64_t en_max_states = 0;
  bool en_dump = false;
  auto* enu = app.add_subcommand("enumerate", "enumerate reachable stable states");
  enu->add_option("--graph", en_graph, "graph spec");
  enu->add_option("--n", en_n, "chips stacked at the origin")->required();
  enu->add_option("--max-states", en_max_states, "explored-state cap (0 = library default)");
  enu->add_flag("--dump-perms", en_dump, "list stable states as permutations");

  // verify
  std::string ve_suite;
  int ve_max_n = 40, ve_seeds = 20;
  std::int64_t ve_pairs = 1000, ve_walks = 200;
  std::optional<std::uint64_t> ve_seed;
  auto* ver = app.add_subcommand("verify", "run a verification suite");
  ver->add_option("--suite", ve_suite, "main|runtime|stabcover|bounds|typeb|loops|closedforms")
      ->required();
  ver->add_option("--max-n", ve_max_n, "largest chip count exercised");
  ver->add_option("--seeds", ve_seeds, "random seeds per randomized strategy");
  ver->add_option("--pairs", ve_pairs, "randomized cover pairs (stabcover)");
  ver->add_option("--walks", ve_walks, "rightward walks (stabcover)");
  ver->add_option("--seed", ve_seed, "master seed (default CHIPFIRE_SEED or 0)");

  // montecarlo
  int mc_n = 0, mc_threads = 1, mc_guard = 7;
  std::string mc_protocol = "uniform_move";
  std::int64_t mc_trials = 10000;
  std::optional<std::uint64_t> mc_seed;
  bool mc_exact = false;
  auto* mc = app.add_subcommand("montecarlo", "estimate or compute the sorting probability");
  mc->add_option("--n", mc_n, "chips stacked at the origin")->required();
  mc->add_option("--protocol", mc_protocol, "uniform_move|uniform_vertex_then_pair|uniform_sequence");
  mc->add_option("--trials", mc_trials, "sample size");
  mc->add_option("--seed", mc_seed, "master seed (default CHIPFIRE_SEED or 0)");
  mc->add_option("--threads", mc_threads, "worker threads");
  mc->add_flag("--exact", mc_exact, "exact rational by state-space sweep (ignores --trials)");
  mc->add_option("--guard", mc_guard, "largest n allowed for --exact");

  // conjecture
  std::string cj_id, cj_params;
  auto* cj = app.add_subcommand("conjecture", "evaluate a conjecture instance");
  cj->add_option("--id", cj_id, "loops|parallel|combined|inversions")->required();
  cj->add_option("--params", cj_params, "comma list, e.g. r=2,n=4 or s=-1:0:1,n=6");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help exits clean; any parse failure is a usage error
  }

  try {
    if (stab->parsed()) {
      return run_stabilize(st_graph, st_n, st_labeled, st_strategy, st_seed, st_trace, st_trace_limit);
    }
    if (enu->parsed()) return run_enumerate(en_graph, en_n, en_max_states, en_dump);
    if (ver->parsed()) return run_verify(ve_suite, ve_max_n, ve_seeds, ve_pairs, ve_walks, ve_seed);
    if (mc->parsed()) {
      return run_montecarlo(mc_n, mc_protocol, mc_trials, mc_seed, mc_threads, mc_exact, mc_guard);
    }
    if (cj->parsed()) return run_conjecture(cj_id, cj_params);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::cerr << "error: no subcommand\n";
  return 2;
}
