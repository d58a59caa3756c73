#include "hcnet/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "hcnet/checkpoint.hpp"
#include "hcnet/dataset.hpp"
#include "hcnet/evalrank.hpp"
#include "hcnet/logic.hpp"
#include "hcnet/refine.hpp"
#include "hcnet/synth.hpp"
#include "hcnet/synth_experiment.hpp"
#include "hcnet/theorems.hpp"
#include "hcnet/train.hpp"

namespace hcnet {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Raised after parsing for flag combinations CLI11 cannot express.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const char* graph_errc_name(GraphErrc c) {
  switch (c) {
    case GraphErrc::ArityMismatch: return "ArityMismatch";
    case GraphErrc::NodeOutOfRange: return "NodeOutOfRange";
    case GraphErrc::PositionOutOfRange: return "PositionOutOfRange";
    case GraphErrc::UnknownRelation: return "UnknownRelation";
    case GraphErrc::NotABijection: return "NotABijection";
    case GraphErrc::InvalidRelation: return "InvalidRelation";
    case GraphErrc::QueryMismatch: return "QueryMismatch";
    case GraphErrc::ParseError: return "ParseError";
    case GraphErrc::InconsistentArity: return "InconsistentArity";
    case GraphErrc::FactNotFound: return "FactNotFound";
    case GraphErrc::IoError: return "IoError";
  }
  return "GraphError";
}

int default_threads() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw GraphError(GraphErrc::IoError, "cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw GraphError(GraphErrc::ParseError, path.string() + ": " + e.what());
  }
}

void write_json_file(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw GraphError(GraphErrc::IoError, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

/// `key=value`; the value is parsed as JSON when possible, else kept as a string.
void apply_overrides(json& j, const std::vector<std::string>& sets) {
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--set expects key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
    j[key] = json::parse(value, nullptr, false).is_discarded() ? json(value) : json::parse(value);
  }
}

// HyperCycle dataset layout: root/suite.json plus root/<split>/n<N>_k<K>/,
// each a dataset directory whose train.txt holds the cycle edges, test.txt
// the r0 queries and negatives.txt the paired r0 negatives.

std::string cycle_dir_name(int n, int k) { return "n" + std::to_string(n) + "_k" + std::to_string(k); }

Dataset cycle_dataset(int n, int k) {
  Dataset d;
  d.graph = hypercycle(n, k);
  for (int i = 0; i < n; ++i) d.entity_names.push_back("x" + std::to_string(i));
  d.train = d.graph.edges();
  d.test = opposite_queries(n).positives;
  return d;
}

bool is_cycle_root(const fs::path& dir) { return fs::exists(dir / "suite.json"); }

/// Graph directories of a split directory, in name order.
std::vector<fs::path> cycle_graph_dirs(const fs::path& split_dir) {
  if (!fs::is_directory(split_dir))
    throw GraphError(GraphErrc::ParseError, "split directory '" + split_dir.string() + "' not found");
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(split_dir))
    if (entry.is_directory() && fs::exists(entry.path() / "negatives.txt")) dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty()) throw GraphError(GraphErrc::ParseError, "no HyperCycle graphs under " + split_dir.string());
  return dirs;
}

bool is_cycle_split(const fs::path& dir) {
  if (!fs::is_directory(dir) || fs::exists(dir / "train.txt")) return false;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_directory() && fs::exists(entry.path() / "negatives.txt")) return true;
  return false;
}

RelationalHypergraph parse_cycle_arg(const std::string& spec) {
  int n = 0, k = 0;
  char comma = 0;
  std::istringstream is(spec);
  if (!(is >> n >> comma >> k) || comma != ',') throw UsageError("--hypercycle expects N,K");
  return hypercycle(n, k);
}

/// The graph a command operates on, with node names.
struct LoadedGraph {
  RelationalHypergraph graph;
  std::vector<std::string> names;
  std::vector<std::string> colors;  // color names, index = ColorId
};

LoadedGraph load_graph(const std::string& data, const std::string& cycle, const std::string& colors_file) {
  LoadedGraph lg;
  if (!data.empty() && !cycle.empty()) throw UsageError("give either --data or --hypercycle");
  if (!data.empty()) {
    auto d = load_dataset(data);
    lg.graph = std::move(d.graph);
    lg.names = std::move(d.entity_names);
  } else if (!cycle.empty()) {
    lg.graph = parse_cycle_arg(cycle);
    for (std::size_t i = 0; i < lg.graph.node_count(); ++i) lg.names.push_back("x" + std::to_string(i));
  } else {
    throw UsageError("one of --data or --hypercycle is required");
  }
  if (colors_file.empty()) return lg;

  // node<TAB>color lines; unlisted nodes get the color "none".
  std::ifstream in(colors_file);
  if (!in) throw GraphError(GraphErrc::IoError, "cannot read " + colors_file);
  std::map<std::string, NodeId> by_name;
  for (std::size_t v = 0; v < lg.names.size(); ++v) by_name[lg.names[v]] = static_cast<NodeId>(v);
  lg.colors = {"none"};
  std::vector<ColorId> colors(lg.graph.node_count(), 0);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    const auto it = tab == std::string::npos ? by_name.end() : by_name.find(line.substr(0, tab));
    if (it == by_name.end())
      throw GraphError(GraphErrc::ParseError, colors_file + ":" + std::to_string(lineno) + ": unknown node or missing tab");
    const std::string color = line.substr(tab + 1);
    auto pos = std::find(lg.colors.begin(), lg.colors.end(), color);
    if (pos == lg.colors.end()) pos = lg.colors.insert(lg.colors.end(), color);
    colors[it->second] = static_cast<ColorId>(pos - lg.colors.begin());
  }
  lg.graph = RelationalHypergraph::build(lg.graph.relations(), lg.graph.edges(), lg.graph.node_count(), colors);
  return lg;
}

NodeId node_by_name(const LoadedGraph& lg, const std::string& name) {
  const auto it = std::find(lg.names.begin(), lg.names.end(), name);
  if (it == lg.names.end()) throw GraphError(GraphErrc::NodeOutOfRange, "unknown node '" + name + "'");
  return static_cast<NodeId>(it - lg.names.begin());
}

// ---- generate-hypercycle ------------------------------------------------

struct GenerateArgs {
  std::string out;
  std::vector<int> ns{8, 12, 16, 20};
  std::vector<int> ks{3, 4, 5, 6, 7};
  double ratio = 0.7;
  std::uint64_t seed = 0;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
  const auto suite = hypercycle_suite(a.ns, a.ks, a.ratio, a.seed);
  const fs::path root(a.out);
  json listing{{"ns", a.ns}, {"ks", a.ks}, {"ratio", a.ratio}, {"seed", a.seed}};
  for (const auto& [split, specs] : {std::pair{"train", &suite.train}, std::pair{"test", &suite.test}}) {
    json entries = json::array();
    for (const auto& s : *specs) {
      const fs::path dir = root / split / cycle_dir_name(s.n, s.k);
      fs::create_directories(dir);
      const Dataset d = cycle_dataset(s.n, s.k);
      write_dataset(d, dir);
      write_facts(dir / "negatives.txt", opposite_queries(s.n).negatives, d.graph.relations(), d.entity_names);
      entries.push_back({{"n", s.n}, {"k", s.k}, {"dir", (fs::path(split) / cycle_dir_name(s.n, s.k)).string()}});
    }
    listing[split] = entries;
  }
  write_json_file(root / "suite.json", listing);
  out << "wrote " << suite.train.size() << " train and " << suite.test.size() << " test graphs to " << a.out << '\n';
  return kExitOk;
}

// ---- refine --------------------------------------------------------------

struct RefineArgs {
  std::string data, cycle, colors, relation;
  std::vector<std::string> given;
  int target = 1;
  int rounds = kUntilStable;
};

int cmd_refine(const RefineArgs& a, std::ostream& out) {
  const auto lg = load_graph(a.data, a.cycle, a.colors);
  std::vector<NodeColoring> run;
  if (!a.relation.empty()) {
    const auto r = lg.graph.find_relation(a.relation);
    if (!r) throw GraphError(GraphErrc::UnknownRelation, "unknown relation '" + a.relation + "'");
    Query q{*r, {}, a.target};
    for (const auto& name : a.given) q.given.push_back(node_by_name(lg, name));
    validate_query(lg.graph, q);
    run = conditional_run(lg.graph, q, a.rounds);
  } else {
    if (!a.given.empty()) throw UsageError("--given needs --relation");
    run = hrwl1_run(lg.graph, NodeColoring{lg.graph.colors(), 0}, a.rounds);
  }
  for (const auto& c : run)
    for (std::size_t v = 0; v < c.colors.size(); ++v) out << c.round << '\t' << lg.names[v] << '\t' << c.colors[v] << '\n';
  return kExitOk;
}

// ---- logic ---------------------------------------------------------------

struct LogicArgs {
  std::string data, cycle, colors, formula;
};

LogicSignature signature_for(const LoadedGraph& lg) { return signature_of(lg.graph, lg.colors); }

int cmd_logic_eval(const LogicArgs& a, std::ostream& out) {
  const auto lg = load_graph(a.data, a.cycle, a.colors);
  const auto f = parse_formula(a.formula);
  const auto truth = eval_all(lg.graph, signature_for(lg), f);
  for (std::size_t v = 0; v < truth.size(); ++v) out << lg.names[v] << '\t' << int(truth[v]) << '\n';
  return kExitOk;
}

int cmd_logic_compile(const LogicArgs& a, std::ostream& out) {
  const auto lg = load_graph(a.data, a.cycle, a.colors);
  const auto net = compile_hgml_r(parse_formula(a.formula), signature_for(lg));
  json subs = json::array();
  for (const auto& s : net.subformulas) subs.push_back(to_string(s));
  json rels = json::array();
  for (const auto& r : net.relations) rels.push_back({{"name", r.name}, {"arity", r.arity}});
  const auto outputs = run_compiled(net, lg.graph);
  json values = json::object();
  for (std::size_t v = 0; v < outputs.size(); ++v) values[lg.names[v]] = outputs[v];
  out << json{{"subformulas", subs}, {"L", net.L},   {"colors", net.colors}, {"relations", rels},
              {"W0", net.W0},        {"Wr", net.Wr}, {"ar", net.ar},         {"b", net.b},
              {"p", net.p},          {"outputs", values}}
             .dump(2)
      << '\n';
  return kExitOk;
}

// ---- train ---------------------------------------------------------------

struct TrainArgs {
  std::string config, data, out, log;
  std::vector<std::string> sets;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 0;
};

TrainConfig hypercycle_defaults() {
  const HyperCycleRunConfig h;
  TrainConfig c;
  c.model = h.model;
  c.hidden = h.hidden;
  c.layers = h.layers;
  c.lr = h.lr;
  c.epochs = h.epochs;
  c.batch_size = h.batch_size;
  c.mode = h.mode;
  c.pe = h.pe;
  c.layer_norm = h.layer_norm;
  c.skip = h.skip;
  c.dropout = 0.0;
  return c;
}

std::vector<RelationalHypergraph> load_cycle_graphs(const fs::path& split_dir) {
  std::vector<RelationalHypergraph> graphs;
  for (const auto& dir : cycle_graph_dirs(split_dir)) graphs.push_back(load_dataset(dir).graph);
  return graphs;
}

int cmd_train(const TrainArgs& a, std::ostream& out) {
  const fs::path data(a.data);
  const bool cycles = is_cycle_root(data);
  json cj = to_json(cycles ? hypercycle_defaults() : TrainConfig{});
  cj["threads"] = default_threads();
  if (!a.config.empty()) cj.update(read_json_file(a.config));
  apply_overrides(cj, a.sets);
  if (a.seed_given) cj["seed"] = a.seed;
  if (a.threads > 0) cj["threads"] = a.threads;
  const TrainConfig cfg = train_config_from_json(cj);

  const fs::path ckpt(a.out);
  if (ckpt.has_parent_path()) fs::create_directories(ckpt.parent_path());
  const fs::path log_path = a.log.empty() ? fs::path(a.out + ".log.jsonl") : fs::path(a.log);
  std::ofstream log(log_path, std::ios::app);
  if (!log) throw GraphError(GraphErrc::IoError, "cannot write " + log_path.string());

  json echo{{"command", "train"},
            {"task", cycles ? "hypercycle" : "link-prediction"},
            {"data", fs::absolute(data).string()},
            {"train_config", to_json(cfg)}};
  json summary;
  if (cycles) {
    const auto graphs = load_cycle_graphs(data / "train");
    HyperCycleRunConfig h;
    h.model = cfg.model;
    h.hidden = cfg.hidden;
    h.layers = cfg.layers;
    h.lr = cfg.lr;
    h.epochs = cfg.epochs;
    h.batch_size = cfg.batch_size;
    h.mode = cfg.mode;
    h.pe = cfg.pe;
    h.layer_norm = cfg.layer_norm;
    h.skip = cfg.skip;
    h.seed = cfg.seed;
    h.threads = cfg.threads;
    h.ks.clear();
    for (const auto& g : graphs) h.ks.push_back(g.max_arity());
    std::vector<double> losses;
    const ModelParams model = train_on_cycles(graphs, h, &losses, &log);
    save_checkpoint(a.out, model, cfg.seed, echo);
    summary = {{"epochs", losses.size()},
               {"final_loss", losses.empty() ? json(nullptr) : json(losses.back())},
               {"train_accuracy", cycle_accuracy(graphs, model)}};
  } else {
    const Dataset d = load_dataset(data);
    FitOptions fo;
    fo.log = &log;
    fo.eval.threads = cfg.threads;
    fo.eval.seed = cfg.seed;
    const FitResult fr = fit(d, cfg, fo);
    save_checkpoint(a.out, fr.model, cfg.seed, echo);
    summary = {{"epochs", fr.log.size()},
               {"final_loss", fr.log.empty() ? json(nullptr) : json(fr.log.back().loss)},
               {"best_epoch", fr.best_epoch},
               {"best_val_mrr", fr.best_val_mrr >= 0 ? json(fr.best_val_mrr) : json(nullptr)}};
  }
  echo["log"] = log_path.string();
  write_json_file(a.out + ".config.json", echo);
  summary["checkpoint"] = a.out;
  out << summary.dump() << '\n';
  return kExitOk;
}

// ---- evaluate ------------------------------------------------------------

struct EvaluateArgs {
  std::string checkpoint, data, split = "test", report;
  int negatives = 0;
  int threads = 0;
  std::uint64_t seed = 0;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const Checkpoint ck = load_checkpoint(a.checkpoint);
  EvalOptions eo;
  eo.negatives = a.negatives;
  eo.seed = a.seed;
  eo.threads = a.threads > 0 ? a.threads : default_threads();
  const fs::path data(a.data);
  json report;
  if (is_cycle_root(data) || is_cycle_split(data)) {
    const fs::path split_dir = is_cycle_root(data) ? data / a.split : data;
    std::vector<RelationalHypergraph> graphs;
    std::vector<RankingOutcome> outcomes;
    for (const auto& dir : cycle_graph_dirs(split_dir)) {
      const Dataset d = load_dataset(dir);
      std::vector<RankingOutcome> part;
      evaluate_model(d.graph, d.test, FactSet(d.test), ck.model, eo, &part);
      outcomes.insert(outcomes.end(), part.begin(), part.end());
      graphs.push_back(d.graph);
    }
    std::size_t pairs = 0;
    const double acc = cycle_accuracy(graphs, ck.model, &pairs);
    report = to_json(aggregate(outcomes));
    report["task"] = "hypercycle";
    report["accuracy"] = acc;
    report["pairs"] = pairs;
    report["graphs"] = graphs.size();
  } else {
    const Dataset d = load_dataset(data);
    const auto& facts = a.split == "valid" ? d.valid : d.test;
    const auto all = d.all_facts();
    report = to_json(evaluate_model(d.graph, facts, FactSet(all), ck.model, eo));
    report["task"] = "link-prediction";
  }
  report["split"] = a.split;
  report["checkpoint"] = a.checkpoint;
  report["negatives"] = a.negatives;
  if (!a.report.empty()) write_json_file(a.report, report);
  out << report.dump(2) << '\n';
  return kExitOk;
}

// ---- checks --------------------------------------------------------------

void print_suite(const SuiteResult& r, std::ostream& out) {
  out << r.name << '\t' << (r.pass ? "PASS" : "FAIL") << '\t' << r.detail << '\n';
}

int cmd_gradcheck(std::uint64_t seed, int instances, double tolerance, std::ostream& out) {
  const auto r = gradcheck_suite(seed, instances, tolerance);
  print_suite(r, out);
  return r.pass ? kExitOk : kExitDomainError;
}

int cmd_theorems(std::uint64_t seed, bool as_json, std::ostream& out) {
  const auto results = run_all_suites(seed);
  bool ok = true;
  json j = json::array();
  for (const auto& r : results) {
    ok = ok && r.pass;
    if (as_json)
      j.push_back(to_json(r));
    else
      print_suite(r, out);
  }
  if (as_json) out << j.dump(2) << '\n';
  return ok ? kExitOk : kExitDomainError;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hypergraph link prediction toolkit"};
  app.name("hcnet");
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate-hypercycle", "Write the HyperCycle suite as dataset directories");
  g->add_option("--out", gen.out, "Output root")->required();
  g->add_option("--ns", gen.ns, "Cycle lengths")->delimiter(',')->capture_default_str();
  g->add_option("--ks", gen.ks, "Edge arities")->delimiter(',')->capture_default_str();
  g->add_option("--ratio", gen.ratio, "Fraction of graphs in the train split")->capture_default_str();
  g->add_option("--seed", gen.seed, "Split seed")->capture_default_str();

  RefineArgs ref;
  auto* r = app.add_subcommand("refine", "Print color refinement rounds as round<TAB>node<TAB>color");
  r->add_option("--data", ref.data, "Dataset directory (train facts form the graph)");
  r->add_option("--hypercycle", ref.cycle, "Use the HyperCycle graph N,K");
  r->add_option("--colors", ref.colors, "node<TAB>color file for the initial coloring");
  r->add_option("--relation", ref.relation, "Query relation; selects the conditional test");
  r->add_option("--given", ref.given, "Given nodes in position order")->delimiter(',');
  r->add_option("--target", ref.target, "Target position (1-based)")->capture_default_str();
  r->add_option("--rounds", ref.rounds, "Rounds; -1 iterates hrwl1 to a stable partition")->capture_default_str();

  LogicArgs lg;
  auto* l = app.add_subcommand("logic", "Evaluate or compile hypergraph modal logic formulas");
  l->require_subcommand(1);
  auto add_logic_opts = [&](CLI::App* c) {
    c->add_option("--formula", lg.formula, "Formula text")->required();
    c->add_option("--data", lg.data, "Dataset directory");
    c->add_option("--hypercycle", lg.cycle, "Use the HyperCycle graph N,K");
    c->add_option("--colors", lg.colors, "node<TAB>color file");
  };
  auto* le = l->add_subcommand("eval", "Print node<TAB>0|1 for every node");
  add_logic_opts(le);
  auto* lc = l->add_subcommand("compile", "Print the compiled integer network and its outputs as JSON");
  add_logic_opts(lc);

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Train a model and write a checkpoint");
  t->add_option("--config", tr.config, "JSON file with TrainConfig keys");
  t->add_option("--data", tr.data, "Dataset directory or HyperCycle root")->required();
  t->add_option("--out", tr.out, "Checkpoint path")->required();
  t->add_option("--log", tr.log, "JSON-lines epoch log (default: <out>.log.jsonl)");
  t->add_option("--set", tr.sets, "Override a config key: key=value");
  auto* seed_opt = t->add_option("--seed", tr.seed, "Seed (overrides the config)");
  t->add_option("--threads", tr.threads, "Workers (default: all cores)");

  EvaluateArgs ev;
  auto* e = app.add_subcommand("evaluate", "Filtered ranking metrics for a checkpoint");
  e->add_option("--checkpoint", ev.checkpoint, "Checkpoint path")->required();
  e->add_option("--data", ev.data, "Dataset directory, HyperCycle root or split")->required();
  e->add_option("--split", ev.split, "valid or test")->check(CLI::IsMember({"valid", "test"}))->capture_default_str();
  e->add_option("--negatives", ev.negatives, "Sampled negatives per query; 0 ranks all candidates")->capture_default_str();
  e->add_option("--seed", ev.seed, "Negative sampling seed")->capture_default_str();
  e->add_option("--threads", ev.threads, "Workers (default: all cores)");
  e->add_option("--report", ev.report, "Also write the report to this file");

  std::uint64_t gc_seed = 0;
  int gc_instances = 10;
  double gc_tol = 1e-4;
  auto* gcmd = app.add_subcommand("gradcheck", "Compare backward with central differences");
  gcmd->add_option("--seed", gc_seed)->capture_default_str();
  gcmd->add_option("--instances", gc_instances)->capture_default_str();
  gcmd->add_option("--tolerance", gc_tol)->capture_default_str();

  std::uint64_t th_seed = 0;
  bool th_json = false;
  auto* th = app.add_subcommand("theorem-suite", "Run the exact and statistical property suites");
  th->add_option("--seed", th_seed)->capture_default_str();
  th->add_flag("--json", th_json, "Print JSON instead of one line per suite");

  auto usage = [&](const std::string& msg) {
    const CLI::App* deepest = &app;
    for (auto subs = app.get_subcommands(); !subs.empty(); subs = subs.front()->get_subcommands())
      deepest = subs.front();
    err << "error: " << msg << "\n\n" << deepest->help();
    return kExitUsageError;
  };

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    const CLI::App* deepest = &app;
    for (auto subs = app.get_subcommands(); !subs.empty(); subs = subs.front()->get_subcommands())
      deepest = subs.front();
    out << deepest->help();
    return kExitOk;
  } catch (const CLI::ParseError& ex) {
    return usage(ex.what());
  }

  try {
    if (g->parsed()) return cmd_generate(gen, out);
    if (r->parsed()) return cmd_refine(ref, out);
    if (le->parsed()) return cmd_logic_eval(lg, out);
    if (lc->parsed()) return cmd_logic_compile(lg, out);
    if (t->parsed()) {
      tr.seed_given = seed_opt->count() > 0;
      return cmd_train(tr, out);
    }
    if (e->parsed()) return cmd_evaluate(ev, out);
    if (gcmd->parsed()) return cmd_gradcheck(gc_seed, gc_instances, gc_tol, out);
    if (th->parsed()) return cmd_theorems(th_seed, th_json, out);
  } catch (const UsageError& ex) {
    return usage(ex.what());
  } catch (const GraphError& ex) {
    err << "error: " << graph_errc_name(ex.code()) << ": " << ex.what() << '\n';
    return kExitDomainError;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitDomainError;
  }
  return usage("no subcommand");
}

}  // namespace hcnet
