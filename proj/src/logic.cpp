#include <algorithm>
#include <map>
#include <set>

#include "hcnet/logic.hpp"

namespace hcnet {

bool operator==(const Formula& a, const Formula& b) {
  auto eq = [](const auto& x, const auto& y) { return (!x && !y) || (x && y && *x == *y); };
  return a.kind == b.kind && a.name == b.name && a.count == b.count && a.position == b.position &&
         eq(a.lhs, b.lhs) && eq(a.rhs, b.rhs) && eq(a.guard, b.guard);
}

bool operator==(const Guard& a, const Guard& b) {
  auto eq = [](const auto& x, const auto& y) { return (!x && !y) || (x && y && *x == *y); };
  return a.kind == b.kind && a.position == b.position && eq(a.formula, b.formula) &&
         eq(a.lhs, b.lhs) && eq(a.rhs, b.rhs);
}

FormulaPtr color_atom(std::string color) {
  Formula f;
  f.kind = FormulaKind::Color;
  f.name = std::move(color);
  return std::make_shared<const Formula>(std::move(f));
}

FormulaPtr const_atom(std::string constant) {
  Formula f;
  f.kind = FormulaKind::Const;
  f.name = std::move(constant);
  return std::make_shared<const Formula>(std::move(f));
}

FormulaPtr f_not(FormulaPtr a) {
  Formula f;
  f.kind = FormulaKind::Not;
  f.lhs = std::move(a);
  return std::make_shared<const Formula>(std::move(f));
}

FormulaPtr f_and(FormulaPtr a, FormulaPtr b) {
  Formula f;
  f.kind = FormulaKind::And;
  f.lhs = std::move(a);
  f.rhs = std::move(b);
  return std::make_shared<const Formula>(std::move(f));
}

FormulaPtr f_or(FormulaPtr a, FormulaPtr b) {
  Formula f;
  f.kind = FormulaKind::Or;
  f.lhs = std::move(a);
  f.rhs = std::move(b);
  return std::make_shared<const Formula>(std::move(f));
}

FormulaPtr exists_geq(int n, std::string relation, int position, GuardPtr guard) {
  Formula f;
  f.kind = FormulaKind::ExistsGeq;
  f.count = n;
  f.name = std::move(relation);
  f.position = position;
  f.guard = std::move(guard);
  return std::make_shared<const Formula>(std::move(f));
}

GuardPtr g_at(int position, FormulaPtr f) {
  Guard g;
  g.kind = GuardKind::At;
  g.position = position;
  g.formula = std::move(f);
  return std::make_shared<const Guard>(std::move(g));
}

GuardPtr g_not(GuardPtr a) {
  Guard g;
  g.kind = GuardKind::Not;
  g.lhs = std::move(a);
  return std::make_shared<const Guard>(std::move(g));
}

GuardPtr g_and(GuardPtr a, GuardPtr b) {
  Guard g;
  g.kind = GuardKind::And;
  g.lhs = std::move(a);
  g.rhs = std::move(b);
  return std::make_shared<const Guard>(std::move(g));
}

GuardPtr g_or(GuardPtr a, GuardPtr b) {
  Guard g;
  g.kind = GuardKind::Or;
  g.lhs = std::move(a);
  g.rhs = std::move(b);
  return std::make_shared<const Guard>(std::move(g));
}

GuardPtr g_conj(const std::vector<std::pair<int, FormulaPtr>>& per_position) {
  GuardPtr out;
  for (const auto& [j, f] : per_position) out = out ? g_and(out, g_at(j, f)) : g_at(j, f);
  return out;
}

LogicSignature signature_of(const RelationalHypergraph& graph, std::vector<std::string> colors) {
  LogicSignature sig;
  if (colors.empty()) {
    ColorId max_color = 0;
    for (ColorId c : graph.colors()) max_color = std::max(max_color, c);
    for (ColorId c = 0; c <= max_color; ++c) colors.push_back("c" + std::to_string(c));
  }
  sig.colors = std::move(colors);
  sig.relations = graph.relations();
  return sig;
}

namespace {

class Evaluator {
 public:
  Evaluator(const RelationalHypergraph& g, const LogicSignature& sig) : g_(g), sig_(sig) {
    for (NodeId v = 0; v < g.node_count(); ++v)
      if (g.color(v) >= sig.colors.size())
        throw LogicError(LogicErrc::ColorOutOfSignature,
                         "node " + std::to_string(v) + " has color id " + std::to_string(g.color(v)) +
                             " outside the signature");
  }

  const std::vector<char>& eval(const FormulaPtr& f) {
    if (!f) throw LogicError(LogicErrc::InvalidFormula, "null formula");
    auto it = memo_.find(f.get());
    if (it != memo_.end()) return it->second;
    std::vector<char> out = compute(*f);
    return memo_.emplace(f.get(), std::move(out)).first->second;
  }

 private:
  std::vector<char> compute(const Formula& f) {
    const std::size_t n = g_.node_count();
    std::vector<char> out(n, 0);
    switch (f.kind) {
      case FormulaKind::Color: {
        auto it = std::find(sig_.colors.begin(), sig_.colors.end(), f.name);
        if (it == sig_.colors.end()) throw LogicError(LogicErrc::UnknownColor, "unknown color '" + f.name + "'");
        const auto c = static_cast<ColorId>(it - sig_.colors.begin());
        for (NodeId v = 0; v < n; ++v) out[v] = g_.color(v) == c;
        break;
      }
      case FormulaKind::Const: {
        auto it = std::find_if(sig_.constants.begin(), sig_.constants.end(),
                               [&](const NamedConstant& c) { return c.name == f.name; });
        if (it == sig_.constants.end())
          throw LogicError(LogicErrc::UnknownConstant, "unknown constant '" + f.name + "'");
        if (it->node < n) out[it->node] = 1;
        break;
      }
      case FormulaKind::Not: {
        const auto& a = eval(f.lhs);
        for (NodeId v = 0; v < n; ++v) out[v] = !a[v];
        break;
      }
      case FormulaKind::And:
      case FormulaKind::Or: {
        const auto& a = eval(f.lhs);
        const auto& b = eval(f.rhs);
        for (NodeId v = 0; v < n; ++v)
          out[v] = f.kind == FormulaKind::And ? (a[v] && b[v]) : (a[v] || b[v]);
        break;
      }
      case FormulaKind::ExistsGeq: {
        auto rel = std::find_if(sig_.relations.begin(), sig_.relations.end(),
                                [&](const Relation& r) { return r.name == f.name; });
        if (rel == sig_.relations.end())
          throw LogicError(LogicErrc::UnknownRelation, "unknown relation '" + f.name + "'");
        check_guard_positions(f, rel->arity);
        auto graph_rel = g_.find_relation(f.name);
        if (!graph_rel) break;  // relation has no edges in this graph
        for (NodeId v = 0; v < n; ++v) {
          int count = 0;
          for (const auto& inc : g_.incidence(v)) {
            const HyperEdge& e = g_.edge(inc.edge);
            if (e.relation != *graph_rel || inc.position != f.position) continue;
            if (!f.guard || guard_holds(*f.guard, e)) ++count;
          }
          out[v] = count >= f.count;
        }
        break;
      }
    }
    return out;
  }

  bool guard_holds(const Guard& g, const HyperEdge& e) {
    switch (g.kind) {
      case GuardKind::At:
        return eval(g.formula)[e.nodes[static_cast<std::size_t>(g.position - 1)]] != 0;
      case GuardKind::Not:
        return !guard_holds(*g.lhs, e);
      case GuardKind::And:
        return guard_holds(*g.lhs, e) && guard_holds(*g.rhs, e);
      case GuardKind::Or:
        return guard_holds(*g.lhs, e) || guard_holds(*g.rhs, e);
    }
    return false;
  }

  void check_guard_positions(const Formula& f, int arity) {
    if (f.count < 1) throw LogicError(LogicErrc::InvalidFormula, "exists>=N needs N >= 1");
    if (f.position < 1 || f.position > arity)
      throw LogicError(LogicErrc::InvalidFormula,
                       "position " + std::to_string(f.position) + " outside 1.." + std::to_string(arity) +
                           " of relation '" + f.name + "'");
    std::vector<const Guard*> stack;
    if (f.guard) stack.push_back(f.guard.get());
    while (!stack.empty()) {
      const Guard* g = stack.back();
      stack.pop_back();
      if (g->kind == GuardKind::At) {
        if (g->position < 1 || g->position > arity || g->position == f.position)
          throw LogicError(LogicErrc::InvalidFormula,
                           "guard position " + std::to_string(g->position) + " invalid for '" + f.name +
                               "' at position " + std::to_string(f.position));
      } else {
        if (g->lhs) stack.push_back(g->lhs.get());
        if (g->rhs) stack.push_back(g->rhs.get());
      }
    }
  }

  const RelationalHypergraph& g_;
  const LogicSignature& sig_;
  std::map<const Formula*, std::vector<char>> memo_;
};

bool guard_is_conjunction(const GuardPtr& g) {
  if (!g) return true;
  switch (g->kind) {
    case GuardKind::At:
      return is_hgml_r(g->formula);
    case GuardKind::And:
      return guard_is_conjunction(g->lhs) && guard_is_conjunction(g->rhs);
    default:
      return false;
  }
}

void check_constants(const LogicSignature& sig) {
  std::set<NodeId> nodes;
  std::set<std::string> names;
  for (const auto& c : sig.constants) {
    if (!nodes.insert(c.node).second)
      throw LogicError(LogicErrc::InvalidConstants,
                       "constant '" + c.name + "' shares node " + std::to_string(c.node) + " with another");
    if (!names.insert(c.name).second)
      throw LogicError(LogicErrc::InvalidConstants, "constant '" + c.name + "' declared twice");
  }
}

}  // namespace

std::vector<char> eval_all(const RelationalHypergraph& graph, const LogicSignature& sig,
                           const FormulaPtr& formula) {
  Evaluator ev(graph, sig);
  return ev.eval(formula);
}

bool eval_formula(const RelationalHypergraph& graph, const LogicSignature& sig,
                  const FormulaPtr& formula, NodeId node) {
  if (node >= graph.node_count())
    throw GraphError(GraphErrc::NodeOutOfRange, "node " + std::to_string(node) + " out of range");
  return eval_all(graph, sig, formula)[node] != 0;
}

bool eval_formula_c(const RelationalHypergraph& graph, const LogicSignature& sig,
                    const FormulaPtr& formula, NodeId node) {
  check_constants(sig);
  return eval_formula(graph, sig, formula, node);
}

bool is_hgml_r(const FormulaPtr& f) {
  if (!f) return false;
  switch (f->kind) {
    case FormulaKind::Color:
    case FormulaKind::Const:
      return true;
    case FormulaKind::Not:
      return is_hgml_r(f->lhs);
    case FormulaKind::And:
    case FormulaKind::Or:
      return is_hgml_r(f->lhs) && is_hgml_r(f->rhs);
    case FormulaKind::ExistsGeq:
      return guard_is_conjunction(f->guard);
  }
  return false;
}

namespace {

bool guard_has_constants(const GuardPtr& g) {
  if (!g) return false;
  if (g->kind == GuardKind::At) return has_constants(g->formula);
  return guard_has_constants(g->lhs) || guard_has_constants(g->rhs);
}

int guard_depth(const GuardPtr& g) {
  if (!g) return 0;
  if (g->kind == GuardKind::At) return formula_depth(g->formula);
  return std::max(guard_depth(g->lhs), guard_depth(g->rhs));
}

}  // namespace

bool has_constants(const FormulaPtr& f) {
  if (!f) return false;
  switch (f->kind) {
    case FormulaKind::Const:
      return true;
    case FormulaKind::Color:
      return false;
    case FormulaKind::ExistsGeq:
      return guard_has_constants(f->guard);
    default:
      return has_constants(f->lhs) || has_constants(f->rhs);
  }
}

int formula_depth(const FormulaPtr& f) {
  if (!f) return 0;
  switch (f->kind) {
    case FormulaKind::Color:
    case FormulaKind::Const:
      return 0;
    case FormulaKind::ExistsGeq:
      return 1 + guard_depth(f->guard);
    default:
      return 1 + std::max(formula_depth(f->lhs), formula_depth(f->rhs));
  }
}

namespace {

int pick(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

FormulaPtr random_atom(std::mt19937_64& rng, const LogicSignature& sig, bool restricted) {
  if (!restricted && !sig.constants.empty() && pick(rng, 0, 3) == 0)
    return const_atom(sig.constants[static_cast<std::size_t>(pick(rng, 0, static_cast<int>(sig.constants.size()) - 1))].name);
  return color_atom(sig.colors[static_cast<std::size_t>(pick(rng, 0, static_cast<int>(sig.colors.size()) - 1))]);
}

GuardPtr random_guard(std::mt19937_64& rng, const LogicSignature& sig, int depth, int arity, int self,
                      bool restricted) {
  std::vector<std::pair<int, FormulaPtr>> parts;
  for (int j = 1; j <= arity; ++j)
    if (j != self && pick(rng, 0, 9) < 6) parts.push_back({j, random_formula(rng, sig, depth, restricted)});
  if (restricted || parts.size() < 2) {
    GuardPtr g = g_conj(parts);
    if (!restricted && g && pick(rng, 0, 2) == 0) g = g_not(g);
    return g;
  }
  GuardPtr g = g_at(parts[0].first, parts[0].second);
  for (std::size_t i = 1; i < parts.size(); ++i) {
    GuardPtr leaf = g_at(parts[i].first, parts[i].second);
    if (pick(rng, 0, 2) == 0) leaf = g_not(leaf);
    g = pick(rng, 0, 1) ? g_or(g, leaf) : g_and(g, leaf);
  }
  return g;
}

}  // namespace

FormulaPtr random_formula(std::mt19937_64& rng, const LogicSignature& sig, int depth, bool restricted) {
  if (sig.colors.empty()) throw LogicError(LogicErrc::UnknownColor, "signature has no colors");
  if (depth <= 0) return random_atom(rng, sig, restricted);
  switch (pick(rng, 0, 5)) {
    case 0:
      return random_atom(rng, sig, restricted);
    case 1:
      return f_not(random_formula(rng, sig, depth - 1, restricted));
    case 2:
      return f_and(random_formula(rng, sig, depth - 1, restricted), random_formula(rng, sig, depth - 1, restricted));
    case 3:
      return f_or(random_formula(rng, sig, depth - 1, restricted), random_formula(rng, sig, depth - 1, restricted));
    default: {
      const auto& rel = sig.relations[static_cast<std::size_t>(pick(rng, 0, static_cast<int>(sig.relations.size()) - 1))];
      const int i = pick(rng, 1, rel.arity);
      return exists_geq(pick(rng, 1, 3), rel.name, i,
                        random_guard(rng, sig, depth - 1, rel.arity, i, restricted));
    }
  }
}

}  // namespace hcnet
