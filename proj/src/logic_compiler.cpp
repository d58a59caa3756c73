#include <algorithm>
#include <map>

#include "hcnet/logic.hpp"

namespace hcnet {

namespace {

struct Entry {
  std::size_t row, col;
  std::int64_t value;
};

class Compiler {
 public:
  explicit Compiler(const LogicSignature& sig) : sig_(sig) {
    if (sig.colors.empty()) throw LogicError(LogicErrc::UnknownColor, "signature has no colors");
    for (const auto& r : sig.relations) max_arity_ = std::max(max_arity_, r.arity);
  }

  CompiledNetwork run(const FormulaPtr& root) {
    add(root);
    CompiledNetwork net;
    net.subformulas = std::move(subformulas_);
    net.colors = sig_.colors;
    net.relations = sig_.relations;
    const std::size_t L = net.subformulas.size();
    net.L = L;
    net.W0.assign(L * L, 0);
    net.b = std::move(bias_);
    net.Wr.assign(sig_.relations.size(), std::vector<std::int64_t>(L * L, 0));
    net.ar.assign(sig_.relations.size(), std::vector<std::int64_t>(L, 0));
    for (const auto& e : w0_) net.W0[e.row * L + e.col] = e.value;
    for (const auto& [r, entries] : wr_)
      for (const auto& e : entries) {
        net.Wr[r][e.row * L + e.col] = e.value;
        net.ar[r][e.row] = 1;
      }
    net.p.assign(static_cast<std::size_t>(max_arity_), std::vector<std::int64_t>(L, 3));
    for (const auto& [j, k] : positions_) net.p[static_cast<std::size_t>(j - 1)][k] = 1;
    return net;
  }

 private:
  std::size_t push(FormulaPtr f, std::int64_t bias) {
    subformulas_.push_back(std::move(f));
    bias_.push_back(bias);
    return subformulas_.size() - 1;
  }

  std::size_t add(const FormulaPtr& f) {
    switch (f->kind) {
      case FormulaKind::Color: {
        if (std::find(sig_.colors.begin(), sig_.colors.end(), f->name) == sig_.colors.end())
          throw LogicError(LogicErrc::UnknownColor, "unknown color '" + f->name + "'");
        const std::size_t l = push(f, 0);
        w0_.push_back({l, l, 1});
        return l;
      }
      case FormulaKind::Const:
        throw LogicError(LogicErrc::HasConstants, "constant atoms cannot be compiled");
      case FormulaKind::Not: {
        const std::size_t k = add(f->lhs);
        const std::size_t l = push(f, 1);
        w0_.push_back({l, k, -1});
        return l;
      }
      case FormulaKind::And: {
        const std::size_t j = add(f->lhs);
        const std::size_t k = add(f->rhs);
        const std::size_t l = push(f, -1);
        w0_.push_back({l, j, 1});
        w0_.push_back({l, k, 1});
        return l;
      }
      case FormulaKind::Or:
        return add(f_not(f_and(f_not(f->lhs), f_not(f->rhs))));
      case FormulaKind::ExistsGeq:
        return add_exists(f);
    }
    throw LogicError(LogicErrc::InvalidFormula, "unknown formula kind");
  }

  static void collect(const GuardPtr& g, std::map<int, FormulaPtr>& per_position) {
    if (!g) return;
    if (g->kind == GuardKind::At) {
      auto& slot = per_position[g->position];
      slot = slot ? f_and(slot, g->formula) : g->formula;
      return;
    }
    collect(g->lhs, per_position);
    collect(g->rhs, per_position);
  }

  std::size_t add_exists(const FormulaPtr& f) {
    auto rel = std::find_if(sig_.relations.begin(), sig_.relations.end(),
                            [&](const Relation& r) { return r.name == f->name; });
    if (rel == sig_.relations.end())
      throw LogicError(LogicErrc::UnknownRelation, "unknown relation '" + f->name + "'");
    const auto r = static_cast<std::size_t>(rel - sig_.relations.begin());
    if (f->count < 1) throw LogicError(LogicErrc::InvalidFormula, "exists>=N needs N >= 1");
    if (f->position < 1 || f->position > rel->arity)
      throw LogicError(LogicErrc::InvalidFormula, "position outside relation '" + f->name + "'");

    std::map<int, FormulaPtr> per_position;
    collect(f->guard, per_position);
    for (const auto& [j, g] : per_position)
      if (j < 1 || j > rel->arity || j == f->position)
        throw LogicError(LogicErrc::InvalidFormula, "guard position " + std::to_string(j) + " invalid");

    // Every bound position needs its own guard row, otherwise an edge seen at
    // a different position is not rejected. Missing guards get a tautology.
    std::vector<std::pair<int, std::size_t>> guard_rows;
    for (int j = 1; j <= rel->arity; ++j) {
      if (j == f->position) continue;
      auto it = per_position.find(j);
      FormulaPtr g = it != per_position.end() ? it->second : tautology();
      guard_rows.push_back({j, add(g)});
    }
    const std::size_t l = push(f, -static_cast<std::int64_t>(f->count) + 1);
    auto& entries = wr_[r];
    for (const auto& [j, k] : guard_rows) {
      entries.push_back({l, k, 1});
      positions_.push_back({j, k});
    }
    // Rows with no guards still need a_r set; an entry of value 0 marks it.
    if (guard_rows.empty()) entries.push_back({l, l, 0});
    return l;
  }

  FormulaPtr tautology() const {
    auto a = color_atom(sig_.colors.front());
    return f_not(f_and(a, f_not(a)));
  }

  const LogicSignature& sig_;
  int max_arity_ = 0;
  std::vector<FormulaPtr> subformulas_;
  std::vector<std::int64_t> bias_;
  std::vector<Entry> w0_;
  std::map<std::size_t, std::vector<Entry>> wr_;
  std::vector<std::pair<int, std::size_t>> positions_;
};

std::int64_t trelu(std::int64_t x) { return std::min<std::int64_t>(std::max<std::int64_t>(0, x), 1); }

}  // namespace

CompiledNetwork compile_hgml_r(const FormulaPtr& formula, const LogicSignature& sig) {
  if (!formula) throw LogicError(LogicErrc::InvalidFormula, "null formula");
  if (!is_hgml_r(formula))
    throw LogicError(LogicErrc::NotRestricted, "formula has a guard that is not a conjunction");
  if (has_constants(formula))
    throw LogicError(LogicErrc::HasConstants, "constant atoms cannot be compiled");
  return Compiler(sig).run(formula);
}

std::vector<std::vector<std::int64_t>> run_compiled(const CompiledNetwork& net,
                                                    const RelationalHypergraph& graph) {
  const std::size_t L = net.L;
  const std::size_t n = graph.node_count();
  for (NodeId v = 0; v < n; ++v)
    if (graph.color(v) >= net.colors.size())
      throw LogicError(LogicErrc::ColorOutOfSignature,
                       "node " + std::to_string(v) + " has color id " + std::to_string(graph.color(v)) +
                           " outside the signature");

  // Map graph relations to network relations by name; unmatched ones have
  // all-zero rows and contribute nothing.
  std::vector<int> rel_of(graph.relation_count(), -1);
  for (const auto& r : graph.relations())
    for (std::size_t s = 0; s < net.relations.size(); ++s)
      if (net.relations[s].name == r.name) {
        if (net.relations[s].arity != r.arity)
          throw LogicError(LogicErrc::UnknownRelation, "relation '" + r.name + "' has a different arity");
        rel_of[r.id] = static_cast<int>(s);
      }

  // Sparse views of the dense parameters.
  struct Nz {
    std::size_t col;
    std::int64_t value;
  };
  auto sparse_rows = [L](const std::vector<std::int64_t>& m) {
    std::vector<std::vector<Nz>> rows(L);
    for (std::size_t i = 0; i < L; ++i)
      for (std::size_t k = 0; k < L; ++k)
        if (m[i * L + k] != 0) rows[i].push_back({k, m[i * L + k]});
    return rows;
  };
  const auto w0 = sparse_rows(net.W0);
  std::vector<std::vector<std::vector<Nz>>> wr;
  std::vector<std::vector<std::size_t>> wr_cols;
  for (const auto& m : net.Wr) {
    wr.push_back(sparse_rows(m));
    std::vector<std::size_t> cols;
    for (const auto& row : wr.back())
      for (const auto& nz : row) cols.push_back(nz.col);
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    wr_cols.push_back(std::move(cols));
  }

  std::vector<std::vector<std::int64_t>> h(n, std::vector<std::int64_t>(L, 0));
  for (std::size_t l = 0; l < L; ++l) {
    const auto& f = net.subformulas[l];
    if (f->kind != FormulaKind::Color) continue;
    const auto c = static_cast<ColorId>(std::find(net.colors.begin(), net.colors.end(), f->name) - net.colors.begin());
    for (NodeId v = 0; v < n; ++v) h[v][l] = graph.color(v) == c;
  }

  std::vector<std::vector<std::int64_t>> next(n, std::vector<std::int64_t>(L, 0));
  std::vector<std::int64_t> z(L), prod(L);
  for (std::size_t layer = 0; layer < L; ++layer) {
    for (NodeId v = 0; v < n; ++v) {
      for (std::size_t i = 0; i < L; ++i) {
        std::int64_t s = net.b[i];
        for (const auto& nz : w0[i]) s += nz.value * h[v][nz.col];
        z[i] = s;
      }
      for (const auto& inc : graph.incidence(v)) {
        const HyperEdge& e = graph.edge(inc.edge);
        const int r = rel_of[e.relation];
        if (r < 0) continue;
        const auto rs = static_cast<std::size_t>(r);
        for (std::size_t k : wr_cols[rs]) {
          std::int64_t p = 1;
          for (std::size_t j = 0; j < e.nodes.size(); ++j) {
            if (static_cast<int>(j) + 1 == inc.position) continue;
            p *= net.p[j][k] - h[e.nodes[j]][k];
          }
          prod[k] = p;
        }
        for (std::size_t i = 0; i < L; ++i) {
          if (net.ar[rs][i] == 0 && wr[rs][i].empty()) continue;
          std::int64_t s = 0;
          for (const auto& nz : wr[rs][i]) s += nz.value * prod[nz.col];
          z[i] += net.ar[rs][i] - trelu(s);
        }
      }
      for (std::size_t i = 0; i < L; ++i) next[v][i] = trelu(z[i]);
    }
    std::swap(h, next);
  }
  return h;
}

}  // namespace hcnet
