#ifndef HCNET_LOGIC_HPP
#define HCNET_LOGIC_HPP

#include <cstdint>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "hcnet/hypergraph.hpp"

namespace hcnet {

enum class LogicErrc {
  UnknownColor,
  UnknownRelation,
  UnknownConstant,
  InvalidConstants,
  InvalidFormula,
  NotRestricted,
  HasConstants,
  ColorOutOfSignature,
  ParseError,
};

class LogicError : public std::runtime_error {
 public:
  LogicError(LogicErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  LogicErrc code() const noexcept { return code_; }

 private:
  LogicErrc code_;
};

struct Formula;
struct Guard;
using FormulaPtr = std::shared_ptr<const Formula>;
using GuardPtr = std::shared_ptr<const Guard>;

enum class FormulaKind { Color, Const, Not, And, Or, ExistsGeq };

/// Node formula with one free variable x.
struct Formula {
  FormulaKind kind = FormulaKind::Color;
  std::string name;  // color, constant or relation name
  int count = 1;     // N of exists>=N
  int position = 1;  // position of x in the relation
  FormulaPtr lhs, rhs;
  GuardPtr guard;    // null means "true"

  friend bool operator==(const Formula& a, const Formula& b);
};

enum class GuardKind { At, Not, And, Or };

/// Boolean combination of unary formulas over the bound positions.
/// At(j, phi) means phi holds at the node in position j.
struct Guard {
  GuardKind kind = GuardKind::At;
  int position = 0;
  FormulaPtr formula;
  GuardPtr lhs, rhs;

  friend bool operator==(const Guard& a, const Guard& b);
};

FormulaPtr color_atom(std::string color);
FormulaPtr const_atom(std::string constant);
FormulaPtr f_not(FormulaPtr f);
FormulaPtr f_and(FormulaPtr a, FormulaPtr b);
FormulaPtr f_or(FormulaPtr a, FormulaPtr b);
FormulaPtr exists_geq(int n, std::string relation, int position, GuardPtr guard = nullptr);
GuardPtr g_at(int position, FormulaPtr f);
GuardPtr g_not(GuardPtr g);
GuardPtr g_and(GuardPtr a, GuardPtr b);
GuardPtr g_or(GuardPtr a, GuardPtr b);
/// Conjunction of per-position guards; null when the list is empty.
GuardPtr g_conj(const std::vector<std::pair<int, FormulaPtr>>& per_position);

struct NamedConstant {
  std::string name;
  NodeId node = 0;
};

struct LogicSignature {
  std::vector<std::string> colors;  // index = ColorId
  std::vector<Relation> relations;
  std::vector<NamedConstant> constants;
};

/// Relations of `graph` plus the given color names (default "c0", "c1", ...).
LogicSignature signature_of(const RelationalHypergraph& graph, std::vector<std::string> colors = {});

/// Satisfaction at one node.
bool eval_formula(const RelationalHypergraph& graph, const LogicSignature& sig,
                  const FormulaPtr& formula, NodeId node);
/// Satisfaction at every node. ExistsGeq counts incidence pairs, so duplicate
/// facts count separately.
std::vector<char> eval_all(const RelationalHypergraph& graph, const LogicSignature& sig,
                           const FormulaPtr& formula);
/// As eval_formula, but rejects signatures whose constants collide.
bool eval_formula_c(const RelationalHypergraph& graph, const LogicSignature& sig,
                    const FormulaPtr& formula, NodeId node);

bool is_hgml_r(const FormulaPtr& formula);
bool has_constants(const FormulaPtr& formula);
int formula_depth(const FormulaPtr& formula);

/// Integer network computing every subformula of a restricted formula.
struct CompiledNetwork {
  /// phi_1..phi_L in post-order: every subformula precedes its parents.
  std::vector<FormulaPtr> subformulas;
  std::vector<std::string> colors;
  std::vector<Relation> relations;
  std::size_t L = 0;
  std::vector<std::int64_t> W0;               // L x L, row-major
  std::vector<std::vector<std::int64_t>> Wr;  // per relation, L x L
  std::vector<std::vector<std::int64_t>> ar;  // per relation, L
  std::vector<std::int64_t> b;                // L
  std::vector<std::vector<std::int64_t>> p;   // p[j-1] for positions 1..max arity, entries in {1, 3}

  std::size_t root() const { return L - 1; }
};

/// Throws LogicError{NotRestricted} unless is_hgml_r, {HasConstants} for
/// constant atoms. Or is expanded to not/and; guard positions without a
/// formula receive a tautology.
CompiledNetwork compile_hgml_r(const FormulaPtr& formula, const LogicSignature& sig);

/// Features after all L layers: out[v][p] is 1 iff subformulas[p] holds at v.
std::vector<std::vector<std::int64_t>> run_compiled(const CompiledNetwork& net,
                                                    const RelationalHypergraph& graph);

FormulaPtr parse_formula(const std::string& text);
std::string to_string(const FormulaPtr& formula);

/// Random formula over `sig` with depth at most `depth`. Restricted formulas
/// use conjunctive guards only.
FormulaPtr random_formula(std::mt19937_64& rng, const LogicSignature& sig, int depth,
                          bool restricted);

}  // namespace hcnet

#endif  // HCNET_LOGIC_HPP
