#include <cctype>
#include <sstream>

#include "hcnet/logic.hpp"

namespace hcnet {

namespace {

// Grammar:
//   F := color(NAME) | is(NAME) | not F | ( F and F ... ) | ( F or F ... )
//      | exists>=INT NAME@INT [ G, G, ... ]
//   G := INT:F | not G | ( G and G ... ) | ( G or G ... )
class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  FormulaPtr parse() {
    FormulaPtr f = formula();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing input");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw LogicError(LogicErrc::ParseError, "column " + std::to_string(pos_ + 1) + ": " + msg);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  void expect(const std::string& tok) {
    skip_ws();
    if (s_.compare(pos_, tok.size(), tok) != 0) fail("expected '" + tok + "'");
    pos_ += tok.size();
  }

  static bool name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' || c == '\'';
  }

  std::string name() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && name_char(s_[pos_])) ++pos_;
    if (start == pos_) fail("expected a name");
    return s_.substr(start, pos_ - start);
  }

  int integer() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected an integer");
    if (pos_ - start > 9) fail("integer too large");
    return std::stoi(s_.substr(start, pos_ - start));
  }

  // Reads a keyword only when it is a whole word.
  bool keyword(const std::string& kw) {
    skip_ws();
    if (s_.compare(pos_, kw.size(), kw) != 0) return false;
    const std::size_t end = pos_ + kw.size();
    if (end < s_.size() && name_char(s_[end])) return false;
    pos_ = end;
    return true;
  }

  FormulaPtr formula() {
    if (peek('(')) {
      ++pos_;
      FormulaPtr lhs = formula();
      const bool is_and = keyword("and");
      if (!is_and && !keyword("or")) fail("expected 'and' or 'or'");
      FormulaPtr acc = is_and ? f_and(lhs, formula()) : f_or(lhs, formula());
      while (keyword(is_and ? "and" : "or")) acc = is_and ? f_and(acc, formula()) : f_or(acc, formula());
      expect(")");
      return acc;
    }
    if (keyword("not")) return f_not(formula());
    if (keyword("color")) {
      expect("(");
      auto n = name();
      expect(")");
      return color_atom(n);
    }
    if (keyword("is")) {
      expect("(");
      auto n = name();
      expect(")");
      return const_atom(n);
    }
    if (keyword("exists")) {
      expect(">=");
      const int count = integer();
      auto rel = name();
      expect("@");
      const int pos = integer();
      GuardPtr guard;
      if (peek('[')) {
        ++pos_;
        if (!peek(']')) {
          guard = guard_expr();
          while (peek(',')) {
            ++pos_;
            guard = g_and(guard, guard_expr());
          }
        }
        expect("]");
      }
      return exists_geq(count, rel, pos, guard);
    }
    fail("expected a formula");
  }

  GuardPtr guard_expr() {
    if (peek('(')) {
      ++pos_;
      GuardPtr lhs = guard_expr();
      const bool is_and = keyword("and");
      if (!is_and && !keyword("or")) fail("expected 'and' or 'or'");
      GuardPtr acc = is_and ? g_and(lhs, guard_expr()) : g_or(lhs, guard_expr());
      while (keyword(is_and ? "and" : "or")) acc = is_and ? g_and(acc, guard_expr()) : g_or(acc, guard_expr());
      expect(")");
      return acc;
    }
    if (keyword("not")) return g_not(guard_expr());
    const int j = integer();
    expect(":");
    return g_at(j, formula());
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

void print(std::ostream& os, const FormulaPtr& f);

void print_guard(std::ostream& os, const GuardPtr& g) {
  switch (g->kind) {
    case GuardKind::At:
      os << g->position << ':';
      print(os, g->formula);
      break;
    case GuardKind::Not:
      os << "not ";
      print_guard(os, g->lhs);
      break;
    case GuardKind::And:
    case GuardKind::Or:
      os << '(';
      print_guard(os, g->lhs);
      os << (g->kind == GuardKind::And ? " and " : " or ");
      print_guard(os, g->rhs);
      os << ')';
      break;
  }
}

void print(std::ostream& os, const FormulaPtr& f) {
  switch (f->kind) {
    case FormulaKind::Color:
      os << "color(" << f->name << ')';
      break;
    case FormulaKind::Const:
      os << "is(" << f->name << ')';
      break;
    case FormulaKind::Not:
      os << "not ";
      print(os, f->lhs);
      break;
    case FormulaKind::And:
    case FormulaKind::Or:
      os << '(';
      print(os, f->lhs);
      os << (f->kind == FormulaKind::And ? " and " : " or ");
      print(os, f->rhs);
      os << ')';
      break;
    case FormulaKind::ExistsGeq:
      os << "exists>=" << f->count << ' ' << f->name << '@' << f->position << " [";
      if (f->guard) print_guard(os, f->guard);
      os << ']';
      break;
  }
}

}  // namespace

FormulaPtr parse_formula(const std::string& text) { return Parser(text).parse(); }

std::string to_string(const FormulaPtr& formula) {
  std::ostringstream os;
  print(os, formula);
  return os.str();
}

}  // namespace hcnet
