#pragma once

// Infix expression grammar.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?
//   primary := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
//
// Names: `eps`, `pi`, the variables (`x`, `x1`..`x9` by default) and any
// registered constants. Functions: exp, log (ln), sin, cos, tan, atan
// (arctan), sqrt, chi(u), bump(a, b, u), step(s), plus registered ones.
// A vector function is a ';'-separated list of component expressions.

#include "gsf/expr.hpp"

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace gsf {

using ExprFunction = std::function<Expr(const std::vector<Expr>&)>;

struct ParserOptions {
  std::map<std::string, int> variables;
  std::map<std::string, Expr> constants;
  std::map<std::string, ExprFunction> functions;

  /// x, x1..x9 and y1..y9 style names are not predefined beyond `x` and
  /// `x1`..`x9`; `x` and `x1` both mean the first coordinate.
  static ParserOptions standard();
};

Expr parse_expr(std::string_view text, const ParserOptions& options = ParserOptions::standard());
std::vector<Expr> parse_vector(std::string_view text,
                               const ParserOptions& options = ParserOptions::standard());

}  // namespace gsf
