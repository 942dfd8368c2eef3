#ifndef FINSLERKIT_EXPR_HPP
#define FINSLERKIT_EXPR_HPP

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "finslerkit/jet.hpp"

namespace finslerkit {

/*
 * Scalar formula grammar (whitespace insignificant, no implicit
 * multiplication):
 *
 *   expr    := term (('+' | '-') term)*
 *   term    := unary (('*' | '/') unary)*
 *   unary   := ('-' | '+') unary | power
 *   power   := primary ('^' unary)?         right-associative, exponent
 *                                            must be a constant expression
 *   primary := number | name '(' expr ')' | name | '(' expr ')'
 *   number  := digits ['.' digits] [('e'|'E') ['+'|'-'] digits]
 *              | '.' digits [exponent]
 *
 * Functions: sqrt sin cos exp log abs.
 */

enum class ExprFunction { sqrt, sin, cos, exp, log, abs };

struct ExprNode {
  enum class Kind {
    constant,
    variable,
    negate,
    add,
    subtract,
    multiply,
    divide,
    call,
    power
  };

  Kind kind = Kind::constant;
  /// Literal value for constants, folded exponent for powers.
  double number = 0.0;
  /// Index into Expr::variables() for variables.
  int variable = -1;
  ExprFunction function = ExprFunction::sqrt;
  std::shared_ptr<const ExprNode> lhs;
  std::shared_ptr<const ExprNode> rhs;
  /// Byte offset of the node in the source text.
  std::size_t offset = 0;
};

bool structurally_equal(const ExprNode& a, const ExprNode& b);

std::string_view function_name(ExprFunction fn);

/// Immutable parsed formula over a declared, ordered set of variables.
class Expr {
 public:
  /// Throws ParseError (syntax error, unknown variable or unknown function)
  /// with the byte offset of the problem.
  static Expr parse(std::string_view source,
                    std::vector<std::string> allowed_vars);

  /// Builds an Expr around an existing tree (used by generators and tests).
  Expr(std::shared_ptr<const ExprNode> root, std::vector<std::string> vars,
       std::string source = {});

  const std::vector<std::string>& variables() const noexcept { return vars_; }
  const std::string& source() const noexcept { return source_; }
  const ExprNode& root() const noexcept { return *root_; }

  /// Arguments in the order of variables(); all jets must share shape.
  /// Jet domain errors are rethrown as EvalError with the node offset.
  Jet eval(std::span<const Jet> args) const;
  Jet eval(const std::map<std::string, Jet>& bindings) const;

  /// Fully parenthesized text that parses back to the same tree.
  std::string serialize() const;

 private:
  std::shared_ptr<const ExprNode> root_;
  std::vector<std::string> vars_;
  std::string source_;
};

}  // namespace finslerkit

#endif  // FINSLERKIT_EXPR_HPP
