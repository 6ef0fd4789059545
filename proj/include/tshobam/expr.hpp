#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "tshobam/timescale.hpp"

namespace tshobam {

enum class NodeKind { Number, Variable, Pi, Negate, Add, Sub, Mul, Div, Pow, Call };
enum class Func { Sin, Cos, Tan, Exp, Ln, Sqrt, Abs, Arctan };

std::string_view to_string(Func f);

/// Immutable syntax-tree node. Variables are `t` or `x`; both name the single
/// argument the expression is evaluated at.
struct Node {
  NodeKind kind = NodeKind::Number;
  double value = 0.0;  // Number
  char var = 't';      // Variable
  Func func = Func::Sin;
  std::shared_ptr<const Node> lhs;  // operand of Negate / Call
  std::shared_ptr<const Node> rhs;
};

/// A parsed scalar expression of one real variable.
///
/// Grammar:
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('-' | '+') unary | power
///   power   := primary ('^' unary)?
///   primary := number | 't' | 'x' | 'pi' | func '(' expr ')' | '(' expr ')'
///   func    := sin | cos | tan | exp | ln | sqrt | abs | arctan
class Expr {
 public:
  /// The constant 0.
  Expr();
  static Expr constant(double value);
  static Expr from_tree(std::shared_ptr<const Node> root);

  /// Throws DomainError on ln/sqrt outside their domain, division by zero or
  /// any non-finite intermediate.
  double operator()(double t) const;

  const Node& root() const noexcept { return *root_; }
  std::shared_ptr<const Node> tree() const noexcept { return root_; }
  bool is_constant() const noexcept { return constant_; }

 private:
  struct Op {
    std::uint8_t code;
    double value;
  };

  Expr(std::shared_ptr<const Node> root, int);
  void compile();

  std::shared_ptr<const Node> root_;
  std::vector<Op> program_;
  std::size_t depth_ = 0;
  bool constant_ = false;
  double constant_value_ = 0.0;
};

/// Throws SyntaxError (kind SyntaxError or UnknownIdentifier) with the byte
/// offset of the offending token.
Expr parse(std::string_view src);

inline double eval(const Expr& e, double t) { return e(t); }

/// Canonical text with the fewest parentheses that reparse to the same tree.
std::string to_string(const Expr& e);

struct ScanBounds {
  double inf = 0.0;
  double sup = 0.0;
};

/// min and max of |e| over enumerate_grid(ts, a, b).
ScanBounds bound_scan(const Expr& e, const TimeScale& ts, double a, double b);

}  // namespace tshobam
