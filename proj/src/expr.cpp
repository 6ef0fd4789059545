#include "tshobam/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace tshobam {

namespace {

using NodePtr = std::shared_ptr<const Node>;

enum Code : std::uint8_t {
  kPush, kVar, kNeg, kAdd, kSub, kMul, kDiv, kPow,
  kSin, kCos, kTan, kExp, kLn, kSqrt, kAbs, kArctan,
};

struct FuncName {
  std::string_view name;
  Func func;
};

constexpr std::array<FuncName, 8> kFuncs{{
    {"sin", Func::Sin},
    {"cos", Func::Cos},
    {"tan", Func::Tan},
    {"exp", Func::Exp},
    {"ln", Func::Ln},
    {"sqrt", Func::Sqrt},
    {"abs", Func::Abs},
    {"arctan", Func::Arctan},
}};

NodePtr make_number(double v) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Number;
  n->value = v;
  return n;
}

NodePtr make_unary(NodeKind kind, NodePtr operand) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(operand);
  return n;
}

NodePtr make_binary(NodeKind kind, NodePtr l, NodePtr r) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr run() {
    skip_ws();
    if (pos_ >= src_.size()) fail(pos_, "empty expression");
    NodePtr e = expr();
    skip_ws();
    if (pos_ < src_.size()) fail(pos_, std::string("unexpected '") + src_[pos_] + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(std::size_t at, const std::string& what) const {
    throw SyntaxError(ErrorKind::SyntaxError, at, what);
  }

  void skip_ws() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' ||
                                  src_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make_binary(NodeKind::Add, lhs, term());
      } else if (accept('-')) {
        lhs = make_binary(NodeKind::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make_binary(NodeKind::Mul, lhs, unary());
      } else if (accept('/')) {
        lhs = make_binary(NodeKind::Div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make_unary(NodeKind::Negate, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make_binary(NodeKind::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= src_.size()) fail(pos_, "unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!accept(')')) fail(pos_, "expected ')'");
      return e;
    }
    if ((c >= '0' && c <= '9') || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail(pos_, std::string("unexpected '") + c + "'");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) ||
                                  src_[pos_] == '.')) {
      ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
      if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
        while (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) ++p;
        pos_ = p;
      }
    }
    double v = 0.0;
    const char* first = src_.data() + start;
    const char* last = src_.data() + pos_;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) fail(start, "malformed number");
    return make_number(v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                                  src_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = src_.substr(start, pos_ - start);
    if (name == "t" || name == "x") {
      auto n = std::make_shared<Node>();
      n->kind = NodeKind::Variable;
      n->var = name[0];
      return n;
    }
    if (name == "pi") {
      auto n = std::make_shared<Node>();
      n->kind = NodeKind::Pi;
      return n;
    }
    for (const auto& f : kFuncs) {
      if (f.name != name) continue;
      if (!accept('(')) fail(pos_, "expected '(' after " + std::string(name));
      auto n = std::make_shared<Node>();
      n->kind = NodeKind::Call;
      n->func = f.func;
      n->lhs = expr();
      if (!accept(')')) fail(pos_, "expected ')'");
      return n;
    }
    throw SyntaxError(ErrorKind::UnknownIdentifier, start,
                      "unknown identifier '" + std::string(name) + "'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

[[noreturn]] void domain(const char* what, double t) {
  std::ostringstream os;
  os.precision(17);
  os << what << " at t = " << t;
  throw Error(ErrorKind::DomainError, os.str());
}

void emit(const Node& n, std::vector<std::uint8_t>& codes, std::vector<double>& values,
          std::size_t& depth, std::size_t& max_depth) {
  auto push = [&](std::uint8_t code, double v) {
    codes.push_back(code);
    values.push_back(v);
  };
  switch (n.kind) {
    case NodeKind::Number:
      push(kPush, n.value);
      max_depth = std::max(max_depth, ++depth);
      return;
    case NodeKind::Pi:
      push(kPush, std::numbers::pi);
      max_depth = std::max(max_depth, ++depth);
      return;
    case NodeKind::Variable:
      push(kVar, 0.0);
      max_depth = std::max(max_depth, ++depth);
      return;
    case NodeKind::Negate:
      emit(*n.lhs, codes, values, depth, max_depth);
      push(kNeg, 0.0);
      return;
    case NodeKind::Call:
      emit(*n.lhs, codes, values, depth, max_depth);
      push(static_cast<std::uint8_t>(kSin + static_cast<int>(n.func)), 0.0);
      return;
    case NodeKind::Add:
    case NodeKind::Sub:
    case NodeKind::Mul:
    case NodeKind::Div:
    case NodeKind::Pow: {
      emit(*n.lhs, codes, values, depth, max_depth);
      emit(*n.rhs, codes, values, depth, max_depth);
      const std::uint8_t code = n.kind == NodeKind::Add   ? kAdd
                                : n.kind == NodeKind::Sub ? kSub
                                : n.kind == NodeKind::Mul ? kMul
                                : n.kind == NodeKind::Div ? kDiv
                                                          : kPow;
      push(code, 0.0);
      --depth;
      return;
    }
  }
}

bool has_variable(const Node& n) {
  if (n.kind == NodeKind::Variable) return true;
  if (n.lhs && has_variable(*n.lhs)) return true;
  return n.rhs && has_variable(*n.rhs);
}

// Printing precedence: sums 1, products 2, negation 3, power 4, atoms 5.
int precedence(const Node& n) {
  switch (n.kind) {
    case NodeKind::Add:
    case NodeKind::Sub: return 1;
    case NodeKind::Mul:
    case NodeKind::Div: return 2;
    case NodeKind::Negate: return 3;
    case NodeKind::Pow: return 4;
    case NodeKind::Number: return (n.value < 0.0 || std::signbit(n.value)) ? 3 : 5;
    default: return 5;
  }
}

void print(const Node& n, std::string& out);

void print_wrapped(const Node& n, bool wrap, std::string& out) {
  if (wrap) out += '(';
  print(n, out);
  if (wrap) out += ')';
}

void print(const Node& n, std::string& out) {
  switch (n.kind) {
    case NodeKind::Number: {
      std::array<char, 32> buf{};
      const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), n.value);
      out.append(buf.data(), res.ptr);
      return;
    }
    case NodeKind::Variable:
      out += n.var;
      return;
    case NodeKind::Pi:
      out += "pi";
      return;
    case NodeKind::Call:
      out += to_string(n.func);
      out += '(';
      print(*n.lhs, out);
      out += ')';
      return;
    case NodeKind::Negate:
      out += '-';
      print_wrapped(*n.lhs, precedence(*n.lhs) < 3, out);
      return;
    case NodeKind::Add:
    case NodeKind::Sub:
      print_wrapped(*n.lhs, precedence(*n.lhs) < 1, out);
      out += n.kind == NodeKind::Add ? " + " : " - ";
      print_wrapped(*n.rhs, precedence(*n.rhs) <= 1, out);
      return;
    case NodeKind::Mul:
    case NodeKind::Div:
      print_wrapped(*n.lhs, precedence(*n.lhs) < 2, out);
      out += n.kind == NodeKind::Mul ? "*" : "/";
      print_wrapped(*n.rhs, precedence(*n.rhs) <= 2, out);
      return;
    case NodeKind::Pow:
      print_wrapped(*n.lhs, precedence(*n.lhs) < 5, out);
      out += '^';
      print_wrapped(*n.rhs, precedence(*n.rhs) < 3, out);
      return;
  }
}

}  // namespace

std::string_view to_string(Func f) {
  for (const auto& entry : kFuncs) {
    if (entry.func == f) return entry.name;
  }
  return "?";
}

Expr::Expr() : Expr(constant(0.0)) {}

Expr Expr::constant(double value) { return from_tree(make_number(value)); }

Expr Expr::from_tree(std::shared_ptr<const Node> root) {
  Expr e{std::move(root), 0};
  e.compile();
  return e;
}

Expr::Expr(std::shared_ptr<const Node> root, int) : root_(std::move(root)) {}

void Expr::compile() {
  std::vector<std::uint8_t> codes;
  std::vector<double> values;
  std::size_t depth = 0;
  depth_ = 0;
  emit(*root_, codes, values, depth, depth_);
  program_.clear();
  program_.reserve(codes.size());
  for (std::size_t q = 0; q < codes.size(); ++q) program_.push_back({codes[q], values[q]});
  constant_ = false;
  if (!has_variable(*root_)) {
    try {
      constant_value_ = (*this)(0.0);
      constant_ = true;
    } catch (const Error&) {
      // Left to fail at evaluation time.
    }
  }
}

double Expr::operator()(double t) const {
  if (constant_) return constant_value_;
  std::array<double, 64> small{};
  std::vector<double> big;
  double* stack = small.data();
  if (depth_ > small.size()) {
    big.resize(depth_);
    stack = big.data();
  }
  std::size_t sp = 0;
  for (const Op& op : program_) {
    switch (op.code) {
      case kPush: stack[sp++] = op.value; continue;
      case kVar: stack[sp++] = t; continue;
      case kNeg: stack[sp - 1] = -stack[sp - 1]; continue;
      case kAdd: --sp; stack[sp - 1] += stack[sp]; break;
      case kSub: --sp; stack[sp - 1] -= stack[sp]; break;
      case kMul: --sp; stack[sp - 1] *= stack[sp]; break;
      case kDiv:
        --sp;
        if (stack[sp] == 0.0) domain("division by zero", t);
        stack[sp - 1] /= stack[sp];
        break;
      case kPow:
        --sp;
        stack[sp - 1] = std::pow(stack[sp - 1], stack[sp]);
        break;
      case kSin: stack[sp - 1] = std::sin(stack[sp - 1]); break;
      case kCos: stack[sp - 1] = std::cos(stack[sp - 1]); break;
      case kTan: stack[sp - 1] = std::tan(stack[sp - 1]); break;
      case kExp: stack[sp - 1] = std::exp(stack[sp - 1]); break;
      case kLn:
        if (!(stack[sp - 1] > 0.0)) domain("ln of a non-positive value", t);
        stack[sp - 1] = std::log(stack[sp - 1]);
        break;
      case kSqrt:
        if (stack[sp - 1] < 0.0) domain("sqrt of a negative value", t);
        stack[sp - 1] = std::sqrt(stack[sp - 1]);
        break;
      case kAbs: stack[sp - 1] = std::abs(stack[sp - 1]); break;
      case kArctan: stack[sp - 1] = std::atan(stack[sp - 1]); break;
      default: break;
    }
    if (!std::isfinite(stack[sp - 1])) domain("non-finite value", t);
  }
  return stack[0];
}

Expr parse(std::string_view src) { return Expr::from_tree(Parser(src).run()); }

std::string to_string(const Expr& e) {
  std::string out;
  print(e.root(), out);
  return out;
}

ScanBounds bound_scan(const Expr& e, const TimeScale& ts, double a, double b) {
  if (e.is_constant()) {
    const double v = std::abs(e(a));
    return {v, v};
  }
  ScanBounds out{std::numeric_limits<double>::infinity(), 0.0};
  for (const auto& g : enumerate_grid(ts, a, b)) {
    const double v = std::abs(e(g.t));
    out.inf = std::min(out.inf, v);
    out.sup = std::max(out.sup, v);
  }
  return out;
}

}  // namespace tshobam
