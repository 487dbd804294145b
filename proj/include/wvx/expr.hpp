#pragma once

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace wvx {

/// Error raised while parsing or evaluating a field expression.  `offset` is
/// the byte position of the offending token or node in the source text
/// (std::string::npos for nodes built programmatically).
struct ExprError : std::runtime_error {
  std::size_t offset;
  ExprError(const std::string& msg, std::size_t off)
      : std::runtime_error(msg), offset(off) {}
};

struct ParseError : ExprError {
  using ExprError::ExprError;
};

struct EvalError : ExprError {
  using ExprError::ExprError;
};

/// Immutable arithmetic expression over the spatial coordinates x (and y in
/// two dimensions).  Grammar: numbers, x, y, unary minus, + - * / ^ with ^
/// right-associative and binding tighter than unary minus, parentheses, and
/// the calls exp, log, abs, sqrt, sin, cos (unary), min, max (binary).
///
/// Instances are freely shareable across threads once constructed.
class FieldExpr {
 public:
  FieldExpr() : root_(nullptr) {}

  static FieldExpr parse(std::string_view text);

  static FieldExpr constant(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Number;
    n->number = v;
    return FieldExpr(std::move(n));
  }

  /// axis 0 = x, axis 1 = y.
  static FieldExpr coordinate(int axis) {
    if (axis < 0 || axis > 1) throw std::invalid_argument("coordinate axis must be 0 or 1");
    auto n = std::make_shared<Node>();
    n->kind = Kind::Coord;
    n->coord = axis;
    return FieldExpr(std::move(n));
  }

  bool valid() const { return root_ != nullptr; }

  /// Highest coordinate index used plus one (0 for a constant expression).
  int dimension() const { return root_ ? node_dim(*root_) : 0; }

  double eval(const double* coords, int dim) const {
    if (!root_) throw EvalError("empty expression", 0);
    if (node_dim(*root_) > dim)
      throw EvalError("expression uses coordinate beyond point dimension", root_->offset);
    return eval_node(*root_, coords, dim);
  }

  double operator()(double x) const { return eval(&x, 1); }
  double operator()(double x, double y) const {
    const double c[2] = {x, y};
    return eval(c, 2);
  }

  std::string str() const;

  friend FieldExpr operator+(const FieldExpr& a, const FieldExpr& b) { return combine(Op::Add, a, b); }
  friend FieldExpr operator-(const FieldExpr& a, const FieldExpr& b) { return combine(Op::Sub, a, b); }
  friend FieldExpr operator*(const FieldExpr& a, const FieldExpr& b) { return combine(Op::Mul, a, b); }
  friend FieldExpr operator/(const FieldExpr& a, const FieldExpr& b) { return combine(Op::Div, a, b); }
  friend FieldExpr operator-(const FieldExpr& a) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Neg;
    n->offset = std::string::npos;
    n->lhs = a.root_;
    return FieldExpr(std::move(n));
  }
  static FieldExpr pow(const FieldExpr& base, const FieldExpr& exponent) {
    return combine(Op::Pow, base, exponent);
  }

 private:
  enum class Kind { Number, Coord, Neg, Binary, Call };
  enum class Op { Add, Sub, Mul, Div, Pow };
  enum class Fn { Exp, Log, Abs, Sqrt, Sin, Cos, Min, Max };

  struct Node {
    Kind kind = Kind::Number;
    double number = 0.0;
    int coord = 0;
    Op op = Op::Add;
    Fn fn = Fn::Exp;
    std::size_t offset = std::string::npos;
    std::shared_ptr<const Node> lhs, rhs;
  };
  using NodePtr = std::shared_ptr<const Node>;

  explicit FieldExpr(NodePtr root) : root_(std::move(root)) {}

  static FieldExpr combine(Op op, const FieldExpr& a, const FieldExpr& b) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Binary;
    n->op = op;
    n->offset = std::string::npos;
    n->lhs = a.root_;
    n->rhs = b.root_;
    return FieldExpr(std::move(n));
  }

  static int node_dim(const Node& n) {
    switch (n.kind) {
      case Kind::Number: return 0;
      case Kind::Coord: return n.coord + 1;
      case Kind::Neg: return node_dim(*n.lhs);
      case Kind::Binary:
      case Kind::Call: {
        int d = node_dim(*n.lhs);
        if (n.rhs) d = std::max(d, node_dim(*n.rhs));
        return d;
      }
    }
    return 0;
  }

  static double eval_pow(double base, double expo, std::size_t off) {
    if (base == 0.0 && expo < 0.0) throw EvalError("zero base with negative exponent", off);
    if (base < 0.0) {
      // Real-valued fields only: negative bases admit integer exponents.
      if (std::nearbyint(expo) != expo || std::abs(expo) >= 9.007199254740992e15)
        throw EvalError("negative base with non-integer exponent", off);
    }
    return std::pow(base, expo);
  }

  static double eval_node(const Node& n, const double* c, int dim) {
    switch (n.kind) {
      case Kind::Number:
        return n.number;
      case Kind::Coord:
        return c[n.coord];
      case Kind::Neg:
        return -eval_node(*n.lhs, c, dim);
      case Kind::Binary: {
        const double a = eval_node(*n.lhs, c, dim);
        const double b = eval_node(*n.rhs, c, dim);
        switch (n.op) {
          case Op::Add: return a + b;
          case Op::Sub: return a - b;
          case Op::Mul: return a * b;
          case Op::Div:
            if (b == 0.0) throw EvalError("division by zero", n.offset);
            return a / b;
          case Op::Pow: return eval_pow(a, b, n.offset);
        }
        break;
      }
      case Kind::Call: {
        const double a = eval_node(*n.lhs, c, dim);
        switch (n.fn) {
          case Fn::Exp: return std::exp(a);
          case Fn::Log:
            if (a <= 0.0) throw EvalError("log of non-positive value", n.offset);
            return std::log(a);
          case Fn::Abs: return std::abs(a);
          case Fn::Sqrt:
            if (a < 0.0) throw EvalError("sqrt of negative value", n.offset);
            return std::sqrt(a);
          case Fn::Sin: return std::sin(a);
          case Fn::Cos: return std::cos(a);
          case Fn::Min: return std::min(a, eval_node(*n.rhs, c, dim));
          case Fn::Max: return std::max(a, eval_node(*n.rhs, c, dim));
        }
        break;
      }
    }
    throw EvalError("malformed expression node", n.offset);
  }

  static void print_node(const Node& n, std::string& out);

  class Parser;

  NodePtr root_;
};

class FieldExpr::Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr run() {
    NodePtr e = parse_sum();
    skip_ws();
    if (pos_ != text_.size())
      throw ParseError("unexpected trailing input", pos_);
    return e;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  NodePtr parse_sum() {
    NodePtr lhs = parse_term();
    for (;;) {
      skip_ws();
      const std::size_t at = pos_;
      if (eat('+')) lhs = binary(Op::Add, at, lhs, parse_term());
      else if (eat('-')) lhs = binary(Op::Sub, at, lhs, parse_term());
      else return lhs;
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    for (;;) {
      skip_ws();
      const std::size_t at = pos_;
      if (eat('*')) lhs = binary(Op::Mul, at, lhs, parse_unary());
      else if (eat('/')) lhs = binary(Op::Div, at, lhs, parse_unary());
      else return lhs;
    }
  }

  NodePtr parse_unary() {
    skip_ws();
    const std::size_t at = pos_;
    if (eat('-')) {
      auto n = std::make_shared<Node>();
      n->kind = Kind::Neg;
      n->offset = at;
      n->lhs = parse_unary();
      return n;
    }
    return parse_power();
  }

  // Right-associative; the exponent re-enters at the unary level so that
  // forms like 2^-x parse.
  NodePtr parse_power() {
    NodePtr base = parse_primary();
    skip_ws();
    const std::size_t at = pos_;
    if (eat('^')) return binary(Op::Pow, at, base, parse_unary());
    return base;
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("expected operand", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_sum();
      if (!eat(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  NodePtr parse_number() {
    const std::size_t at = pos_;
    double v = 0.0;
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr == first) throw ParseError("malformed number", at);
    pos_ += static_cast<std::size_t>(ptr - first);
    auto n = std::make_shared<Node>();
    n->kind = Kind::Number;
    n->number = v;
    n->offset = at;
    return n;
  }

  NodePtr parse_identifier() {
    const std::size_t at = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string_view name = text_.substr(at, pos_ - at);

    if (name == "x" || name == "y") {
      auto n = std::make_shared<Node>();
      n->kind = Kind::Coord;
      n->coord = name == "x" ? 0 : 1;
      n->offset = at;
      return n;
    }

    static constexpr std::pair<const char*, Fn> kFns[] = {
        {"exp", Fn::Exp}, {"log", Fn::Log}, {"abs", Fn::Abs}, {"sqrt", Fn::Sqrt},
        {"sin", Fn::Sin}, {"cos", Fn::Cos}, {"min", Fn::Min}, {"max", Fn::Max}};
    for (const auto& [fname, fn] : kFns) {
      if (name == fname) {
        if (!eat('(')) throw ParseError("expected '(' after function name", pos_);
        auto n = std::make_shared<Node>();
        n->kind = Kind::Call;
        n->fn = fn;
        n->offset = at;
        const bool binary_fn = fn == Fn::Min || fn == Fn::Max;
        n->lhs = parse_sum();
        if (eat(',')) {
          if (!binary_fn)
            throw ParseError(std::string(name) + " takes exactly one argument", at);
          n->rhs = parse_sum();
        } else if (binary_fn) {
          throw ParseError(std::string(name) + " takes exactly two arguments", at);
        }
        if (!eat(')')) throw ParseError("expected ')'", pos_);
        return n;
      }
    }
    throw ParseError("unknown identifier '" + std::string(name) + "'", at);
  }

  NodePtr binary(Op op, std::size_t at, NodePtr lhs, NodePtr rhs) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Binary;
    n->op = op;
    n->offset = at;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
  }
};

inline FieldExpr FieldExpr::parse(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  if (i == text.size()) throw ParseError("empty expression", 0);
  return FieldExpr(Parser(text).run());
}

inline void FieldExpr::print_node(const Node& n, std::string& out) {
  switch (n.kind) {
    case Kind::Number: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", n.number);
      out += buf;
      return;
    }
    case Kind::Coord:
      out += n.coord == 0 ? 'x' : 'y';
      return;
    case Kind::Neg:
      out += "(-";
      print_node(*n.lhs, out);
      out += ')';
      return;
    case Kind::Binary: {
      static constexpr const char* kOps[] = {"+", "-", "*", "/", "^"};
      out += '(';
      print_node(*n.lhs, out);
      out += kOps[static_cast<int>(n.op)];
      print_node(*n.rhs, out);
      out += ')';
      return;
    }
    case Kind::Call: {
      static constexpr const char* kNames[] = {"exp", "log", "abs", "sqrt",
                                               "sin", "cos", "min", "max"};
      out += kNames[static_cast<int>(n.fn)];
      out += '(';
      print_node(*n.lhs, out);
      if (n.rhs) {
        out += ',';
        print_node(*n.rhs, out);
      }
      out += ')';
      return;
    }
  }
}

inline std::string FieldExpr::str() const {
  std::string out;
  if (root_) print_node(*root_, out);
  return out;
}

}  // namespace wvx
