#pragma once

// Scalar expressions in two variables (u, v) with exact second-order
// derivatives. Used to describe user surfaces in config files.
//
// Grammar, lowest to highest precedence:
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?          right-associative
//   primary := number | 'u' | 'v' | 'pi' | 'e'
//            | name '(' expr ')' | 'pow' '(' expr ',' expr ')' | '(' expr ')'

#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "geotrig/error.hpp"
#include "geotrig/jet.hpp"

namespace geotrig::expr {

enum class NodeKind { constant, named_constant, variable_u, variable_v, unary, binary };

enum class UnaryOp { neg, sin, cos, tan, sinh, cosh, tanh, exp, log, sqrt, asin, acos, atan };

enum class BinaryOp { add, sub, mul, div, pow };

struct Node {
  NodeKind kind = NodeKind::constant;
  double value = 0.0;       // constant / named_constant
  std::string name;         // named_constant
  UnaryOp unary_op = UnaryOp::neg;
  BinaryOp binary_op = BinaryOp::add;
  std::shared_ptr<const Node> lhs;  // unary operand or binary left
  std::shared_ptr<const Node> rhs;  // binary right
  std::size_t position = 0;
};

using NodePtr = std::shared_ptr<const Node>;

namespace detail {

struct FunctionEntry {
  std::string_view name;
  UnaryOp op;
};

inline constexpr std::array<FunctionEntry, 12> kFunctions{{
    {"sin", UnaryOp::sin},
    {"cos", UnaryOp::cos},
    {"tan", UnaryOp::tan},
    {"sinh", UnaryOp::sinh},
    {"cosh", UnaryOp::cosh},
    {"tanh", UnaryOp::tanh},
    {"exp", UnaryOp::exp},
    {"log", UnaryOp::log},
    {"sqrt", UnaryOp::sqrt},
    {"asin", UnaryOp::asin},
    {"acos", UnaryOp::acos},
    {"atan", UnaryOp::atan},
}};

inline std::string_view unary_name(UnaryOp op) {
  if (op == UnaryOp::neg) return "-";
  for (const auto& f : kFunctions)
    if (f.op == op) return f.name;
  return "?";
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr parse() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("empty expression", pos_);
    NodePtr root = parse_expr();
    skip_ws();
    if (pos_ < src_.size())
      throw ParseError(std::string("unexpected character '") + src_[pos_] + "'", pos_);
    return root;
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' ||
                                  src_[pos_] == '\r'))
      ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= src_.size())
        throw ParseError(std::string("expected '") + c + "' but reached end of input", pos_);
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  static NodePtr make_binary(BinaryOp op, NodePtr l, NodePtr r, std::size_t at) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::binary;
    n->binary_op = op;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    n->position = at;
    return n;
  }

  static NodePtr make_unary(UnaryOp op, NodePtr x, std::size_t at) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::unary;
    n->unary_op = op;
    n->lhs = std::move(x);
    n->position = at;
    return n;
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      skip_ws();
      const std::size_t at = pos_;
      if (accept('+'))
        lhs = make_binary(BinaryOp::add, lhs, parse_term(), at);
      else if (accept('-'))
        lhs = make_binary(BinaryOp::sub, lhs, parse_term(), at);
      else
        return lhs;
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    for (;;) {
      skip_ws();
      const std::size_t at = pos_;
      if (accept('*'))
        lhs = make_binary(BinaryOp::mul, lhs, parse_unary(), at);
      else if (accept('/'))
        lhs = make_binary(BinaryOp::div, lhs, parse_unary(), at);
      else
        return lhs;
    }
  }

  NodePtr parse_unary() {
    skip_ws();
    const std::size_t at = pos_;
    if (accept('-')) return make_unary(UnaryOp::neg, parse_unary(), at);
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    skip_ws();
    const std::size_t at = pos_;
    if (accept('^')) return make_binary(BinaryOp::pow, base, parse_unary(), at);
    return base;
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
    const std::size_t at = pos_;
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_expr();
      expect(')');
      return inner;
    }
    if ((c >= '0' && c <= '9') || c == '.') return parse_number();
    if (is_ident_start(c)) return parse_identifier();
    throw ParseError(std::string("unexpected character '") + c + "'", at);
  }

  static bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
  static bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') ++pos_;
    };
    digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      // Only treat as exponent when followed by digits; "2e" is not a number.
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && src_[look] >= '0' && src_[look] <= '9') {
        pos_ = look;
        digits();
      }
    }
    double value = 0.0;
    const char* first = src_.data() + start;
    const char* last = src_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) throw ParseError("malformed number", start);
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::constant;
    n->value = value;
    n->position = start;
    return n;
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);

    skip_ws();
    const bool call = pos_ < src_.size() && src_[pos_] == '(';

    if (!call) {
      auto n = std::make_shared<Node>();
      n->position = start;
      if (name == "u") {
        n->kind = NodeKind::variable_u;
      } else if (name == "v") {
        n->kind = NodeKind::variable_v;
      } else if (name == "pi") {
        n->kind = NodeKind::named_constant;
        n->name = "pi";
        n->value = std::numbers::pi;
      } else if (name == "e") {
        n->kind = NodeKind::named_constant;
        n->name = "e";
        n->value = std::numbers::e;
      } else if (is_function(name)) {
        throw ParseError("function '" + std::string(name) + "' requires an argument list", start);
      } else {
        throw ParseError("unknown identifier '" + std::string(name) + "'", start);
      }
      return n;
    }

    if (!is_function(name)) throw ParseError("unknown function '" + std::string(name) + "'", start);
    ++pos_;  // '('
    std::vector<NodePtr> args;
    skip_ws();
    if (!accept(')')) {
      args.push_back(parse_expr());
      while (accept(',')) args.push_back(parse_expr());
      expect(')');
    }
    const std::size_t want = name == "pow" ? 2 : 1;
    if (args.size() != want)
      throw ParseError("wrong arity for '" + std::string(name) + "': expected " + std::to_string(want) +
                           ", got " + std::to_string(args.size()),
                       start);
    if (name == "pow") return make_binary(BinaryOp::pow, args[0], args[1], start);
    for (const auto& f : kFunctions)
      if (f.name == name) return make_unary(f.op, args[0], start);
    throw ParseError("unknown function '" + std::string(name) + "'", start);  // unreachable
  }

  static bool is_function(std::string_view name) {
    if (name == "pow") return true;
    for (const auto& f : kFunctions)
      if (f.name == name) return true;
    return false;
  }
};

inline void require_finite(const Jet2& j, const Node& n, std::string_view what) {
  if (!j.is_finite()) throw DomainError("non-finite result in " + std::string(what), n.position);
}

inline bool is_integer(double x) { return std::isfinite(x) && std::floor(x) == x; }

inline Jet2 eval(const Node& n, double u, double v) {
  switch (n.kind) {
    case NodeKind::constant:
    case NodeKind::named_constant:
      return Jet2::constant(n.value);
    case NodeKind::variable_u:
      return Jet2::variable_u(u);
    case NodeKind::variable_v:
      return Jet2::variable_v(v);
    case NodeKind::unary: {
      const Jet2 x = eval(*n.lhs, u, v);
      Jet2 r;
      switch (n.unary_op) {
        case UnaryOp::neg: return -x;
        case UnaryOp::sin: r = jet::sin(x); break;
        case UnaryOp::cos: r = jet::cos(x); break;
        case UnaryOp::tan: r = jet::tan(x); break;
        case UnaryOp::sinh: r = jet::sinh(x); break;
        case UnaryOp::cosh: r = jet::cosh(x); break;
        case UnaryOp::tanh: r = jet::tanh(x); break;
        case UnaryOp::exp: r = jet::exp(x); break;
        case UnaryOp::log:
          if (!(x.value > 0.0)) throw DomainError("log of non-positive value", n.position);
          r = jet::log(x);
          break;
        case UnaryOp::sqrt:
          if (x.value < 0.0) throw DomainError("sqrt of negative value", n.position);
          r = jet::sqrt(x);
          break;
        case UnaryOp::asin:
          if (std::abs(x.value) > 1.0) throw DomainError("asin argument outside [-1, 1]", n.position);
          r = jet::asin(x);
          break;
        case UnaryOp::acos:
          if (std::abs(x.value) > 1.0) throw DomainError("acos argument outside [-1, 1]", n.position);
          r = jet::acos(x);
          break;
        case UnaryOp::atan: r = jet::atan(x); break;
      }
      require_finite(r, n, unary_name(n.unary_op));
      return r;
    }
    case NodeKind::binary: {
      const Jet2 a = eval(*n.lhs, u, v);
      const Jet2 b = eval(*n.rhs, u, v);
      Jet2 r;
      switch (n.binary_op) {
        case BinaryOp::add: return a + b;
        case BinaryOp::sub: return a - b;
        case BinaryOp::mul: r = a * b; break;
        case BinaryOp::div:
          if (b.value == 0.0) throw DomainError("division by zero", n.position);
          r = a / b;
          break;
        case BinaryOp::pow:
          if (b.is_constant()) {
            if (a.value < 0.0 && !is_integer(b.value))
              throw DomainError("negative base with non-integer exponent", n.position);
            r = jet::pow(a, b.value);
          } else {
            if (!(a.value > 0.0))
              throw DomainError("non-positive base with variable exponent", n.position);
            r = jet::pow(a, b);
          }
          break;
      }
      require_finite(r, n, "binary operation");
      return r;
    }
  }
  return {};
}

inline void append_number(std::string& out, double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  out.append(buf, ptr);
}

inline void print(const Node& n, std::string& out) {
  switch (n.kind) {
    case NodeKind::constant:
      if (n.value < 0.0) {
        out += '(';
        append_number(out, n.value);
        out += ')';
      } else {
        append_number(out, n.value);
      }
      return;
    case NodeKind::named_constant: out += n.name; return;
    case NodeKind::variable_u: out += 'u'; return;
    case NodeKind::variable_v: out += 'v'; return;
    case NodeKind::unary:
      if (n.unary_op == UnaryOp::neg) {
        out += "(-";
        print(*n.lhs, out);
        out += ')';
      } else {
        out += unary_name(n.unary_op);
        out += '(';
        print(*n.lhs, out);
        out += ')';
      }
      return;
    case NodeKind::binary: {
      static constexpr char kOps[] = {'+', '-', '*', '/', '^'};
      out += '(';
      print(*n.lhs, out);
      out += kOps[static_cast<int>(n.binary_op)];
      print(*n.rhs, out);
      out += ')';
      return;
    }
  }
}

}  // namespace detail

/// Immutable parsed expression. Cheap to copy; copies share the tree.
class Expr {
 public:
  Expr() = default;
  explicit Expr(NodePtr root, std::string source = {})
      : root_(std::move(root)), source_(std::move(source)) {}

  const Node& root() const { return *root_; }
  bool empty() const noexcept { return root_ == nullptr; }
  const std::string& source() const noexcept { return source_; }

  Jet2 jet(double u, double v) const { return detail::eval(*root_, u, v); }
  double operator()(double u, double v) const { return jet(u, v).value; }

 private:
  NodePtr root_;
  std::string source_;
};

inline Expr parse(std::string_view source) {
  detail::Parser p(source);
  return Expr(p.parse(), std::string(source));
}

/// Value and all five partials at (u, v). Throws DomainError off the real domain.
inline Jet2 eval_jet2(const Expr& e, double u, double v) { return e.jet(u, v); }

/// Fully parenthesised text; parse(to_string(e)) evaluates identically to e.
inline std::string to_string(const Expr& e) {
  std::string out;
  detail::print(e.root(), out);
  return out;
}

}  // namespace geotrig::expr
