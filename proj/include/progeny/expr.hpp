#pragma once

// Univariate rate expressions: a tiny recursive-descent grammar over the
// variable `x`.
//
//   expr   := term (("+"|"-") term)*
//   term   := factor (("*"|"/") factor)*
//   factor := base ("^" factor)?
//   base   := NUMBER | "x" | FUNC "(" expr ")" | "(" expr ")" | "-" factor
//   FUNC   := "exp" | "log" | "sqrt"
//
// Unary minus takes a whole factor as its operand, so "-x^2" is -(x^2).

#include <charconv>
#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include "progeny/error.hpp"

namespace progeny::models {

enum class BinaryOp : char { add = '+', sub = '-', mul = '*', div = '/', pow = '^' };
enum class Function { exp, log, sqrt };

inline std::string_view function_name(Function f) {
  switch (f) {
    case Function::exp: return "exp";
    case Function::log: return "log";
    case Function::sqrt: return "sqrt";
  }
  return "?";
}

class UnknownIdentifier : public ParseError {
 public:
  UnknownIdentifier(std::string name, std::size_t offset)
      : ParseError("unknown identifier '" + name + "'", offset), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

// Immutable expression tree. Copies share structure.
class RateExpr {
 public:
  struct Literal {
    double value;
  };
  struct Variable {};
  struct Negate;
  struct Binary;
  struct Call;
  using Node = std::variant<Literal, Variable, Negate, Binary, Call>;

  // Literals must be finite and non-negative: the grammar has no signed literals.
  static RateExpr literal(double v);
  static RateExpr variable();
  static RateExpr negate(RateExpr e);
  static RateExpr binary(BinaryOp op, RateExpr lhs, RateExpr rhs);
  static RateExpr call(Function fn, RateExpr arg);

  static RateExpr parse(std::string_view text);

  const Node& node() const;

  double operator()(double x) const;

  // Fully parenthesised text that parses back to the same tree.
  std::string render() const;

  friend bool operator==(const RateExpr& a, const RateExpr& b);

 private:
  explicit RateExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  std::shared_ptr<const Node> node_;
};

struct RateExpr::Negate {
  RateExpr operand;
};
struct RateExpr::Binary {
  BinaryOp op;
  RateExpr lhs;
  RateExpr rhs;
};
struct RateExpr::Call {
  Function fn;
  RateExpr arg;
};

inline const RateExpr::Node& RateExpr::node() const { return *node_; }

inline RateExpr RateExpr::literal(double v) {
  if (!std::isfinite(v) || v < 0.0 || std::signbit(v))
    throw DomainError("expression literal must be finite and non-negative");
  return RateExpr(std::make_shared<const Node>(Literal{v}));
}
inline RateExpr RateExpr::variable() { return RateExpr(std::make_shared<const Node>(Variable{})); }
inline RateExpr RateExpr::negate(RateExpr e) {
  return RateExpr(std::make_shared<const Node>(Negate{std::move(e)}));
}
inline RateExpr RateExpr::binary(BinaryOp op, RateExpr lhs, RateExpr rhs) {
  return RateExpr(std::make_shared<const Node>(Binary{op, std::move(lhs), std::move(rhs)}));
}
inline RateExpr RateExpr::call(Function fn, RateExpr arg) {
  return RateExpr(std::make_shared<const Node>(Call{fn, std::move(arg)}));
}

inline double RateExpr::operator()(double x) const {
  return std::visit(
      [x](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Literal>) {
          return n.value;
        } else if constexpr (std::is_same_v<T, Variable>) {
          return x;
        } else if constexpr (std::is_same_v<T, Negate>) {
          return -n.operand(x);
        } else if constexpr (std::is_same_v<T, Binary>) {
          const double a = n.lhs(x);
          const double b = n.rhs(x);
          switch (n.op) {
            case BinaryOp::add: return a + b;
            case BinaryOp::sub: return a - b;
            case BinaryOp::mul: return a * b;
            case BinaryOp::div: return a / b;
            case BinaryOp::pow: return std::pow(a, b);
          }
          return std::nan("");
        } else {
          const double a = n.arg(x);
          switch (n.fn) {
            case Function::exp: return std::exp(a);
            case Function::log: return std::log(a);
            case Function::sqrt: return std::sqrt(a);
          }
          return std::nan("");
        }
      },
      *node_);
}

inline std::string RateExpr::render() const {
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Literal>) {
          char buf[64];
          auto res = std::to_chars(buf, buf + sizeof buf, n.value);
          return std::string(buf, res.ptr);
        } else if constexpr (std::is_same_v<T, Variable>) {
          return "x";
        } else if constexpr (std::is_same_v<T, Negate>) {
          return "(-(" + n.operand.render() + "))";
        } else if constexpr (std::is_same_v<T, Binary>) {
          return "(" + n.lhs.render() + " " + static_cast<char>(n.op) + " " + n.rhs.render() + ")";
        } else {
          return std::string(function_name(n.fn)) + "(" + n.arg.render() + ")";
        }
      },
      *node_);
}

inline bool operator==(const RateExpr& a, const RateExpr& b) {
  if (a.node_ == b.node_) return true;
  if (a.node_->index() != b.node_->index()) return false;
  return std::visit(
      [&b](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        const auto& m = std::get<T>(*b.node_);
        if constexpr (std::is_same_v<T, RateExpr::Literal>) {
          return n.value == m.value;
        } else if constexpr (std::is_same_v<T, RateExpr::Variable>) {
          return true;
        } else if constexpr (std::is_same_v<T, RateExpr::Negate>) {
          return n.operand == m.operand;
        } else if constexpr (std::is_same_v<T, RateExpr::Binary>) {
          return n.op == m.op && n.lhs == m.lhs && n.rhs == m.rhs;
        } else {
          return n.fn == m.fn && n.arg == m.arg;
        }
      },
      *a.node_);
}

namespace detail {

class ExprParser {
 public:
  explicit ExprParser(std::string_view src) : src_(src) {}

  RateExpr parse_all() {
    skip_ws();
    if (pos_ == src_.size()) fail("empty expression", base_starts());
    RateExpr e = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected input", {"+", "-", "*", "/", "^", "end of input"});
    return e;
  }

 private:
  static std::vector<std::string> base_starts() {
    return {"number", "x", "exp", "log", "sqrt", "(", "-"};
  }

  [[noreturn]] void fail(const std::string& what, std::vector<std::string> expected) const {
    std::string msg = what + " at offset " + std::to_string(pos_) + "; expected one of:";
    for (const auto& e : expected) msg += " '" + e + "'";
    throw ParseError(msg, pos_, std::move(expected));
  }

  void skip_ws() {
    while (pos_ < src_.size() &&
           (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' || src_[pos_] == '\r'))
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

  RateExpr parse_expr() {
    RateExpr lhs = parse_term();
    for (;;) {
      if (accept('+'))
        lhs = RateExpr::binary(BinaryOp::add, std::move(lhs), parse_term());
      else if (accept('-'))
        lhs = RateExpr::binary(BinaryOp::sub, std::move(lhs), parse_term());
      else
        return lhs;
    }
  }

  RateExpr parse_term() {
    RateExpr lhs = parse_factor();
    for (;;) {
      if (accept('*'))
        lhs = RateExpr::binary(BinaryOp::mul, std::move(lhs), parse_factor());
      else if (accept('/'))
        lhs = RateExpr::binary(BinaryOp::div, std::move(lhs), parse_factor());
      else
        return lhs;
    }
  }

  RateExpr parse_factor() {
    RateExpr base = parse_base();
    if (accept('^')) return RateExpr::binary(BinaryOp::pow, std::move(base), parse_factor());
    return base;
  }

  static bool is_digit(char c) { return c >= '0' && c <= '9'; }
  static bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool is_ident(char c) { return is_ident_start(c) || is_digit(c); }

  RateExpr parse_base() {
    skip_ws();
    if (pos_ == src_.size()) fail("unexpected end of input", base_starts());
    const char c = src_[pos_];
    if (c == '-') {
      ++pos_;
      return RateExpr::negate(parse_factor());
    }
    if (c == '(') {
      ++pos_;
      RateExpr inner = parse_expr();
      if (!accept(')')) fail("unbalanced parenthesis", {")", "+", "-", "*", "/", "^"});
      return inner;
    }
    if (is_digit(c) || c == '.') return parse_number();
    if (is_ident_start(c)) {
      const std::size_t start = pos_;
      while (pos_ < src_.size() && is_ident(src_[pos_])) ++pos_;
      const std::string_view name = src_.substr(start, pos_ - start);
      if (name == "x") return RateExpr::variable();
      Function fn;
      if (name == "exp")
        fn = Function::exp;
      else if (name == "log")
        fn = Function::log;
      else if (name == "sqrt")
        fn = Function::sqrt;
      else
        throw UnknownIdentifier(std::string(name), start);
      if (!accept('(')) fail("expected '(' after function name", {"("});
      RateExpr arg = parse_expr();
      if (!accept(')')) fail("unbalanced parenthesis", {")", "+", "-", "*", "/", "^"});
      return RateExpr::call(fn, std::move(arg));
    }
    fail("unexpected character", base_starts());
  }

  RateExpr parse_number() {
    const std::size_t start = pos_;
    std::size_t p = pos_;
    bool digits = false;
    while (p < src_.size() && is_digit(src_[p])) ++p, digits = true;
    if (p < src_.size() && src_[p] == '.') {
      ++p;
      while (p < src_.size() && is_digit(src_[p])) ++p, digits = true;
    }
    if (!digits) fail("malformed number", {"number"});
    if (p < src_.size() && (src_[p] == 'e' || src_[p] == 'E')) {
      std::size_t q = p + 1;
      if (q < src_.size() && (src_[q] == '+' || src_[q] == '-')) ++q;
      if (q < src_.size() && is_digit(src_[q])) {
        while (q < src_.size() && is_digit(src_[q])) ++q;
        p = q;
      }
    }
    double value = 0.0;
    const auto res = std::from_chars(src_.data() + start, src_.data() + p, value);
    if (res.ec != std::errc{} || res.ptr != src_.data() + p || !std::isfinite(value))
      fail("malformed number", {"number"});
    pos_ = p;
    return RateExpr::literal(value);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline RateExpr RateExpr::parse(std::string_view text) { return detail::ExprParser(text).parse_all(); }

inline RateExpr parse_rate_expr(std::string_view text) { return RateExpr::parse(text); }

}  // namespace progeny::models
