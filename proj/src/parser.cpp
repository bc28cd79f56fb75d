#include "gsf/parser.hpp"

#include "gsf/errors.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

namespace gsf {

ParserOptions ParserOptions::standard() {
  ParserOptions o;
  o.variables["x"] = 0;
  for (int i = 1; i <= 9; ++i) o.variables["x" + std::to_string(i)] = i - 1;
  return o;
}

namespace {

class Parser {
 public:
  Parser(std::string_view text, const ParserOptions& options) : s_(text), opt_(options) {}

  std::vector<Expr> vector() {
    std::vector<Expr> out{expr()};
    while (accept(';')) out.push_back(expr());
    finish();
    return out;
  }

  Expr single() {
    Expr e = expr();
    finish();
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw DomainError("parse error at column " + std::to_string(pos_ + 1) + ": " + what +
                      " in '" + std::string(s_) + "'");
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  void finish() {
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing input");
  }

  Expr expr() {
    Expr e = term();
    for (;;) {
      if (accept('+')) e = e + term();
      else if (accept('-')) e = e - term();
      else return e;
    }
  }

  Expr term() {
    Expr e = unary();
    for (;;) {
      if (accept('*')) e = e * unary();
      else if (accept('/')) e = e / unary();
      else return e;
    }
  }

  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (!accept('^')) return base;
    Expr exponent = unary();
    if (exponent.is_const()) {
      double v = exponent.const_value();
      if (v == std::floor(v) && std::fabs(v) <= 64) return pow(base, static_cast<int>(v));
    }
    return pow(base, exponent);
  }

  Expr number() {
    const char* begin = s_.data() + pos_;
    const char* end = s_.data() + s_.size();
    double v = 0;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc()) fail("bad number");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return Expr(v);
  }

  std::string name() {
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  std::vector<Expr> arguments() {
    std::vector<Expr> args;
    if (accept(')')) return args;
    args.push_back(expr());
    while (accept(',')) args.push_back(expr());
    expect(')');
    return args;
  }

  Expr call(const std::string& fn, const std::vector<Expr>& a) {
    auto arity = [&](std::size_t n) {
      if (a.size() != n)
        fail(fn + " takes " + std::to_string(n) + " argument(s), got " + std::to_string(a.size()));
    };
    if (auto it = opt_.functions.find(fn); it != opt_.functions.end()) return it->second(a);
    if (fn == "exp") return arity(1), exp(a[0]);
    if (fn == "log" || fn == "ln") return arity(1), log(a[0]);
    if (fn == "sin") return arity(1), sin(a[0]);
    if (fn == "cos") return arity(1), cos(a[0]);
    if (fn == "tan") return arity(1), sin(a[0]) / cos(a[0]);
    if (fn == "atan" || fn == "arctan") return arity(1), atan(a[0]);
    if (fn == "sqrt") return arity(1), sqrt(a[0]);
    if (fn == "chi") return arity(1), chi(a[0]);
    if (fn == "step") return arity(1), smooth_step(a[0]);
    if (fn == "bump") return arity(3), bump(a[0], a[1], a[2]);
    fail("unknown function '" + fn + "'");
  }

  Expr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (!(std::isalpha(static_cast<unsigned char>(c)) || c == '_')) fail("unexpected character");
    std::string id = name();
    if (accept('(')) return call(id, arguments());
    if (auto it = opt_.constants.find(id); it != opt_.constants.end()) return it->second;
    if (auto it = opt_.variables.find(id); it != opt_.variables.end()) return Expr::var(it->second);
    if (id == "eps") return Expr::eps();
    if (id == "pi") return Expr(std::numbers::pi);
    fail("unknown name '" + id + "'");
  }

  std::string_view s_;
  const ParserOptions& opt_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view text, const ParserOptions& options) {
  return Parser(text, options).single();
}

std::vector<Expr> parse_vector(std::string_view text, const ParserOptions& options) {
  return Parser(text, options).vector();
}

}  // namespace gsf
