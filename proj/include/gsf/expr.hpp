#pragma once

// Epsilon-parametric smooth expressions.
//
// An Expr is an immutable tree over variables x_0..x_{n-1}, the parameter
// `eps` and piecewise-constant parameter nets. Differentiation is exact and
// node-local, so derivative trees of any order are again Exprs. Two special
// nodes keep compactly supported constructions inside the grammar:
//
//   flat_exp_mul(u, h) = exp(-1/u) * h  for u > 0, and 0 otherwise
//   integral(g, t, lo, hi)              = int_lo^hi g(t) dt (Gauss-Legendre)
//
// The unit bump chi(u) = exp(-1/(1-u^2)) and the smooth step are built from
// flat_exp_mul, so every Expr is C-infinity wherever it is finite.

#include "gsf/real.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace gsf {

enum class Op : std::uint8_t {
  Const,
  Var,
  Eps,
  Param,
  Add,
  Mul,
  Neg,
  Div,
  PowInt,
  Pow,
  Exp,
  Log,
  Sin,
  Cos,
  Atan,
  Sqrt,
  FlatExp,
  Integral,
};

/// A net eps -> real that is constant in the space variables (for example
/// mollifier coefficients that depend on the moment order j(eps)).
struct ParamNet {
  std::string name;
  std::function<double(double eps)> fn;
};

struct IntegralOptions {
  /// The integrand is known to vanish outside [support_lo, support_hi];
  /// integration limits are clipped to it.
  double support_lo = -std::numeric_limits<double>::infinity();
  double support_hi = std::numeric_limits<double>::infinity();
  double panel_width = 0.25;
  int nodes = 16;
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

class Expr {
 public:
  Expr();
  Expr(double value);  // NOLINT(google-explicit-constructor): literals read naturally
  explicit Expr(NodePtr node) : node_(std::move(node)) {}

  static Expr var(int index);
  static Expr eps();
  static Expr param(std::shared_ptr<const ParamNet> net);

  const Node& node() const { return *node_; }
  const NodePtr& ptr() const { return node_; }

  bool is_const() const;
  bool is_const(double value) const;
  double const_value() const;

 private:
  NodePtr node_;
};

struct Node {
  Op op = Op::Const;
  double value = 0.0;  // Const
  int index = 0;       // Var index, PowInt exponent, Integral dummy variable
  std::vector<Expr> args;
  std::shared_ptr<const ParamNet> param;
  IntegralOptions integral;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

Expr pow(const Expr& base, int exponent);
Expr pow(const Expr& base, const Expr& exponent);
Expr exp(const Expr& x);
Expr log(const Expr& x);
Expr sin(const Expr& x);
Expr cos(const Expr& x);
Expr atan(const Expr& x);
Expr sqrt(const Expr& x);

Expr flat_exp_mul(const Expr& u, const Expr& h);
/// exp(-1/(1-u^2)) on (-1, 1), zero outside.
Expr chi(const Expr& u);
/// chi rescaled to the interval (a, b).
Expr bump(const Expr& a, const Expr& b, const Expr& x);
/// Smooth step: 0 for s <= 0, 1 for s >= 1, strictly monotone in between.
Expr smooth_step(const Expr& s);
/// (1 - w) f + w g with w = smooth_step((x - a)/(b - a)): a C-infinity splice
/// that equals f left of a and g right of b.
Expr splice(const Expr& f, const Expr& g, const Expr& x, double a, double b);

/// Fresh variable index for a bound integration variable.
int fresh_dummy();
/// int_lo^hi integrand dt where t is variable `dummy`.
Expr integral(const Expr& integrand, int dummy, const Expr& lo, const Expr& hi,
              IntegralOptions options = {});

Expr differentiate(const Expr& e, int var);
Expr substitute(const Expr& e, int var, const Expr& replacement);
/// Simultaneous substitution x_i -> replacements[i].
Expr substitute_all(const Expr& e, std::span<const Expr> replacements);

bool depends_on(const Expr& e, int var);
/// Largest free (non-dummy) variable index, or -1.
int max_free_var(const Expr& e);
bool depends_on_eps(const Expr& e);
std::size_t node_count(const Expr& e);

std::string to_string(const Expr& e);
/// Structural equality modulo commutativity/associativity of + and *.
bool equivalent(const Expr& a, const Expr& b);

template <class T>
struct EvalEnv {
  T eps;
  double eps_value = 0.0;
  std::vector<T> vars;
  /// Values of bound integration variables (innermost last).
  std::vector<std::pair<int, T>> bound = {};
};

template <class T>
T evaluate(const Expr& e, EvalEnv<T>& env);

template <class T>
T evaluate(const Expr& e, double eps, std::span<const T> vars) {
  EvalEnv<T> env{T(eps), eps, std::vector<T>(vars.begin(), vars.end()), {}};
  return evaluate(e, env);
}

extern template double evaluate<double>(const Expr&, EvalEnv<double>&);
extern template Real evaluate<Real>(const Expr&, EvalEnv<Real>&);

}  // namespace gsf
