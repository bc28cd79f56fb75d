#include "gsf/expr.hpp"

#include "gsf/errors.hpp"
#include "gsf/quadrature.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <unordered_map>

namespace gsf {

namespace {

Expr make(Op op, std::vector<Expr> args) {
  auto node = std::make_shared<Node>();
  node->op = op;
  node->args = std::move(args);
  return Expr(std::move(node));
}

Expr make_unary(Op op, const Expr& x) { return make(op, {x}); }

constexpr int kFirstDummy = 1 << 20;

}  // namespace

Expr::Expr() : Expr(0.0) {}

Expr::Expr(double value) {
  auto node = std::make_shared<Node>();
  node->op = Op::Const;
  node->value = value;
  node_ = std::move(node);
}

Expr Expr::var(int index) {
  auto node = std::make_shared<Node>();
  node->op = Op::Var;
  node->index = index;
  return Expr(std::move(node));
}

Expr Expr::eps() {
  auto node = std::make_shared<Node>();
  node->op = Op::Eps;
  return Expr(std::move(node));
}

Expr Expr::param(std::shared_ptr<const ParamNet> net) {
  auto node = std::make_shared<Node>();
  node->op = Op::Param;
  node->param = std::move(net);
  return Expr(std::move(node));
}

bool Expr::is_const() const { return node_->op == Op::Const; }
bool Expr::is_const(double value) const { return is_const() && node_->value == value; }
double Expr::const_value() const { return node_->value; }

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_const() && b.is_const()) return Expr(a.const_value() + b.const_value());
  if (a.is_const(0.0)) return b;
  if (b.is_const(0.0)) return a;
  return make(Op::Add, {a, b});
}

Expr operator-(const Expr& a) {
  if (a.is_const()) return Expr(-a.const_value());
  if (a.node().op == Op::Neg) return a.node().args[0];
  return make_unary(Op::Neg, a);
}

Expr operator-(const Expr& a, const Expr& b) {
  if (a.is_const() && b.is_const()) return Expr(a.const_value() - b.const_value());
  if (b.is_const(0.0)) return a;
  if (a.is_const(0.0)) return -b;
  return a + (-b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_const() && b.is_const()) return Expr(a.const_value() * b.const_value());
  if (a.is_const(0.0) || b.is_const(0.0)) return Expr(0.0);
  if (a.is_const(1.0)) return b;
  if (b.is_const(1.0)) return a;
  if (a.is_const(-1.0)) return -b;
  if (b.is_const(-1.0)) return -a;
  return make(Op::Mul, {a, b});
}

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_const(0.0)) throw DomainError("division by the constant 0 in expression");
  if (a.is_const() && b.is_const()) return Expr(a.const_value() / b.const_value());
  if (a.is_const(0.0)) return Expr(0.0);
  if (b.is_const(1.0)) return a;
  return make(Op::Div, {a, b});
}

Expr pow(const Expr& base, int exponent) {
  if (exponent == 0) return Expr(1.0);
  if (exponent == 1) return base;
  if (base.is_const()) return Expr(std::pow(base.const_value(), exponent));
  auto node = std::make_shared<Node>();
  node->op = Op::PowInt;
  node->index = exponent;
  node->args = {base};
  return Expr(std::move(node));
}

Expr pow(const Expr& base, const Expr& exponent) {
  if (exponent.is_const()) {
    double v = exponent.const_value();
    if (v == std::floor(v) && std::fabs(v) < 1e6) return pow(base, static_cast<int>(v));
  }
  if (base.is_const() && exponent.is_const())
    return Expr(std::pow(base.const_value(), exponent.const_value()));
  return make(Op::Pow, {base, exponent});
}

Expr exp(const Expr& x) {
  if (x.is_const()) return Expr(std::exp(x.const_value()));
  return make_unary(Op::Exp, x);
}
Expr log(const Expr& x) {
  if (x.is_const()) return Expr(std::log(x.const_value()));
  return make_unary(Op::Log, x);
}
Expr sin(const Expr& x) {
  if (x.is_const()) return Expr(std::sin(x.const_value()));
  return make_unary(Op::Sin, x);
}
Expr cos(const Expr& x) {
  if (x.is_const()) return Expr(std::cos(x.const_value()));
  return make_unary(Op::Cos, x);
}
Expr atan(const Expr& x) {
  if (x.is_const()) return Expr(std::atan(x.const_value()));
  return make_unary(Op::Atan, x);
}
Expr sqrt(const Expr& x) {
  if (x.is_const()) return Expr(std::sqrt(x.const_value()));
  return make_unary(Op::Sqrt, x);
}

Expr flat_exp_mul(const Expr& u, const Expr& h) {
  if (h.is_const(0.0)) return Expr(0.0);
  if (u.is_const()) {
    double v = u.const_value();
    if (v <= 0) return Expr(0.0);
    return Expr(std::exp(-1.0 / v)) * h;
  }
  return make(Op::FlatExp, {u, h});
}

Expr chi(const Expr& u) { return flat_exp_mul(Expr(1.0) - u * u, Expr(1.0)); }

Expr bump(const Expr& a, const Expr& b, const Expr& x) {
  return chi((Expr(2.0) * x - a - b) / (b - a));
}

Expr smooth_step(const Expr& s) {
  Expr left = flat_exp_mul(s, Expr(1.0));
  Expr right = flat_exp_mul(Expr(1.0) - s, Expr(1.0));
  return left / (left + right);
}

Expr splice(const Expr& f, const Expr& g, const Expr& x, double a, double b) {
  Expr w = smooth_step((x - Expr(a)) / Expr(b - a));
  return (Expr(1.0) - w) * f + w * g;
}

int fresh_dummy() {
  static std::atomic<int> next{kFirstDummy};
  return next.fetch_add(1);
}

Expr integral(const Expr& integrand, int dummy, const Expr& lo, const Expr& hi,
              IntegralOptions options) {
  if (integrand.is_const(0.0)) return Expr(0.0);
  auto node = std::make_shared<Node>();
  node->op = Op::Integral;
  node->index = dummy;
  node->args = {integrand, lo, hi};
  node->integral = options;
  return Expr(std::move(node));
}

Expr differentiate(const Expr& e, int var) {
  const Node& n = e.node();
  const auto& a = n.args;
  switch (n.op) {
    case Op::Const:
    case Op::Eps:
    case Op::Param:
      return Expr(0.0);
    case Op::Var:
      return Expr(n.index == var ? 1.0 : 0.0);
    case Op::Add:
      return differentiate(a[0], var) + differentiate(a[1], var);
    case Op::Mul:
      return differentiate(a[0], var) * a[1] + a[0] * differentiate(a[1], var);
    case Op::Neg:
      return -differentiate(a[0], var);
    case Op::Div: {
      Expr da = differentiate(a[0], var);
      Expr db = differentiate(a[1], var);
      if (db.is_const(0.0)) return da / a[1];
      return da / a[1] - a[0] * db / (a[1] * a[1]);
    }
    case Op::PowInt: {
      Expr dx = differentiate(a[0], var);
      if (dx.is_const(0.0)) return Expr(0.0);
      return Expr(static_cast<double>(n.index)) * pow(a[0], n.index - 1) * dx;
    }
    case Op::Pow: {
      Expr dx = differentiate(a[0], var);
      Expr dy = differentiate(a[1], var);
      return e * (dy * log(a[0]) + a[1] * dx / a[0]);
    }
    case Op::Exp:
      return e * differentiate(a[0], var);
    case Op::Log:
      return differentiate(a[0], var) / a[0];
    case Op::Sin:
      return cos(a[0]) * differentiate(a[0], var);
    case Op::Cos:
      return -(sin(a[0]) * differentiate(a[0], var));
    case Op::Atan:
      return differentiate(a[0], var) / (Expr(1.0) + a[0] * a[0]);
    case Op::Sqrt:
      return differentiate(a[0], var) / (Expr(2.0) * e);
    case Op::FlatExp: {
      Expr du = differentiate(a[0], var);
      Expr dh = differentiate(a[1], var);
      return flat_exp_mul(a[0], dh + a[1] * du / (a[0] * a[0]));
    }
    case Op::Integral: {
      const int t = n.index;
      const Expr& g = a[0];
      Expr result = integral(differentiate(g, var), t, a[1], a[2], n.integral);
      Expr dhi = differentiate(a[2], var);
      Expr dlo = differentiate(a[1], var);
      if (!dhi.is_const(0.0)) result = result + substitute(g, t, a[2]) * dhi;
      if (!dlo.is_const(0.0)) result = result - substitute(g, t, a[1]) * dlo;
      return result;
    }
  }
  return Expr(0.0);
}

namespace {

Expr rebuild(const Expr& e, std::vector<Expr> args) {
  const Node& n = e.node();
  switch (n.op) {
    case Op::Add: return args[0] + args[1];
    case Op::Mul: return args[0] * args[1];
    case Op::Neg: return -args[0];
    case Op::Div: return args[0] / args[1];
    case Op::PowInt: return pow(args[0], n.index);
    case Op::Pow: return pow(args[0], args[1]);
    case Op::Exp: return exp(args[0]);
    case Op::Log: return log(args[0]);
    case Op::Sin: return sin(args[0]);
    case Op::Cos: return cos(args[0]);
    case Op::Atan: return atan(args[0]);
    case Op::Sqrt: return sqrt(args[0]);
    case Op::FlatExp: return flat_exp_mul(args[0], args[1]);
    case Op::Integral: return integral(args[0], n.index, args[1], args[2], n.integral);
    default: return e;
  }
}

template <class Leaf>
Expr transform(const Expr& e, const Leaf& leaf) {
  const Node& n = e.node();
  if (n.op == Op::Var) return leaf(n.index, e);
  if (n.args.empty()) return e;
  std::vector<Expr> args;
  args.reserve(n.args.size());
  bool changed = false;
  for (const auto& arg : n.args) {
    args.push_back(transform(arg, leaf));
    changed = changed || args.back().ptr() != arg.ptr();
  }
  if (!changed) return e;
  return rebuild(e, std::move(args));
}

}  // namespace

Expr substitute(const Expr& e, int var, const Expr& replacement) {
  return transform(e, [&](int index, const Expr& self) { return index == var ? replacement : self; });
}

Expr substitute_all(const Expr& e, std::span<const Expr> replacements) {
  return transform(e, [&](int index, const Expr& self) {
    if (index >= 0 && index < static_cast<int>(replacements.size())) return replacements[index];
    return self;
  });
}

bool depends_on(const Expr& e, int var) {
  const Node& n = e.node();
  if (n.op == Op::Var) return n.index == var;
  for (const auto& arg : n.args)
    if (depends_on(arg, var)) return true;
  return false;
}

int max_free_var(const Expr& e) {
  const Node& n = e.node();
  if (n.op == Op::Var) return n.index >= kFirstDummy ? -1 : n.index;
  int best = -1;
  for (const auto& arg : n.args) best = std::max(best, max_free_var(arg));
  return best;
}

bool depends_on_eps(const Expr& e) {
  const Node& n = e.node();
  if (n.op == Op::Eps || n.op == Op::Param) return true;
  for (const auto& arg : n.args)
    if (depends_on_eps(arg)) return true;
  return false;
}

std::size_t node_count(const Expr& e) {
  std::size_t count = 1;
  for (const auto& arg : e.node().args) count += node_count(arg);
  return count;
}

namespace {

std::string var_name(int index) {
  if (index >= kFirstDummy) return "t" + std::to_string(index - kFirstDummy);
  return "x" + std::to_string(index + 1);
}

std::string format_const(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

void print(const Expr& e, std::ostream& out) {
  const Node& n = e.node();
  const auto& a = n.args;
  switch (n.op) {
    case Op::Const:
      if (n.value < 0) out << '(' << format_const(n.value) << ')';
      else out << format_const(n.value);
      return;
    case Op::Var: out << var_name(n.index); return;
    case Op::Eps: out << "eps"; return;
    case Op::Param: out << n.param->name << "(eps)"; return;
    case Op::Add: out << '('; print(a[0], out); out << " + "; print(a[1], out); out << ')'; return;
    case Op::Mul: out << '('; print(a[0], out); out << " * "; print(a[1], out); out << ')'; return;
    case Op::Neg: out << "(-"; print(a[0], out); out << ')'; return;
    case Op::Div: out << '('; print(a[0], out); out << " / "; print(a[1], out); out << ')'; return;
    case Op::PowInt: out << '('; print(a[0], out); out << ")^" << n.index; return;
    case Op::Pow: out << '('; print(a[0], out); out << ")^("; print(a[1], out); out << ')'; return;
    case Op::Exp: out << "exp("; print(a[0], out); out << ')'; return;
    case Op::Log: out << "log("; print(a[0], out); out << ')'; return;
    case Op::Sin: out << "sin("; print(a[0], out); out << ')'; return;
    case Op::Cos: out << "cos("; print(a[0], out); out << ')'; return;
    case Op::Atan: out << "atan("; print(a[0], out); out << ')'; return;
    case Op::Sqrt: out << "sqrt("; print(a[0], out); out << ')'; return;
    case Op::FlatExp:
      out << "flatexp("; print(a[0], out); out << ", "; print(a[1], out); out << ')';
      return;
    case Op::Integral:
      out << "integral(" << var_name(n.index) << ", ";
      print(a[1], out); out << ", "; print(a[2], out); out << ", ";
      print(a[0], out); out << ')';
      return;
  }
}

void flatten(const Expr& e, Op op, std::vector<Expr>& terms) {
  if (e.node().op == op) {
    for (const auto& arg : e.node().args) flatten(arg, op, terms);
  } else {
    terms.push_back(e);
  }
}

std::string canonical(const Expr& e) {
  const Node& n = e.node();
  if (n.op == Op::Add || n.op == Op::Mul) {
    std::vector<Expr> terms;
    flatten(e, n.op, terms);
    std::vector<std::string> parts;
    for (const auto& t : terms) parts.push_back(canonical(t));
    std::sort(parts.begin(), parts.end());
    std::string s = n.op == Op::Add ? "add(" : "mul(";
    for (const auto& p : parts) s += p + ",";
    return s + ")";
  }
  std::ostringstream out;
  switch (n.op) {
    case Op::Const: out << format_const(n.value); break;
    case Op::Var: out << var_name(n.index); break;
    case Op::Eps: out << "eps"; break;
    case Op::Param: out << "param:" << n.param.get(); break;
    case Op::PowInt: out << "powi" << n.index; break;
    case Op::Integral:
      out << "int" << n.index << ':' << n.integral.support_lo << ':' << n.integral.support_hi << ':'
          << n.integral.panel_width << ':' << n.integral.nodes;
      break;
    default: out << "op" << static_cast<int>(n.op); break;
  }
  out << '(';
  for (const auto& arg : n.args) out << canonical(arg) << ',';
  out << ')';
  return out.str();
}

}  // namespace

std::string to_string(const Expr& e) {
  std::ostringstream out;
  print(e, out);
  return out.str();
}

bool equivalent(const Expr& a, const Expr& b) { return canonical(a) == canonical(b); }

namespace {

inline double as_double(double x) { return x; }
inline double as_double(const Real& x) { return to_double(x); }

template <class T>
T eval(const Expr& e, EvalEnv<T>& env) {
  using std::atan;
  using std::cos;
  using std::exp;
  using std::log;
  using std::pow;
  using std::sin;
  using std::sqrt;
  const Node& n = e.node();
  const auto& a = n.args;
  switch (n.op) {
    case Op::Const: return T(n.value);
    case Op::Var:
      if (n.index >= kFirstDummy) {
        for (auto it = env.bound.rbegin(); it != env.bound.rend(); ++it)
          if (it->first == n.index) return it->second;
        throw DomainError("integration variable " + var_name(n.index) + " used outside its integral");
      }
      if (n.index < 0 || n.index >= static_cast<int>(env.vars.size()))
        throw DomainError("expression uses unbound variable " + var_name(n.index));
      return env.vars[n.index];
    case Op::Eps: return env.eps;
    case Op::Param: return T(n.param->fn(env.eps_value));
    case Op::Add: return eval(a[0], env) + eval(a[1], env);
    case Op::Mul: return eval(a[0], env) * eval(a[1], env);
    case Op::Neg: return -eval(a[0], env);
    case Op::Div: return eval(a[0], env) / eval(a[1], env);
    case Op::PowInt: {
      T base = eval(a[0], env);
      return pow(base, n.index);
    }
    case Op::Pow: {
      T base = eval(a[0], env);
      T exponent = eval(a[1], env);
      return pow(base, exponent);
    }
    case Op::Exp: return exp(eval(a[0], env));
    case Op::Log: return log(eval(a[0], env));
    case Op::Sin: return sin(eval(a[0], env));
    case Op::Cos: return cos(eval(a[0], env));
    case Op::Atan: return atan(eval(a[0], env));
    case Op::Sqrt: return sqrt(eval(a[0], env));
    case Op::FlatExp: {
      T u = eval(a[0], env);
      if (!(u > 0)) return T(0);
      T h = eval(a[1], env);
      if (h == 0) return T(0);
      return exp(T(-1) / u) * h;
    }
    case Op::Integral: {
      const IntegralOptions& opt = n.integral;
      T lo = eval(a[1], env);
      T hi = eval(a[2], env);
      T sign = 1;
      if (lo > hi) {
        std::swap(lo, hi);
        sign = -1;
      }
      if (lo < T(opt.support_lo)) lo = T(opt.support_lo);
      if (hi > T(opt.support_hi)) hi = T(opt.support_hi);
      if (!(hi > lo)) return T(0);
      double length = as_double(hi - lo);
      int panels = std::max(1, static_cast<int>(std::ceil(length / opt.panel_width)));
      env.bound.emplace_back(n.index, T(0));
      const std::size_t slot = env.bound.size() - 1;
      auto body = [&](const T& t) {
        env.bound[slot].second = t;
        return eval(a[0], env);
      };
      T value = integrate<T>(body, lo, hi, opt.nodes, panels);
      env.bound.pop_back();
      return sign * value;
    }
  }
  return T(0);
}

}  // namespace

template <class T>
T evaluate(const Expr& e, EvalEnv<T>& env) {
  return eval(e, env);
}

template double evaluate<double>(const Expr&, EvalEnv<double>&);
template Real evaluate<Real>(const Expr&, EvalEnv<Real>&);

}  // namespace gsf
