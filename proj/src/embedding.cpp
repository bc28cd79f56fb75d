#include "gsf/embedding.hpp"

#include "gsf/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace gsf {

namespace {

constexpr int kMomentNodes = 200;
constexpr int kCertificateNodes = 400;

// quadrature for integrals against psi: 24 nodes on panels of width 1/8
IntegralOptions psi_integral_options() {
  IntegralOptions opt;
  opt.support_lo = -1;
  opt.support_hi = 1;
  opt.panel_width = 0.125;
  opt.nodes = 24;
  return opt;
}

double chi_d(double x) { return std::fabs(x) < 1 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0; }

Real chi_r(const Real& x) {
  if (!(abs(x) < 1)) return Real(0);
  return boost::multiprecision::exp(Real(-1) / (1 - x * x));
}

// int_lo^hi x^q chi(x) dx for q = 0..qmax with an n-point rule in Real
std::vector<Real> chi_moments(int qmax, const Real& lo, const Real& hi) {
  const auto& rule = gauss_legendre<Real>(kMomentNodes);
  std::vector<Real> m(qmax + 1, Real(0));
  Real half = (hi - lo) / 2, mid = (hi + lo) / 2;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    Real x = mid + half * rule.nodes[i];
    Real w = rule.weights[i] * half * chi_r(x);
    Real p = 1;
    for (int q = 0; q <= qmax; ++q) {
      m[q] += w * p;
      p *= x;
    }
  }
  return m;
}

double poly_chi(const std::vector<int>& powers, const std::vector<double>& c, double x) {
  if (std::fabs(x) >= 1) return 0.0;
  double s = 0;
  for (std::size_t i = 0; i < powers.size(); ++i) s += c[i] * std::pow(x, powers[i]);
  return s * chi_d(x);
}

}  // namespace

double Mollifier1D::operator()(double x) const { return poly_chi(powers, coefficients, x); }

double Mollifier1D::max_residual() const {
  double m = 0;
  for (double r : moment_residuals) m = std::max(m, r);
  if (d_residual) m = std::max(m, *d_residual);
  if (psi0_residual) m = std::max(m, *psi0_residual);
  return m;
}

Mollifier1D build_mollifier(int j, const MollifierOptions& options) {
  if (j < 0) throw DomainError("moment order j must be nonnegative");
  if (options.d && !(*options.d > 0 && *options.d < 1))
    throw DomainError("boundary split d must lie in (0, 1)");
  ensure_real_range();
  Mollifier1D m;
  m.j = j;
  m.options = options;
  for (int p = 0; p <= j; ++p) m.powers.push_back(p);
  if (options.d) m.powers.push_back((j + 1) % 2 == 1 ? j + 1 : j + 2);
  if (options.psi0) {
    int top = m.powers.back() + 1;
    m.powers.push_back(top % 2 == 0 ? top : top + 1);
  }
  const std::size_t n = m.powers.size();
  const int qmax = j + m.powers.back();
  auto full = chi_moments(qmax, Real(-1), Real(1));
  auto left = chi_moments(m.powers.back(), Real(-1), Real(0));

  RealMatrix a(n, n);
  std::vector<Real> rhs(n, Real(0));
  std::size_t row = 0;
  for (int alpha = 0; alpha <= j; ++alpha, ++row) {
    for (std::size_t i = 0; i < n; ++i) a(row, i) = full[alpha + m.powers[i]];
    rhs[row] = alpha == 0 ? 1 : 0;
  }
  if (options.d) {
    for (std::size_t i = 0; i < n; ++i) a(row, i) = left[m.powers[i]];
    rhs[row] = *options.d;
    ++row;
  }
  if (options.psi0) {
    // psi(0) = c_0 chi(0) = c_0 / e
    for (std::size_t i = 0; i < n; ++i)
      a(row, i) = m.powers[i] == 0 ? Real(boost::multiprecision::exp(Real(-1))) : Real(0);
    rhs[row] = 1;
    ++row;
  }

  Eigen::MatrixXd ad(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) ad(r, c) = to_double(a(r, c));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(ad);
  const auto& sv = svd.singularValues();
  m.condition = sv(n - 1) > 0 ? sv(0) / sv(n - 1) : std::numeric_limits<double>::infinity();
  if (!(m.condition <= 1e12))
    throw NumericError("moment system for j=" + std::to_string(j) + " is ill-conditioned (" +
                       std::to_string(m.condition) + "); use a smaller j");

  RealMatrix inv = inverse(a);
  auto c = inv * std::span<const Real>(rhs);
  for (const auto& v : c) m.coefficients.push_back(to_double(v));

  // certificates with the finer double rule
  const auto& rule = gauss_legendre<double>(kCertificateNodes);
  std::vector<double> mom(j + 1, 0.0);
  double neg = 0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    double x = rule.nodes[i];
    double v = rule.weights[i] * m(x);
    double p = 1;
    for (int alpha = 0; alpha <= j; ++alpha) {
      mom[alpha] += v * p;
      p *= x;
    }
    double xl = (x - 1) / 2;  // node mapped to [-1, 0]
    neg += rule.weights[i] / 2 * m(xl);
  }
  for (int alpha = 0; alpha <= j; ++alpha)
    m.moment_residuals.push_back(std::fabs(mom[alpha] - (alpha == 0 ? 1.0 : 0.0)));
  if (options.d) m.d_residual = std::fabs(neg - *options.d);
  if (options.psi0) m.psi0_residual = std::fabs(m(0.0) - 1.0);
  m.l1_norm = integrate<double>([&](double x) { return std::fabs(m(x)); }, -1.0, 1.0, 20, 64);
  return m;
}

// ---------------------------------------------------------------- MollifierNet

MollifierNet::MollifierNet(ContextPtr ctx, MollifierNetOptions options)
    : ctx_(std::move(ctx)), options_(std::move(options)) {
  if (options_.j_max < 0) throw DomainError("j_max must be nonnegative");
  b_ = options_.b ? *options_.b : pow(Expr::eps(), -1);
  if (max_free_var(b_) >= 0) throw DomainError("b may depend only on eps");
  for (int j = 0; j <= options_.j_max; ++j) by_j_.push_back(build_mollifier(j, options_.mollifier));
  std::set<int> powers;
  for (const auto& m : by_j_) powers.insert(m.powers.begin(), m.powers.end());
  for (int p : powers) {
    auto net = std::make_shared<ParamNet>();
    net->name = "c" + std::to_string(p);
    // the closure owns its table so the parameter outlives this object
    std::vector<double> by_j(by_j_.size(), 0.0);
    for (std::size_t j = 0; j < by_j_.size(); ++j) {
      const auto& m = by_j_[j];
      auto it = std::find(m.powers.begin(), m.powers.end(), p);
      if (it != m.powers.end()) by_j[j] = m.coefficients[it - m.powers.begin()];
    }
    const int j_max = options_.j_max;
    net->fn = [by_j, j_max](double e) {
      int j = std::clamp(static_cast<int>(std::floor(std::log2(1.0 / e))), 0, j_max);
      return by_j[j];
    };
    coeff_params_[p] = std::move(net);
  }
}

int MollifierNet::j_at(double e) const {
  return std::clamp(static_cast<int>(std::floor(std::log2(1.0 / e))), 0, options_.j_max);
}

const Mollifier1D& MollifierNet::mollifier(int j) const {
  if (j < 0 || j > options_.j_max) throw DomainError("moment order outside 0..j_max");
  return by_j_[j];
}

GenNum MollifierNet::b_net() const { return GenNum::from_expr(ctx_, b_); }

Expr MollifierNet::psi(const Expr& u) const {
  Expr poly(0.0);
  for (const auto& [p, param] : coeff_params_) {
    Expr term = Expr::param(param);
    if (p > 0) term = term * pow(u, p);
    poly = poly + term;
  }
  return poly * chi(u);
}

Expr MollifierNet::kernel(const Expr& u) const { return b_ * psi(b_ * u); }

Expr MollifierNet::kernel_nd(const std::vector<Expr>& u) const {
  const double s = std::sqrt(static_cast<double>(u.size()));
  Expr k(1.0);
  for (const auto& ui : u) k = k * (Expr(s) * b_ * psi(Expr(s) * b_ * ui));
  return k;
}

namespace {

Expr heaviside_expr(const MollifierNet& net, const Expr& u) {
  int t = fresh_dummy();
  return integral(net.psi(Expr::var(t)), t, Expr(-1.0), net.b() * u, psi_integral_options());
}

Expr delta_expr(const MollifierNet& net, const Expr& u, int order) {
  // k-th derivative of b psi(b u) in u, built on a scratch variable
  const int scratch = 0;
  Expr k = net.kernel(Expr::var(scratch));
  for (int i = 0; i < order; ++i) k = differentiate(k, scratch);
  return substitute(k, scratch, u);
}

}  // namespace

ParserOptions MollifierNet::parser_options(ParserOptions base) const {
  auto self = std::make_shared<MollifierNet>(*this);
  auto one = [](const std::vector<Expr>& a, const char* name) {
    if (a.size() != 1) throw DomainError(std::string(name) + " takes one argument");
    return a[0];
  };
  base.functions["delta"] = [self, one](const std::vector<Expr>& a) {
    return delta_expr(*self, one(a, "delta"), 0);
  };
  base.functions["ddelta"] = [self, one](const std::vector<Expr>& a) {
    return delta_expr(*self, one(a, "ddelta"), 1);
  };
  base.functions["H"] = [self, one](const std::vector<Expr>& a) {
    return heaviside_expr(*self, one(a, "H"));
  };
  return base;
}

// ---------------------------------------------------------------- group actions

Expr scale_action(double r, const Expr& phi, std::size_t n) {
  if (!(r > 0)) throw DomainError("scaling factor must be positive");
  std::vector<Expr> rep;
  for (std::size_t i = 0; i < n; ++i) rep.push_back(Expr::var(static_cast<int>(i)) / Expr(r));
  return Expr(std::pow(r, -static_cast<double>(n))) * substitute_all(phi, rep);
}

Expr translate_action(const std::vector<double>& a, const Expr& phi) {
  std::vector<Expr> rep;
  for (std::size_t i = 0; i < a.size(); ++i) rep.push_back(Expr::var(static_cast<int>(i)) - Expr(a[i]));
  return substitute_all(phi, rep);
}

// ---------------------------------------------------------------- DistSpec

DistSpec DistSpec::delta(double a, int order) {
  DistTerm t;
  t.kind = DistTerm::Kind::Delta;
  t.at = a;
  t.order = order;
  return DistSpec{{t}};
}

DistSpec DistSpec::heaviside(double a) {
  DistTerm t;
  t.kind = DistTerm::Kind::Heaviside;
  t.at = a;
  return DistSpec{{t}};
}

DistSpec DistSpec::regular(Expr f, std::optional<std::pair<double, double>> window) {
  if (max_free_var(f) > 0) throw DomainError("regular distributions are functions of x only");
  if (window && !(window->first < window->second)) throw DomainError("empty window");
  DistTerm t;
  t.kind = DistTerm::Kind::Regular;
  t.f = std::move(f);
  t.window = window;
  return DistSpec{{t}};
}

namespace {

std::vector<std::string> split_terms(std::string_view s) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '(' || c == '[') ++depth;
    if (c == ')' || c == ']') --depth;
    bool exponent_sign = i > 0 && (s[i - 1] == 'e' || s[i - 1] == 'E') && i >= 2 &&
                         std::isdigit(static_cast<unsigned char>(s[i - 2]));
    if (c == '+' && depth == 0 && !exponent_sign && !cur.empty()) {
      out.push_back(cur);
      cur.clear();
      continue;
    }
    if (!std::isspace(static_cast<unsigned char>(c)) || depth > 0) cur += c;
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double parse_number(const std::string& s) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw DomainError("bad number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw DomainError("bad number '" + s + "'");
  }
}

std::string fmt_num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

DistSpec DistSpec::parse(std::string_view text) {
  DistSpec spec;
  auto terms = split_terms(text);
  if (terms.empty()) throw DomainError("empty distribution");
  for (std::string term : terms) {
    double coef = 1.0;
    if (!term.empty() && term[0] == '-') {
      coef = -1.0;
      term = term.substr(1);
    }
    if (auto star = term.find('*');
        star != std::string::npos && term.rfind("regular", 0) != 0) {
      coef *= parse_number(term.substr(0, star));
      term = term.substr(star + 1);
    }
    DistSpec one;
    if (term.rfind("regular(", 0) == 0) {
      int depth = 0;
      std::size_t close = std::string::npos;
      for (std::size_t i = 7; i < term.size(); ++i) {
        if (term[i] == '(') ++depth;
        if (term[i] == ')' && --depth == 0) {
          close = i;
          break;
        }
      }
      if (close == std::string::npos) throw DomainError("unbalanced regular(...)");
      Expr f = parse_expr(term.substr(8, close - 8));
      std::optional<std::pair<double, double>> window;
      std::string rest = term.substr(close + 1);
      if (!rest.empty()) {
        if (rest.size() < 5 || rest.rfind("@[", 0) != 0 || rest.back() != ']')
          throw DomainError("regular window must look like @[lo,hi]");
        std::string inner = rest.substr(2, rest.size() - 3);
        auto comma = inner.find(',');
        if (comma == std::string::npos) throw DomainError("regular window must look like @[lo,hi]");
        window = std::make_pair(parse_number(inner.substr(0, comma)),
                                parse_number(inner.substr(comma + 1)));
      }
      one = regular(f, window);
    } else {
      auto at = term.find('@');
      if (at == std::string::npos) throw DomainError("distribution term '" + term + "' needs @point");
      std::string head = term.substr(0, at);
      double a = parse_number(term.substr(at + 1));
      if (head == "H" || head == "heaviside") {
        one = heaviside(a);
      } else if (head.rfind("delta", 0) == 0) {
        std::string suffix = head.substr(5);
        int order = 0;
        if (!suffix.empty() && suffix.find_first_not_of('\'') == std::string::npos) {
          order = static_cast<int>(suffix.size());
        } else if (suffix.rfind("^(", 0) == 0 && suffix.back() == ')') {
          order = static_cast<int>(parse_number(suffix.substr(2, suffix.size() - 3)));
        } else if (!suffix.empty()) {
          throw DomainError("bad delta derivative '" + head + "'");
        }
        if (order < 0) throw DomainError("negative derivative order");
        one = delta(a, order);
      } else {
        throw DomainError("unknown distribution '" + head + "' (delta, H, regular)");
      }
    }
    one.terms[0].coefficient = coef;
    spec.terms.push_back(one.terms[0]);
  }
  return spec;
}

DistSpec DistSpec::derivative() const {
  DistSpec out;
  for (const auto& t : terms) {
    switch (t.kind) {
      case DistTerm::Kind::Delta: {
        DistTerm d = t;
        ++d.order;
        out.terms.push_back(d);
        break;
      }
      case DistTerm::Kind::Heaviside: {
        DistTerm d = t;
        d.kind = DistTerm::Kind::Delta;
        d.order = 0;
        out.terms.push_back(d);
        break;
      }
      case DistTerm::Kind::Regular: {
        DistTerm d = t;
        d.f = differentiate(t.f, 0);
        out.terms.push_back(d);
        if (t.window) {
          // jumps of f * 1_window at the window ends
          auto value = [&](double x) {
            std::vector<double> v{x};
            return evaluate<double>(t.f, 0.5, std::span<const double>(v));
          };
          if (depends_on_eps(t.f)) throw DomainError("windowed regular term must not depend on eps");
          DistTerm lo;
          lo.kind = DistTerm::Kind::Delta;
          lo.at = t.window->first;
          lo.coefficient = t.coefficient * value(t.window->first);
          DistTerm hi = lo;
          hi.at = t.window->second;
          hi.coefficient = -t.coefficient * value(t.window->second);
          if (lo.coefficient != 0) out.terms.push_back(lo);
          if (hi.coefficient != 0) out.terms.push_back(hi);
        }
        break;
      }
    }
  }
  return out;
}

std::string DistSpec::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& t = terms[i];
    if (i) s += " + ";
    if (t.coefficient != 1.0) s += fmt_num(t.coefficient) + "*";
    switch (t.kind) {
      case DistTerm::Kind::Delta:
        s += "delta";
        if (t.order > 0) s += "^(" + std::to_string(t.order) + ")";
        s += "@" + fmt_num(t.at);
        break;
      case DistTerm::Kind::Heaviside:
        s += "H@" + fmt_num(t.at);
        break;
      case DistTerm::Kind::Regular:
        s += "regular(" + gsf::to_string(t.f) + ")";
        if (t.window) s += "@[" + fmt_num(t.window->first) + "," + fmt_num(t.window->second) + "]";
        break;
    }
  }
  return s;
}

// ---------------------------------------------------------------- embedding

GSF embed(const DistSpec& spec, const MollifierNet& net) {
  if (spec.terms.empty()) throw DomainError("empty distribution");
  const Expr x = Expr::var(0);
  Expr total(0.0);
  for (const auto& t : spec.terms) {
    Expr e;
    switch (t.kind) {
      case DistTerm::Kind::Delta:
        e = delta_expr(net, x - Expr(t.at), t.order);
        break;
      case DistTerm::Kind::Heaviside:
        e = heaviside_expr(net, x - Expr(t.at));
        break;
      case DistTerm::Kind::Regular: {
        int tv = fresh_dummy();
        Expr tt = Expr::var(tv);
        Expr shifted = substitute(t.f, 0, x - tt / net.b());
        Expr lo = t.window ? net.b() * (x - Expr(t.window->second)) : Expr(-1.0);
        Expr hi = t.window ? net.b() * (x - Expr(t.window->first)) : Expr(1.0);
        e = integral(shifted * net.psi(tt), tv, lo, hi, psi_integral_options());
        break;
      }
    }
    total = t.coefficient == 1.0 ? total + e : total + Expr(t.coefficient) * e;
  }
  return GSF(net.context(), {total}, 1, std::nullopt, "iota(" + spec.to_string() + ")");
}

namespace {

double b_value(const MollifierNet& net, double e) {
  std::vector<double> none;
  return evaluate<double>(net.b(), e, std::span<const double>(none));
}

double eval_x(const Expr& f, double e, double x) {
  std::vector<double> v{x};
  return evaluate<double>(f, e, std::span<const double>(v));
}

}  // namespace

PairingReport pairing_limit(const DistSpec& spec, const MollifierNet& net, const Expr& phi,
                            double support_lo, double support_hi) {
  if (!(support_lo < support_hi)) throw DomainError("empty test-function support");
  if (max_free_var(phi) > 0 || depends_on_eps(phi))
    throw DomainError("test function must depend on x only");
  PairingReport rep;
  // exact <T, phi>
  auto wide = [&](const std::function<double(double)>& f, double lo, double hi) {
    if (!(hi > lo)) return 0.0;
    return integrate<double>(f, lo, hi, 20, 64);
  };
  for (const auto& t : spec.terms) {
    double v = 0;
    switch (t.kind) {
      case DistTerm::Kind::Delta: {
        Expr d = phi;
        for (int i = 0; i < t.order; ++i) d = differentiate(d, 0);
        v = (t.order % 2 ? -1.0 : 1.0) * eval_x(d, 0.5, t.at);
        break;
      }
      case DistTerm::Kind::Heaviside:
        v = wide([&](double x) { return eval_x(phi, 0.5, x); }, std::max(t.at, support_lo), support_hi);
        break;
      case DistTerm::Kind::Regular: {
        double lo = support_lo, hi = support_hi;
        if (t.window) {
          lo = std::max(lo, t.window->first);
          hi = std::min(hi, t.window->second);
        }
        v = wide([&](double x) { return eval_x(t.f, 0.5, x) * eval_x(phi, 0.5, x); }, lo, hi);
        break;
      }
    }
    rep.exact += t.coefficient * v;
  }

  // pair term by term: delta-type kernels cancel to O(1) from terms of size
  // b^(k+1), so they are integrated in Real over the kernel support
  struct Piece {
    const DistTerm* term;
    Expr body;
  };
  std::vector<Piece> pieces;
  for (const auto& t : spec.terms) {
    DistTerm unit = t;
    unit.coefficient = 1.0;
    pieces.push_back({&t, embed(DistSpec{{unit}}, net).component(0)});
  }
  const auto& ctx = net.context();
  for (std::size_t k = 0; k < ctx->size(); ++k) {
    const double e = ctx->eps(k);
    const double inv_b = 1.0 / b_value(net, e);
    double value = 0;
    for (const auto& piece : pieces) {
      const DistTerm& t = *piece.term;
      double v = 0;
      if (t.kind == DistTerm::Kind::Delta) {
        std::vector<Real> none;
        const Real b = evaluate<Real>(net.b(), e, std::span<const Real>(none));
        const Real a(t.at);
        auto integrand = [&](const Real& x) {
          std::vector<Real> xs{x};
          std::span<const Real> sx(xs);
          return evaluate<Real>(piece.body, e, sx) * evaluate<Real>(phi, e, sx);
        };
        Real lo = std::max(a - 1 / b, Real(support_lo));
        Real hi = std::min(a + 1 / b, Real(support_hi));
        Real mid = std::clamp(a, lo, hi);
        Real acc = 0;
        if (mid > lo) acc += integrate<Real>(integrand, lo, mid, 24, 8);
        if (hi > mid) acc += integrate<Real>(integrand, mid, hi, 24, 8);
        v = to_double(acc);
      } else {
        std::vector<double> cuts{support_lo, support_hi};
        std::vector<double> centers;
        if (t.kind == DistTerm::Kind::Heaviside) centers = {t.at};
        else if (t.window) centers = {t.window->first, t.window->second};
        for (double c : centers)
          for (double s : {-1.0, 0.0, 1.0}) {
            double p = c + s * inv_b;
            if (p > support_lo && p < support_hi) cuts.push_back(p);
          }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
          double lo = cuts[i], hi = cuts[i + 1];
          int panels = hi - lo <= 2.5 * inv_b ? 8 : 32;
          v += integrate<double>(
              [&](double x) { return eval_x(piece.body, e, x) * eval_x(phi, e, x); }, lo, hi, 24,
              panels);
        }
      }
      value += t.coefficient * v;
    }
    rep.rows.push_back({e, value, std::fabs(value - rep.exact)});
  }
  const std::size_t t0 = ctx->grid().tail_begin();
  rep.monotone = true;
  for (std::size_t k = t0 + 1; k < rep.rows.size(); ++k)
    if (rep.rows[k].abs_error > std::max(rep.rows[k - 1].abs_error, rep.noise_floor))
      rep.monotone = false;
  rep.final_error = rep.rows.back().abs_error;
  std::vector<double> lx, ly;
  for (std::size_t k = t0; k < rep.rows.size(); ++k)
    if (rep.rows[k].abs_error > rep.noise_floor) {
      lx.push_back(std::log(rep.rows[k].eps));
      ly.push_back(std::log(rep.rows[k].abs_error));
    }
  if (lx.size() >= 2) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      mx += lx[i];
      my += ly[i];
    }
    mx /= lx.size();
    my /= ly.size();
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxx += (lx[i] - mx) * (lx[i] - mx);
      sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx > 0) rep.rate = sxy / sxx;
  }
  return rep;
}

CommutationReport derivative_commutation_check(const DistSpec& spec, const MollifierNet& net) {
  CommutationReport rep;
  GSF f = embed(spec, net);
  GSF g = embed(spec.derivative(), net);
  Expr df = differentiate(f.component(0), 0);
  rep.structural = equivalent(df, g.component(0));
  const auto& ctx = net.context();
  for (std::size_t k = ctx->grid().tail_begin(); k < ctx->size(); ++k) {
    const double e = ctx->eps(k);
    const double inv_b = 1.0 / b_value(net, e);
    std::vector<double> probes;
    for (const auto& t : spec.terms) {
      if (t.kind == DistTerm::Kind::Regular) {
        double lo = t.window ? t.window->first : -1.0;
        double hi = t.window ? t.window->second : 1.0;
        for (int i = 1; i < 8; ++i) probes.push_back(lo + (hi - lo) * i / 8.0);
      } else {
        for (double s : {-0.9, -0.5, -0.1, 0.0, 0.3, 0.7}) probes.push_back(t.at + s * inv_b);
      }
    }
    for (double x : probes) {
      double a = eval_x(df, e, x);
      double b = eval_x(g.component(0), e, x);
      double scale = std::max(1.0, std::fabs(b));
      rep.max_abs_diff = std::max(rep.max_abs_diff, std::fabs(a - b) / scale);
      ++rep.probes;
    }
  }
  return rep;
}

std::vector<GrowthFit> mollifier_derivative_growth(const MollifierNet& net, int max_order) {
  std::vector<GrowthFit> out;
  const auto& ctx = net.context();
  Expr k = net.kernel(Expr::var(0));
  for (int order = 0; order <= max_order; ++order) {
    std::vector<double> lb, ls;
    for (std::size_t i = ctx->grid().tail_begin(); i < ctx->size(); ++i) {
      const double e = ctx->eps(i);
      const double b = b_value(net, e);
      double sup = 0;
      for (int s = -500; s <= 500; ++s) sup = std::max(sup, std::fabs(eval_x(k, e, s / 500.0 / b)));
      lb.push_back(std::log(b));
      ls.push_back(std::log(sup));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lb.size(); ++i) {
      mx += lb[i];
      my += ls[i];
    }
    mx /= lb.size();
    my /= ls.size();
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lb.size(); ++i) {
      sxx += (lb[i] - mx) * (lb[i] - mx);
      sxy += (lb[i] - mx) * (ls[i] - my);
    }
    out.push_back({order, sxx > 0 ? sxy / sxx : 0.0});
    k = differentiate(k, 0);
  }
  return out;
}

}  // namespace gsf
