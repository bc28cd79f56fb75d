#include "gsf/global_inverse.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gsf {

namespace {

Real norm2(std::span<const Real> v) {
  Real s = 0;
  for (const auto& x : v) s += x * x;
  return boost::multiprecision::sqrt(s);
}

std::vector<Real> minus(std::span<const Real> a, std::span<const Real> b) {
  std::vector<Real> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::string fmt_point(std::span<const Real> p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? ", " : "") + fmt(to_double(p[i]));
  return s + ")";
}

/// Unit directions: +-axis vectors, then normalized Halton points; 64 n in total.
std::vector<std::vector<double>> unit_directions(std::size_t n) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < n; ++i)
    for (double s : {1.0, -1.0}) {
      std::vector<double> u(n, 0.0);
      u[i] = s;
      out.push_back(std::move(u));
    }
  if (n == 1) return out;
  for (std::size_t j = 0; out.size() < 64 * n; ++j) {
    auto h = halton(j, n);
    double norm = 0;
    for (double& t : h) {
      t = 2 * t - 1;
      norm += t * t;
    }
    if (norm < 1e-6) continue;
    norm = std::sqrt(norm);
    for (double& t : h) t /= norm;
    out.push_back(std::move(h));
  }
  return out;
}

/// Generalized probe points for nondegeneracy: real points, Halton points of
/// [-4, 4]^n and the infinitesimal point eps (1, ..., 1).
std::vector<GenPoint> generalized_probes(const ContextPtr& ctx, std::size_t n) {
  std::vector<GenPoint> out;
  out.push_back(GenPoint::constant(ctx, std::vector<double>(n, 0.0)));
  for (std::size_t i = 0; i < n; ++i)
    for (double s : {1.0, -1.0}) {
      std::vector<double> u(n, 0.0);
      u[i] = s;
      out.push_back(GenPoint::constant(ctx, u));
    }
  for (std::size_t j = 1; j <= 8; ++j) {
    auto h = halton(j, n);
    for (double& t : h) t = 8 * t - 4;
    out.push_back(GenPoint::constant(ctx, h));
  }
  GenNum e = GenNum::from_expr(ctx, Expr::eps());
  out.push_back(GenPoint(std::vector<GenNum>(n, e)));
  return out;
}

void require_square(const GSF& f) {
  if (f.codim() != f.dim()) throw DomainError("global inversion needs as many components as variables");
}

void require_nondegenerate_on_probes(const GSF& f) {
  for (const auto& p : generalized_probes(f.context(), f.dim())) {
    Verdict v = is_nondegenerate(jacobian(f, p));
    if (!v.is_true())
      throw CertificateError("Df is not invertible at the probe point " + fmt_point(p.at(p.context()->size() - 1)) +
                             " (nondegeneracy " + to_string(v.value) + "): " + v.diagnostics);
  }
}

/// sup over grid eps of ||f_eps(0)||, or +inf when f(0) is not finite.
double bound_at_origin(const GSF& f) {
  const auto& ctx = f.context();
  const std::vector<Real> zero(f.dim(), Real(0));
  std::vector<Real> norms(ctx->size());
  for (std::size_t k = 0; k < ctx->size(); ++k) norms[k] = norm2(f.eval_at(k, zero));
  GenNum n = GenNum::from_samples(ctx, norms);
  auto est = exponent_estimate(n);
  if (est.verdict.is_true() && est.exponent < -ctx->thresholds().slack) return INFINITY;
  double c = 0;
  for (const auto& v : norms) c = std::max(c, to_double(v));
  return c;
}

struct Newton1D {
  Real x;
  Real residual;
};

/// Newton in Real on F(x) = y from a double-accurate start, until no progress.
Newton1D polish_1d(const Expr& fn, const Expr& dfn, double e, const Real& y, Real x) {
  auto eval = [&](const Expr& ex, const Real& at) {
    std::vector<Real> v{at};
    return evaluate<Real>(ex, e, std::span<const Real>(v));
  };
  Real r = eval(fn, x) - y;
  for (int it = 0; it < 100 && r != 0; ++it) {
    Real d = eval(dfn, x);
    if (d == 0) break;
    Real xn = x - r / d;
    Real rn = eval(fn, xn) - y;
    if (!(abs(rn) < abs(r))) break;
    const bool slow = abs(rn) > abs(r) / 2;
    x = xn;
    r = rn;
    if (slow) break;
  }
  return {x, abs(r)};
}

/// Safeguarded Newton/bisection in double on an increasing function h.
double solve_increasing(const std::function<double(double)>& h, const std::function<double(double)>& dh) {
  double lo = -1, hi = 1;
  int grow = 0;
  while (h(lo) > 0) {
    hi = lo;
    lo *= 2;
    if (++grow > 200) throw NumericError("bracketing failed: f is bounded below");
  }
  while (h(hi) < 0) {
    lo = hi;
    hi *= 2;
    if (++grow > 200) throw NumericError("bracketing failed: f is bounded above");
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    double v = h(x);
    if (v == 0) return x;
    (v < 0 ? lo : hi) = x;
    double d = dh(x);
    double xn = d > 0 ? x - v / d : 0.5 * (lo + hi);
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    if (xn == x || hi - lo <= 4e-16 * std::max(1.0, std::fabs(x))) return xn;
    x = xn;
  }
  return x;
}

GenNum scalar_net(const ContextPtr& ctx, std::vector<Real> v) { return GenNum::from_samples(ctx, std::move(v)); }

}  // namespace

int uniform_positivity_exponent(const GSF& f, const SetNet& a, Scalarization b) {
  const auto& ctx = f.context();
  if (a.dim() != f.dim()) throw DomainError("set dimension does not match the function");
  if (!b) b = [](std::span<const Real> v) { return norm2(v); };
  const std::size_t count = static_cast<std::size_t>(ctx->thresholds().probes) * f.dim();

  // probe i of A_eps at every grid point forms a generalized point of [A_eps]
  std::vector<std::vector<std::vector<Real>>> samples(ctx->size());
  for (std::size_t k = 0; k < ctx->size(); ++k) samples[k] = a.sample_points(ctx->eps(k), count);
  std::size_t common = count;
  for (const auto& s : samples) common = std::min(common, s.size());
  if (common == 0) throw DomainError("the set has no sample points");

  std::vector<Real> minima(ctx->size());
  for (std::size_t i = 0; i < common; ++i) {
    std::vector<Real> vals(ctx->size());
    for (std::size_t k = 0; k < ctx->size(); ++k) {
      vals[k] = b(f.eval_at(k, samples[k][i]));
      if (i == 0 || vals[k] < minima[k]) minima[k] = vals[k];
    }
    Verdict pos = is_strictly_positive(scalar_net(ctx, std::move(vals)));
    if (!pos.is_true())
      throw CertificateError("pointwise positivity fails at the probe " + fmt_point(samples.back()[i]) + " (" +
                             to_string(pos.value) + "): " + pos.diagnostics);
  }
  for (int q = 0; q <= ctx->thresholds().m_max; ++q) {
    bool ok = true;
    for (std::size_t k = ctx->grid().tail_begin(); k < ctx->size() && ok; ++k)
      ok = minima[k] > ctx->rho_pow(k, q);
    if (ok) return q;
  }
  throw CertificateError("positivity is not uniform: no q <= " + std::to_string(ctx->thresholds().m_max) +
                         " bounds the sampled minimum from below");
}

int default_n_schedule(double eps) {
  const double n = std::ceil(std::log2(1.0 / eps) - 1e-12);
  return static_cast<int>(std::clamp(n, 1.0, 8.0));
}

MonotoneNet build_monotone_net_1d(const GSF& f, double r, std::function<int(double)> n_schedule) {
  const auto& ctx = f.context();
  if (f.dim() != 1 || f.codim() != 1) throw DomainError("the one-dimensional theorem needs f: R -> R");
  if (!(r >= 0)) throw DomainError("the lower bound r must be nonnegative");
  if (!n_schedule) n_schedule = default_n_schedule;
  const Expr fp = f.derivative(0, {1});

  int max_n = 1;
  for (std::size_t k = 0; k < ctx->size(); ++k) max_n = std::max(max_n, n_schedule(ctx->eps(k)));

  // sign of f' on the cutoff support [-(n+1), n+1] per eps
  int sign = 0;
  for (std::size_t k = 0; k < ctx->size(); ++k) {
    const double e = ctx->eps(k);
    const int n = n_schedule(e) + 1;
    if (n < 2) throw DomainError("the n schedule must be positive");
    const int m = 64 * n;
    for (int i = 0; i <= m; ++i) {
      std::vector<Real> x{Real(-n + 2.0 * n * i / m)};
      if (f.domain() && !f.domain()->contains(e, x))
        throw DomainError("f is not defined on [-" + std::to_string(n) + ", " + std::to_string(n) + "]");
      Real v = evaluate<Real>(fp, e, std::span<const Real>(x));
      const int s = v > 0 ? 1 : (v < 0 ? -1 : 0);
      if (s == 0 || (sign != 0 && s != sign))
        throw CertificateError("f' changes sign inside [-" + std::to_string(n) + ", " + std::to_string(n) +
                               "] at eps=" + fmt(e) + ", x=" + fmt(to_double(x[0])));
      sign = s;
      if (r > 0 && abs(v) < Real(r) * (1 - Real(1e-12)))
        throw CertificateError("|f'| drops below r at eps=" + fmt(e) + ", x=" + fmt(to_double(x[0])));
    }
  }

  const double slope = std::max(1.0, r);
  std::vector<int> qs;
  GSF fprime(ctx, {fp}, 1, std::nullopt, "f'");
  for (int n = 1; n <= max_n + 1; ++n)
    qs.push_back(uniform_positivity_exponent(fprime, SetNet::box({Expr(-n)}, {Expr(n)}),
                                                [](std::span<const Real> v) { return abs(v[0]); }));

  auto net = std::make_shared<ParamNet>();
  net->name = "n";
  net->fn = [n_schedule](double e) { return static_cast<double>(n_schedule(e) + 1); };
  const Expr nn = Expr::param(net);
  const Expr x = Expr::var(0);
  const int t = fresh_dummy();
  const Expr tv = Expr::var(t);
  const double s = sign * slope;
  const Expr phi = smooth_step(nn - tv) * smooth_step(nn + tv);
  const Expr integrand = (substitute(fp, 0, tv) - Expr(s)) * phi;
  IntegralOptions opt;
  opt.support_lo = -(max_n + 1);
  opt.support_hi = max_n + 1;
  const Expr f0 = substitute(f.component(0), 0, Expr(0.0));
  const Expr fbar = f0 + Expr(s) * x + integral(integrand, t, Expr(0.0), x, opt);
  MonotoneNet out{.fbar = GSF(ctx, {fbar}, 1, std::nullopt, "fbar"),
                  .sign = sign,
                  .outside_slope = slope,
                  .n_schedule = n_schedule,
                  .q = std::move(qs)};

  // fbar' keeps the sign of f' everywhere, also beyond the cutoff
  const Expr dbar = out.fbar.derivative(0, {1});
  for (std::size_t k = ctx->grid().tail_begin(); k < ctx->size(); ++k) {
    const double e = ctx->eps(k);
    for (int i = 0; i <= 256; ++i) {
      std::vector<double> xv{-2.0 * max_n + 4.0 * max_n * i / 256};
      double v = sign * evaluate<double>(dbar, e, std::span<const double>(xv));
      if (!(v > 0))
        throw CertificateError("fbar' vanishes at x=" + fmt(xv[0]) + ", eps=" + fmt(e));
    }
  }
  return out;
}

const char* to_string(GlobalKind kind) {
  switch (kind) {
    case GlobalKind::OneD: return "1d";
    case GlobalKind::Hadamard: return "hadamard";
    case GlobalKind::HadamardLevy: return "hadamard-levy";
  }
  return "?";
}

GlobalCert global_1d_certificate(const GSF& f, double r) {
  const auto& ctx = f.context();
  if (f.dim() != 1 || f.codim() != 1) throw DomainError("the one-dimensional theorem needs f: R -> R");
  if (!(r >= 0)) throw DomainError("the lower bound r must be nonnegative");

  // |f'(x)| > r on a compact exhaustion of compactly supported probe points
  GSF fprime(ctx, {f.derivative(0, {1})}, 1, f.domain(), "f'");
  std::vector<GenPoint> probes;
  for (double v : {0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0, 4.0, -4.0, 7.0, -7.0})
    probes.push_back(GenPoint::constant(ctx, std::vector<double>{v}));
  GenNum e = GenNum::from_expr(ctx, Expr::eps());
  probes.push_back(GenPoint::scalar(e));
  probes.push_back(GenPoint::scalar(-1.0 * e));
  probes.push_back(GenPoint::scalar(GenNum::constant(ctx, 1.0) + e));
  for (const auto& p : probes) {
    GenNum d = abs(gsf_value(fprime, p)[0]);
    Verdict pos = r > 0 ? leq(GenNum::constant(ctx, r), d) : is_strictly_positive(d);
    if (r > 0 && pos.is_true()) pos = is_strictly_positive(d);
    if (!pos.is_true())
      throw CertificateError("|f'(x)| > r fails at the probe x=" + fmt(p[0].value(ctx->size() - 1)) + " (" +
                             to_string(pos.value) + "): " + pos.diagnostics);
  }

  GlobalCert cert{.kind = GlobalKind::OneD, .f = f};
  cert.r = r;
  cert.monotone = build_monotone_net_1d(f, r);
  cert.c_f0 = bound_at_origin(f);
  cert.surjective = r > 0 && std::isfinite(cert.c_f0);
  cert.eps_prime = ctx->eps(0);
  cert.passed = true;
  cert.notes = "fbar = f on [-n, n] with n = n(eps)";
  if (r == 0) cert.notes += "; r = 0: surjectivity onto csp(R) not certified";
  else if (!std::isfinite(cert.c_f0)) cert.notes += "; f(0) is not finite: surjectivity not certified";
  return cert;
}

GlobalCert hadamard_certificate(const GSF& f, const HadamardOptions& options) {
  require_square(f);
  const auto& ctx = f.context();
  const std::size_t n = f.dim();
  if (options.j_max < 1) throw DomainError("the radius schedule needs at least two radii");
  require_nondegenerate_on_probes(f);

  const auto dirs = unit_directions(n);
  GlobalCert cert{.kind = GlobalKind::Hadamard, .f = f};
  cert.eps_prime = ctx->eps(0);
  cert.bound_m = options.bound_m;
  cert.c_f0 = bound_at_origin(f);
  std::vector<Real> p(n);
  for (int j = 0; j <= options.j_max; ++j) {
    const double radius = std::ldexp(1.0, j);
    Real inf_norm = -1;
    for (std::size_t k = 0; k < ctx->size(); ++k) {
      const double e = ctx->eps(k);
      for (const auto& u : dirs) {
        for (std::size_t i = 0; i < n; ++i) p[i] = Real(radius) * Real(u[i]);
        if (f.domain() && !f.domain()->contains(e, p))
          throw DomainError("Hadamard certificate needs a globally defined net");
        if (determinant(f.jacobian_eps(e, p)) == 0)
          throw CertificateError("det Df vanishes at eps=" + fmt(e) + ", x=" + fmt_point(p));
        Real v = norm2(f.eval_eps(e, p));
        if (inf_norm < 0 || v < inf_norm) inf_norm = v;
      }
    }
    cert.properness.push_back({radius, to_double(inf_norm)});
  }
  const auto& t = cert.properness;
  const std::size_t last = t.size() - 1;
  const bool increasing = t[last].inf_norm > t[last - 1].inf_norm &&
                          (last < 2 || t[last - 1].inf_norm > t[last - 2].inf_norm);
  cert.passed = increasing && t[last].inf_norm >= options.bound_m;
  if (!cert.passed) {
    for (const auto& row : t)
      if (row.inf_norm >= 0.99 * t[last].inf_norm) {
        cert.plateau_radius = row.radius;
        break;
      }
    cert.notes = "properness table plateaus below M = " + fmt(options.bound_m);
  } else {
    cert.notes = "det Df nonzero on sphere probes; properness table exceeds M";
  }
  cert.surjective = cert.passed;
  return cert;
}

GlobalCert hadamard_levy_certificate(const GSF& f, const BetaSpec& beta) {
  require_square(f);
  const auto& ctx = f.context();
  const std::size_t n = f.dim();
  if (!(beta.a > 0) || !(beta.b >= 0) || (beta.kind == BetaSpec::Kind::Constant && beta.b != 0))
    throw DomainError("beta must be a positive constant or affine a + b s with a > 0, b >= 0");
  require_nondegenerate_on_probes(f);

  const auto dirs = unit_directions(n);
  double measured = 0;
  std::vector<Real> p(n);
  for (std::size_t k = 0; k < ctx->size(); ++k) {
    const double e = ctx->eps(k);
    for (int j = -3; j <= 10; j += 1) {
      const double radius = std::ldexp(1.0, j);
      for (std::size_t d = 0; d <= dirs.size(); ++d) {
        // the last probe per radius is an interior Halton point
        if (d < dirs.size()) {
          for (std::size_t i = 0; i < n; ++i) p[i] = Real(radius) * Real(dirs[d][i]);
        } else {
          auto h = halton(static_cast<std::size_t>(j + 4), n);
          for (std::size_t i = 0; i < n; ++i) p[i] = Real(radius) * Real(2 * h[i] - 1);
        }
        if (f.domain() && !f.domain()->contains(e, p))
          throw DomainError("Hadamard-Levy certificate needs a globally defined net");
        RealMatrix jm = f.jacobian_eps(e, p);
        if (determinant(jm) == 0)
          throw CertificateError("Df is singular at eps=" + fmt(e) + ", x=" + fmt_point(p));
        const double norm = to_double(operator_norm(inverse(jm)));
        const double bound = beta.a + beta.b * to_double(norm2(p));
        measured = std::max(measured, norm);
        if (norm > bound * (1 + 1e-12))
          throw CertificateError("||Df^-1|| = " + fmt(norm) + " exceeds beta = " + fmt(bound) + " at eps=" +
                                 fmt(e) + ", x=" + fmt_point(p));
      }
    }
  }
  GlobalCert cert{.kind = GlobalKind::HadamardLevy, .f = f};
  cert.beta = beta;
  cert.measured_c = measured;
  cert.eps_prime = ctx->eps(0);
  cert.c_f0 = bound_at_origin(f);
  cert.passed = true;
  cert.surjective = beta.kind == BetaSpec::Kind::Constant;
  cert.notes = cert.surjective ? "constant bound: ||g(y)|| <= C ||y - f(0)||"
                               : "affine bound: global diffeomorphism onto its image";
  return cert;
}

namespace {

GlobalInverseResult eval_1d(const GlobalCert& cert, const GenPoint& y) {
  const GSF& f = cert.f;
  const auto& ctx = f.context();
  const MonotoneNet& mono = *cert.monotone;
  const Expr& fbar = mono.fbar.component(0);
  const Expr dbar = mono.fbar.derivative(0, {1});
  const Expr& fe = f.component(0);
  const Expr dfe = f.derivative(0, {1});

  GlobalInverseResult res{.residual = GenNum::constant(ctx, 0.0)};
  std::vector<Real> xs(ctx->size()), residuals(ctx->size());
  for (std::size_t k = 0; k < ctx->size(); ++k) {
    const double e = ctx->eps(k);
    const Real yk = y[0].sample(k);
    const double yd = to_double(yk);
    const int sign = mono.sign;
    auto h = [&](double x) {
      std::vector<double> v{x};
      return sign * (evaluate<double>(fbar, e, std::span<const double>(v)) - yd);
    };
    auto dh = [&](double x) {
      std::vector<double> v{x};
      return sign * evaluate<double>(dbar, e, std::span<const double>(v));
    };
    const double x0 = solve_increasing(h, dh);
    // on the agreement zone fbar = f, so the polish runs on the exact net
    const bool inside = std::fabs(x0) <= mono.n_schedule(e);
    if (!inside) res.in_agreement_zone = false;
    Newton1D sol = inside ? polish_1d(fe, dfe, e, yk, Real(x0)) : polish_1d(fbar, dbar, e, yk, Real(x0));
    xs[k] = sol.x;
    residuals[k] = sol.residual;
    if (cert.r > 0 && std::isfinite(cert.c_f0)) {
      const Real bound = (abs(yk) + Real(cert.c_f0)) / Real(cert.r);
      if (abs(sol.x) > bound * (1 + Real(1e-12))) res.bound_ok = false;
    }
  }
  res.x = GenPoint::scalar(scalar_net(ctx, xs));
  res.residual = scalar_net(ctx, residuals);
  res.negligible = is_negligible(res.residual);

  // g' = 1/f', g'' = -f''/f'^3, g''' = (3 f''^2 - f' f''')/f'^5 at x = g(y)
  std::vector<Real> d1(ctx->size()), d2(ctx->size()), d3(ctx->size());
  const Expr f2 = f.derivative(0, {2});
  const Expr f3 = f.derivative(0, {3});
  for (std::size_t k = 0; k < ctx->size(); ++k) {
    const double e = ctx->eps(k);
    std::vector<Real> x{xs[k]};
    std::span<const Real> xv(x);
    Real a1 = evaluate<Real>(dfe, e, xv), a2 = evaluate<Real>(f2, e, xv), a3 = evaluate<Real>(f3, e, xv);
    d1[k] = 1 / a1;
    d2[k] = -a2 / (a1 * a1 * a1);
    d3[k] = (3 * a2 * a2 - a1 * a3) / pow(a1, 5);
  }
  for (auto* d : {&d1, &d2, &d3}) res.derivative_moderate.push_back(is_moderate(scalar_net(ctx, *d)));
  return res;
}

struct HomotopyStep {
  std::vector<Real> x;
  bool ok = false;
};

/// Newton corrector toward f(x) = target; accepts when the residual drops below tol.
HomotopyStep correct(const GSF& f, double e, std::vector<Real> x, std::span<const Real> target, const Real& tol) {
  const std::size_t n = x.size();
  Real r = norm2(minus(f.eval_eps(e, x), target));
  for (int it = 0; it < 12; ++it) {
    if (r <= tol) return {x, true};
    std::vector<Real> fx = minus(f.eval_eps(e, x), target);
    std::vector<Real> dx;
    try {
      dx = inverse(f.jacobian_eps(e, x)) * std::span<const Real>(fx);
    } catch (const NumericError&) {
      return {x, false};
    }
    std::vector<Real> xn(n);
    for (std::size_t i = 0; i < n; ++i) xn[i] = x[i] - dx[i];
    Real rn = norm2(minus(f.eval_eps(e, xn), target));
    if (!(rn < r)) return {x, false};
    x = std::move(xn);
    r = rn;
  }
  return {x, r <= tol};
}

GlobalInverseResult eval_homotopy(const GlobalCert& cert, const GenPoint& y) {
  const GSF& f = cert.f;
  const auto& ctx = f.context();
  const std::size_t n = f.dim();
  GlobalInverseResult res{.residual = GenNum::constant(ctx, 0.0)};
  std::vector<std::vector<Real>> xs(n, std::vector<Real>(ctx->size()));
  std::vector<Real> residuals(ctx->size());
  for (std::size_t k = 0; k < ctx->size(); ++k) {
    const double e = ctx->eps(k);
    const auto yk = y.at(k);
    std::vector<Real> x(n, Real(0));
    const auto f0 = f.eval_eps(e, x);
    Real scale = 1 + norm2(yk) + norm2(f0);
    const Real tol = Real(1e-10) * scale;
    Real t = 0;
    Real step = Real(1) / 16;
    int steps = 0;
    std::vector<double> trace;
    while (t < 1) {
      Real tn = t + step > 1 ? Real(1) : t + step;
      std::vector<Real> target(n);
      for (std::size_t i = 0; i < n; ++i) target[i] = (1 - tn) * f0[i] + tn * yk[i];
      HomotopyStep st = correct(f, e, x, target, tol);
      if (!st.ok) {
        step /= 2;
        if (step < Real(1) / 1024) {
          std::ostringstream os;
          os << "homotopy step failed below 1/1024 at eps=" << e << ", t=" << to_double(t) << "; accepted t:";
          for (double v : trace) os << ' ' << v;
          throw NumericError(os.str());
        }
        continue;
      }
      x = std::move(st.x);
      t = tn;
      trace.push_back(to_double(t));
      ++steps;
    }
    // polish at t = 1 until the residual stops halving
    Real r = norm2(minus(f.eval_eps(e, x), yk));
    for (int it = 0; it < 100 && r > 0; ++it) {
      std::vector<Real> fx = minus(f.eval_eps(e, x), yk);
      std::vector<Real> dx;
      try {
        dx = inverse(f.jacobian_eps(e, x)) * std::span<const Real>(fx);
      } catch (const NumericError&) {
        break;
      }
      std::vector<Real> xn(n);
      for (std::size_t i = 0; i < n; ++i) xn[i] = x[i] - dx[i];
      Real rn = norm2(minus(f.eval_eps(e, xn), yk));
      if (!(rn < r)) break;
      const bool slow = rn > r / 2;
      x = std::move(xn);
      r = rn;
      if (slow) break;
    }
    for (std::size_t i = 0; i < n; ++i) xs[i][k] = x[i];
    residuals[k] = r;
    res.homotopy_steps.push_back(steps);
    if (cert.kind == GlobalKind::HadamardLevy && cert.surjective) {
      const Real bound = Real(cert.beta->a) * norm2(minus(yk, f0));
      if (norm2(x) > bound * (1 + Real(1e-12)) + Real(1e-300)) res.bound_ok = false;
    }
  }
  std::vector<GenNum> comps;
  for (auto& c : xs) comps.push_back(scalar_net(ctx, std::move(c)));
  res.x = GenPoint(std::move(comps));
  res.residual = scalar_net(ctx, std::move(residuals));
  res.negligible = is_negligible(res.residual);

  if (!cert.properness.empty()) {
    double sup_y = 0;
    for (std::size_t k = 0; k < ctx->size(); ++k) sup_y = std::max(sup_y, to_double(norm2(y.at(k))));
    for (const auto& row : cert.properness)
      if (row.inf_norm > sup_y) {
        res.compact_radius = row.radius;
        break;
      }
  }
  res.derivative_moderate.push_back([&] {
    GenMatrix inv = inverse(jacobian(f, res.x));
    Verdict all = Verdict::yes(0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        Verdict v = is_moderate(inv.entry(i, j));
        if (!v.is_true()) return v;
        all.witness = std::max(*all.witness, v.witness.value_or(0));
      }
    return all;
  }());
  return res;
}

}  // namespace

GlobalInverseResult global_inverse_eval(const GlobalCert& cert, const GenPoint& y) {
  if (!cert.passed) throw CertificateError("the global certificate did not pass");
  if (y.dim() != cert.f.dim()) throw DomainError("target dimension does not match the function");
  const auto& ctx = cert.f.context();
  // y must be compactly supported: ||y_eps|| does not grow along the tail,
  // i.e. the least-squares slope of log||y|| against log rho is >= -slack
  const GenNum yn = y.norm();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (std::size_t k = ctx->grid().tail_begin(); k < ctx->size(); ++k) {
    if (yn.sample(k) == 0) continue;
    const double lx = ctx->log_rho(k), ly = log_abs(yn.sample(k));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++count;
  }
  if (count >= 2) {
    const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    if (slope < -ctx->thresholds().slack) throw DomainError("target is not a compactly supported point");
  }
  return cert.kind == GlobalKind::OneD ? eval_1d(cert, y) : eval_homotopy(cert, y);
}

}  // namespace gsf
