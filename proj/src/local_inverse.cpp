#include "gsf/local_inverse.hpp"

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

RealMatrix mat_minus(const RealMatrix& a, const RealMatrix& b) {
  RealMatrix d(a.rows, a.cols);
  for (std::size_t i = 0; i < a.data.size(); ++i) d.data[i] = a.data[i] - b.data[i];
  return d;
}

/// Deterministic offsets in the closed unit ball: axis points at several
/// fractions of the radius, then Halton points, 64 per dimension in total.
std::vector<std::vector<double>> unit_ball_probes(std::size_t n) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < n; ++i)
    for (double s : {0.999, -0.999, 0.75, -0.75, 0.5, -0.5, 0.25, -0.25, 0.1, -0.1}) {
      std::vector<double> u(n, 0.0);
      u[i] = s;
      out.push_back(std::move(u));
    }
  for (std::size_t j = 0; out.size() < 64 * n; ++j) {
    auto h = halton(j, n);
    double norm = 0;
    for (double& t : h) {
      t = 2 * t - 1;
      norm += t * t;
    }
    if (norm <= 1) out.push_back(std::move(h));
  }
  return out;
}

/// True when ||Df(x0) - Df(x)|| < b at every probe of B_{2 radius}(x0).
bool deviation_ok(const GSF& f, double e, std::span<const Real> x0, const RealMatrix& j0,
                  const Real& b, const Real& radius, const std::vector<std::vector<double>>& probes) {
  const std::size_t n = x0.size();
  std::vector<Real> p(n);
  for (const auto& u : probes) {
    for (std::size_t i = 0; i < n; ++i) p[i] = x0[i] + 2 * radius * Real(u[i]);
    if (f.domain() && !f.domain()->contains(e, p)) return false;
    RealMatrix j = f.jacobian_eps(e, p);
    if (!(operator_norm(mat_minus(j0, j)) < b)) return false;
  }
  return true;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

struct Common {
  GenPoint y0;
  GenMatrix j0;
  GenMatrix j0_inv;
  GenNum a, b, c;
};

Common common_part(const GSF& f, const GenPoint& x0) {
  if (f.codim() != f.dim()) throw DomainError("local inversion needs as many components as variables");
  auto ev = gsf_eval(f, x0);  // domain and moderateness certificate
  GenMatrix j0 = jacobian(f, x0);
  Verdict nd = is_nondegenerate(j0);
  if (!nd.is_true())
    throw CertificateError(std::string("Df(x0) is not invertible (nondegeneracy ") +
                           to_string(nd.value) + "): " + nd.diagnostics);
  GenMatrix inv = inverse(j0);
  GenNum a = op_norm(inv);
  GenNum b = map(a, [](const Real& v) { return Real(1 / (2 * v)); });
  GenNum c = map(a, [](const Real& v) { return Real(2 * v); });
  return {ev.value, j0, inv, a, b, c};
}

}  // namespace

Verdict is_nondegenerate(const GenMatrix& a) {
  if (a.rows() != a.cols()) throw DomainError("nondegeneracy needs a square matrix");
  return is_strictly_positive(abs(det(a)));
}

double hadamard_constant(std::size_t n) {
  return std::pow(static_cast<double>(n), static_cast<double>(n) / 2.0);
}

const char* to_string(CertKind kind) { return kind == CertKind::Sharp ? "sharp" : "fermat"; }

LocalCert sharp_ift_certificate(const GSF& f, const GenPoint& x0, const LocalInverseOptions& options) {
  Common cm = common_part(f, x0);
  const auto& ctx = f.context();
  const std::size_t n = f.dim();
  const auto probes = unit_ball_probes(n);
  std::vector<Real> radii(ctx->size());
  for (std::size_t k = 0; k < ctx->size(); ++k) {
    const double e = ctx->eps(k);
    auto p0 = x0.at(k);
    Real r = options.initial_radius;
    int h = 0;
    while (!deviation_ok(f, e, p0, cm.j0.at(k), cm.b.sample(k), r, probes)) {
      if (++h > options.max_halvings)
        throw CertificateError("radius search exhausted " + std::to_string(options.max_halvings) +
                               " halvings at eps=" + fmt(e));
      r /= 2;
    }
    radii[k] = r;
  }
  GenNum r = GenNum::from_samples(ctx, std::move(radii));
  std::vector<Real> image_samples(ctx->size());
  for (std::size_t k = 0; k < ctx->size(); ++k) image_samples[k] = r.sample(k) / cm.c.sample(k);
  GenNum image = GenNum::from_samples(ctx, std::move(image_samples));
  const std::pair<const char*, const GenNum*> quantities[] = {
      {"a", &cm.a}, {"b", &cm.b}, {"c", &cm.c}, {"r", &r}};
  for (const auto& [name, v] : quantities) {
    Verdict pos = is_strictly_positive(*v);
    if (!pos.is_true())
      throw CertificateError(std::string("certificate quantity ") + name +
                             " is not positive invertible: " + pos.diagnostics);
  }
  return LocalCert{.kind = CertKind::Sharp,
                   .f = f,
                   .x0 = x0,
                   .y0 = cm.y0,
                   .jac0 = cm.j0,
                   .jac0_inv = cm.j0_inv,
                   .a = cm.a,
                   .b = cm.b,
                   .c = cm.c,
                   .r = r,
                   .image_radius = image,
                   .hadamard_c = hadamard_constant(n),
                   .probes_per_eps = probes.size(),
                   .options = options,
                   .notes = "Df deviation bound checked on sampled probes of B_2r(x0)"};
}

LocalCert fermat_ift_certificate(const GSF& f, const GenPoint& x0, double k,
                                 const LocalInverseOptions& options) {
  if (!(k > 0)) throw DomainError("the bound k on ||Df(x0)^-1|| must be positive");
  Common cm = common_part(f, x0);
  const auto& ctx = f.context();
  const std::size_t n = f.dim();
  const double slack = ctx->thresholds().slack;
  auto est = exponent_estimate(cm.a);
  if (!est.verdict.is_true() || est.exponent < -slack)
    throw CertificateError("||Df(x0)^-1|| is not finite (order " + fmt(est.exponent) +
                           "); the Fermat theorem needs a finite bound");
  double a_max = 0;
  for (std::size_t i = ctx->grid().tail_begin(); i < ctx->size(); ++i)
    a_max = std::max(a_max, cm.a.value(i));
  if (!(a_max <= k))
    throw CertificateError("||Df(x0)^-1|| = " + fmt(a_max) + " exceeds the bound k = " + fmt(k));

  // Fermat continuity of Df at x0
  std::vector<Expr> partials;
  for (std::size_t i = 0; i < f.codim(); ++i)
    for (std::size_t v = 0; v < n; ++v) {
      MultiIndex alpha(n, 0);
      alpha[v] = 1;
      partials.push_back(f.derivative(i, alpha));
    }
  GSF df(ctx, partials, n, f.domain(), "Df");
  auto lip = lipschitz_probe(df, x0, BallKind::Fermat);
  if (!lip.verdict.is_true())
    throw CertificateError("Df is not Fermat-continuous at x0: " + lip.verdict.diagnostics);

  const auto probes = unit_ball_probes(n);
  double r = options.initial_radius;
  int h = 0;
  for (;;) {
    bool ok = true;
    for (std::size_t i = 0; i < ctx->size() && ok; ++i) {
      auto p0 = x0.at(i);
      ok = deviation_ok(f, ctx->eps(i), p0, cm.j0.at(i), cm.b.sample(i), Real(r), probes);
    }
    if (ok) break;
    if (++h > options.max_halvings)
      throw CertificateError("real radius search exhausted " + std::to_string(options.max_halvings) +
                             " halvings");
    r /= 2;
  }
  double c_max = 0;
  for (std::size_t i = ctx->grid().tail_begin(); i < ctx->size(); ++i)
    c_max = std::max(c_max, cm.c.value(i));
  const double s = r / c_max;
  return LocalCert{.kind = CertKind::Fermat,
                   .f = f,
                   .x0 = x0,
                   .y0 = cm.y0,
                   .jac0 = cm.j0,
                   .jac0_inv = cm.j0_inv,
                   .a = cm.a,
                   .b = cm.b,
                   .c = cm.c,
                   .r = GenNum::constant(ctx, r),
                   .image_radius = GenNum::constant(ctx, s),
                   .fermat_r = r,
                   .fermat_s = s,
                   .hadamard_c = hadamard_constant(n),
                   .probes_per_eps = probes.size(),
                   .options = options,
                   .notes = "real radii; Df deviation bound checked on sampled probes of B_2r(x0)"};
}

InverseResult local_inverse_eval(const LocalCert& cert, const GenPoint& y) {
  const GSF& f = cert.f;
  const auto& ctx = f.context();
  const std::size_t n = f.dim();
  if (y.dim() != n) throw DomainError("target dimension does not match the function");
  InverseResult res{.x = {}, .residual = GenNum::constant(ctx, 0.0), .negligible = {}, .membership = {}, .traces = {}};
  res.membership = cert.kind == CertKind::Sharp
                       ? ball_membership(y, cert.y0, cert.image_radius, BallKind::Sharp)
                       : ball_membership(y, cert.y0, cert.fermat_s);
  if (res.membership.is_false())
    throw DomainError("target is outside the certified image ball: " + res.membership.diagnostics);

  std::vector<std::vector<Real>> xs(n, std::vector<Real>(ctx->size()));
  std::vector<Real> residuals(ctx->size());
  for (std::size_t k = 0; k < ctx->size(); ++k) {
    const double e = ctx->eps(k);
    const auto x0 = cert.x0.at(k);
    const auto yk = y.at(k);
    const Real& radius = cert.r.sample(k);
    const Real target = ctx->rho_pow(k, cert.options.q_tol);
    NewtonTrace trace{e, {}};
    std::vector<Real> x = x0;
    std::vector<Real> fx = minus(f.eval_eps(e, x), yk);
    Real r = norm2(fx);
    trace.log_residuals.push_back(r > 0 ? log_abs(r) : -INFINITY);
    bool reached = r <= target;
    for (int it = 0; it < cert.options.max_newton_steps && r > 0; ++it) {
      std::vector<Real> dx;
      try {
        dx = inverse(f.jacobian_eps(e, x)) * std::span<const Real>(fx);
      } catch (const NumericError&) {
        if (reached) break;
        throw NumericError("singular Jacobian during Newton at eps=" + fmt(e));
      }
      bool accepted = false;
      std::vector<Real> xn(n), fn;
      Real rn = 0;
      Real lambda = 1;
      for (int h = 0; h < 60; ++h, lambda /= 2) {
        for (std::size_t i = 0; i < n; ++i) xn[i] = x[i] - lambda * dx[i];
        auto d = minus(xn, x0);
        Real nd = norm2(d);
        if (nd > radius)
          for (std::size_t i = 0; i < n; ++i) xn[i] = x0[i] + d[i] * (radius / nd);
        fn = minus(f.eval_eps(e, xn), yk);
        rn = norm2(fn);
        if (rn < r) {
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        if (reached) break;
        std::ostringstream os;
        os << "Newton stagnated at eps=" << e << "; log residuals:";
        for (double v : trace.log_residuals) os << ' ' << v;
        throw NumericError(os.str());
      }
      const bool slow = rn > r / 2;
      x = xn;
      fx = fn;
      r = rn;
      trace.log_residuals.push_back(r > 0 ? log_abs(r) : -INFINITY);
      if (reached && slow) break;  // precision floor
      if (r <= target) reached = true;
      if (!reached && static_cast<int>(trace.log_residuals.size()) > cert.options.stagnation_steps) {
        // no decrease over the last stagnation window
        const auto& lr = trace.log_residuals;
        double before = lr[lr.size() - 1 - cert.options.stagnation_steps];
        if (lr.back() >= before - 1e-12) {
          std::ostringstream os;
          os << "Newton made no progress over " << cert.options.stagnation_steps << " steps at eps=" << e;
          throw NumericError(os.str());
        }
      }
    }
    if (!reached) {
      std::ostringstream os;
      os << "Newton did not reach rho^" << cert.options.q_tol << " at eps=" << e;
      throw NumericError(os.str());
    }
    for (std::size_t i = 0; i < n; ++i) xs[i][k] = x[i];
    residuals[k] = r;
    res.traces.push_back(std::move(trace));
  }
  std::vector<GenNum> comps;
  for (auto& c : xs) comps.push_back(GenNum::from_samples(ctx, std::move(c)));
  res.x = GenPoint(std::move(comps));
  res.residual = GenNum::from_samples(ctx, std::move(residuals));
  res.negligible = is_negligible(res.residual);
  return res;
}

InverseJacobian inverse_jacobian(const LocalCert& cert, const GenPoint& y) {
  auto inv = local_inverse_eval(cert, y);
  const GSF& f = cert.f;
  const auto& ctx = f.context();
  const std::size_t n = f.dim();
  std::vector<RealMatrix> slices;
  std::vector<Real> dets, bounds;
  bool ok = true;
  std::string where;
  for (std::size_t k = 0; k < ctx->size(); ++k) {
    auto x = inv.x.at(k);
    RealMatrix j = f.jacobian_eps(ctx->eps(k), x);
    Real d = determinant(j);
    RealMatrix adj = adjugate(j);
    for (auto& v : adj.data) v /= d;
    slices.push_back(std::move(adj));
    Real bound = 1 / (Real(cert.hadamard_c) * boost::multiprecision::pow(cert.c.sample(k), n));
    if (abs(d) < bound && ok) {
      ok = false;
      where = "eps=" + fmt(ctx->eps(k));
    }
    dets.push_back(d);
    bounds.push_back(bound);
  }
  if (!ok) throw CertificateError("determinant lower bound 1/(C c^n) violated at " + where);
  return InverseJacobian{.x = inv.x,
                         .matrix = GenMatrix(ctx, std::move(slices)),
                         .det = GenNum::from_samples(ctx, std::move(dets)),
                         .det_bound = GenNum::from_samples(ctx, std::move(bounds)),
                         .detlow_ok = ok};
}

AfjReport afj_differentiability_check(const GSF& f, const GenPoint& x0, int kmax) {
  const auto& ctx = f.context();
  if (ctx->gauge().kind() != GaugeKind::Eps)
    throw DomainError("the sharp-norm quotient is defined for the gauge rho = eps");
  if (kmax < 2) throw DomainError("need at least two points in the sequence");
  const std::size_t n = f.dim();
  const GenMatrix j0 = jacobian(f, x0);
  AfjReport rep;
  double qmax = -INFINITY;
  for (int kk = 1; kk <= kmax; ++kk) {
    std::vector<Real> num(ctx->size()), den(ctx->size());
    for (std::size_t k = 0; k < ctx->size(); ++k) {
      const double e = ctx->eps(k);
      auto p0 = x0.at(k);
      Real h = boost::multiprecision::pow(Real(e), kk);
      std::vector<Real> p = p0, dx(n, h);
      for (auto& v : p) v += h;
      auto f1 = f.eval_eps(e, p);
      auto f0 = f.eval_eps(e, p0);
      auto lin = j0.at(k) * std::span<const Real>(dx);
      Real s = 0;
      for (std::size_t i = 0; i < f.codim(); ++i) {
        Real t = f1[i] - f0[i] - lin[i];
        s += t * t;
      }
      num[k] = boost::multiprecision::sqrt(s);
      den[k] = norm2(dx);
    }
    GenNum gn = GenNum::from_samples(ctx, std::move(num));
    GenNum gd = GenNum::from_samples(ctx, std::move(den));
    AfjRow row;
    row.k = kk;
    row.numerator_valuation = valuation(gn);
    row.denominator_valuation = valuation(gd);
    row.quotient = sharp_norm(gn) / sharp_norm(gd);
    if (std::isfinite(row.numerator_valuation))
      qmax = std::max(qmax, 2 * row.denominator_valuation - row.numerator_valuation);
    rep.rows.push_back(row);
  }
  const double slack = ctx->thresholds().slack;
  rep.decreasing = true;
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    double prev = rep.rows[i - 1].quotient, cur = rep.rows[i].quotient;
    if (!(cur == 0 || cur <= prev * std::exp(-slack))) rep.decreasing = false;
  }
  rep.final_quotient = rep.rows.back().quotient;
  rep.q = std::isfinite(qmax) ? qmax : 0.0;
  rep.bound_holds = true;
  for (const auto& row : rep.rows)
    if (std::isfinite(row.numerator_valuation) &&
        -row.numerator_valuation > rep.q - 2 * row.denominator_valuation + 1e-12)
      rep.bound_holds = false;
  rep.passed = rep.decreasing && rep.bound_holds;
  return rep;
}

}  // namespace gsf
