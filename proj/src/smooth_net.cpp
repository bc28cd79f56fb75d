#include "gsf/smooth_net.hpp"

#include "gsf/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace gsf {

GSF::GSF(ContextPtr ctx, std::vector<Expr> components, std::size_t dim,
         std::optional<SetNet> domain, std::string label)
    : ctx_(std::move(ctx)),
      comps_(std::move(components)),
      dim_(dim),
      domain_(std::move(domain)),
      label_(std::move(label)),
      cert_order_(ctx_ ? ctx_->thresholds().cert_order : 3),
      cache_(std::make_shared<Cache>()) {
  if (!ctx_) throw DomainError("GSF needs a context");
  if (comps_.empty()) throw DomainError("GSF needs at least one component");
  if (dim_ == 0) throw DomainError("GSF needs at least one variable");
  for (const auto& c : comps_)
    if (max_free_var(c) >= static_cast<int>(dim_))
      throw DomainError("component uses a variable beyond dimension " + std::to_string(dim_));
  if (domain_ && domain_->dim() != dim_) throw DomainError("domain dimension mismatch");
  if (label_.empty()) {
    for (std::size_t i = 0; i < comps_.size(); ++i) label_ += (i ? "; " : "") + to_string(comps_[i]);
  }
}

GSF GSF::parse(ContextPtr ctx, std::string_view text, const ParserOptions& options,
               std::optional<SetNet> domain) {
  auto comps = parse_vector(text, options);
  int top = -1;
  for (const auto& c : comps) top = std::max(top, max_free_var(c));
  std::size_t dim = domain ? domain->dim() : static_cast<std::size_t>(std::max(top + 1, 1));
  return GSF(std::move(ctx), std::move(comps), dim, std::move(domain), std::string(text));
}

GSF GSF::with_points(PointSet points) const {
  GSF g = *this;
  g.points_ = std::move(points);
  return g;
}

GSF GSF::with_cert_order(int k) const {
  if (k < 0) throw DomainError("certification order must be nonnegative");
  GSF g = *this;
  g.cert_order_ = k;
  return g;
}

GSF GSF::with_label(std::string label) const {
  GSF g = *this;
  g.label_ = std::move(label);
  return g;
}

Expr GSF::derivative(std::size_t component, const MultiIndex& alpha) const {
  if (component >= comps_.size()) throw DomainError("component index out of range");
  if (alpha.size() != dim_) throw DomainError("multi-index length must equal the dimension");
  auto first = std::find_if(alpha.begin(), alpha.end(), [](int a) { return a != 0; });
  if (first == alpha.end()) return comps_[component];
  for (int a : alpha)
    if (a < 0) throw DomainError("negative multi-index entry");
  auto key = std::make_pair(component, alpha);
  {
    std::lock_guard<std::mutex> lock(cache_->mutex);
    auto it = cache_->derivatives.find(key);
    if (it != cache_->derivatives.end()) return it->second;
  }
  MultiIndex lower = alpha;
  std::size_t var = static_cast<std::size_t>(first - alpha.begin());
  --lower[var];
  Expr d = differentiate(derivative(component, lower), static_cast<int>(var));
  std::lock_guard<std::mutex> lock(cache_->mutex);
  return cache_->derivatives.emplace(key, d).first->second;
}

std::vector<Real> GSF::eval_eps(double eps, std::span<const Real> x) const {
  if (x.size() != dim_) throw DomainError("point dimension does not match the function");
  EvalEnv<Real> env{Real(eps), eps, std::vector<Real>(x.begin(), x.end()), {}};
  std::vector<Real> out;
  out.reserve(comps_.size());
  for (const auto& c : comps_) out.push_back(evaluate<Real>(c, env));
  return out;
}

std::vector<Real> GSF::eval_at(std::size_t k, std::span<const Real> x) const {
  return eval_eps(ctx_->eps(k), x);
}

std::vector<double> GSF::eval_double(double eps, std::span<const double> x) const {
  if (x.size() != dim_) throw DomainError("point dimension does not match the function");
  EvalEnv<double> env{eps, eps, std::vector<double>(x.begin(), x.end()), {}};
  std::vector<double> out;
  for (const auto& c : comps_) out.push_back(evaluate<double>(c, env));
  return out;
}

RealMatrix GSF::jacobian_eps(double eps, std::span<const Real> x) const {
  if (x.size() != dim_) throw DomainError("point dimension does not match the function");
  EvalEnv<Real> env{Real(eps), eps, std::vector<Real>(x.begin(), x.end()), {}};
  RealMatrix j(comps_.size(), dim_);
  for (std::size_t i = 0; i < comps_.size(); ++i)
    for (std::size_t v = 0; v < dim_; ++v) {
      MultiIndex a(dim_, 0);
      a[v] = 1;
      j(i, v) = evaluate<Real>(derivative(i, a), env);
    }
  return j;
}

RealMatrix GSF::jacobian_at(std::size_t k, std::span<const Real> x) const {
  return jacobian_eps(ctx_->eps(k), x);
}

std::vector<MultiIndex> multi_indices(std::size_t n, int order) {
  std::vector<MultiIndex> out;
  for (int total = 1; total <= order; ++total) {
    // compositions of `total` into n nonnegative parts, lexicographic
    MultiIndex a(n, 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
      if (i + 1 == n) {
        a[i] = left;
        out.push_back(a);
        return;
      }
      for (int v = left; v >= 0; --v) {
        a[i] = v;
        rec(i + 1, left - v);
      }
    };
    rec(0, total);
  }
  return out;
}

namespace {

GenNum samples_of(const ContextPtr& ctx, const std::function<Real(std::size_t)>& f) {
  std::vector<Real> s(ctx->size());
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = f(k);
  return GenNum::from_samples(ctx, std::move(s));
}

Verdict domain_verdict(const GSF& f, const GenPoint& x) {
  Verdict v = Verdict::yes(0, "no domain restriction");
  if (f.domain()) {
    if (f.points().kind == PointSetKind::Csp) {
      v = is_compactly_supported(x, *f.domain());
    } else if (f.domain()->closed()) {
      v = internal_membership(x, *f.domain());
    } else {
      v = strongly_internal_membership(x, *f.domain());
    }
  }
  if (v.is_false()) return v;
  const PointSet& ps = f.points();
  if (ps.kind == PointSetKind::SharpBall && ps.center && ps.sharp_radius) {
    Verdict b = ball_membership(x, *ps.center, *ps.sharp_radius, BallKind::Sharp);
    if (!b.is_true()) return b;
  } else if (ps.kind == PointSetKind::FermatBall && ps.center) {
    Verdict b = ball_membership(x, *ps.center, ps.fermat_radius);
    if (!b.is_true()) return b;
  }
  return v;
}

}  // namespace

GenPoint gsf_value(const GSF& f, const GenPoint& x) {
  if (x.dim() != f.dim()) throw DomainError("point dimension does not match the function");
  const auto& ctx = f.context();
  std::vector<std::vector<Real>> comp(f.codim(), std::vector<Real>(ctx->size()));
  for (std::size_t k = 0; k < ctx->size(); ++k) {
    auto p = x.at(k);
    auto y = f.eval_at(k, p);
    for (std::size_t i = 0; i < f.codim(); ++i) comp[i][k] = std::move(y[i]);
  }
  std::vector<GenNum> out;
  for (auto& c : comp) out.push_back(GenNum::from_samples(ctx, std::move(c)));
  return GenPoint(std::move(out));
}

EvalResult gsf_eval(const GSF& f, const GenPoint& x) {
  EvalResult r;
  r.certificate.domain = domain_verdict(f, x);
  if (r.certificate.domain.is_false())
    throw DomainError("point is outside the domain of " + f.label() + ": " +
                      r.certificate.domain.diagnostics);
  r.value = gsf_value(f, x);
  auto check = [&](std::size_t i, const MultiIndex& alpha, const GenNum& values) {
    DerivativeCheck c{i, alpha, is_moderate(values), exponent_estimate(values).exponent};
    if (c.moderate.is_false()) {
      std::string a;
      for (int v : alpha) a += (a.empty() ? "" : ",") + std::to_string(v);
      throw CertificateError("derivative alpha=(" + a + ") of component " + std::to_string(i) +
                             " of " + f.label() + " is not moderate: " + c.moderate.diagnostics);
    }
    r.certificate.derivatives.push_back(std::move(c));
  };
  for (std::size_t i = 0; i < f.codim(); ++i) check(i, MultiIndex(f.dim(), 0), r.value[i]);
  for (const auto& alpha : multi_indices(f.dim(), f.cert_order()))
    for (std::size_t i = 0; i < f.codim(); ++i) {
      Expr d = f.derivative(i, alpha);
      GenNum v = samples_of(f.context(), [&](std::size_t k) {
        auto p = x.at(k);
        return evaluate<Real>(d, f.context()->eps(k), std::span<const Real>(p));
      });
      check(i, alpha, v);
    }
  return r;
}

GSF differentiate(const GSF& f, const MultiIndex& alpha) {
  std::vector<Expr> comps;
  for (std::size_t i = 0; i < f.codim(); ++i) comps.push_back(f.derivative(i, alpha));
  std::string a;
  for (int v : alpha) a += (a.empty() ? "" : ",") + std::to_string(v);
  return GSF(f.context(), std::move(comps), f.dim(), f.domain(), "d^(" + a + ") " + f.label())
      .with_points(f.points())
      .with_cert_order(f.cert_order());
}

GenMatrix jacobian(const GSF& f, const GenPoint& x) {
  const auto& ctx = f.context();
  std::vector<RealMatrix> s;
  s.reserve(ctx->size());
  for (std::size_t k = 0; k < ctx->size(); ++k) {
    auto p = x.at(k);
    s.push_back(f.jacobian_at(k, p));
  }
  return GenMatrix(ctx, std::move(s));
}

GenPoint directional_derivative(const GSF& f, const GenPoint& x, const GenPoint& v) {
  if (v.dim() != f.dim()) throw DomainError("direction dimension mismatch");
  if (domain_verdict(f, x).is_false())
    throw DomainError("point is outside the domain of " + f.label());
  return jacobian(f, x) * v;
}

IncrementReport incremental_ratio_check(const GSF& f, const GenPoint& x, const GenPoint& v,
                                        const std::vector<GenNum>& hs) {
  const auto& ctx = f.context();
  const std::size_t n = f.dim();
  // second directional derivative expression sum_ij v_i v_j d_ij f, per eps
  std::vector<std::vector<Expr>> hess(f.codim(), std::vector<Expr>(n * n));
  for (std::size_t c = 0; c < f.codim(); ++c)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        MultiIndex a(n, 0);
        ++a[i];
        ++a[j];
        hess[c][i * n + j] = f.derivative(c, a);
      }
  const auto& rule = gauss_legendre<Real>(24);
  IncrementReport report;
  for (const auto& h : hs) {
    std::vector<Real> worst(ctx->size());
    for (std::size_t k = 0; k < ctx->size(); ++k) {
      const double e = ctx->eps(k);
      auto x0 = x.at(k);
      auto dir = v.at(k);
      const Real& hk = h.sample(k);
      std::vector<Real> x1(n);
      for (std::size_t i = 0; i < n; ++i) x1[i] = x0[i] + hk * dir[i];
      auto f0 = f.eval_eps(e, x0);
      auto f1 = f.eval_eps(e, x1);
      RealMatrix jac = f.jacobian_eps(e, x0);
      Real acc = 0;
      for (std::size_t c = 0; c < f.codim(); ++c) {
        Real first = 0;
        for (std::size_t i = 0; i < n; ++i) first += jac(c, i) * dir[i];
        // int_0^1 (1 - s) D^2 f(x + s h v)[v, v] ds
        Real remainder = 0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
          Real s = (rule.nodes[q] + 1) / 2;
          std::vector<Real> xs(n);
          for (std::size_t i = 0; i < n; ++i) xs[i] = x0[i] + s * hk * dir[i];
          EvalEnv<Real> env{Real(e), e, xs, {}};
          Real d2 = 0;
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
              d2 += dir[i] * dir[j] * evaluate<Real>(hess[c][i * n + j], env);
          remainder += rule.weights[q] / 2 * (1 - s) * d2;
        }
        Real ratio = first + hk * remainder;
        Real res = abs(f1[c] - f0[c] - hk * ratio);
        acc = std::max(acc, res);
      }
      worst[k] = acc;
    }
    GenNum residual = GenNum::from_samples(ctx, std::move(worst));
    Verdict neg = is_negligible(residual);
    if (neg.is_false()) report.ok = false;
    report.rows.push_back({h, residual, neg});
  }
  return report;
}

GSF compose(const GSF& f, const GSF& g) {
  if (g.codim() != f.dim()) throw DomainError("cannot compose: codomain/domain dimension mismatch");
  const auto& ctx = g.context();
  if (f.domain()) {
    // probe the range of g against the domain of f on the tail
    std::vector<std::vector<Real>> probes;
    for (std::size_t k = ctx->grid().tail_begin(); k < ctx->size(); ++k) {
      const double e = ctx->eps(k);
      if (g.domain()) {
        probes = g.domain()->sample_points(e, 64 * g.dim());
      } else {
        probes.clear();
        for (std::size_t j = 0; j < 64 * g.dim(); ++j) {
          auto h = halton(j, g.dim());
          std::vector<Real> p;
          for (double t : h) p.push_back(Real(4 * t - 2));
          probes.push_back(std::move(p));
        }
      }
      for (const auto& p : probes) {
        auto y = g.eval_eps(e, p);
        if (!f.domain()->contains(e, y))
          throw DomainError("range of " + g.label() + " leaves the domain of " + f.label() +
                            " at eps=" + std::to_string(e));
      }
    }
  }
  std::vector<Expr> comps;
  for (const auto& c : f.components()) comps.push_back(substitute_all(c, g.components()));
  return GSF(ctx, std::move(comps), g.dim(), g.domain(), "(" + f.label() + ") o (" + g.label() + ")")
      .with_points(g.points())
      .with_cert_order(std::max(f.cert_order(), g.cert_order()));
}

LipschitzResult lipschitz_probe(const GSF& f, const GenPoint& x, BallKind kind,
                                double fermat_radius) {
  const auto& ctx = f.context();
  const std::size_t n = f.dim();
  // probe offsets in the unit ball: geometric points along each axis (so scales
  // down to 4^-31 are visited) plus Halton points
  std::vector<std::vector<double>> offsets;
  for (std::size_t i = 0; i < n; ++i)
    for (int sign : {-1, 1})
      for (int j = 0; j < 32; ++j) {
        std::vector<double> u(n, 0.0);
        u[i] = sign * std::ldexp(1.0, -2 * j) * 0.999;
        offsets.push_back(std::move(u));
      }
  for (std::size_t j = 0; offsets.size() < 64 * n + 64 * n; ++j) {
    auto h = halton(j, n);
    double norm2 = 0;
    for (double& t : h) {
      t = 2 * t - 1;
      norm2 += t * t;
    }
    if (norm2 < 1) offsets.push_back(std::move(h));
  }
  std::vector<Real> lip(ctx->size());
  for (std::size_t k = 0; k < ctx->size(); ++k) {
    const double e = ctx->eps(k);
    Real radius = kind == BallKind::Sharp ? ctx->rho(k) : Real(fermat_radius);
    auto x0 = x.at(k);
    auto f0 = f.eval_eps(e, x0);
    std::vector<std::vector<Real>> pts;
    std::vector<std::vector<Real>> vals;
    for (const auto& u : offsets) {
      std::vector<Real> p(n);
      for (std::size_t i = 0; i < n; ++i) p[i] = x0[i] + radius * Real(u[i]);
      vals.push_back(f.eval_eps(e, p));
      pts.push_back(std::move(p));
    }
    auto slope = [&](const std::vector<Real>& a, const std::vector<Real>& fa,
                     const std::vector<Real>& b, const std::vector<Real>& fb) {
      Real dx = 0, dy = 0;
      for (std::size_t i = 0; i < n; ++i) dx += (a[i] - b[i]) * (a[i] - b[i]);
      for (std::size_t i = 0; i < fa.size(); ++i) dy += (fa[i] - fb[i]) * (fa[i] - fb[i]);
      return dx > 0 ? Real(boost::multiprecision::sqrt(dy / dx)) : Real(0);
    };
    Real best = 0;
    for (std::size_t p = 0; p < pts.size(); ++p) {
      best = std::max(best, slope(x0, f0, pts[p], vals[p]));
      if (p > 0) best = std::max(best, slope(pts[p - 1], vals[p - 1], pts[p], vals[p]));
    }
    lip[k] = best;
  }
  GenNum L = GenNum::from_samples(ctx, std::move(lip));
  if (kind == BallKind::Sharp) {
    Verdict v = is_moderate(L);
    return {v.is_true() ? Verdict::yes(L.value(ctx->size() - 1), "moderate Lipschitz constant, " +
                                                                     v.diagnostics)
                        : v,
            L};
  }
  auto est = exponent_estimate(L);
  const double slack = ctx->thresholds().slack;
  double sup = 0;
  for (std::size_t k = ctx->grid().tail_begin(); k < ctx->size(); ++k)
    sup = std::max(sup, L.value(k));
  if (est.verdict.is_true() && est.exponent >= -slack)
    return {Verdict::yes(sup, "finite Lipschitz constant (order " + std::to_string(est.exponent) + ")"),
            L};
  if (est.verdict.is_true())
    return {Verdict::no(est.exponent, "Lipschitz constant is infinite (order " +
                                          std::to_string(est.exponent) + ")"),
            L};
  return {Verdict::unknown("unstable Lipschitz order: " + est.verdict.diagnostics), L};
}

Verdict is_compactly_supported(const GenPoint& x, const SetNet& omega) {
  const auto& ctx = x.context();
  GenNum norm = x.norm();
  auto est = exponent_estimate(norm);
  const double slack = ctx->thresholds().slack;
  if (est.verdict.is_true() && est.exponent < -slack)
    return Verdict::no(est.exponent, "point is infinite (order " + std::to_string(est.exponent) + ")");
  GenNum d = complement_distance_net(x, omega);
  Verdict margin = lt_fermat(GenNum::constant(ctx, 0.0), d);
  if (margin.is_false())
    return Verdict::no(0.0, "no real margin to the boundary: " + margin.diagnostics);
  if (margin.is_true() && est.verdict.is_true())
    return Verdict::yes(*margin.witness, "real margin " + std::to_string(*margin.witness));
  if (margin.is_true() && !est.verdict.is_true()) {
    // zero coordinates or oscillation: accept when |x| stays below a real bound
    double sup = 0;
    for (std::size_t k = ctx->grid().tail_begin(); k < ctx->size(); ++k)
      sup = std::max(sup, norm.value(k));
    if (std::isfinite(sup) && sup < 1e6)
      return Verdict::yes(*margin.witness, "real margin " + std::to_string(*margin.witness));
  }
  return Verdict::unknown("csp membership undecided: " + margin.diagnostics);
}

}  // namespace gsf
