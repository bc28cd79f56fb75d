#include "gsf/examples.hpp"

#include "gsf/embedding.hpp"
#include "gsf/errors.hpp"
#include "gsf/local_inverse.hpp"

#include <cmath>
#include <functional>

namespace gsf {

namespace {

GenNum eps_pow(const ContextPtr& ctx, double p) { return GenNum::from_expr(ctx, pow(Expr::eps(), Expr(p))); }

GenPoint real_point(const ContextPtr& ctx, double v) { return GenPoint::constant(ctx, std::vector<double>{v}); }

double exponent_of(const GenNum& x) { return exponent_estimate(x).exponent; }

double max_relative_gap(const GenNum& x, const GenNum& y) {
  double worst = 0;
  for (std::size_t k = 0; k < x.context()->size(); ++k) {
    const Real gap = abs(x.sample(k) / y.sample(k) - 1);
    worst = std::max(worst, to_double(gap));
  }
  return worst;
}

Json exponent_check(double exponent, const char* relation, double bound) {
  Json j;
  j["exponent"] = exponent;
  j["relation"] = relation;
  j["bound"] = bound;
  return j;
}

Json cert_json(const LocalCert& c) {
  Json j;
  j["kind"] = to_string(c.kind);
  j["a"] = gennum_json(c.a);
  j["r"] = gennum_json(c.r);
  j["image_radius"] = gennum_json(c.image_radius);
  j["probes_per_eps"] = c.probes_per_eps;
  return j;
}

MollifierNet delta_net(const ContextPtr& ctx) {
  MollifierNetOptions opt;
  opt.mollifier.psi0 = true;
  return MollifierNet(ctx, opt);
}

/// Root of ex(x) = target in [lo, hi] (sign change required): double bisection,
/// then safeguarded Newton steps in Real using dex = ex'.
Real refine_root(const Expr& ex, const Expr& dex, double eps, const Real& target, double lo, double hi) {
  const double t = to_double(target);
  auto gd = [&](double x) {
    std::vector<double> v{x};
    return evaluate<double>(ex, eps, std::span<const double>(v)) - t;
  };
  const double lo0 = lo, hi0 = hi;
  const bool lo_negative = gd(lo) < 0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    ((gd(mid) < 0) == lo_negative ? lo : hi) = mid;
  }
  Real x = Real(0.5 * (lo + hi));
  const Real tol = pow(Real(2), -1000);
  for (int i = 0; i < 12; ++i) {
    std::vector<Real> v{x};
    const Real g = evaluate<Real>(ex, eps, std::span<const Real>(v)) - target;
    const Real dg = evaluate<Real>(dex, eps, std::span<const Real>(v));
    if (dg == 0) break;
    const Real step = g / dg;
    const Real next = x - step;
    if (next < lo0 || next > hi0) break;
    x = next;
    if (abs(step) <= tol * abs(x)) break;
  }
  return x;
}

void example_heaviside(Report& rep, const ContextPtr& ctx) {
  MollifierNet net = delta_net(ctx);
  GSF h = embed(DistSpec::heaviside(), net);
  GSF dh = differentiate(h, {1});
  GenNum b = net.b_net();
  GenNum h1 = gsf_value(dh, real_point(ctx, 0.0))[0];
  const double eh = exponent_of(h1);
  const double slack = ctx->thresholds().slack;
  rep.add("H'(0)", gennum_json(h1));
  rep.add("b", gennum_json(b));
  rep.check("H'(0) = delta(0) = b per eps (relative 1e-12)", max_relative_gap(h1, b) <= 1e-12,
            Json{{"max_relative_gap", max_relative_gap(h1, b)}});
  rep.check("H'(0) is infinite", eh < -slack, exponent_check(eh, "<", -slack));
  for (double r : {0.5, -0.25}) {
    Verdict v = is_negligible(gsf_value(dh, real_point(ctx, r))[0]);
    rep.check("H'(" + format_double(r) + ") = 0", v.is_true(), verdict_json(v));
  }
  LocalCert cert = sharp_ift_certificate(h, real_point(ctx, 0.0));
  const double er = exponent_of(cert.r);
  rep.add("certificate", cert_json(cert));
  rep.check("certificate radius is infinitesimal (exponent > 0)", er > 0, exponent_check(er, ">", 0));
  rep.add_table(gennum_table("radius", "certified radius r_eps of the sharp neighborhood of 0", cert.r));
}

void example_delta_delta(Report& rep, const ContextPtr& ctx) {
  MollifierNet net = delta_net(ctx);
  GSF delta = embed(DistSpec::delta(), net);
  GSF dd = compose(delta, delta);
  const Expr& de = delta.component(0);
  const Expr ddd = dd.derivative(0, {1});
  const Expr dddd = dd.derivative(0, {2});
  const Expr dde = delta.derivative(0, {1});
  GenNum b = net.b_net();

  std::vector<Real> ks(ctx->size()), cs(ctx->size());
  for (std::size_t i = 0; i < ctx->size(); ++i) {
    const double e = ctx->eps(i);
    const Real bi = b.sample(i);
    // delta(k) = 1 on [0, 1/b] by the intermediate value theorem
    const Real k = refine_root(de, dde, e, Real(1), 0.0, to_double(1 / bi));
    const Real target = bi / (1 - k);
    // (delta o delta)' = target somewhere in [k, 1/b]: last sign change of a scan, then refinement
    const int scan = 4000;
    const double lo = to_double(k), hi = to_double(1 / bi);
    std::optional<std::pair<double, double>> bracket;
    double prev_x = lo;
    std::vector<double> v0{lo};
    double prev = evaluate<double>(ddd, e, std::span<const double>(v0)) - to_double(target);
    for (int s = 1; s <= scan; ++s) {
      const double x = lo + (hi - lo) * s / scan;
      std::vector<double> v{x};
      const double cur = evaluate<double>(ddd, e, std::span<const double>(v)) - to_double(target);
      if ((prev < 0) != (cur < 0)) bracket = std::make_pair(prev_x, x);
      prev = cur;
      prev_x = x;
    }
    if (!bracket) throw NumericError("no point c with (delta o delta)'(c) = b/(1-k) found at eps=" + format_double(e));
    ks[i] = k;
    cs[i] = refine_root(ddd, dddd, e, target, bracket->first, bracket->second);
  }
  GenNum k = GenNum::from_samples(ctx, ks);
  GenNum c = GenNum::from_samples(ctx, cs);
  rep.add("k", gennum_json(k));
  rep.add("c", gennum_json(c));
  GenPoint cp = GenPoint::scalar(c);
  GenNum d_at_c = gsf_value(differentiate(dd, {1}), cp)[0];
  const double ed = exponent_of(d_at_c), eb = exponent_of(b);
  rep.add("(delta o delta)'(c)", gennum_json(d_at_c));
  rep.check("(delta o delta)'(c) has the exponent of b", std::fabs(ed - eb) <= ctx->thresholds().slack,
            Json{{"exponent", ed}, {"exponent_b", eb}});
  GenNum expected = b / (GenNum::constant(ctx, 1.0) - k);
  rep.check("(delta o delta)'(c) = b/(1-k) (relative 1e-12)", max_relative_gap(d_at_c, expected) <= 1e-12,
            Json{{"max_relative_gap", max_relative_gap(d_at_c, expected)}});
  LocalCert cert = sharp_ift_certificate(dd, cp);
  rep.add("certificate", cert_json(cert));
  rep.check("sharp certificate at c succeeds", is_strictly_positive(cert.r).is_true());
  for (double r : {0.5, -0.75}) {
    GenNum v = gsf_value(dd, real_point(ctx, r))[0];
    rep.check("(delta o delta)(" + format_double(r) + ") = b (relative 1e-12)", max_relative_gap(v, b) <= 1e-12);
  }
  Verdict zero_at_k = is_negligible(gsf_value(dd, GenPoint::scalar(k))[0]);
  rep.check("(delta o delta)(k) = 0 since delta(k) = 1", zero_at_k.is_true(), verdict_json(zero_at_k));
}

void example_linear(Report& rep, const ContextPtr& ctx) {
  GSF f = GSF::parse(ctx, "eps*x");
  GenPoint zero = real_point(ctx, 0.0);
  bool rejected = false;
  std::string reason;
  try {
    fermat_ift_certificate(f, zero, 1e6);
  } catch (const CertificateError& e) {
    rejected = true;
    reason = e.what();
  }
  rep.check("Fermat certificate rejects r x", rejected, Json{{"reason", reason}});
  LocalCert cert = sharp_ift_certificate(f, zero);
  rep.add("certificate", cert_json(cert));
  const double es = exponent_of(cert.image_radius);
  rep.check("sharp certificate accepts with infinitesimal image radius s", es > 0, exponent_check(es, ">", 0));
  GenNum y = eps_pow(ctx, 2);
  InverseResult inv = local_inverse_eval(cert, GenPoint::scalar(y));
  Verdict v = is_negligible(inv.x[0] - eps_pow(ctx, 1));
  rep.check("f^-1(eps^2) = eps", v.is_true(), verdict_json(v));
}

void example_sine_over_r(Report& rep, const ContextPtr& ctx) {
  GSF f = GSF::parse(ctx, "sin(x/eps)");
  LocalCert cert = sharp_ift_certificate(f, real_point(ctx, 0.0));
  rep.add("certificate", cert_json(cert));
  rep.check("sharp certificate at 0 succeeds", is_strictly_positive(cert.r).is_true());

  bool injective = true;
  std::size_t pairs = 0;
  const Real pi = real_pi();
  for (std::size_t k = ctx->grid().tail_begin(); k < ctx->size(); ++k) {
    const double e = ctx->eps(k);
    std::vector<Real> values;
    for (int i = -50; i <= 50; ++i) {
      std::vector<Real> x{Real(e) * pi / 2 * i / Real(50.5)};
      values.push_back(f.eval_eps(e, x)[0]);
    }
    for (std::size_t i = 0; i < values.size(); ++i)
      for (std::size_t j = i + 1; j < values.size(); ++j, ++pairs)
        if (!(values[j] > values[i])) injective = false;
  }
  rep.check("injective on sampled pairs of (-pi r/2, pi r/2)", injective, Json{{"pairs", pairs}});

  GenNum x1 = GenNum::from_expr(ctx, Expr::eps() * Expr(M_PI / 4));
  std::vector<Real> s1(ctx->size()), s2(ctx->size());
  for (std::size_t k = 0; k < ctx->size(); ++k) {
    s1[k] = Real(ctx->eps(k)) * pi / 4;
    s2[k] = Real(ctx->eps(k)) * 3 * pi / 4;
  }
  GenPoint p1 = GenPoint::scalar(GenNum::from_samples(ctx, s1));
  GenPoint p2 = GenPoint::scalar(GenNum::from_samples(ctx, s2));
  for (double radius : {0.1, 0.5, 1.0, 2.0}) {
    GenPoint zero = real_point(ctx, 0.0);
    const bool inside = ball_membership(p1, zero, radius).is_true() && ball_membership(p2, zero, radius).is_true();
    const bool distinct = is_strictly_positive(abs(p1[0] - p2[0])).is_true();
    Verdict same = is_negligible(gsf_value(f, p1)[0] - gsf_value(f, p2)[0]);
    rep.check("non-injective witness pair in the real ball of radius " + format_double(radius),
              inside && distinct && same.is_true(), verdict_json(same));
  }
  (void)x1;
}

void example_r_sine(Report& rep, const ContextPtr& ctx) {
  GSF f = GSF::parse(ctx, "eps*sin(x)");
  LocalCert cert = sharp_ift_certificate(f, real_point(ctx, 0.0));
  rep.add("certificate", cert_json(cert));
  GenNum r = eps_pow(ctx, 1);
  Verdict confined = leq(cert.image_radius, r);
  rep.check("certified image ball lies in (-r, r)", confined.is_true(), verdict_json(confined));

  GenNum y_in = 0.125 * r;
  Verdict member = ball_membership(GenPoint::scalar(y_in), cert.y0, cert.image_radius, BallKind::Sharp);
  rep.check("y = r/8 belongs to the certified image ball", member.is_true(), verdict_json(member));
  InverseResult inv = local_inverse_eval(cert, GenPoint::scalar(y_in));
  Verdict round = is_negligible(gsf_value(f, inv.x)[0] - y_in);
  rep.check("f(f^-1(r/8)) = r/8", round.is_true(), verdict_json(round));
  const double g_exp = exponent_of(inv.x[0]);
  rep.check("f^-1(r/8) = arcsin(1/8) is finite", std::fabs(g_exp) <= ctx->thresholds().slack,
            exponent_check(g_exp, "~", 0));

  for (auto [label, y] : {std::pair<const char*, GenNum>{"2r", 2.0 * r}, {"1/2", GenNum::constant(ctx, 0.5)}}) {
    Verdict out = ball_membership(GenPoint::scalar(y), cert.y0, cert.image_radius, BallKind::Sharp);
    Verdict beyond = lt_sharp(r, abs(y));
    rep.check(std::string("y = ") + label + " lies outside the image ball and beyond sup|f| = r",
              out.is_false() && beyond.is_true(), Json{{"membership", verdict_json(out)}, {"beyond", verdict_json(beyond)}});
  }
}

void example_cube(Report& rep, const ContextPtr& ctx) {
  GSF f = GSF::parse(ctx, "x^3");
  Verdict nd = is_nondegenerate(jacobian(f, real_point(ctx, 0.0)));
  rep.check("Df(0) is degenerate", nd.is_false(), verdict_json(nd));
  bool rejected = false;
  try {
    sharp_ift_certificate(f, real_point(ctx, 0.0));
  } catch (const CertificateError&) {
    rejected = true;
  }
  rep.check("certificate at x0 = 0 is rejected", rejected);

  // r = eps^3, domain (-inf, -r) u (r, inf)
  GSF g = GSF::parse(ctx, "x^3", ParserOptions::standard(), parse_set("union(obox(-inf, -eps^3), obox(eps^3, inf))"));
  std::vector<std::pair<std::string, GenNum>> points{
      {"eps^2", eps_pow(ctx, 2)}, {"-eps^2", -1.0 * eps_pow(ctx, 2)}, {"1", GenNum::constant(ctx, 1.0)}};
  for (const auto& [label, x0] : points) {
    LocalCert c = sharp_ift_certificate(g, GenPoint::scalar(x0));
    rep.check("certificate at x0 = " + label + " succeeds", is_strictly_positive(c.r).is_true());
  }
  LocalCert c = sharp_ift_certificate(g, GenPoint::scalar(eps_pow(ctx, 2)));
  GenNum y = eps_pow(ctx, 6);
  InverseJacobian ij = inverse_jacobian(c, GenPoint::scalar(y));
  Verdict root = is_negligible(ij.x[0] - eps_pow(ctx, 2));
  rep.check("f^-1(eps^6) = eps^2", root.is_true(), verdict_json(root));
  GenNum gp = ij.matrix.entry(0, 0);
  const double eg = exponent_of(gp);
  rep.add("(f^-1)'(eps^6)", gennum_json(gp));
  rep.check("(f^-1)' is infinite at the infinitesimal point eps^6", eg < 0, exponent_check(eg, "<", 0));
  rep.check("(f^-1)'(eps^6) has exponent -4", std::fabs(eg + 4) <= ctx->thresholds().slack,
            exponent_check(eg, "~", -4));
  rep.add_table(gennum_table("inverse_derivative", "(f^-1)'(eps^6) = 1/(3 eps^4) per eps", gp));
}

using ExampleFn = void (*)(Report&, const ContextPtr&);

struct ExampleInfo {
  const char* title;
  ExampleFn fn;
};

const ExampleInfo kExamples[kExampleCount] = {
    {"Heaviside is a diffeomorphism on an infinitesimal neighborhood of 0", example_heaviside},
    {"delta o delta is invertible around the mean value point c", example_delta_delta},
    {"r x: Fermat rejects, sharp accepts with infinitesimal image radius", example_linear},
    {"sin(x/r): injective near 0, not injective on real balls", example_sine_over_r},
    {"r sin x: inverse confined to (-r, r)", example_r_sine},
    {"x^3: rejected at 0, accepted away from (-r, r), infinite inverse derivative", example_cube},
};

}  // namespace

Report run_example(int id, const Config& config) {
  if (id < 1 || id > kExampleCount) throw DomainError("example id must lie in 1.." + std::to_string(kExampleCount));
  Report rep("examples run " + std::to_string(id), config.to_json());
  rep.add("title", kExamples[id - 1].title);
  try {
    kExamples[id - 1].fn(rep, config.make_context());
  } catch (const CertificateError& e) {
    rep.set_error("certificate", e.what());
  } catch (const NumericError& e) {
    rep.set_error("numeric", e.what());
  } catch (const DomainError& e) {
    rep.set_error("domain", e.what());
  }
  return rep;
}

Report run_all_examples(const Config& config) {
  Report all("examples run all", config.to_json());
  for (int id = 1; id <= kExampleCount; ++id) {
    Report one = run_example(id, config);
    const std::string prefix = "example " + std::to_string(id);
    Json entry;
    entry["title"] = kExamples[id - 1].title;
    entry["passed"] = one.passed();
    entry["results"] = one.results();
    if (!one.error().is_null()) entry["error"] = one.error();
    all.add(prefix, std::move(entry));
    for (const auto& c : one.checks())
      all.check(prefix + ": " + c["name"].get<std::string>(), c["pass"].get<bool>(),
                c.contains("details") ? c["details"] : Json::object());
    if (!one.error().is_null())
      all.check(prefix + ": completed without error", false, one.error());
    for (auto t : one.tables()) {
      t.name = "example" + std::to_string(id) + "_" + t.name;
      all.add_table(std::move(t));
    }
  }
  return all;
}

}  // namespace gsf
