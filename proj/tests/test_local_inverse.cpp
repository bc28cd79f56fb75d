#include "doctest.h"

#include "gsf/embedding.hpp"
#include "gsf/errors.hpp"
#include "gsf/local_inverse.hpp"

#include <cmath>
#include <functional>
#include <vector>

using namespace gsf;

namespace {

GenNum eps_pow(const ContextPtr& ctx, int p) { return GenNum::from_expr(ctx, pow(Expr::eps(), p)); }

GenPoint pt(const ContextPtr& ctx, std::vector<double> v) { return GenPoint::constant(ctx, v); }

bool negligible_diff(const GenNum& a, const GenNum& b) { return is_negligible(a - b).is_true(); }

// plain bisection for an increasing function
double bisect(const std::function<double(double)>& g, double y, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (g(mid) < y ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("nondegeneracy of generalized matrices") {
  auto ctx = Context::make();
  CHECK(is_nondegenerate(GenMatrix::identity(ctx, 3)).is_true());
  auto d = is_nondegenerate(GenMatrix::diagonal({eps_pow(ctx, 1), GenNum::constant(ctx, 1.0)}));
  CHECK(d.is_true());
  REQUIRE(d.witness.has_value());
  CHECK(*d.witness == 2);
  CHECK(is_nondegenerate(GenMatrix::diagonal({GenNum::constant(ctx, 0.0), GenNum::constant(ctx, 1.0)}))
            .is_false());
  CHECK(hadamard_constant(1) == 1.0);
  CHECK(hadamard_constant(2) == doctest::Approx(2.0));
}

TEST_CASE("sharp certificates") {
  auto ctx = Context::make();
  auto zero = pt(ctx, {0.0});
  auto id = sharp_ift_certificate(GSF::parse(ctx, "x"), zero);
  for (std::size_t k = 0; k < ctx->size(); ++k) {
    CHECK(id.a.value(k) == 1.0);
    CHECK(id.b.value(k) == 0.5);
    CHECK(id.c.value(k) == 2.0);
    CHECK(id.r.value(k) == 1.0);
  }

  auto rx = sharp_ift_certificate(GSF::parse(ctx, "eps*x"), zero);
  CHECK(negligible_diff(rx.a, eps_pow(ctx, -1)));
  auto img = exponent_estimate(rx.image_radius);
  CHECK(img.verdict.is_true());
  CHECK(img.exponent > 0);

  MollifierNetOptions opt;
  opt.mollifier.psi0 = true;
  MollifierNet net(ctx, opt);
  auto h = sharp_ift_certificate(embed(DistSpec::heaviside(), net), zero);
  auto rexp = exponent_estimate(h.r);
  CHECK(rexp.verdict.is_true());
  CHECK(rexp.exponent > 0);

  CHECK_THROWS_AS(sharp_ift_certificate(GSF::parse(ctx, "x^3"), zero), CertificateError);
  auto cube = sharp_ift_certificate(GSF::parse(ctx, "x^3"), GenPoint::scalar(eps_pow(ctx, 1)));
  CHECK(is_strictly_positive(cube.r).is_true());
}

TEST_CASE("Fermat certificates") {
  auto ctx = Context::make();
  auto zero = pt(ctx, {0.0});
  auto lin = fermat_ift_certificate(GSF::parse(ctx, "2*x"), zero, 1.0);
  CHECK(lin.fermat_r == 1.0);
  CHECK(lin.fermat_s == 1.0);
  CHECK(lin.a.value(ctx->size() - 1) == 0.5);

  CHECK_THROWS_AS(fermat_ift_certificate(GSF::parse(ctx, "eps*x"), zero, 10.0), CertificateError);

  GSF f = GSF::parse(ctx, "x + x^3");
  auto c = fermat_ift_certificate(f, zero, 1.0);
  // |3x^2| < 1/2 on the probes of B_2r, halving from 1
  CHECK(c.fermat_r == 0.125);
  CHECK(c.fermat_s == 0.0625);
  auto g = [](double x) { return x + x * x * x; };
  for (double y : {0.05, -0.06}) {
    auto inv = local_inverse_eval(c, pt(ctx, {y}));
    double want = bisect(g, y, -1, 1);
    for (std::size_t k = 0; k < ctx->size(); ++k) CHECK(std::fabs(inv.x[0].value(k) - want) <= 1e-12);
    CHECK(inv.negligible.is_true());
  }
  CHECK_THROWS_AS(local_inverse_eval(c, pt(ctx, {0.5})), DomainError);
}

TEST_CASE("local inverse values and round trips") {
  auto ctx = Context::make();
  auto zero = pt(ctx, {0.0});

  auto rx = sharp_ift_certificate(GSF::parse(ctx, "eps*x"), zero);
  auto inv = local_inverse_eval(rx, GenPoint::scalar(eps_pow(ctx, 2)));
  CHECK(negligible_diff(inv.x[0], eps_pow(ctx, 1)));
  CHECK(inv.negligible.is_true());

  auto id = sharp_ift_certificate(GSF::parse(ctx, "x"), zero);
  auto yi = GenPoint::scalar(GenNum::constant(ctx, 0.3) + eps_pow(ctx, 3));
  auto ii = local_inverse_eval(id, yi);
  CHECK(negligible_diff(ii.x[0], yi[0]));
  for (std::size_t k = 0; k < ctx->size(); ++k) CHECK(ii.residual.sample(k) == 0);

  GSF cubic = GSF::parse(ctx, "x + x^3");
  auto cc = sharp_ift_certificate(cubic, pt(ctx, {0.1}));
  auto ci = local_inverse_eval(cc, pt(ctx, {0.1}));
  double want = bisect([](double x) { return x + x * x * x; }, 0.1, -1, 1);
  for (std::size_t k = 0; k < ctx->size(); ++k) CHECK(std::fabs(ci.x[0].value(k) - want) <= 1e-12);
  CHECK(ci.negligible.is_true());

  // sin(x / eps) around 0: the image ball has real radius
  GSF s = GSF::parse(ctx, "sin(x/eps)");
  auto sc = sharp_ift_certificate(s, zero);
  CHECK(std::fabs(valuation(sc.image_radius)) <= ctx->thresholds().slack);
  for (double y : {0.2, -0.15}) {
    auto si = local_inverse_eval(sc, pt(ctx, {y}));
    CHECK(si.negligible.is_true());
    for (std::size_t k = 0; k < ctx->size(); ++k) {
      const double e = ctx->eps(k);
      double t = bisect([](double u) { return std::sin(u); }, y, -M_PI / 2, M_PI / 2);
      CHECK(std::fabs(si.x[0].value(k) - e * t) <= 1e-12 * e);
    }
  }
  auto small = local_inverse_eval(sc, GenPoint::scalar(eps_pow(ctx, 1)));
  CHECK(small.negligible.is_true());
  auto back = gsf_value(s, small.x);
  CHECK(negligible_diff(back[0], eps_pow(ctx, 1)));
}

TEST_CASE("inverse Jacobian by the adjugate formula") {
  auto ctx = Context::make();
  auto zero = pt(ctx, {0.0});
  auto id2 = sharp_ift_certificate(GSF::parse(ctx, "x1; x2"), pt(ctx, {0.0, 0.0}));
  auto j2 = inverse_jacobian(id2, pt(ctx, {0.1, -0.2}));
  for (std::size_t k = 0; k < ctx->size(); ++k)
    for (std::size_t r = 0; r < 2; ++r)
      for (std::size_t c = 0; c < 2; ++c) CHECK(j2.matrix.at(k)(r, c) == (r == c ? 1 : 0));
  CHECK(j2.detlow_ok);

  auto rx = sharp_ift_certificate(GSF::parse(ctx, "eps*x"), zero);
  auto jr = inverse_jacobian(rx, GenPoint::scalar(eps_pow(ctx, 2)));
  CHECK(negligible_diff(jr.matrix.entry(0, 0), eps_pow(ctx, -1)));

  GSF cubic = GSF::parse(ctx, "x + x^3");
  auto cc = sharp_ift_certificate(cubic, zero);
  auto jc = inverse_jacobian(cc, zero);
  for (std::size_t k = 0; k < ctx->size(); ++k) CHECK(jc.matrix.at(k)(0, 0) == 1);

  // consistency with the forward Jacobian in two dimensions
  GSF f = GSF::parse(ctx, "x1 + x2^2/2 + eps*x1*x2; sin(x2) + x1/4");
  auto cf = sharp_ift_certificate(f, pt(ctx, {0.2, -0.1}));
  auto y = gsf_value(f, pt(ctx, {0.21, -0.09}));
  auto jf = inverse_jacobian(cf, y);
  auto prod = jf.matrix * jacobian(f, jf.x);
  for (std::size_t k = 0; k < ctx->size(); ++k)
    for (std::size_t r = 0; r < 2; ++r)
      for (std::size_t c = 0; c < 2; ++c)
        CHECK(std::fabs(to_double(prod.at(k)(r, c)) - (r == c ? 1.0 : 0.0)) <= 1e-10);
  for (std::size_t k = 0; k < ctx->size(); ++k) CHECK(abs(jf.det.sample(k)) >= jf.det_bound.sample(k));
}

TEST_CASE("difference quotients in the sharp norm") {
  auto ctx = Context::make();
  auto zero = pt(ctx, {0.0});
  auto sq = afj_differentiability_check(GSF::parse(ctx, "x^2"), zero);
  REQUIRE(sq.rows.size() == 8);
  for (const auto& row : sq.rows) CHECK(std::fabs(row.quotient - std::exp(-row.k)) <= 1e-9 * std::exp(-row.k));
  CHECK(sq.decreasing);
  CHECK(sq.passed);
  CHECK(std::fabs(sq.q) <= 1e-9);

  auto lin = afj_differentiability_check(GSF::parse(ctx, "3*x - 1"), pt(ctx, {0.5}));
  for (const auto& row : lin.rows) CHECK(row.quotient == 0.0);
  CHECK(lin.passed);

  MollifierNet net(ctx);
  auto d = afj_differentiability_check(embed(DistSpec::delta(), net), zero);
  CHECK(d.decreasing);
  CHECK(d.bound_holds);
  CHECK(std::fabs(d.q - 3.0) <= 0.5);

  auto exp_ctx = Context::make(Gauge::exp());
  CHECK_THROWS_AS(afj_differentiability_check(GSF::parse(exp_ctx, "x"), pt(exp_ctx, {0.0})), DomainError);
}

TEST_CASE("injectivity of sin(x/r) near zero and its failure on real balls") {
  auto ctx = Context::make();
  GSF s = GSF::parse(ctx, "sin(x/eps)");
  for (std::size_t k = ctx->grid().tail_begin(); k < ctx->size(); ++k) {
    const double e = ctx->eps(k);
    // strictly increasing on sampled points of (-pi r/2, pi r/2)
    double prev = -2;
    for (int i = -50; i <= 50; ++i) {
      std::vector<Real> x{Real(e * M_PI / 2 * i / 50.5)};
      double v = to_double(s.eval_eps(e, x)[0]);
      CHECK(v > prev);
      prev = v;
    }
    // two distinct points with equal values in every real ball
    for (double radius : {0.1, 0.5, 1.0}) {
      const Real pi = real_pi();
      std::vector<Real> x1{Real(e) * pi / 4}, x2{Real(e) * 3 * pi / 4};
      CHECK(to_double(x2[0]) < radius);
      CHECK(abs(s.eval_eps(e, x1)[0] - s.eval_eps(e, x2)[0]) < Real("1e-300"));
    }
  }
}
