#include "doctest.h"

#include "gsf/errors.hpp"
#include "gsf/global_inverse.hpp"

#include <cmath>
#include <functional>
#include <vector>

using namespace gsf;

namespace {

GenNum eps_pow(const ContextPtr& ctx, int p) { return GenNum::from_expr(ctx, pow(Expr::eps(), p)); }

GenPoint pt(const ContextPtr& ctx, std::vector<double> v) { return GenPoint::constant(ctx, v); }

bool negligible_diff(const GenNum& a, const GenNum& b) { return is_negligible(a - b).is_true(); }

// plain bisection for a monotone function on [lo, hi]
double bisect(const std::function<double(double)>& g, double y, double lo, double hi) {
  const bool up = g(hi) > g(lo);
  for (int i = 0; i < 400; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    ((g(mid) < y) == up ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double half_sine(double x) { return x + std::sin(x) / 2; }
double cubic(double x) { return x + x * x * x; }

}  // namespace

TEST_CASE("uniform positivity exponents") {
  auto ctx = Context::make();
  auto unit = SetNet::box({Expr(-1.0)}, {Expr(1.0)});
  GSF one(ctx, {Expr(1.0)}, 1);
  CHECK(uniform_positivity_exponent(one, unit) == 1);
  CHECK(uniform_positivity_exponent(GSF::parse(ctx, "x^2 + eps"), unit) == 2);
  CHECK(uniform_positivity_exponent(GSF::parse(ctx, "x^2 + eps^3"), unit) == 4);
  CHECK_THROWS_AS(uniform_positivity_exponent(GSF::parse(ctx, "x^2"), unit), CertificateError);
  auto plane = SetNet::box({Expr(-1.0), Expr(-1.0)}, {Expr(1.0), Expr(1.0)});
  CHECK(uniform_positivity_exponent(GSF::parse(ctx, "x1 + 3; x2"), plane) == 0);
}

TEST_CASE("monotone modification of a one-dimensional net") {
  auto ctx = Context::make();
  auto shift = build_monotone_net_1d(GSF::parse(ctx, "x + 3"));
  CHECK(shift.sign == 1);
  for (std::size_t k = ctx->grid().tail_begin(); k < ctx->size(); ++k)
    for (double x : {-20.0, -7.5, 0.0, 2.0, 9.0, 30.0}) {
      std::vector<double> v{x};
      CHECK(std::fabs(shift.fbar.eval_double(ctx->eps(k), v)[0] - (x + 3)) <= 1e-12 * (1 + std::fabs(x)));
    }

  GSF f = GSF::parse(ctx, "x + exp(-x^2)");
  auto m = build_monotone_net_1d(f);
  CHECK(m.sign == 1);
  REQUIRE(m.q.size() == 9);
  for (int q : m.q) CHECK(q == 1);
  const Expr dbar = m.fbar.derivative(0, {1});
  for (std::size_t k = ctx->grid().tail_begin(); k < ctx->size(); ++k) {
    const double e = ctx->eps(k);
    const int n = default_n_schedule(e);
    CHECK(n == 8);
    for (int i = -100; i <= 100; ++i) {
      const double x = n * i / 100.0;
      std::vector<double> v{x};
      CHECK(std::fabs(m.fbar.eval_double(e, v)[0] - (x + std::exp(-x * x))) <= 1e-9);
    }
    for (int i = -100; i <= 100; ++i) {
      std::vector<double> v{0.3 * i};
      CHECK(evaluate<double>(dbar, e, std::span<const double>(v)) > 0);
    }
  }
  CHECK(default_n_schedule(1.0 / 16) == 4);
  CHECK(default_n_schedule(std::ldexp(1.0, -30)) == 8);

  auto down = build_monotone_net_1d(GSF::parse(ctx, "-2*x"));
  CHECK(down.sign == -1);
  CHECK_THROWS_AS(build_monotone_net_1d(GSF::parse(ctx, "x^2")), CertificateError);
  CHECK_THROWS_AS(build_monotone_net_1d(GSF::parse(ctx, "x - 2*sin(x)")), CertificateError);
}

TEST_CASE("one-dimensional global inverse") {
  auto ctx = Context::make();
  GSF f = GSF::parse(ctx, "x + sin(x)/2");
  auto cert = global_1d_certificate(f, 0.5);
  CHECK(cert.passed);
  CHECK(cert.surjective);
  CHECK(cert.c_f0 == 0.0);
  for (double y : {M_PI, 2.5, -3.5, 0.0}) {
    auto g = global_inverse_eval(cert, pt(ctx, {y}));
    const double want = bisect(half_sine, y, -40, 40);
    for (std::size_t k = 0; k < ctx->size(); ++k) CHECK(std::fabs(g.x[0].value(k) - want) <= 1e-12);
    CHECK(g.negligible.is_true());
    CHECK(g.bound_ok);
    CHECK(g.in_agreement_zone);
    // eq:C containment sample by sample
    for (std::size_t k = 0; k < ctx->size(); ++k) CHECK(std::fabs(g.x[0].value(k)) <= (std::fabs(y) + 0) / 0.5 + 1e-12);
    REQUIRE(g.derivative_moderate.size() == 3);
    for (const auto& v : g.derivative_moderate) CHECK(v.is_true());
  }
  // beyond the largest scheduled n the evaluator inverts fbar and says so
  auto far = global_inverse_eval(cert, pt(ctx, {-20.0}));
  CHECK_FALSE(far.in_agreement_zone);
  CHECK(far.bound_ok);

  auto inf = global_inverse_eval(cert, GenPoint::scalar(GenNum::constant(ctx, 1.0) + eps_pow(ctx, 2)));
  CHECK(inf.negligible.is_true());
  CHECK(negligible_diff(gsf_value(f, inf.x)[0], GenNum::constant(ctx, 1.0) + eps_pow(ctx, 2)));

  auto lin = global_1d_certificate(GSF::parse(ctx, "2*x"), 2.0);
  auto y = GenNum::constant(ctx, 0.7) + eps_pow(ctx, 1);
  auto gl = global_inverse_eval(lin, GenPoint::scalar(y));
  CHECK(negligible_diff(gl.x[0], 0.5 * y));

  // |f'| > [eps] only: invertible, surjectivity not certified
  auto weak = global_1d_certificate(GSF::parse(ctx, "eps*x"), 0.0);
  CHECK(weak.passed);
  CHECK_FALSE(weak.surjective);
  auto gw = global_inverse_eval(weak, GenPoint::scalar(eps_pow(ctx, 2)));
  CHECK(negligible_diff(gw.x[0], eps_pow(ctx, 1)));

  auto dec = global_1d_certificate(GSF::parse(ctx, "1 - x - x^3/3"), 1.0);
  CHECK(dec.monotone->sign == -1);
  CHECK(dec.c_f0 == 1.0);
  auto gd = global_inverse_eval(dec, pt(ctx, {-2.0}));
  const double want = bisect([](double x) { return 1 - x - x * x * x / 3; }, -2.0, -10, 10);
  for (std::size_t k = 0; k < ctx->size(); ++k) CHECK(std::fabs(gd.x[0].value(k) - want) <= 1e-12);
  CHECK(gd.bound_ok);

  CHECK_THROWS_AS(global_1d_certificate(f, 0.75), CertificateError);
  CHECK_THROWS_AS(global_inverse_eval(cert, GenPoint::scalar(eps_pow(ctx, -1))), DomainError);
}

TEST_CASE("Hadamard properness certificates") {
  auto ctx = Context::make();
  auto id = hadamard_certificate(GSF::parse(ctx, "x1; x2"));
  CHECK(id.passed);
  REQUIRE(id.properness.size() == 11);
  for (const auto& row : id.properness) CHECK(std::fabs(row.inf_norm - row.radius) <= 1e-12 * row.radius);

  GSF f = GSF::parse(ctx, "x1 + x1^3; x2 + x2^3");
  auto cert = hadamard_certificate(f);
  CHECK(cert.passed);
  CHECK(cert.surjective);
  for (const auto& row : cert.properness) {
    const double r = row.radius;
    // fine minimization over the circle bounds the sampled infimum from below
    double fine = INFINITY;
    for (int i = 0; i < 20000; ++i) {
      const double a = 2 * M_PI * i / 20000;
      fine = std::min(fine, std::hypot(cubic(r * std::cos(a)), cubic(r * std::sin(a))));
    }
    CHECK(row.inf_norm >= fine * (1 - 1e-12));
    CHECK(row.inf_norm <= fine * 1.01);
  }

  auto at = hadamard_certificate(GSF::parse(ctx, "atan(x)"));
  CHECK_FALSE(at.passed);
  REQUIRE(at.plateau_radius.has_value());
  for (const auto& row : at.properness) CHECK(row.inf_norm < M_PI / 2);
  CHECK_THROWS_AS(global_inverse_eval(at, pt(ctx, {0.5})), CertificateError);

  CHECK_THROWS_AS(hadamard_certificate(GSF::parse(ctx, "x1^3; x2^3")), CertificateError);
}

TEST_CASE("Hadamard-Levy certificates") {
  auto ctx = Context::make();
  auto lin = hadamard_levy_certificate(GSF::parse(ctx, "x1/2 + x2/8; x2"), {BetaSpec::Kind::Constant, 2.1, 0});
  CHECK(lin.passed);
  CHECK(lin.surjective);
  auto diag = hadamard_levy_certificate(GSF::parse(ctx, "x1/2; x2"), {BetaSpec::Kind::Constant, 2.0, 0});
  CHECK(std::fabs(diag.measured_c - 2.0) <= 1e-12);

  GSF f = GSF::parse(ctx, "x1 + sin(x1)/2; x2 + sin(x2)/2");
  auto cert = hadamard_levy_certificate(f, {BetaSpec::Kind::Constant, 2.0, 0});
  CHECK(cert.passed);
  CHECK(cert.measured_c <= 2.0);
  CHECK(cert.measured_c > 1.5);
  CHECK_THROWS_AS(hadamard_levy_certificate(f, {BetaSpec::Kind::Constant, 1.5, 0}), CertificateError);
  auto aff = hadamard_levy_certificate(f, {BetaSpec::Kind::Affine, 1.0, 1.0});
  CHECK_FALSE(aff.surjective);

  for (auto [y1, y2] : {std::pair{1.0, -2.0}, std::pair{7.5, 0.25}}) {
    auto g = global_inverse_eval(cert, pt(ctx, {y1, y2}));
    const double w1 = bisect(half_sine, y1, -40, 40), w2 = bisect(half_sine, y2, -40, 40);
    for (std::size_t k = 0; k < ctx->size(); ++k) {
      CHECK(std::fabs(g.x[0].value(k) - w1) <= 1e-10);
      CHECK(std::fabs(g.x[1].value(k) - w2) <= 1e-10);
    }
    CHECK(g.negligible.is_true());
    CHECK(g.bound_ok);
  }
  CHECK_THROWS_AS(hadamard_levy_certificate(GSF::parse(ctx, "x1^3; x2^3"), {BetaSpec::Kind::Constant, 10, 0}),
                  CertificateError);
}

TEST_CASE("global inverse evaluation by continuation") {
  auto ctx = Context::make();
  auto id = hadamard_certificate(GSF::parse(ctx, "x1; x2"));
  GenPoint y({GenNum::constant(ctx, 0.3) + eps_pow(ctx, 2), GenNum::constant(ctx, -1.0)});
  auto gi = global_inverse_eval(id, y);
  CHECK(negligible_diff(gi.x[0], y[0]));
  CHECK(negligible_diff(gi.x[1], y[1]));

  GSF f = GSF::parse(ctx, "x1 + x1^3; x2 + x2^3");
  auto cert = hadamard_certificate(f);
  for (auto [y1, y2] : {std::pair{2.0, 2.0}, std::pair{2.0, -0.5}}) {
    auto g = global_inverse_eval(cert, pt(ctx, {y1, y2}));
    const double w1 = bisect(cubic, y1, -10, 10), w2 = bisect(cubic, y2, -10, 10);
    for (std::size_t k = 0; k < ctx->size(); ++k) {
      CHECK(std::fabs(g.x[0].value(k) - w1) <= 1e-12);
      CHECK(std::fabs(g.x[1].value(k) - w2) <= 1e-12);
    }
    CHECK(g.negligible.is_true());
    REQUIRE(g.compact_radius.has_value());
    CHECK(*g.compact_radius == 2.0);
    CHECK(g.derivative_moderate.at(0).is_true());
    for (int s : g.homotopy_steps) CHECK(s >= 16);
    // round trip
    auto back = gsf_value(f, g.x);
    CHECK(negligible_diff(back[0], GenNum::constant(ctx, y1)));
    CHECK(negligible_diff(back[1], GenNum::constant(ctx, y2)));
  }

  auto shifted = hadamard_certificate(GSF::parse(ctx, "2*x + eps"));
  auto yy = GenNum::constant(ctx, 0.4);
  auto gs = global_inverse_eval(shifted, GenPoint::scalar(yy));
  CHECK(negligible_diff(gs.x[0], 0.5 * (yy - eps_pow(ctx, 1))));
}

TEST_CASE("local and global inverses agree where both apply") {
  auto ctx = Context::make();
  GSF f = GSF::parse(ctx, "x + x^3");
  auto local = sharp_ift_certificate(f, pt(ctx, {0.1}));
  auto global = global_1d_certificate(f, 1.0);
  auto had = hadamard_certificate(f);
  GenPoint y = GenPoint::scalar(GenNum::constant(ctx, 0.1) + eps_pow(ctx, 3));
  auto a = local_inverse_eval(local, y);
  auto b = global_inverse_eval(global, y);
  auto c = global_inverse_eval(had, y);
  CHECK(negligible_diff(a.x[0], b.x[0]));
  CHECK(negligible_diff(a.x[0], c.x[0]));
}
