#include "doctest.h"

#include "gsf/embedding.hpp"
#include "gsf/errors.hpp"
#include "gsf/smooth_net.hpp"

#include <cmath>
#include <vector>

using namespace gsf;

namespace {

GenNum eps_pow(const ContextPtr& ctx, int p) { return GenNum::from_expr(ctx, pow(Expr::eps(), p)); }

GenPoint pt(const ContextPtr& ctx, std::vector<double> v) { return GenPoint::constant(ctx, v); }

bool negligible_diff(const GenNum& a, const GenNum& b) { return is_negligible(a - b).is_true(); }

}  // namespace

TEST_CASE("evaluation at generalized points") {
  auto ctx = Context::make();
  GSF sq = GSF::parse(ctx, "x^2");
  auto r = gsf_eval(sq, GenPoint::scalar(eps_pow(ctx, 1)));
  CHECK(negligible_diff(r.value[0], eps_pow(ctx, 2)));
  CHECK(r.certificate.domain.is_true());
  CHECK(r.certificate.derivatives.size() == 4);
  for (const auto& d : r.certificate.derivatives) CHECK(d.moderate.is_true());

  GSF blow = GSF::parse(ctx, "exp(x/eps)");
  CHECK_THROWS_AS(gsf_eval(blow, pt(ctx, {1.0})), CertificateError);

  auto open = SetNet::box({0.0}, {1.0}, false);
  GSF on_box = GSF::parse(ctx, "log(x)", ParserOptions::standard(), open);
  auto inside = gsf_eval(on_box, GenPoint::scalar(eps_pow(ctx, 1)));
  CHECK(inside.certificate.domain.is_true());
  CHECK_THROWS_AS(gsf_eval(on_box, pt(ctx, {-1.0})), DomainError);
  CHECK_THROWS_AS(gsf_eval(on_box, pt(ctx, {0.5, 0.5})), DomainError);
}

TEST_CASE("derivatives of generalized smooth functions") {
  auto ctx = Context::make();
  GSF cube = GSF::parse(ctx, "x^3");
  GSF d2 = differentiate(cube, {2});
  auto v = gsf_value(d2, GenPoint::scalar(eps_pow(ctx, 1)));
  CHECK(negligible_diff(v[0], 6.0 * eps_pow(ctx, 1)));

  // f(x) = sin(x / r) with r = eps: f'(0) = 1/eps is infinite
  GSF s = GSF::parse(ctx, "sin(x/eps)");
  auto fp = gsf_value(differentiate(s, {1}), pt(ctx, {0.0}))[0];
  CHECK(negligible_diff(fp, eps_pow(ctx, -1)));
  CHECK(std::fabs(valuation(fp) + 1.0) <= ctx->thresholds().slack);

  // H' = delta at 0 gives b
  MollifierNetOptions opt;
  opt.mollifier.psi0 = true;
  MollifierNet net(ctx, opt);
  GSF h = embed(DistSpec::heaviside(), net);
  auto h1 = gsf_value(differentiate(h, {1}), pt(ctx, {0.0}))[0];
  GenNum b = net.b_net();
  for (std::size_t k = 0; k < ctx->size(); ++k) CHECK(std::fabs(h1.value(k) / b.value(k) - 1) <= 1e-12);

  // directional derivative with an infinitesimal direction
  GSF f2 = GSF::parse(ctx, "x1^2*x2; sin(x1) + x2");
  auto dd = directional_derivative(f2, pt(ctx, {1.0, 2.0}),
                                   GenPoint({eps_pow(ctx, 1), GenNum::constant(ctx, 0.0)}));
  CHECK(negligible_diff(dd[0], 4.0 * eps_pow(ctx, 1)));
  CHECK(negligible_diff(dd[1], std::cos(1.0) * eps_pow(ctx, 1)) == false);
  for (std::size_t k = 0; k < ctx->size(); ++k)
    CHECK(dd[1].value(k) == doctest::Approx(std::cos(1.0) * ctx->eps(k)).epsilon(1e-14));
}

TEST_CASE("derivative expressions agree with central differences") {
  auto ctx = Context::make();
  GSF f = GSF::parse(ctx, "x1^2*sin(x2) + exp(x1*x2) + atan(x1 - 2*x2)");
  const double h = 1e-4;
  for (auto [a, b] : {std::pair{0.3, -0.7}, std::pair{-1.1, 0.4}, std::pair{0.8, 0.9}}) {
    for (const auto& alpha : multi_indices(2, 2)) {
      // finite differences of the lower derivative along the last raised axis
      MultiIndex lower = alpha;
      std::size_t axis = alpha[1] > 0 ? 1 : 0;
      --lower[axis];
      Expr lo = f.derivative(0, lower);
      Expr hi = f.derivative(0, alpha);
      auto at = [&](const Expr& e, double x1, double x2) {
        std::vector<double> p{x1, x2};
        return evaluate<double>(e, 0.1, std::span<const double>(p));
      };
      double dx = axis == 0 ? h : 0, dy = axis == 1 ? h : 0;
      double fd = (-at(lo, a + 2 * dx, b + 2 * dy) + 8 * at(lo, a + dx, b + dy) -
                   8 * at(lo, a - dx, b - dy) + at(lo, a - 2 * dx, b - 2 * dy)) /
                  (12 * h);
      double exact = at(hi, a, b);
      CHECK(std::fabs(fd - exact) <= 1e-6 * std::max(1.0, std::fabs(exact)));
    }
  }
}

TEST_CASE("incremental ratios") {
  auto ctx = Context::make();
  GSF sq = GSF::parse(ctx, "x^2");
  auto one = pt(ctx, {1.0});
  auto rep = incremental_ratio_check(sq, one, one, {eps_pow(ctx, 1)});
  CHECK(rep.ok);
  CHECK(rep.rows[0].negligible.is_true());

  GSF id = GSF::parse(ctx, "x");
  auto rid = incremental_ratio_check(id, pt(ctx, {0.3}), one,
                                     {eps_pow(ctx, 1), GenNum::constant(ctx, 0.5), eps_pow(ctx, -2)});
  CHECK(rid.ok);
  for (const auto& row : rid.rows) CHECK(row.negligible.is_true());

  MollifierNetOptions opt;
  opt.mollifier.psi0 = true;
  MollifierNet net(ctx, opt);
  GSF delta = embed(DistSpec::delta(), net);
  auto rd = incremental_ratio_check(delta, pt(ctx, {0.0}), one, {eps_pow(ctx, 2)});
  CHECK(rd.ok);
  CHECK(rd.rows[0].negligible.is_true());
}

TEST_CASE("composition, chain rule and operator norms") {
  auto ctx = Context::make();
  MollifierNetOptions opt;
  opt.mollifier.psi0 = true;
  MollifierNet net(ctx, opt);
  GSF delta = embed(DistSpec::delta(), net);
  GSF dd = compose(delta, delta);
  GenNum b = net.b_net();
  for (double r : {0.5, -0.75, 3.0}) {
    auto v = gsf_value(dd, pt(ctx, {r}))[0];
    for (std::size_t k = 0; k < ctx->size(); ++k) CHECK(std::fabs(v.value(k) / b.value(k) - 1) <= 1e-12);
  }

  GSF ident = GSF::parse(ctx, "x1; x2");
  GSF ii = compose(ident, ident);
  auto j = jacobian(ii, pt(ctx, {0.4, -2.0}));
  for (std::size_t k = 0; k < ctx->size(); ++k)
    for (std::size_t r = 0; r < 2; ++r)
      for (std::size_t c = 0; c < 2; ++c) CHECK(j.at(k)(r, c) == (r == c ? 1 : 0));

  GSF f = GSF::parse(ctx, "x1^2 + x2; sin(x1)*x2");
  GSF g = GSF::parse(ctx, "x1*x2; x1 + eps*x2^3");
  GenPoint x = GenPoint({GenNum::constant(ctx, 0.7), eps_pow(ctx, -1)});
  auto lhs = jacobian(compose(f, g), x);
  auto rhs = jacobian(f, gsf_value(g, x)) * jacobian(g, x);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 2; ++c) CHECK(negligible_diff(lhs.entry(r, c), rhs.entry(r, c)));

  auto a = GenMatrix::diagonal({eps_pow(ctx, 1), GenNum::constant(ctx, 1.0)});
  auto n = op_norm(a);
  for (std::size_t k = 0; k < ctx->size(); ++k) CHECK(std::fabs(n.value(k) - 1.0) <= 1e-15);

  auto box = SetNet::box({0.0}, {1.0}, false);
  GSF lg = GSF::parse(ctx, "log(x)", ParserOptions::standard(), box);
  GSF shift = GSF::parse(ctx, "x + 5");
  CHECK_THROWS_AS(compose(lg, shift), DomainError);
}

TEST_CASE("Lipschitz probes in both topologies") {
  auto ctx = Context::make();
  auto zero = pt(ctx, {0.0});
  GSF lin = GSF::parse(ctx, "2*x");
  for (BallKind kind : {BallKind::Sharp, BallKind::Fermat}) {
    auto r = lipschitz_probe(lin, pt(ctx, {0.3}), kind);
    CHECK(r.verdict.is_true());
    for (std::size_t k = 0; k < ctx->size(); ++k) CHECK(std::fabs(r.constant.value(k) - 2.0) <= 1e-12);
  }
  GSF s = GSF::parse(ctx, "sin(x)");
  auto rs = lipschitz_probe(s, zero, BallKind::Fermat);
  CHECK(rs.verdict.is_true());
  CHECK(*rs.verdict.witness <= 1.0);

  MollifierNet net(ctx);
  GSF delta = embed(DistSpec::delta(), net);
  auto rd = lipschitz_probe(delta, zero, BallKind::Fermat);
  CHECK(rd.verdict.is_false());
  auto sharp = lipschitz_probe(delta, zero, BallKind::Sharp);
  CHECK(sharp.verdict.is_true());
}

TEST_CASE("sharp continuity and sampled derivative bounds") {
  auto ctx = Context::make();
  GSF f = GSF::parse(ctx, "sin(x) + x^3 - exp(-x^2)/eps");
  for (double x0 : {-0.4, 0.0, 1.3}) {
    GenPoint x = pt(ctx, {x0});
    GenPoint moved = x + GenPoint::scalar(eps_pow(ctx, 40));
    CHECK(negligible_diff(gsf_value(f, moved)[0], gsf_value(f, x)[0]));
  }

  // some q keeps every derivative of order <= 3 below eps^-q on the eps^q ball
  GSF s = GSF::parse(ctx, "sin(x/eps)");
  int found = -1;
  for (int q = 0; q <= ctx->thresholds().n_max && found < 0; ++q) {
    bool ok = true;
    for (std::size_t k = ctx->grid().tail_begin(); k < ctx->size() && ok; ++k) {
      const double e = ctx->eps(k);
      for (int a = 0; a <= 3 && ok; ++a) {
        Expr d = s.derivative(0, {a});
        for (int i = -8; i <= 8; ++i) {
          std::vector<Real> y{Real(std::pow(e, q) * i / 8.0)};
          Real v = abs(evaluate<Real>(d, e, std::span<const Real>(y)));
          if (v > Real(std::pow(e, -q))) {
            ok = false;
            break;
          }
        }
      }
    }
    if (ok) found = q;
  }
  CHECK(found == 3);
}
