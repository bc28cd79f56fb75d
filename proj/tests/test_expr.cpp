#include "doctest.h"

#include "gsf/errors.hpp"
#include "gsf/expr.hpp"
#include "gsf/parser.hpp"
#include "gsf/quadrature.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace gsf;

namespace {

double eval1(const Expr& e, double x, double eps = 0.5) {
  std::vector<double> v{x};
  return evaluate<double>(e, eps, std::span<const double>(v));
}

// fourth-order central difference
double central_diff(const Expr& e, double x, double h = 1e-3) {
  return (-eval1(e, x + 2 * h) + 8 * eval1(e, x + h) - 8 * eval1(e, x - h) + eval1(e, x - 2 * h)) /
         (12 * h);
}

}  // namespace

TEST_CASE("parser builds the expected trees") {
  CHECK(eval1(parse_expr("1 + 2*3"), 0) == 7);
  CHECK(eval1(parse_expr("-x^2"), 3) == -9);
  CHECK(eval1(parse_expr("2^3^2"), 0) == 512);
  CHECK(eval1(parse_expr("eps^-1"), 0, 0.25) == 4);
  CHECK(eval1(parse_expr("x1 * 2"), 1.5) == 3);
  CHECK(eval1(parse_expr("arctan(1)*4"), 0) == doctest::Approx(M_PI));
  CHECK(eval1(parse_expr("1e-3*x"), 1000) == doctest::Approx(1));
  CHECK(parse_vector("x1; x2 + 1").size() == 2);
  CHECK_THROWS_AS(parse_expr("x +"), DomainError);
  CHECK_THROWS_AS(parse_expr("foo(x)"), DomainError);
  CHECK_THROWS_AS(parse_expr("bump(x)"), DomainError);
  CHECK_THROWS_AS(parse_expr("(x"), DomainError);
}

TEST_CASE("exact derivatives agree with central differences") {
  const char* corpus[] = {
      "x^3 - 2*x", "sin(x)*exp(-x^2)", "log(2 + cos(x))", "atan(3*x)/(1+x^2)",
      "sqrt(1 + x^2)", "x^2.5 + 1", "chi(x/2)", "bump(-1, 2, x)", "step(x)",
      "exp(x/eps)", "tan(x/3)",
  };
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> pick(0.1, 0.9);
  for (const char* src : corpus) {
    Expr f = parse_expr(src);
    Expr df = differentiate(f, 0);
    for (int i = 0; i < 8; ++i) {
      double x = pick(rng);
      double exact = eval1(df, x);
      double fd = central_diff(f, x);
      INFO(src << " at " << x);
      CHECK(std::fabs(exact - fd) <= 1e-6 * std::max(1.0, std::fabs(exact)));
    }
  }
}

TEST_CASE("second derivative of a splice") {
  Expr x = Expr::var(0);
  Expr s = splice(x * x, sin(x), x, 0.2, 0.8);
  Expr d2 = differentiate(differentiate(s, 0), 0);
  Expr d1 = differentiate(s, 0);
  for (double p : {0.1, 0.35, 0.5, 0.7, 0.95}) {
    CHECK(eval1(d2, p) == doctest::Approx(central_diff(d1, p, 1e-4)).epsilon(1e-6));
  }
  CHECK(eval1(s, 0.1) == doctest::Approx(0.01));
  CHECK(eval1(s, 0.9) == doctest::Approx(std::sin(0.9)));
}

TEST_CASE("smooth step is monotone with exact plateaus") {
  Expr s = smooth_step(Expr::var(0));
  CHECK(eval1(s, -0.5) == 0);
  CHECK(eval1(s, 1.5) == 1);
  CHECK(eval1(s, 0.5) == doctest::Approx(0.5));
  double prev = 0;
  for (int i = 5; i < 95; ++i) {
    double v = eval1(s, i / 100.0);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("Gauss-Legendre rules integrate polynomials and analytic functions") {
  const auto& r = gauss_legendre<double>(10);
  double sum = 0;
  for (double w : r.weights) sum += w;
  CHECK(sum == doctest::Approx(2.0).epsilon(1e-14));
  // exact up to degree 2n-1
  double q = integrate<double>([](double t) { return std::pow(t, 18); }, -1.0, 1.0, 10);
  CHECK(q == doctest::Approx(2.0 / 19).epsilon(1e-13));
  double e = integrate<double>([](double t) { return std::exp(t); }, 0.0, 1.0, 16, 4);
  CHECK(e == doctest::Approx(std::exp(1.0) - 1).epsilon(1e-15));
  Real er = integrate<Real>([](const Real& t) { return Real(boost::multiprecision::exp(t)); },
                            Real(0), Real(1), 40, 2);
  Real exact = boost::multiprecision::exp(Real(1)) - 1;
  CHECK(boost::multiprecision::abs(er - exact) < Real(1e-60));
}

TEST_CASE("integral nodes differentiate by the Leibniz rule") {
  Expr x = Expr::var(0);
  int t = fresh_dummy();
  Expr tv = Expr::var(t);
  // F(x) = int_0^x sin(x t) dt
  Expr f = integral(sin(x * tv), t, Expr(0.0), x);
  Expr df = differentiate(f, 0);
  for (double p : {0.3, 0.8, 1.7}) {
    double fd = central_diff(f, p, 1e-3);
    CHECK(eval1(df, p) == doctest::Approx(fd).epsilon(1e-7));
    // closed form F(x) = (1 - cos(x^2)) / x
    CHECK(eval1(f, p) == doctest::Approx((1 - std::cos(p * p)) / p).epsilon(1e-12));
  }
}

TEST_CASE("substitution and equivalence") {
  Expr x = Expr::var(0);
  Expr y = Expr::var(1);
  Expr f = x * y + sin(x);
  Expr g = substitute(f, 0, y + 1.0);
  std::vector<double> v{5.0, 2.0};
  CHECK(evaluate<double>(g, 0.5, std::span<const double>(v)) ==
        doctest::Approx(3 * 2 + std::sin(3.0)));
  CHECK(equivalent(x + y, y + x));
  CHECK(equivalent(x * (y * 2.0), (2.0 * x) * y));
  CHECK_FALSE(equivalent(x - y, y - x));
  CHECK(max_free_var(f) == 1);
  CHECK(depends_on(f, 1));
  CHECK_FALSE(depends_on(sin(x), 1));
  CHECK(depends_on_eps(x * Expr::eps()));
}

TEST_CASE("high precision evaluation matches double evaluation") {
  Expr f = parse_expr("exp(-x^2) * cos(3*x) + atan(x) / (1 + eps)");
  std::vector<double> vd{0.7};
  std::vector<Real> vr{Real(0.7)};
  double d = evaluate<double>(f, 0.125, std::span<const double>(vd));
  Real r = evaluate<Real>(f, 0.125, std::span<const Real>(vr));
  CHECK(to_double(r) == doctest::Approx(d).epsilon(1e-15));
}
