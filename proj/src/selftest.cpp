#include "gsf/selftest.hpp"

#include "gsf/embedding.hpp"
#include "gsf/errors.hpp"
#include "gsf/examples.hpp"
#include "gsf/global_inverse.hpp"
#include "gsf/local_inverse.hpp"
#include "gsf/parser.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

namespace gsf {

namespace {

/// Collects assertions; keeps the first failure.
struct Checker {
  bool ok = true;
  int count = 0;
  int failed = 0;
  std::string first;

  void expect(bool condition, const std::string& what) {
    ++count;
    if (condition) return;
    ++failed;
    if (ok) first = what;
    ok = false;
  }
};

double kronrod(const std::function<double(double)>& f, double lo, double hi) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 4, 1e-14);
}

double chi_d(double u) { return std::fabs(u) < 1 ? std::exp(-1.0 / (1.0 - u * u)) : 0.0; }

double psi_d(const Mollifier1D& m, double x) {
  double p = 0;
  for (std::size_t i = 0; i < m.powers.size(); ++i) p += m.coefficients[i] * std::pow(x, m.powers[i]);
  return p * chi_d(x);
}

double bump_d(double a, double b, double x) { return chi_d((2 * x - a - b) / (b - a)); }

double bump_d1(double a, double b, double x) {
  const double u = (2 * x - a - b) / (b - a);
  if (std::fabs(u) >= 1) return 0;
  const double q = 1 - u * u;
  return chi_d(u) * (-2 * u / (q * q)) * (2 / (b - a));
}

/// Bisection for a monotone function on [lo, hi].
double bisect(const std::function<double(double)>& g, double y, double lo, double hi) {
  const bool up = g(hi) > g(lo);
  for (int i = 0; i < 400; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    ((g(mid) < y) == up ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

GenPoint pt(const ContextPtr& ctx, std::vector<double> v) { return GenPoint::constant(ctx, std::move(v)); }

GenNum eps_pow(const ContextPtr& ctx, int p) { return GenNum::from_expr(ctx, pow(Expr::eps(), p)); }

bool negligible_diff(const GenNum& a, const GenNum& b) { return is_negligible(a - b).is_true(); }

// ---------------------------------------------------------------- criterion 1

struct CorpusNet {
  std::string text;
  // analytically known classification; Indeterminate means "not asserted"
  Truth positive;
  Truth negligible;
  Truth moderate;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::vector<CorpusNet> build_corpus() {
  std::vector<CorpusNet> corpus;
  const Truth T = Truth::True, F = Truth::False, U = Truth::Indeterminate;
  for (int i = -12; i <= 12; ++i) {
    const double a = 0.25 * i;
    for (double c : {0.5, 1.0, 3.0, -0.5, -1.0, -3.0})
      corpus.push_back({"(" + num(c) + ")*eps^(" + num(a) + ")", c > 0 ? T : F, F, T});
  }
  const double leading[] = {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  const double coeffs[] = {2.0, -2.0, 0.5, -0.5};
  for (int i = 0; i < 40; ++i) {
    const double a = leading[i % 10];
    const double b = a + 0.5 * (1 + i % 4);
    const double c = coeffs[(i / 4) % 4];
    const double sign = i < 20 ? 1.0 : -1.0;
    corpus.push_back({"(" + num(sign) + ")*eps^(" + num(a) + ") + (" + num(c) + ")*eps^(" + num(b) + ")",
                      sign > 0 ? T : F, F, T});
  }
  for (int a = -2; a <= 3; ++a) {
    const std::string p = "eps^(" + std::to_string(a) + ")";
    corpus.push_back({"sin(1/eps)*" + p, F, F, T});
    corpus.push_back({"cos(1/eps)*" + p, F, F, T});
    corpus.push_back({"(2 + sin(1/eps))*" + p, T, F, T});
    corpus.push_back({"(-2 + cos(1/eps))*" + p, F, F, T});
  }
  corpus.push_back({"0", F, T, T});
  corpus.push_back({"exp(-1/eps)", F, T, T});
  corpus.push_back({"-exp(-1/eps)", F, T, T});
  corpus.push_back({"exp(1/eps)", U, F, F});
  return corpus;
}

bool contradicts(const Verdict& v, Truth truth) {
  if (truth == Truth::Indeterminate || v.is_indeterminate()) return false;
  return v.value != truth;
}

void criterion_ring(Checker& ck, Json& details) {
  auto ctx = Context::make();
  const auto corpus = build_corpus();
  std::vector<GenNum> nets;
  int indeterminate = 0, positives = 0;
  for (const auto& c : corpus) {
    GenNum x = GenNum::from_expr(ctx, parse_expr(c.text));
    nets.push_back(x);
    Verdict pos = is_strictly_positive(x), neg = is_negligible(x), mod = is_moderate(x);
    indeterminate += pos.is_indeterminate() + neg.is_indeterminate() + mod.is_indeterminate();
    ck.expect(!contradicts(pos, c.positive), "is_strictly_positive misclassifies " + c.text);
    ck.expect(!contradicts(neg, c.negligible), "is_negligible misclassifies " + c.text);
    ck.expect(!contradicts(mod, c.moderate), "is_moderate misclassifies " + c.text);
    if (pos.is_true()) {
      ++positives;
      bool tail_positive = true;
      for (std::size_t k = ctx->grid().tail_begin(); k < ctx->size(); ++k) tail_positive &= x.sample(k) > 0;
      ck.expect(tail_positive, "positive verdict with a nonpositive tail sample: " + c.text);
      try {
        GenNum inv = GenNum::constant(ctx, 1.0) / x;
        ck.expect(negligible_diff(x * inv, GenNum::constant(ctx, 1.0)), "x * (1/x) != 1 for " + c.text);
      } catch (const DomainError&) {
        ck.expect(false, "positive verdict without a reciprocal: " + c.text);
      }
    }
  }
  // antisymmetry on neighbours and on negligible perturbations
  GenNum tiny = GenNum::from_expr(ctx, parse_expr("exp(-1/eps)"));
  int pairs = 0, both = 0;
  for (std::size_t i = 0; i < nets.size(); ++i) {
    if (corpus[i].moderate != Truth::True) continue;  // order is defined on ring elements only
    const std::vector<GenNum> partners{nets[(i + 1) % (nets.size() - 1)], nets[i] + tiny, nets[i]};
    for (const auto& y : partners) {
      ++pairs;
      if (leq(nets[i], y).is_true() && leq(y, nets[i]).is_true()) {
        ++both;
        ck.expect(is_negligible(nets[i] - y).is_true(), "leq antisymmetry fails for " + corpus[i].text);
      }
    }
  }
  details["corpus_size"] = corpus.size();
  details["positive_verdicts"] = positives;
  details["indeterminate_verdicts"] = indeterminate;
  details["leq_pairs"] = pairs;
  details["antisymmetric_pairs"] = both;
  ck.expect(corpus.size() >= 200, "corpus smaller than 200 nets");
  ck.expect(both >= static_cast<int>(nets.size()), "antisymmetry exercised on too few pairs");
}

// ---------------------------------------------------------------- criterion 2

void criterion_mollifier(Checker& ck, Json& details) {
  double worst_moment = 0, worst_d = 0, worst_poly = 0, worst_embed = 0;
  MollifierOptions split;
  split.d = 0.5;
  for (int j = 0; j <= 10; ++j) {
    for (const MollifierOptions& opt : {MollifierOptions{}, split}) {
      const Mollifier1D m = build_mollifier(j, opt);
      for (int a = 0; a <= j; ++a) {
        const double mom = kronrod([&](double x) { return std::pow(x, a) * psi_d(m, x); }, -1, 1);
        worst_moment = std::max(worst_moment, std::fabs(mom - (a == 0 ? 1.0 : 0.0)));
      }
      if (opt.d) {
        const double left = kronrod([&](double x) { return psi_d(m, x); }, -1, 0);
        worst_d = std::max(worst_d, std::fabs(left - *opt.d));
        ck.expect(m.d_residual && *m.d_residual <= 1e-10, "reported d residual above 1e-10 at j=" + std::to_string(j));
      }
      // (p * psi)(x) = p(x) for p = sum_{i<=j} (i+1) x^i / 2^i, degree j
      auto p = [&](double x) {
        double s = 0;
        for (int i = 0; i <= j; ++i) s += (i + 1) * std::pow(x / 2, i);
        return s;
      };
      for (double x : {-0.3, 0.1, 0.7})
        worst_poly = std::max(
            worst_poly, std::fabs(kronrod([&](double t) { return p(x - t) * psi_d(m, t); }, -1, 1) - p(x)));
    }
  }
  // the embedding of a polynomial through the net reproduces it once j(eps) >= degree
  auto ctx = Context::make();
  MollifierNet net(ctx);
  Expr x = Expr::var(0);
  Expr poly = Expr(1.0) + x - Expr(3.0) * pow(x, 2) + pow(x, 5);
  GSF f = embed(DistSpec::regular(poly), net);
  for (std::size_t k = 0; k < ctx->size(); ++k) {
    const double e = ctx->eps(k);
    if (net.j_at(e) < 5) continue;
    for (double t : {-0.3, 0.1, 0.7}) {
      std::vector<double> v{t};
      const double want = 1 + t - 3 * t * t + std::pow(t, 5);
      worst_embed = std::max(worst_embed, std::fabs(f.eval_double(e, v)[0] - want));
    }
  }
  details["max_moment_residual"] = worst_moment;
  details["max_d_residual"] = worst_d;
  details["max_polynomial_error"] = worst_poly;
  details["max_embedded_polynomial_error"] = worst_embed;
  ck.expect(worst_moment <= 1e-10, "moment residual above 1e-10");
  ck.expect(worst_d <= 1e-10, "d-constraint residual above 1e-10");
  ck.expect(worst_poly <= 1e-8, "polynomial reproduction error above 1e-8");
  ck.expect(worst_embed <= 1e-8, "embedded polynomial reproduction error above 1e-8");
}

// ---------------------------------------------------------------- criterion 3

void criterion_embedding(Checker& ck, Json& details) {
  auto ctx = Context::make();
  MollifierNet net(ctx);
  const Expr x = Expr::var(0);
  const Expr phi = bump(Expr(-0.5), Expr(0.7), x);
  const Expr phi_pos = bump(Expr(0.2), Expr(1.2), x);
  struct Case {
    const char* name;
    DistSpec t;
    Expr phi;
    double lo, hi, exact;
  };
  const std::vector<Case> cases{
      {"delta", DistSpec::delta(), phi, -0.5, 0.7, bump_d(-0.5, 0.7, 0.0)},
      {"delta'", DistSpec::delta(0.0, 1), phi, -0.5, 0.7, -bump_d1(-0.5, 0.7, 0.0)},
      {"H", DistSpec::heaviside(), phi_pos, 0.2, 1.2, kronrod([](double t) { return bump_d(0.2, 1.2, t); }, 0.2, 1.2)},
  };
  for (const auto& c : cases) {
    PairingReport r = pairing_limit(c.t, net, c.phi, c.lo, c.hi);
    details[std::string("pairing_") + c.name] = {{"final_error", r.final_error}, {"monotone", r.monotone}};
    ck.expect(std::fabs(r.exact - c.exact) <= 1e-12, std::string("exact pairing mismatch for ") + c.name);
    ck.expect(r.monotone, std::string("pairing not monotone on the tail for ") + c.name);
    ck.expect(r.final_error <= 1e-6, std::string("pairing final error above 1e-6 for ") + c.name);
  }
  CommutationReport comm = derivative_commutation_check(DistSpec::heaviside(), net);
  details["commutation_structural"] = comm.structural;
  ck.expect(comm.structural, "d(iota H) and iota(delta) differ as expressions");

  MollifierNetOptions half;
  half.mollifier.d = 0.5;
  MollifierNet hnet(ctx, half);
  GenNum h0 = gsf_value(embed(DistSpec::heaviside(), hnet), pt(ctx, {0.0}))[0];
  double worst = 0;
  for (std::size_t k = 0; k < ctx->size(); ++k) worst = std::max(worst, std::fabs(h0.value(k) - 0.5));
  details["max_abs_H0_minus_half"] = worst;
  ck.expect(worst <= 1e-10, "H(0) differs from 1/2 by more than 1e-10");
}

// ---------------------------------------------------------------- criterion 4

void check_inverse(Checker& ck, const std::string& label, const LocalCert& cert, const GenPoint& y,
                   const std::function<double(std::size_t)>& oracle, double& worst_value, double& worst_jac) {
  const ContextPtr& ctx = y.context();
  InverseResult inv = local_inverse_eval(cert, y);
  ck.expect(inv.negligible.is_true(), "round-trip residual not negligible for " + label);
  for (std::size_t k = 0; k < ctx->size(); ++k) {
    const double err = std::fabs(inv.x[0].value(k) - oracle(k));
    worst_value = std::max(worst_value, err);
    ck.expect(err <= 1e-12, "inverse differs from the bisection oracle for " + label);
  }
  InverseJacobian ij = inverse_jacobian(cert, y);
  ck.expect(ij.detlow_ok, "determinant lower bound violated for " + label);
  GenMatrix prod = ij.matrix * jacobian(cert.f, ij.x);
  const std::size_t n = cert.f.dim();
  for (std::size_t k = 0; k < ctx->size(); ++k) {
    ck.expect(abs(ij.det.sample(k)) >= ij.det_bound.sample(k), "determinant below 1/(C c^n) for " + label);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c)
        worst_jac = std::max(worst_jac, std::fabs(to_double(prod.at(k)(r, c)) - (r == c ? 1.0 : 0.0)));
  }
}

void criterion_local(Checker& ck, Json& details) {
  auto ctx = Context::make();
  double worst_value = 0, worst_jac = 0;
  auto eps_at = [&](std::size_t k) { return ctx->eps(k); };

  auto rx = sharp_ift_certificate(GSF::parse(ctx, "eps*x"), pt(ctx, {0.0}));
  check_inverse(ck, "eps*x", rx, GenPoint::scalar(eps_pow(ctx, 2)),
                [&](std::size_t k) { return bisect([&](double t) { return eps_at(k) * t; }, std::pow(eps_at(k), 2), -1, 1); },
                worst_value, worst_jac);

  auto id = sharp_ift_certificate(GSF::parse(ctx, "x"), pt(ctx, {0.0}));
  for (double y : {0.3, -0.4})
    check_inverse(ck, "x", id, pt(ctx, {y}), [&](std::size_t) { return bisect([](double t) { return t; }, y, -2, 2); },
                  worst_value, worst_jac);

  auto cubic = [](double t) { return t + t * t * t; };
  auto cc = sharp_ift_certificate(GSF::parse(ctx, "x + x^3"), pt(ctx, {0.1}));
  for (double y : {0.101, 0.1009})
    check_inverse(ck, "x + x^3", cc, pt(ctx, {y}), [&](std::size_t) { return bisect(cubic, y, -1, 1); }, worst_value,
                  worst_jac);

  auto sc = sharp_ift_certificate(GSF::parse(ctx, "sin(x/eps)"), pt(ctx, {0.0}));
  for (double y : {0.2, -0.15})
    check_inverse(ck, "sin(x/eps)", sc, pt(ctx, {y}),
                  [&](std::size_t k) {
                    const double e = eps_at(k);
                    return bisect([e](double t) { return std::sin(t / e); }, y, -M_PI / 2 * e, M_PI / 2 * e);
                  },
                  worst_value, worst_jac);

  // two dimensions: inverse Jacobian against the forward Jacobian and the determinant bound
  GSF f2 = GSF::parse(ctx, "x1 + x2^2/2 + eps*x1*x2; sin(x2) + x1/4");
  auto c2 = sharp_ift_certificate(f2, pt(ctx, {0.2, -0.1}));
  InverseResult i2 = local_inverse_eval(c2, gsf_value(f2, pt(ctx, {0.21, -0.09})));
  ck.expect(i2.negligible.is_true(), "round-trip residual not negligible for the planar map");
  InverseJacobian j2 = inverse_jacobian(c2, gsf_value(f2, pt(ctx, {0.21, -0.09})));
  ck.expect(j2.detlow_ok, "determinant lower bound violated for the planar map");
  GenMatrix prod = j2.matrix * jacobian(f2, j2.x);
  for (std::size_t k = 0; k < ctx->size(); ++k) {
    ck.expect(abs(j2.det.sample(k)) >= j2.det_bound.sample(k), "determinant below 1/(C c^n) for the planar map");
    for (std::size_t r = 0; r < 2; ++r)
      for (std::size_t c = 0; c < 2; ++c)
        worst_jac = std::max(worst_jac, std::fabs(to_double(prod.at(k)(r, c)) - (r == c ? 1.0 : 0.0)));
  }
  details["max_inverse_error"] = worst_value;
  details["max_jacobian_identity_error"] = worst_jac;
  ck.expect(worst_jac <= 1e-10, "inverse_jacobian * jacobian differs from the identity by more than 1e-10");
}

// ---------------------------------------------------------------- criterion 5

void criterion_examples(Checker& ck, Json& details) {
  Report rep = run_all_examples(Config{});
  int failed = 0;
  for (const auto& c : rep.checks())
    if (!c["pass"].get<bool>()) {
      ++failed;
      ck.expect(false, c["name"].get<std::string>());
    }
  details["checks"] = rep.checks().size();
  details["failed"] = failed;
  ck.expect(rep.passed(), "examples run all failed");
}

// ---------------------------------------------------------------- criterion 6

void criterion_global(Checker& ck, Json& details) {
  auto ctx = Context::make();
  auto half_sine = [](double x) { return x + std::sin(x) / 2; };
  auto cubic = [](double x) { return x + x * x * x; };

  GlobalCert one = global_1d_certificate(GSF::parse(ctx, "x + sin(x)/2"), 0.5);
  ck.expect(one.passed && one.surjective, "1D certificate for x + sin(x)/2 with r = 1/2 failed");
  double worst_1d = 0;
  for (double y : {M_PI, 2.5, -3.5, 0.0}) {
    GlobalInverseResult g = global_inverse_eval(one, pt(ctx, {y}));
    const double want = bisect(half_sine, y, -40, 40);
    ck.expect(g.bound_ok, "surjectivity bound |g(y)| <= (|y| + C)/r violated");
    ck.expect(g.negligible.is_true(), "1D round trip not negligible");
    for (std::size_t k = 0; k < ctx->size(); ++k) {
      const double gx = g.x[0].value(k);
      ck.expect(std::fabs(gx) <= (std::fabs(y) + one.c_f0) / one.r * (1 + 1e-15), "eq:C bound violated at a sample");
      worst_1d = std::max(worst_1d, std::fabs(gx - want));
    }
  }
  details["max_1d_error"] = worst_1d;
  ck.expect(worst_1d <= 1e-12, "1D inverse differs from bisection by more than 1e-12");

  GSF f = GSF::parse(ctx, "x1 + x1^3; x2 + x2^3");
  GlobalCert had = hadamard_certificate(f);
  ck.expect(had.passed, "Hadamard certificate for x + x^3 failed");
  GlobalCert at = hadamard_certificate(GSF::parse(ctx, "atan(x1); atan(x2)"));
  ck.expect(!at.passed, "Hadamard certificate for arctan passed");
  details["atan_plateau_radius"] = at.plateau_radius ? Json(*at.plateau_radius) : Json();

  GlobalCert levy = hadamard_levy_certificate(f, {BetaSpec::Kind::Constant, 1.0, 0});
  details["levy_measured_c"] = levy.measured_c;
  ck.expect(levy.passed && levy.surjective, "Hadamard-Levy constant-C certificate failed");
  double worst_levy = 0;
  for (auto [y1, y2] : {std::pair{2.0, 2.0}, std::pair{2.0, -0.5}, std::pair{-9.0, 0.75}}) {
    GlobalInverseResult g = global_inverse_eval(levy, pt(ctx, {y1, y2}));
    const double w1 = bisect(cubic, y1, -10, 10), w2 = bisect(cubic, y2, -10, 10);
    ck.expect(g.negligible.is_true(), "Hadamard-Levy round trip not negligible");
    ck.expect(g.bound_ok, "Hadamard-Levy bound ||g(y)|| <= C ||y - f(0)|| violated");
    for (std::size_t k = 0; k < ctx->size(); ++k)
      worst_levy = std::max({worst_levy, std::fabs(g.x[0].value(k) - w1), std::fabs(g.x[1].value(k) - w2)});
  }
  details["max_levy_error"] = worst_levy;
  ck.expect(worst_levy <= 1e-10, "Hadamard-Levy inverse differs from bisection by more than 1e-10");
}

// ---------------------------------------------------------------- criterion 7

void criterion_afj(Checker& ck, Json& details) {
  auto ctx = Context::make();
  MollifierNet net(ctx);
  const double bound = std::exp(-8.0) * (1 + 1e-9);
  const std::vector<std::pair<std::string, GSF>> cases{{"x^2", GSF::parse(ctx, "x^2")},
                                                       {"delta", embed(DistSpec::delta(), net)}};
  for (const auto& [label, f] : cases) {
    AfjReport r = afj_differentiability_check(f, pt(ctx, {0.0}));
    Json rows = Json::array();
    for (const auto& row : r.rows) rows.push_back(row.quotient);
    details[label] = {{"quotients", rows}, {"final_quotient", r.final_quotient}, {"q", r.q},
                      {"decreasing", r.decreasing}, {"bound_holds", r.bound_holds}};
    ck.expect(r.decreasing, "quotient not decreasing for " + label);
    ck.expect(r.bound_holds, "quadratic bound with fitted q fails for " + label);
    ck.expect(r.final_quotient <= bound, "final quotient above e^-8 for " + label);
  }
}

struct CriterionSpec {
  const char* name;
  double limit;
  void (*fn)(Checker&, Json&);
};

const CriterionSpec kCriteria[kCriterionCount] = {
    {"ring and verdict corpus", 10, criterion_ring},
    {"mollifier moments and polynomial reproduction", 30, criterion_mollifier},
    {"embedding pairings and commutation", 60, criterion_embedding},
    {"local inverse round trips and Jacobians", 60, criterion_local},
    {"scripted examples", 60, criterion_examples},
    {"global inverse theorems", 90, criterion_global},
    {"AFJ difference quotients", 20, criterion_afj},
};

}  // namespace

std::vector<CriterionResult> run_selftest(const std::vector<int>& ids) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriterionCount; ++id) {
    if (!ids.empty() && std::find(ids.begin(), ids.end(), id) == ids.end()) continue;
    const CriterionSpec& spec = kCriteria[id - 1];
    CriterionResult r{.id = id, .name = spec.name, .limit = spec.limit};
    Checker ck;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      spec.fn(ck, r.details);
    } catch (const std::exception& e) {
      ck.expect(false, std::string("error: ") + e.what());
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ck.expect(r.seconds < r.limit, "runtime above the budget");
    r.passed = ck.ok;
    r.message = ck.first;
    r.details["assertions"] = ck.count;
    r.details["failed_assertions"] = ck.failed;
    out.push_back(std::move(r));
  }
  return out;
}

Report selftest_report(const std::vector<CriterionResult>& results) {
  Report rep("selftest", Config{}.to_json());
  Table t{.name = "criteria", .description = "criterion id, pass flag, runtime and budget in seconds",
          .columns = {"id", "passed", "seconds", "limit"}};
  for (const auto& r : results) {
    Json d = r.details;
    d["seconds"] = r.seconds;
    d["limit"] = r.limit;
    if (!r.message.empty()) d["message"] = r.message;
    rep.check(std::to_string(r.id) + " " + r.name, r.passed, std::move(d));
    t.rows.push_back({double(r.id), r.passed ? 1.0 : 0.0, r.seconds, r.limit});
  }
  rep.add_table(std::move(t));
  return rep;
}

std::string format_criterion_line(const CriterionResult& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "[%s] %d %s (%.1f s / %.0f s)", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.seconds, r.limit);
  std::string line = buf;
  if (!r.passed) line += ": " + r.message;
  return line;
}

}  // namespace gsf
