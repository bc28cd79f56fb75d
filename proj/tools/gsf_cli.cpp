// gsf: command-line front end. Every command prints one report (JSON or CSV)
// on stdout. Exit codes: 0 pass, 1 assertion failure, 2 usage error,
// 3 numeric failure.

#include "gsf/config.hpp"
#include "gsf/embedding.hpp"
#include "gsf/errors.hpp"
#include "gsf/examples.hpp"
#include "gsf/global_inverse.hpp"
#include "gsf/local_inverse.hpp"
#include "gsf/parser.hpp"
#include "gsf/report.hpp"
#include "gsf/selftest.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace gsf;

namespace {

enum Exit { kPass = 0, kAssertion = 1, kUsage = 2, kNumeric = 3 };

struct NetFlags {
  int j_max = 10;
  std::optional<double> d;
  bool psi0 = false;
  std::string b;  // expression in eps; empty means eps^-1
};

MollifierNet make_net(const ContextPtr& ctx, const NetFlags& flags) {
  MollifierNetOptions opt;
  opt.j_max = flags.j_max;
  opt.mollifier.d = flags.d;
  opt.mollifier.psi0 = flags.psi0;
  if (!flags.b.empty()) opt.b = parse_expr(flags.b);
  return MollifierNet(ctx, opt);
}

GenNum parse_number(const ContextPtr& ctx, const std::string& text) { return GenNum::from_expr(ctx, parse_expr(text)); }

/// Components separated by ';', each an expression in eps.
GenPoint parse_point(const ContextPtr& ctx, const std::string& text) {
  std::vector<GenNum> comps;
  for (const Expr& e : parse_vector(text)) comps.push_back(GenNum::from_expr(ctx, e));
  return GenPoint(std::move(comps));
}

Json point_json(const GenPoint& p) {
  Json out = Json::array();
  for (std::size_t i = 0; i < p.dim(); ++i) out.push_back(gennum_json(p[i]));
  return out;
}

Table point_table(const std::string& name, const std::string& description, const GenPoint& p) {
  Table t{.name = name, .description = description, .columns = {"eps"}};
  for (std::size_t i = 0; i < p.dim(); ++i) t.columns.push_back("x" + std::to_string(i + 1));
  const auto& ctx = p.context();
  for (std::size_t k = 0; k < ctx->size(); ++k) {
    std::vector<double> row{ctx->eps(k)};
    for (std::size_t i = 0; i < p.dim(); ++i) row.push_back(p[i].value(k));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Truth parse_truth(const std::string& s) {
  if (s == "true") return Truth::True;
  if (s == "false") return Truth::False;
  if (s == "indeterminate") return Truth::Indeterminate;
  throw DomainError("expected true, false or indeterminate, got '" + s + "'");
}

void expect_verdict(Report& rep, const std::string& what, const Verdict& v, const std::string& expect) {
  if (expect.empty()) return;
  rep.check(what + " is " + expect, v.value == parse_truth(expect), verdict_json(v));
}

// ---------------------------------------------------------------- check

struct CheckArgs {
  std::string x, y, what = "all", expect;
};

void run_check(Report& rep, const ContextPtr& ctx, const CheckArgs& a) {
  if (a.what == "all" && !a.expect.empty()) throw DomainError("--expect needs a single --what");
  GenNum x = parse_number(ctx, a.x);
  rep.add("x", gennum_json(x));
  auto want = [&](const char* name) { return a.what == "all" || a.what == name; };
  if (want("moderate")) {
    Verdict v = is_moderate(x);
    rep.add("moderate", verdict_json(v));
    if (a.what == "moderate") expect_verdict(rep, "moderate", v, a.expect);
  }
  if (want("negligible")) {
    Verdict v = is_negligible(x);
    rep.add("negligible", verdict_json(v));
    if (a.what == "negligible") expect_verdict(rep, "negligible", v, a.expect);
  }
  if (want("positive")) {
    Verdict v = is_strictly_positive(x);
    rep.add("positive", verdict_json(v));
    if (a.what == "positive") expect_verdict(rep, "positive", v, a.expect);
  }
  if (want("order")) {
    ExponentEstimate est = exponent_estimate(x);
    Json order;
    order["exponent"] = est.exponent;
    order["verdict"] = verdict_json(est.verdict);
    if (!a.y.empty()) {
      GenNum y = parse_number(ctx, a.y);
      rep.add("y", gennum_json(y));
      Verdict le = leq(x, y);
      order["leq"] = verdict_json(le);
      order["lt_sharp"] = verdict_json(lt_sharp(x, y));
      order["lt_fermat"] = verdict_json(lt_fermat(x, y));
      order["infinitely_close"] = verdict_json(infinitely_close(x, y));
      if (a.what == "order") expect_verdict(rep, "x <= y", le, a.expect);
    } else if (a.what == "order") {
      expect_verdict(rep, "exponent estimate", est.verdict, a.expect);
    }
    rep.add("order", std::move(order));
  }
  rep.add_table(gennum_table("samples", "representative x_eps on the grid", x));
}

// ---------------------------------------------------------------- set

struct SetArgs {
  std::string set, point, expect;
};

void run_set(Report& rep, const ContextPtr& ctx, const SetArgs& a) {
  SetNet s = parse_set(a.set);
  rep.add("set", a.set);
  Boundedness bd = is_sharply_bounded(ctx, s);
  Json bj;
  bj["verdict"] = verdict_json(bd.verdict);
  if (bd.radius) bj["radius"] = gennum_json(*bd.radius);
  rep.add("sharply_bounded", std::move(bj));
  if (a.point.empty()) {
    if (!a.expect.empty()) throw DomainError("--expect needs --point");
    return;
  }
  GenPoint p = parse_point(ctx, a.point);
  rep.add("point", point_json(p));
  Verdict in = internal_membership(p, s);
  rep.add("internal", verdict_json(in));
  rep.add("strongly_internal", verdict_json(strongly_internal_membership(p, s)));
  GenNum dist = distance_net(p, s);
  rep.add("distance", gennum_json(dist));
  expect_verdict(rep, "internal membership", in, a.expect);
  rep.add_table(gennum_table("distance", "distance d(x_eps, A_eps) on the grid", dist));
}

// ---------------------------------------------------------------- embed

struct EmbedArgs {
  std::string dist;
  std::vector<double> at{0.0};
  std::string phi;
  std::string support;  // lo:hi
  double tol = 1e-6;
  bool commutation = false;
  NetFlags net;
};

std::pair<double, double> parse_interval(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw DomainError("expected lo:hi, got '" + text + "'");
  try {
    return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw DomainError("expected lo:hi, got '" + text + "'");
  }
}

void run_embed(Report& rep, const ContextPtr& ctx, const EmbedArgs& a) {
  DistSpec t = DistSpec::parse(a.dist);
  MollifierNet net = make_net(ctx, a.net);
  rep.add("distribution", t.to_string());
  GSF f = embed(t, net);
  Json values = Json::object();
  for (double x : a.at) {
    GenNum v = gsf_value(f, GenPoint::constant(ctx, std::vector<double>{x}))[0];
    values[format_double(x)] = gennum_json(v);
  }
  rep.add("values", std::move(values));
  if (!a.phi.empty()) {
    if (a.support.empty()) throw DomainError("--phi needs --support lo:hi");
    auto [lo, hi] = parse_interval(a.support);
    PairingReport pr = pairing_limit(t, net, parse_expr(a.phi), lo, hi);
    Json pj;
    pj["exact"] = pr.exact;
    pj["final_error"] = pr.final_error;
    pj["monotone"] = pr.monotone;
    pj["rate"] = pr.rate ? Json(*pr.rate) : Json();
    pj["noise_floor"] = pr.noise_floor;
    rep.add("pairing", std::move(pj));
    rep.check("pairing errors decrease on the tail", pr.monotone);
    rep.check("final pairing error <= " + format_double(a.tol), pr.final_error <= a.tol,
              Json{{"final_error", pr.final_error}});
    Table table{.name = "pairing", .description = "int iota(T)_eps phi against <T, phi>",
                .columns = {"eps", "value", "abs_error"}};
    for (const auto& row : pr.rows) table.rows.push_back({row.eps, row.value, row.abs_error});
    rep.add_table(std::move(table));
  }
  if (a.commutation) {
    CommutationReport cr = derivative_commutation_check(t, net);
    rep.add("commutation", Json{{"structural", cr.structural}, {"max_abs_diff", cr.max_abs_diff}, {"probes", cr.probes}});
    rep.check("derivative commutes with the embedding", cr.structural || cr.max_abs_diff <= 1e-8);
  }
}

// ---------------------------------------------------------------- invert-local

struct LocalArgs {
  std::string fn, x0, y;
  std::optional<double> fermat;
  NetFlags net;
};

Json cert_json(const LocalCert& c) {
  Json j;
  j["kind"] = to_string(c.kind);
  j["a"] = gennum_json(c.a);
  j["r"] = gennum_json(c.r);
  j["image_radius"] = gennum_json(c.image_radius);
  if (c.kind == CertKind::Fermat) {
    j["fermat_r"] = c.fermat_r;
    j["fermat_s"] = c.fermat_s;
  }
  j["probes_per_eps"] = c.probes_per_eps;
  return j;
}

void run_invert_local(Report& rep, const ContextPtr& ctx, const LocalArgs& a) {
  MollifierNet net = make_net(ctx, a.net);
  GSF f = GSF::parse(ctx, a.fn, net.parser_options());
  GenPoint x0 = parse_point(ctx, a.x0);
  GenPoint y = parse_point(ctx, a.y);
  LocalCert cert = a.fermat ? fermat_ift_certificate(f, x0, *a.fermat) : sharp_ift_certificate(f, x0);
  rep.add("certificate", cert_json(cert));
  InverseResult inv = local_inverse_eval(cert, y);
  rep.add("x", point_json(inv.x));
  rep.add("residual", gennum_json(inv.residual));
  rep.add("membership", verdict_json(inv.membership));
  rep.check("residual ||f(x) - y|| is negligible", inv.negligible.is_true(), verdict_json(inv.negligible));
  InverseJacobian ij = inverse_jacobian(cert, y);
  Json jac = Json::array();
  for (std::size_t r = 0; r < ij.matrix.rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < ij.matrix.cols(); ++c) row.push_back(gennum_json(ij.matrix.entry(r, c)));
    jac.push_back(std::move(row));
  }
  rep.add("inverse_jacobian", std::move(jac));
  rep.check("|det Df| >= 1/(C c^n) at every grid point", ij.detlow_ok);
  rep.add_table(point_table("inverse", "f^-1(y)_eps per component", inv.x));
}

// ---------------------------------------------------------------- invert-global

struct GlobalArgs {
  std::string fn, mode = "1d", y;
  double r = 0;
  std::string beta = "1";  // C, or a:b for a + b s
  double bound_m = 100;
  int j_max = 10;
};

BetaSpec parse_beta(const std::string& text) {
  if (text.find(':') != std::string::npos) {
    auto [a, b] = parse_interval(text);
    return {BetaSpec::Kind::Affine, a, b};
  }
  try {
    return {BetaSpec::Kind::Constant, std::stod(text), 0};
  } catch (const std::exception&) {
    throw DomainError("--beta expects C or a:b, got '" + text + "'");
  }
}

void run_invert_global(Report& rep, const ContextPtr& ctx, const GlobalArgs& a) {
  GSF f = GSF::parse(ctx, a.fn);
  GlobalCert cert = [&] {
    if (a.mode == "1d") return global_1d_certificate(f, a.r);
    if (a.mode == "hadamard") return hadamard_certificate(f, {.j_max = a.j_max, .bound_m = a.bound_m});
    if (a.mode == "hadamard-levy") return hadamard_levy_certificate(f, parse_beta(a.beta));
    throw DomainError("--mode must be 1d, hadamard or hadamard-levy");
  }();
  Json cj;
  cj["kind"] = to_string(cert.kind);
  cj["passed"] = cert.passed;
  cj["surjective"] = cert.surjective;
  cj["c_f0"] = cert.c_f0;
  if (cert.kind == GlobalKind::OneD) {
    cj["r"] = cert.r;
    cj["sign"] = cert.monotone->sign;
    cj["outside_slope"] = cert.monotone->outside_slope;
  }
  if (cert.kind == GlobalKind::Hadamard) {
    cj["eps_prime"] = cert.eps_prime;
    cj["bound_m"] = cert.bound_m;
    cj["plateau_radius"] = cert.plateau_radius ? Json(*cert.plateau_radius) : Json();
  }
  if (cert.kind == GlobalKind::HadamardLevy) cj["measured_c"] = cert.measured_c;
  cj["notes"] = cert.notes;
  rep.add("certificate", std::move(cj));
  if (!cert.properness.empty()) {
    Table t{.name = "properness", .description = "inf of ||f_eps(x)|| over |x| = R and eps <= eps'",
            .columns = {"radius", "inf_norm"}};
    for (const auto& row : cert.properness) t.rows.push_back({row.radius, row.inf_norm});
    rep.add_table(std::move(t));
  }
  rep.check("global certificate passes", cert.passed, Json{{"notes", cert.notes}});
  if (!cert.passed) return;
  GlobalInverseResult g = global_inverse_eval(cert, parse_point(ctx, a.y));
  rep.add("x", point_json(g.x));
  rep.add("residual", gennum_json(g.residual));
  rep.add("compact_radius", g.compact_radius ? Json(*g.compact_radius) : Json());
  rep.add("in_agreement_zone", g.in_agreement_zone);
  if (!g.homotopy_steps.empty()) rep.add("homotopy_steps", g.homotopy_steps);
  rep.check("residual ||f(x) - y|| is negligible", g.negligible.is_true(), verdict_json(g.negligible));
  rep.check("a priori bound on ||g(y)|| holds", g.bound_ok);
  for (std::size_t i = 0; i < g.derivative_moderate.size(); ++i)
    rep.check("inverse derivative of order " + std::to_string(i + 1) + " is moderate",
              g.derivative_moderate[i].is_true(), verdict_json(g.derivative_moderate[i]));
  rep.add_table(point_table("inverse", "g(y)_eps per component", g.x));
}

void add_net_flags(CLI::App* cmd, NetFlags& n) {
  cmd->add_option("--jmax", n.j_max, "largest mollifier moment order")->check(CLI::Range(0, 20));
  cmd->add_option("--d", n.d, "prescribed mollifier mass on (-inf, 0]");
  cmd->add_flag("--psi0", n.psi0, "normalize the mollifier by psi(0) = 1");
  cmd->add_option("--b", n.b, "concentration b as an expression in eps (default eps^-1)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gsf: generalized smooth functions on the Robinson-Colombeau ring"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, gauge, grid, format = "json";
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--gauge", gauge, "infinitesimal gauge")->check(CLI::IsMember({"eps", "exp"}));
  app.add_option("--grid", grid, "grid exponents kmin:kmax, eps_k = 2^-k");
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"json", "csv"}));

  CheckArgs check_args;
  auto* check = app.add_subcommand("check", "asymptotic verdicts for a generalized number");
  check->add_option("--x", check_args.x, "net as an expression in eps")->required();
  check->add_option("--y", check_args.y, "second net for order comparisons");
  check->add_option("--what", check_args.what, "verdict to compute")
      ->check(CLI::IsMember({"moderate", "negligible", "positive", "order", "all"}));
  check->add_option("--expect", check_args.expect, "assert the verdict")
      ->check(CLI::IsMember({"true", "false", "indeterminate"}));

  SetArgs set_args;
  auto* set = app.add_subcommand("set", "boundedness and membership for a set net");
  set->add_option("--set", set_args.set, "set, e.g. box(-1, eps) or ball(0, 0, 1)")->required();
  set->add_option("--point", set_args.point, "point components separated by ';'");
  set->add_option("--expect", set_args.expect, "assert internal membership")
      ->check(CLI::IsMember({"true", "false", "indeterminate"}));

  EmbedArgs embed_args;
  auto* emb = app.add_subcommand("embed", "embed a distribution through a mollifier net");
  emb->add_option("--dist", embed_args.dist, "distribution, e.g. delta@0 + 2*H@1")->required();
  emb->add_option("--at", embed_args.at, "real points where the embedding is evaluated");
  emb->add_option("--phi", embed_args.phi, "test function in x for the pairing table");
  emb->add_option("--support", embed_args.support, "support lo:hi of the test function");
  emb->add_option("--tol", embed_args.tol, "tolerance on the final pairing error");
  emb->add_flag("--commutation", embed_args.commutation, "check d(iota T) = iota(dT)");
  add_net_flags(emb, embed_args.net);

  LocalArgs local_args;
  auto* loc = app.add_subcommand("invert-local", "local inverse with a certified neighborhood");
  loc->add_option("--fn", local_args.fn, "components separated by ';' in x1..xn and eps")->required();
  loc->add_option("--x0", local_args.x0, "base point")->required();
  loc->add_option("--y", local_args.y, "target point")->required();
  loc->add_option("--fermat", local_args.fermat, "use the Fermat certificate with ||Df(x0)^-1|| <= K");
  add_net_flags(loc, local_args.net);

  GlobalArgs global_args;
  auto* glob = app.add_subcommand("invert-global", "global inverse by the 1D, Hadamard or Hadamard-Levy theorem");
  glob->add_option("--fn", global_args.fn, "components separated by ';'")->required();
  glob->add_option("--mode", global_args.mode, "certificate")->check(CLI::IsMember({"1d", "hadamard", "hadamard-levy"}));
  glob->add_option("--y", global_args.y, "target point")->required();
  glob->add_option("--r", global_args.r, "1d: lower bound on |f'|");
  glob->add_option("--beta", global_args.beta, "hadamard-levy: C or a:b");
  glob->add_option("--bound", global_args.bound_m, "hadamard: properness target M");
  glob->add_option("--jmax", global_args.j_max, "hadamard: radii 2^0..2^jmax")->check(CLI::Range(1, 30));

  auto* examples = app.add_subcommand("examples", "scripted examples");
  examples->require_subcommand(1);
  std::string example_target;
  auto* run = examples->add_subcommand("run", "run one example or all");
  run->add_option("id", example_target, "1..6 or all")->required();

  std::vector<int> criteria;
  auto* selftest = app.add_subcommand("selftest", "acceptance suite on the default configuration");
  selftest->add_option("--criterion", criteria, "criterion ids to run (default all)")
      ->check(CLI::Range(1, kCriterionCount));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kPass : kUsage;
  }

  Config config;
  try {
    if (!config_path.empty()) config = Config::load(config_path);
    if (!gauge.empty()) config.gauge = gauge;
    if (!grid.empty()) config.set_grid(grid);
    config.validate();
  } catch (const Error& e) {
    std::cerr << "gsf: " << e.what() << "\n";
    return kUsage;
  }
  const Format fmt = parse_format(format);

  const CLI::App* cmd = app.get_subcommands().front();
  std::string name = cmd->get_name();
  if (cmd == examples) name = "examples run " + example_target;

  std::optional<Report> report;
  int code = kPass;
  try {
    if (cmd == examples) {
      if (example_target == "all") {
        report = run_all_examples(config);
      } else {
        int id = 0;
        try {
          std::size_t used = 0;
          id = std::stoi(example_target, &used);
          if (used != example_target.size()) id = 0;
        } catch (const std::exception&) {
        }
        report = run_example(id, config);
      }
      if (!report->error().is_null()) {
        const std::string kind = report->error()["kind"].get<std::string>();
        code = kind == "numeric" ? kNumeric : kind == "domain" ? kUsage : kAssertion;
      }
    } else if (cmd == selftest) {
      auto results = run_selftest(criteria);
      for (const auto& r : results) std::cerr << format_criterion_line(r) << "\n";
      report = selftest_report(results);
    } else {
      report.emplace(name, config.to_json());
      const ContextPtr ctx = config.make_context();
      if (cmd == check) run_check(*report, ctx, check_args);
      if (cmd == set) run_set(*report, ctx, set_args);
      if (cmd == emb) run_embed(*report, ctx, embed_args);
      if (cmd == loc) run_invert_local(*report, ctx, local_args);
      if (cmd == glob) run_invert_global(*report, ctx, global_args);
    }
  } catch (const CertificateError& e) {
    if (!report) report.emplace(name, config.to_json());
    report->set_error("certificate", e.what());
    code = kAssertion;
  } catch (const NumericError& e) {
    if (!report) report.emplace(name, config.to_json());
    report->set_error("numeric", e.what());
    code = kNumeric;
  } catch (const DomainError& e) {
    if (!report) report.emplace(name, config.to_json());
    report->set_error("domain", e.what());
    code = kUsage;
  } catch (const std::exception& e) {
    if (!report) report.emplace(name, config.to_json());
    report->set_error("numeric", e.what());
    code = kNumeric;
  }
  if (code == kPass && !report->passed()) code = kAssertion;
  std::cout << emit(*report, fmt);
  std::cout.flush();
  return code;
}
