#include "doctest.h"

#include "gsf/config.hpp"
#include "gsf/embedding.hpp"
#include "gsf/errors.hpp"
#include "gsf/report.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace gsf;

namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("empty report is a valid JSON skeleton with the config snapshot") {
  Config cfg;
  Report rep("check", cfg.to_json());
  const std::string text = emit(rep, Format::Json);
  Json j = Json::parse(text);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  CHECK(keys == std::vector<std::string>{"command", "config", "results", "checks", "tables", "summary"});
  CHECK(j["config"] == cfg.to_json());
  CHECK(j["results"].empty());
  CHECK(j["summary"]["passed"] == true);
  CHECK(j["summary"]["checks"] == 0);
}

TEST_CASE("verdict serialization") {
  Json v = verdict_json(Verdict::yes(2, "x > rho^2 on the tail"));
  CHECK(v["verdict"] == "true");
  CHECK(v["witness_m"].is_number_integer());
  CHECK(v["witness_m"] == 2);
  const std::string text = write_json(v);
  CHECK(text.find("\"verdict\": \"true\",\n  \"witness_m\": 2") != std::string::npos);
  Json u = verdict_json(Verdict::unknown("spread too large"));
  CHECK(u["verdict"] == "indeterminate");
  CHECK(u["reason"] == "spread too large");
  CHECK(verdict_json(Verdict::no(1.5))["witness_m"].is_number_float());
}

TEST_CASE("floats carry 17 significant digits") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(INFINITY) == "inf");
  CHECK(format_double(-INFINITY) == "-inf");
  CHECK(format_double(NAN) == "nan");
  Json j;
  j["a"] = 0.1;
  j["b"] = INFINITY;
  j["c"] = std::vector<double>{0.5, 0.25};
  CHECK(write_json(j) == "{\n  \"a\": 0.10000000000000001,\n  \"b\": \"inf\",\n  \"c\": [0.5, 0.25]\n}\n");
  for (double x : {0.1, 1.0 / 3.0, 6.02214076e23, 2.2250738585072014e-308}) CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("checks and errors drive the summary") {
  Report rep("demo", Config{}.to_json());
  rep.add("value", 1.5);
  rep.check("first", true);
  CHECK(rep.passed());
  rep.check("second", false, Json{{"why", "because"}});
  CHECK_FALSE(rep.passed());
  Json j = rep.to_json();
  CHECK(j["summary"]["failed"] == Json::array({"second"}));
  CHECK(j["checks"][1]["details"]["why"] == "because");

  Report err("demo", Config{}.to_json());
  err.set_error("numeric", "ill-conditioned");
  CHECK_FALSE(err.passed());
  Json e = err.to_json();
  CHECK(e["error"]["kind"] == "numeric");
  std::vector<std::string> keys;
  for (auto it = e.begin(); it != e.end(); ++it) keys.push_back(it.key());
  CHECK(keys[5] == "error");
}

TEST_CASE("CSV layout with a documented header") {
  auto ctx = Context::make();
  MollifierNet net(ctx);
  PairingReport pr = pairing_limit(DistSpec::delta(), net, bump(Expr(-0.5), Expr(0.7), Expr::var(0)), -0.5, 0.7);
  Report rep("embed", Config{}.to_json());
  rep.add("pairing", Json{{"exact", pr.exact}, {"label", "a,b"}});
  rep.check("converges", pr.final_error <= 1e-6);
  Table t{.name = "pairing", .description = "pairing table", .columns = {"eps", "value", "abs_error"}};
  for (const auto& row : pr.rows) t.rows.push_back({row.eps, row.value, row.abs_error});
  rep.add_table(t);
  const auto ls = lines(emit(rep, Format::Csv));
  REQUIRE(ls.size() > 10);
  CHECK(ls[0] == "# gsf report");
  CHECK(ls[1] == "# command: embed");
  CHECK(ls[3] == "# passed: true");
  auto header = std::find(ls.begin(), ls.end(), "section,name,key,value");
  REQUIRE(header != ls.end());
  CHECK(std::find(ls.begin(), ls.end(), "results,pairing,label,\"a,b\"") != ls.end());
  CHECK(std::find(ls.begin(), ls.end(), "checks,converges,pass,true") != ls.end());
  auto cols = std::find(ls.begin(), ls.end(), "eps,value,abs_error");
  REQUIRE(cols != ls.end());
  CHECK(*(cols - 1) == "# columns: eps value abs_error");
  const auto data_rows = std::distance(cols + 1, ls.end());
  CHECK(data_rows == static_cast<long>(ctx->size()));
  CHECK(emit(rep, Format::Csv) == emit(rep, Format::Csv));
  CHECK(emit(rep, Format::Json) == emit(rep, Format::Json));
}

TEST_CASE("GenNum helpers") {
  auto ctx = Context::make();
  GenNum x = GenNum::from_expr(ctx, pow(Expr::eps(), 2));
  Json j = gennum_json(x);
  CHECK(j["exponent"].get<double>() == doctest::Approx(2.0));
  CHECK(j["valuation"].get<double>() == doctest::Approx(2.0));
  Table t = gennum_table("x", "eps^2", x);
  CHECK(t.rows.size() == ctx->size());
  CHECK(t.rows.back()[1] == std::pow(std::ldexp(1.0, -40), 2));
  auto exp_ctx = Context::make(Gauge::exp());
  CHECK_FALSE(gennum_json(GenNum::constant(exp_ctx, 2.0)).contains("valuation"));
  CHECK(parse_format("csv") == Format::Csv);
  CHECK_THROWS_AS(parse_format("xml"), DomainError);
}

TEST_CASE("configuration loading and validation") {
  Config d;
  CHECK(d.to_json().size() == 10);
  Config c = Config::from_json(Json::parse(R"({"gauge": "exp", "kmin": 5, "probes": 16})"));
  CHECK(c.gauge == "exp");
  CHECK(c.kmin == 5);
  CHECK(c.kmax == 40);
  CHECK(c.thresholds.probes == 16);
  CHECK(c.make_context()->size() == 36);
  CHECK_THROWS_AS(Config::from_json(Json::parse(R"({"colour": 1})")), DomainError);
  CHECK_THROWS_AS(Config::from_json(Json::parse(R"({"kmin": "four"})")), DomainError);
  CHECK_THROWS_AS(Config::from_json(Json::parse(R"({"gauge": "log"})")), DomainError);
  CHECK_THROWS_AS(Config::from_json(Json::parse("[1, 2]")), DomainError);

  Config g;
  g.set_grid("6:20");
  CHECK(g.kmin == 6);
  CHECK(g.kmax == 20);
  CHECK_THROWS_AS(g.set_grid("20"), DomainError);
  CHECK_THROWS_AS(g.set_grid("a:b"), DomainError);
  Config small;
  CHECK_THROWS_AS(small.set_grid("4:8"), DomainError);  // 5 grid points < tail window 8
  small.tail_window = 1;
  CHECK_THROWS_AS(small.validate(), DomainError);

  const auto dir = std::filesystem::temp_directory_path() / "gsf_report_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "cfg.json").string();
  std::ofstream(path) << R"({"kmax": 30, "slack": 0.05})";
  Config loaded = Config::load(path);
  CHECK(loaded.kmax == 30);
  CHECK(loaded.thresholds.slack == 0.05);
  CHECK_THROWS_AS(Config::load((dir / "missing.json").string()), DomainError);
  std::ofstream(dir / "broken.json") << "{ not json";
  CHECK_THROWS_AS(Config::load((dir / "broken.json").string()), DomainError);
}
