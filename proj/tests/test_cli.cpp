#include "doctest.h"

#include "json.hpp"

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using Json = nlohmann::ordered_json;

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string("'") + GSF_CLI_PATH + "' " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  Run r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

const std::vector<std::string> kConfigKeys{"gauge", "kmin", "kmax", "tail_window", "n_max",
                                           "m_max", "zero_threshold", "slack", "cert_order", "probes"};

int expected_code(const Json& error) {
  const std::string kind = error["kind"].get<std::string>();
  if (kind == "certificate") return 1;
  if (kind == "domain") return 2;
  return 3;
}

/// Checks the report layout and its consistency with the exit code.
Json json_report(const Run& r, int code) {
  INFO(r.out);
  CHECK(r.code == code);
  Json j = Json::parse(r.out);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  std::vector<std::string> want{"command", "config", "results", "checks", "tables"};
  if (j.contains("error")) want.push_back("error");
  want.push_back("summary");
  CHECK(keys == want);
  CHECK(j["command"].is_string());
  std::vector<std::string> ckeys;
  for (auto it = j["config"].begin(); it != j["config"].end(); ++it) ckeys.push_back(it.key());
  CHECK(ckeys == kConfigKeys);
  CHECK(j["results"].is_object());
  for (const auto& c : j["checks"]) {
    CHECK(c["name"].is_string());
    CHECK(c["pass"].is_boolean());
  }
  for (const auto& t : j["tables"]) {
    CHECK(t["name"].is_string());
    CHECK(t["description"].is_string());
    for (const auto& row : t["rows"]) CHECK(row.size() == t["columns"].size());
  }
  CHECK(j["summary"]["passed"].get<bool>() == (code == 0));
  if (j.contains("error")) {
    CHECK(j["error"]["message"].is_string());
    CHECK(expected_code(j["error"]) == code);
  }
  return j;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

void csv_report(const Run& r, int code) {
  INFO(r.out);
  CHECK(r.code == code);
  auto ls = lines(r.out);
  REQUIRE(!ls.empty());
  CHECK(ls[0] == "# gsf report");
  bool header = false, passed_line = false;
  for (const auto& l : ls) {
    header |= l == "section,name,key,value";
    passed_line |= l == std::string("# passed: ") + (code == 0 ? "true" : "false");
  }
  CHECK(header);
  CHECK(passed_line);
}

std::string work_file(const std::string& name, const std::string& content) {
  std::filesystem::create_directories(GSF_WORK_DIR);
  const std::string path = std::string(GSF_WORK_DIR) + "/" + name;
  std::ofstream(path) << content;
  return path;
}

}  // namespace

TEST_CASE("check command") {
  auto j = json_report(run("check --x 'eps^2'"), 0);
  CHECK(j["command"] == "check");
  CHECK(j["results"]["x"]["exponent"].get<double>() == doctest::Approx(2.0));
  CHECK(j["results"]["positive"]["verdict"] == "true");
  CHECK(j["tables"][0]["rows"].size() == 37);

  auto failed = json_report(run("check --x 'exp(1/eps)' --what moderate --expect true"), 1);
  CHECK(failed["results"]["moderate"]["verdict"] == "false");
  json_report(run("check --x eps --y 'eps^2' --what order --expect false"), 0);
  json_report(run("check --x 'eps + eps^3' --what negligible --expect false"), 0);
  json_report(run("check --x 1 --expect true"), 2);
  csv_report(run("--format csv check --x eps"), 0);
  json_report(run("check --x '1/0*x'"), 2);
}

TEST_CASE("set command") {
  auto j = json_report(run("set --set 'box(-1, eps)' --point 'eps^2' --expect true"), 0);
  CHECK(j["results"]["internal"]["verdict"] == "true");
  auto far = json_report(run("set --set 'ball(0, 0, 1)' --point '2; 0' --expect true"), 1);
  CHECK(far["results"]["internal"]["verdict"] == "false");
  json_report(run("set --set 'box(0, 1)'"), 0);
  json_report(run("set --set 'nonsense(1)'"), 2);
}

TEST_CASE("embed command") {
  auto j = json_report(run("embed --dist 'delta@0' --at 0 0.5 --phi 'bump(-0.5, 0.7, x)' --support -0.5:0.7 "
                           "--commutation"),
                       0);
  CHECK(j["results"]["pairing"]["final_error"].get<double>() <= 1e-6);
  REQUIRE(j["tables"].size() == 1);
  CHECK(j["tables"][0]["columns"] == Json({"eps", "value", "abs_error"}));
  CHECK(j["tables"][0]["rows"].size() == 37);
  csv_report(run("--format csv embed --dist 'H@0' --d 0.5 --psi0"), 0);
  json_report(run("embed --dist 'delta@0' --jmax 20"), 3);
  json_report(run("embed --dist 'delta@0' --phi x"), 2);
}

TEST_CASE("invert-local command") {
  auto j = json_report(run("invert-local --fn 'x + x^3' --x0 0.1 --y 0.101"), 0);
  CHECK(j["results"]["certificate"]["kind"] == "sharp");
  auto f = json_report(run("invert-local --fn 'x + x^3' --x0 0 --y 0.05 --fermat 1"), 0);
  CHECK(f["results"]["certificate"]["fermat_r"].get<double>() == 0.125);
  json_report(run("invert-local --fn 'eps*x' --x0 0 --y 'eps^2' --fermat 10"), 1);
  json_report(run("invert-local --fn 'x^3' --x0 0 --y 0"), 1);
  json_report(run("invert-local --fn 'x1; x2' --x0 '0; 0' --y '0.1; -0.2'"), 0);
  json_report(run("invert-local --fn 'x' --x0 0 --y 5"), 2);
}

TEST_CASE("invert-global command") {
  auto j = json_report(run("invert-global --fn 'x + sin(x)/2' --mode 1d --r 0.5 --y 2.5"), 0);
  CHECK(j["results"]["in_agreement_zone"] == true);
  auto h = json_report(run("invert-global --fn 'x1 + x1^3; x2 + x2^3' --mode hadamard --y '2; -0.5'"), 0);
  CHECK(h["results"]["compact_radius"].get<double>() == 2.0);
  CHECK(h["tables"][0]["name"] == "properness");
  auto at = json_report(run("invert-global --fn 'atan(x)' --mode hadamard --y 0.5"), 1);
  CHECK(at["results"]["certificate"]["passed"] == false);
  csv_report(run("--format csv invert-global --fn 'x1 + x1^3; x2 + x2^3' --mode hadamard-levy --beta 1 "
                 "--y '2; -0.5'"),
             0);
  json_report(run("invert-global --fn 'x + sin(x)/2' --mode hadamard-levy --beta 1:1 --y 1"), 0);
  json_report(run("invert-global --fn 'x + sin(x)/2' --mode 1d --r 0.5 --y '1/eps'"), 2);
  json_report(run("invert-global --fn 'x^2' --mode 1d --y 1"), 1);
  CHECK(run("invert-global --fn x --mode 2d --y 1").code == 2);
}

TEST_CASE("examples command") {
  auto one = json_report(run("examples run 3"), 0);
  CHECK(one["command"] == "examples run 3");
  json_report(run("examples run 9"), 2);
  json_report(run("examples run x"), 2);
  auto all = json_report(run("examples run all"), 0);
  CHECK(all["checks"].size() >= 6);
}

TEST_CASE("selftest command") {
  auto j = json_report(run("selftest --criterion 1"), 0);
  REQUIRE(j["checks"].size() == 1);
  CHECK(j["tables"][0]["name"] == "criteria");
  CHECK(run("selftest --criterion 9").code == 2);
}

TEST_CASE("global flags and usage errors") {
  auto g = json_report(run("--gauge exp check --x 'exp(-1/eps)' --what moderate"), 0);
  CHECK(g["config"]["gauge"] == "exp");
  auto grid = json_report(run("--grid 8:20 check --x eps"), 0);
  CHECK(grid["config"]["kmin"] == 8);
  CHECK(grid["tables"][0]["rows"].size() == 13);
  // global flags are also accepted after the subcommand
  auto late = json_report(run("check --x eps --grid 8:20"), 0);
  CHECK(late["config"]["kmax"] == 20);

  const auto good = work_file("config.json", R"({"kmin": 6, "kmax": 30, "slack": 0.2})");
  auto c = json_report(run("--config '" + good + "' check --x eps"), 0);
  CHECK(c["config"]["kmin"] == 6);
  CHECK(c["config"]["slack"].get<double>() == 0.2);
  const auto bad = work_file("bad.json", R"({"kmin": 6, "colour": 1})");
  CHECK(run("--config '" + bad + "' check --x eps").code == 2);
  CHECK(run("--config /nonexistent/config.json check --x eps").code == 2);
  CHECK(run("--grid 10:5 check --x 1").code == 2);
  CHECK(run("--format xml check --x 1").code == 2);
  CHECK(run("").code == 2);
  CHECK(run("bogus").code == 2);
  CHECK(run("check").code == 2);
  CHECK(run("--help").code == 0);
}

TEST_CASE("output is deterministic") {
  for (const char* args : {"check --x 'eps + sin(1/eps)*eps^2'", "--format csv invert-local --fn 'x + x^3' --x0 0.1 --y 0.101"}) {
    Run a = run(args), b = run(args);
    CHECK(a.code == b.code);
    CHECK(a.out == b.out);
  }
}
