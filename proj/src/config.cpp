#include "gsf/config.hpp"

#include "gsf/errors.hpp"

#include <fstream>
#include <set>

namespace gsf {

namespace {

template <class T>
T get(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw DomainError(std::string("config key '") + key + "' has the wrong type");
  }
}

int parse_int(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw DomainError("bad integer '" + s + "' in " + what);
  return v;
}

}  // namespace

Config Config::from_json(const Json& j) {
  if (!j.is_object()) throw DomainError("config must be a JSON object");
  static const std::set<std::string> known{"gauge", "kmin", "kmax", "tail_window", "n_max", "m_max",
                                           "zero_threshold", "slack", "cert_order", "probes"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw DomainError("unknown config key '" + key + "'");
  Config c;
  c.gauge = get(j, "gauge", c.gauge);
  c.kmin = get(j, "kmin", c.kmin);
  c.kmax = get(j, "kmax", c.kmax);
  c.tail_window = get(j, "tail_window", c.tail_window);
  auto& t = c.thresholds;
  t.n_max = get(j, "n_max", t.n_max);
  t.m_max = get(j, "m_max", t.m_max);
  t.zero_threshold = get(j, "zero_threshold", t.zero_threshold);
  t.slack = get(j, "slack", t.slack);
  t.cert_order = get(j, "cert_order", t.cert_order);
  t.probes = get(j, "probes", t.probes);
  c.validate();
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open config file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw DomainError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return from_json(j);
}

void Config::set_grid(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw DomainError("grid must be kmin:kmax, got '" + spec + "'");
  kmin = parse_int(spec.substr(0, colon), "--grid");
  kmax = parse_int(spec.substr(colon + 1), "--grid");
  validate();
}

void Config::validate() const {
  if (gauge != "eps" && gauge != "exp") throw DomainError("gauge must be 'eps' or 'exp'");
  if (kmin < 0 || kmax <= kmin || kmax > 1000) throw DomainError("grid needs 0 <= kmin < kmax <= 1000");
  if (tail_window < 2 || tail_window > kmax - kmin + 1)
    throw DomainError("tail_window must lie between 2 and the number of grid points");
  const auto& t = thresholds;
  if (t.n_max < 1 || t.m_max < 1) throw DomainError("n_max and m_max must be positive");
  if (!(t.zero_threshold >= 0)) throw DomainError("zero_threshold must be nonnegative");
  if (!(t.slack > 0 && t.slack < 1)) throw DomainError("slack must lie in (0, 1)");
  if (t.cert_order < 0 || t.cert_order > 8) throw DomainError("cert_order must lie in 0..8");
  if (t.probes < 1) throw DomainError("probes must be positive");
}

ContextPtr Config::make_context() const {
  validate();
  return Context::make(Gauge::from_name(gauge),
                       EpsGrid::dyadic(kmin, kmax, static_cast<std::size_t>(tail_window)), thresholds);
}

Json Config::to_json() const {
  Json j;
  j["gauge"] = gauge;
  j["kmin"] = kmin;
  j["kmax"] = kmax;
  j["tail_window"] = tail_window;
  j["n_max"] = thresholds.n_max;
  j["m_max"] = thresholds.m_max;
  j["zero_threshold"] = thresholds.zero_threshold;
  j["slack"] = thresholds.slack;
  j["cert_order"] = thresholds.cert_order;
  j["probes"] = thresholds.probes;
  return j;
}

}  // namespace gsf
