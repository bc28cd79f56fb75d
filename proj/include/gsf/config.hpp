#pragma once

// Run configuration: gauge, epsilon grid and decision thresholds. Loaded from
// a JSON object whose keys mirror the fields below; missing keys keep defaults.

#include "gsf/gauge_ring.hpp"

#include "json.hpp"

#include <string>

namespace gsf {

using Json = nlohmann::ordered_json;

struct Config {
  std::string gauge = "eps";
  int kmin = 4;  // grid eps_k = 2^-k, k = kmin..kmax
  int kmax = 40;
  int tail_window = 8;
  Thresholds thresholds;

  /// Throws DomainError on unknown keys, wrong types or inconsistent values.
  static Config from_json(const Json& j);
  static Config load(const std::string& path);
  /// "kmin:kmax".
  void set_grid(const std::string& spec);
  void validate() const;

  ContextPtr make_context() const;
  /// Snapshot in a fixed key order.
  Json to_json() const;
};

}  // namespace gsf
