#pragma once

// Reports: ordered results, pass/fail checks and numeric tables, emitted as
// JSON (stable key order, 17 significant digits) or CSV (documented in a
// header comment). Output is byte-deterministic for a given report.

#include "gsf/config.hpp"
#include "gsf/gauge_ring.hpp"

#include <string>
#include <vector>

namespace gsf {

struct Table {
  std::string name;
  std::string description;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

enum class Format { Json, Csv };

Format parse_format(const std::string& name);

class Report {
 public:
  Report(std::string command, Json config);

  /// Named result entry; entries keep insertion order.
  void add(const std::string& name, Json value);
  /// Assertion; a false check makes the report fail.
  void check(const std::string& name, bool ok, Json details = Json::object());
  void add_table(Table table);
  /// Records an error raised while producing the report.
  void set_error(const std::string& kind, const std::string& message);

  bool passed() const;
  const std::string& command() const { return command_; }
  const Json& config() const { return config_; }
  const Json& results() const { return results_; }
  const Json& checks() const { return checks_; }
  const std::vector<Table>& tables() const { return tables_; }
  const Json& error() const { return error_; }

  Json to_json() const;

 private:
  std::string command_;
  Json config_;
  Json results_ = Json::object();
  Json checks_ = Json::array();
  std::vector<Table> tables_;
  Json error_;
};

/// JSON text with 2-space indentation; floats with 17 significant digits,
/// non-finite floats as the strings "inf", "-inf", "nan".
std::string write_json(const Json& value);
std::string emit(const Report& report, Format format);

/// {"verdict": "true"|"false"|"indeterminate", "witness_m": m, "diagnostics": ...}
Json verdict_json(const Verdict& v);
/// Exponent estimate, valuation (eps gauge) and the value at the smallest eps.
Json gennum_json(const GenNum& x);
/// eps, value columns over the grid.
Table gennum_table(const std::string& name, const std::string& description, const GenNum& x);

std::string format_double(double v);

}  // namespace gsf
