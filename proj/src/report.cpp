#include "gsf/report.hpp"

#include "gsf/errors.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace gsf {

Format parse_format(const std::string& name) {
  if (name == "json") return Format::Json;
  if (name == "csv") return Format::Csv;
  throw DomainError("format must be 'json' or 'csv'");
}

Report::Report(std::string command, Json config) : command_(std::move(command)), config_(std::move(config)) {}

void Report::add(const std::string& name, Json value) { results_[name] = std::move(value); }

void Report::check(const std::string& name, bool ok, Json details) {
  Json c;
  c["name"] = name;
  c["pass"] = ok;
  if (!details.is_null() && !details.empty()) c["details"] = std::move(details);
  checks_.push_back(std::move(c));
}

void Report::add_table(Table table) { tables_.push_back(std::move(table)); }

void Report::set_error(const std::string& kind, const std::string& message) {
  error_ = Json::object();
  error_["kind"] = kind;
  error_["message"] = message;
}

bool Report::passed() const {
  if (!error_.is_null()) return false;
  for (const auto& c : checks_)
    if (!c["pass"].get<bool>()) return false;
  return true;
}

Json Report::to_json() const {
  Json j;
  j["command"] = command_;
  j["config"] = config_;
  j["results"] = results_;
  j["checks"] = checks_;
  Json tables = Json::array();
  for (const auto& t : tables_) {
    Json tj;
    tj["name"] = t.name;
    tj["description"] = t.description;
    tj["columns"] = t.columns;
    tj["rows"] = t.rows;
    tables.push_back(std::move(tj));
  }
  j["tables"] = std::move(tables);
  if (!error_.is_null()) j["error"] = error_;
  Json summary;
  summary["passed"] = passed();
  summary["checks"] = checks_.size();
  Json failed = Json::array();
  for (const auto& c : checks_)
    if (!c["pass"].get<bool>()) failed.push_back(c["name"]);
  summary["failed"] = std::move(failed);
  j["summary"] = std::move(summary);
  return j;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void write(const Json& v, std::ostringstream& out, int indent) {
  const std::string pad(indent + 2, ' '), end_pad(indent, ' ');
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      for (const auto& [key, value] : v.items()) {
        if (!first) out << ",\n";
        first = false;
        out << pad << Json(key).dump() << ": ";
        write(value, out, indent + 2);
      }
      out << '\n' << end_pad << '}';
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out << "[]";
        return;
      }
      // arrays of scalars stay on one line
      bool flat = true;
      for (const auto& e : v) flat = flat && !e.is_structured();
      if (flat) {
        out << '[';
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (i) out << ", ";
          write(v[i], out, indent);
        }
        out << ']';
        return;
      }
      out << "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out << ",\n";
        out << pad;
        write(v[i], out, indent + 2);
      }
      out << '\n' << end_pad << ']';
      return;
    }
    case Json::value_t::number_float: {
      const double d = v.get<double>();
      if (std::isfinite(d)) out << format_double(d);
      else out << '"' << format_double(d) << '"';
      return;
    }
    default: out << v.dump(); return;
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c == '\n' ? ' ' : c;
  }
  return q + '"';
}

std::string scalar_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return format_double(v.get<double>());
  return v.dump();
}

void flatten(const Json& v, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (v.is_object()) {
    for (const auto& [key, value] : v.items()) flatten(value, prefix.empty() ? key : prefix + "." + key, out);
  } else if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) flatten(v[i], prefix + "[" + std::to_string(i) + "]", out);
  } else {
    out.emplace_back(prefix, scalar_text(v));
  }
}

std::string one_line(const std::string& s) {
  std::string r = s;
  for (char& c : r)
    if (c == '\n') c = ' ';
  return r;
}

}  // namespace

std::string write_json(const Json& value) {
  std::ostringstream out;
  write(value, out, 0);
  out << '\n';
  return out.str();
}

std::string emit(const Report& report, Format format) {
  if (format == Format::Json) return write_json(report.to_json());
  std::ostringstream out;
  out << "# gsf report\n";
  out << "# command: " << one_line(report.command()) << '\n';
  std::vector<std::pair<std::string, std::string>> cfg;
  flatten(report.config(), "", cfg);
  out << "# config:";
  for (const auto& [k, v] : cfg) out << ' ' << k << '=' << v;
  out << '\n';
  out << "# passed: " << (report.passed() ? "true" : "false") << '\n';
  out << "# section 'results': one row per scalar field; key is the dotted JSON path of the field\n";
  out << "# section 'checks': one row per assertion; value is true or false\n";
  out << "# section 'error': kind and message of an error raised by the command\n";
  out << "section,name,key,value\n";
  for (const auto& [name, value] : report.results().items()) {
    std::vector<std::pair<std::string, std::string>> rows;
    flatten(value, "", rows);
    for (const auto& [k, v] : rows) out << "results," << csv_field(name) << ',' << csv_field(k) << ',' << csv_field(v) << '\n';
  }
  for (const auto& c : report.checks())
    out << "checks," << csv_field(c["name"].get<std::string>()) << ",pass," << (c["pass"].get<bool>() ? "true" : "false")
        << '\n';
  if (!report.error().is_null())
    out << "error," << csv_field(report.error()["kind"].get<std::string>()) << ",message,"
        << csv_field(report.error()["message"].get<std::string>()) << '\n';
  for (const auto& t : report.tables()) {
    out << "# table " << t.name << ": " << one_line(t.description) << '\n';
    out << "# columns:";
    for (const auto& c : t.columns) out << ' ' << c;
    out << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
    out << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
      out << '\n';
    }
  }
  return out.str();
}

Json verdict_json(const Verdict& v) {
  Json j;
  j["verdict"] = to_string(v.value);
  if (v.witness) {
    const double w = *v.witness;
    if (std::isfinite(w) && w == std::floor(w) && std::fabs(w) < 1e15) j["witness_m"] = static_cast<long long>(w);
    else j["witness_m"] = w;
  }
  if (v.is_indeterminate()) j["reason"] = v.diagnostics;
  else if (!v.diagnostics.empty()) j["diagnostics"] = v.diagnostics;
  return j;
}

Json gennum_json(const GenNum& x) {
  const auto& ctx = x.context();
  auto est = exponent_estimate(x);
  Json j;
  j["exponent"] = est.exponent;
  j["exponent_verdict"] = to_string(est.verdict.value);
  j["spread"] = est.spread;
  if (ctx->gauge().kind() == GaugeKind::Eps) j["valuation"] = valuation(x);
  j["value_at_smallest_eps"] = x.value(ctx->size() - 1);
  return j;
}

Table gennum_table(const std::string& name, const std::string& description, const GenNum& x) {
  Table t{name, description, {"eps", "value"}, {}};
  const auto& ctx = x.context();
  for (std::size_t k = 0; k < ctx->size(); ++k) t.rows.push_back({ctx->eps(k), x.value(k)});
  return t;
}

}  // namespace gsf
