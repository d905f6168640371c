#include "ultrajet/report.hpp"

#include <charconv>
#include <cmath>

#include "ultrajet/error.hpp"

namespace ultrajet {

using nlohmann::json;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

namespace {

void dump(const json& j, std::string& out, int indent) {
  const std::string pad(2 * (indent + 1), ' '), close(2 * indent, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + json(it.key()).dump() + ": ";
        dump(it.value(), out, indent + 1);
      }
      out += "\n" + close + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // scalar arrays stay on one line
      bool flat = true;
      for (const auto& e : j) flat = flat && !e.is_structured();
      out += flat ? "[" : "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += flat ? ", " : ",\n";
        if (!flat) out += pad;
        dump(j[i], out, indent + 1);
      }
      out += flat ? "]" : "\n" + close + "]";
      return;
    }
    case json::value_t::number_float: {
      const double x = j.get<double>();
      out += std::isfinite(x) ? format_double(x) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_json(const json& j) {
  std::string out;
  dump(j, out, 0);
  return out;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::ConfigError, "cannot write " + path);
  f << dump_json(j) << '\n';
}

json to_json(const MultiIndex& a) { return json::array({a.a[0], a.a[1]}); }

json to_json(const Verdict& v) {
  json w = json::object();
  for (const auto& x : v.witness) w[x.name] = x.value;
  json out{{"condition", v.condition},
           {"holds", v.holds},
           {"witness", w},
           {"range", {{"kind", v.range.kind}, {"lo", v.range.lo}, {"hi", v.range.hi}, {"samples", v.range.samples}}},
           {"finite_range", v.finite_range},
           {"notes", v.notes}};
  if (v.counterexample) {
    const auto& c = *v.counterexample;
    out["counterexample"] = {{"at_kind", c.at_kind}, {"at", c.at},           {"lhs", c.lhs},
                             {"rhs", c.rhs},         {"constant_name", c.constant_name}, {"constant", c.constant}};
  } else {
    out["counterexample"] = nullptr;
  }
  json parts = json::array();
  for (const auto& p : v.parts) parts.push_back(to_json(p));
  out["parts"] = parts;
  return out;
}

json to_json(const ChainCertificate& c) {
  return {{"x", c.x},       {"y1", c.y1},       {"y2", c.y2},           {"y3", c.y3},
          {"D", c.D},       {"t_lo", c.t_lo},   {"t_hi", c.t_hi},       {"samples", c.samples},
          {"refined_ok", c.refined_ok}};
}

json to_json(const ResidualRow& r) {
  std::vector<bool> capped(r.capped.begin(), r.capped.end());
  return {{"a", r.a},
          {"alpha", to_json(r.alpha)},
          {"d", r.d},
          {"residual", r.residual},
          {"capped", capped},
          {"monotone", r.monotone},
          {"fit_C", r.fit_C},
          {"fit_K", r.fit_K},
          {"fit_ok", r.fit_ok}};
}

json to_json(const GrowthCertificate& g) {
  return {{"max_order", g.max_order}, {"grid_points", g.grid_points}, {"collar_points", g.collar_points},
          {"sup", g.sup},             {"M1", g.M1},                   {"C", g.C}};
}

json to_json(const CubeDiagnostics& d) {
  return {{"samples", d.samples},
          {"worst_ratio", std::vector<double>(d.worst, d.worst + 6)},
          {"cube_distance_over_diam_min", d.worst_cube_ratio_lo},
          {"cube_distance_over_diam_max", d.worst_cube_ratio_hi}};
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary), width_(header.size()) {
  if (!out_) throw Error(ErrorKind::ConfigError, "cannot write " + path);
  row_text(header);
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  row_text(cells);
}

void CsvWriter::row_text(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw Error(ErrorKind::InvariantViolation, "csv row width mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
}

}  // namespace ultrajet
