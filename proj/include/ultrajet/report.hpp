#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ultrajet/conditions.hpp"
#include "ultrajet/extend.hpp"
#include "ultrajet/geometry.hpp"

namespace ultrajet {

/// Indented JSON with every double written as %.17g; non-finite values become null.
std::string dump_json(const nlohmann::json& j);
/// Writes dump_json(j) plus a trailing newline.
void write_json(const std::string& path, const nlohmann::json& j);

nlohmann::json to_json(const Verdict& v);
nlohmann::json to_json(const ChainCertificate& c);
nlohmann::json to_json(const ResidualRow& r);
nlohmann::json to_json(const GrowthCertificate& g);
nlohmann::json to_json(const CubeDiagnostics& d);
nlohmann::json to_json(const MultiIndex& a);

/// Comma-separated, '.' decimal point regardless of locale, LF line ends.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<double>& values);
  void row_text(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
  std::size_t width_;
};

/// %.17g independent of the global locale.
std::string format_double(double x);

}  // namespace ultrajet
