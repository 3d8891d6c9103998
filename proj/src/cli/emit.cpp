#include "multifrac/cli/emit.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "multifrac/cli/config.hpp"

namespace multifrac::cli {
namespace {

void check_finite(const nlohmann::json& j) {
  if (j.is_number_float() && !std::isfinite(j.get<double>())) throw NumericalError("non-finite value in JSON output");
  if (j.is_structured()) {
    for (const auto& child : j) check_finite(child);
  }
}

}  // namespace

std::string format_number(double v) {
  if (!std::isfinite(v)) throw NumericalError("non-finite value in CSV output");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string render_csv(const CsvTable& table, const Metadata& meta) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out += ',';
    out += table.header[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_number(row[i]);
    }
    out += '\n';
  }
  out += std::string("# tool_version: ") + kToolVersion + '\n';
  out += "# config_hash: fnv1a64:" + meta.config_hash + '\n';
  out += "# normalization: " + meta.normalization + '\n';
  for (const auto& line : meta.extra) out += "# " + line + '\n';
  return out;
}

std::string render_json(const nlohmann::json& j) {
  check_finite(j);
  return j.dump(2) + '\n';
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace multifrac::cli
