#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace multifrac::cli {

inline constexpr const char* kToolVersion = "multifrac 1.0.0";

/// Lines of the trailing '#' block of every CSV file.
struct Metadata {
  std::string config_hash;
  std::string normalization;
  std::vector<std::string> extra;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row) { rows.push_back(std::move(row)); }
};

/// %.17g; throws NumericalError for NaN or infinity.
std::string format_number(double v);

std::string render_csv(const CsvTable& table, const Metadata& meta);

/// Pretty JSON with a trailing newline; throws NumericalError when a number
/// is not finite.
std::string render_json(const nlohmann::json& j);

/// Throws IoError on failure.
void write_file(const std::string& path, const std::string& content);

}  // namespace multifrac::cli
