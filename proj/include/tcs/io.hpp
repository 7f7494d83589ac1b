#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "tcs/noise_mc.hpp"

namespace tcs {

using Json = nlohmann::json;

// 17 significant digits, "%.17g".
std::string format_double(double v);

// Comma-separated, LF line endings, header row first. Cells are numbers or
// plain strings (no quoting; callers keep commas out of strings).
class CsvWriter {
 public:
  using Cell = std::variant<double, std::int64_t, std::uint64_t, std::string>;

  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  void row(const std::vector<Cell>& cells);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_;
};

// Pretty JSON with a trailing newline.
void write_json(const std::filesystem::path& path, const Json& j);

Json read_json_file(const std::filesystem::path& path);  // throws ConfigError

// Column order of the per-run table.
const std::vector<std::string>& ensemble_csv_header();

void write_ensemble_csv(const std::filesystem::path& path, const EnsembleTable& table);

// Inverse of write_ensemble_csv. Rows must be complete and duration-major;
// anything else raises ConfigError.
EnsembleTable read_ensemble_csv(const std::filesystem::path& path);

}  // namespace tcs
