#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace fewg {

std::string sha256_hex(const std::string& data);

/// Ordered `# key: value` header lines of a CSV file.
using Metadata = std::vector<std::pair<std::string, std::string>>;

/// Shortest round-trip decimal form of a double.
std::string format_number(double value);

/// Writes to a temporary file next to `path`, then renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

struct CsvTable {
  Metadata metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::string meta(const std::string& key) const;
  std::size_t column(const std::string& name) const;
};

std::string render_csv(const Metadata& metadata, const std::vector<std::string>& columns,
                       const std::vector<std::vector<std::string>>& rows);
void write_csv(const std::filesystem::path& path, const Metadata& metadata,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<std::string>>& rows);
CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const nlohmann::json& value);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace fewg
