#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "readrank/json.hpp"

namespace readrank::io {

std::string read_file(const std::filesystem::path& path);

// Parses one JSON value per non-blank line. Errors name the offending line.
std::vector<Json> read_jsonl(const std::filesystem::path& path);
std::vector<Json> parse_jsonl(std::string_view contents,
                                        std::string_view origin = "<string>");

std::string to_jsonl(const std::vector<Json>& rows);

// Writes via a sibling temporary file and rename, so readers never observe
// a partial file.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents);

// RFC 4180 CSV (quoted fields may span lines). The first row is the header.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // -1 if absent.
  int column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view contents, char delimiter = ',');

}  // namespace readrank::io
