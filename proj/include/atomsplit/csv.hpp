#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace atomsplit {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

/// Shortest form is not used: doubles always carry 17 significant digits.
std::string format_number(double value);
std::string format_cell(const Cell& cell);
/// One CSV record with RFC 4180 quoting, terminated by LF.
std::string format_row(const std::vector<std::string>& fields);
std::string format_row(const std::vector<Cell>& cells);

/// Writes header and rows. Throws IoError naming the path.
void emit_csv(const Table& table, const std::filesystem::path& path);

/// Line-by-line writer for tables produced incrementally.
class CsvWriter {
 public:
  /// Truncates the file and writes the header.
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  /// Opens an existing file for appending.
  explicit CsvWriter(const std::filesystem::path& path);

  void write(const std::vector<Cell>& row);

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

/// Writes `key = value` lines in the given order.
void emit_metadata(const std::vector<std::pair<std::string, std::string>>& entries,
                   const std::filesystem::path& path);

}  // namespace atomsplit
