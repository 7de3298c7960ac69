#include "atomsplit/csv.hpp"

#include <array>
#include <charconv>

namespace atomsplit {

namespace {

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::ofstream open(const std::filesystem::path& path, std::ios::openmode mode) {
  std::ofstream out(path, mode | std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void check(const std::ofstream& out, const std::filesystem::path& path) {
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

std::string format_number(double value) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

std::string format_cell(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) return format_number(*d);
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  return std::get<std::string>(cell);
}

std::string format_row(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += quote(fields[i]);
  }
  line += '\n';
  return line;
}

std::string format_row(const std::vector<Cell>& cells) {
  std::vector<std::string> fields;
  fields.reserve(cells.size());
  for (const Cell& c : cells) fields.push_back(format_cell(c));
  return format_row(fields);
}

void emit_csv(const Table& table, const std::filesystem::path& path) {
  CsvWriter writer(path, table.header);
  for (const auto& row : table.rows) writer.write(row);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), out_(open(path, std::ios::out | std::ios::trunc)) {
  out_ << format_row(header);
  out_.flush();
  check(out_, path_);
}

CsvWriter::CsvWriter(const std::filesystem::path& path) : path_(path), out_(open(path, std::ios::app)) {}

void CsvWriter::write(const std::vector<Cell>& row) {
  out_ << format_row(row);
  out_.flush();
  check(out_, path_);
}

void emit_metadata(const std::vector<std::pair<std::string, std::string>>& entries,
                   const std::filesystem::path& path) {
  auto out = open(path, std::ios::out | std::ios::trunc);
  for (const auto& [key, value] : entries) out << key << " = " << value << '\n';
  out.flush();
  check(out, path);
}

}  // namespace atomsplit
