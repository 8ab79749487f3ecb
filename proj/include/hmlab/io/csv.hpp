#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace hmlab::io {

// Shortest decimal that parses back to the same double.
std::string format_double(double x);
double parse_double(const std::string& text);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;  // columns[j][row]

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  const std::vector<double>& column(const std::string& name) const;
};

// Comma separated, one header line, '\n' line ends. Column lengths must agree.
std::string to_csv(const Table& t);
void write_csv(const std::filesystem::path& path, const Table& t);
Table read_csv(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

// Lower-case hex SHA-256.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace hmlab::io
