#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace uq::csv {

// RFC 4180 quoting: fields with a comma, quote or newline are quoted.
std::string escape(std::string_view field);
std::string join_row(const std::vector<std::string>& fields);

// Shortest round-trip decimal; absent values become empty fields.
std::string number(double v);
std::string number(const std::optional<double>& v);

class Table {
 public:
  static Table parse(std::string_view content);
  static Table read(const std::filesystem::path& path);

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  std::optional<std::size_t> find(std::string_view column) const;
  // Throws MissingColumn naming the field.
  std::size_t require(std::string_view column) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

class MissingColumn : public std::runtime_error {
 public:
  explicit MissingColumn(const std::string& field)
      : std::runtime_error("missing column \"" + field + "\""), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

std::optional<double> parse_number(std::string_view field);

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path);
  void row(const std::vector<std::string>& fields);
  // Writes the buffered rows; throws Error if the file cannot be written.
  void save() const;

 private:
  std::filesystem::path path_;
  std::string buffer_;
};

}  // namespace uq::csv
