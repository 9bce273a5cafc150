#include "uq/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "uq/error.hpp"

namespace uq::csv {

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string join_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += escape(fields[i]);
  }
  return out;
}

std::string number(double v) { return fmt::format("{}", v); }

std::string number(const std::optional<double>& v) { return v ? number(*v) : std::string(); }

std::optional<double> parse_number(std::string_view field) {
  if (field.empty()) return std::nullopt;
  double v = 0.0;
  std::string tmp(field);
  std::size_t used = 0;
  try {
    v = std::stod(tmp, &used);
  } catch (const std::exception&) {
    throw ValidationError("not a number: \"" + tmp + "\"");
  }
  if (used != tmp.size()) throw ValidationError("not a number: \"" + tmp + "\"");
  return v;
}

Table Table::parse(std::string_view content) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < content.size(); ++i) {
    const char c = content[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    any = true;
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < content.size() && content[i + 1] == '\n') ++i;
      record.push_back(std::move(field));
      field.clear();
      records.push_back(std::move(record));
      record.clear();
      any = false;
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw ValidationError("unterminated quoted CSV field");
  if (any || !field.empty() || !record.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }

  Table t;
  if (records.empty()) return t;
  t.header_ = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    auto& row = records[r];
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != t.header_.size()) {
      throw ValidationError("CSV row " + std::to_string(r + 1) + " has " +
                            std::to_string(row.size()) + " fields, header has " +
                            std::to_string(t.header_.size()));
    }
    t.rows_.push_back(std::move(row));
  }
  return t;
}

Table Table::read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::optional<std::size_t> Table::find(std::string_view column) const {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == column) return i;
  }
  return std::nullopt;
}

std::size_t Table::require(std::string_view column) const {
  if (auto i = find(column)) return *i;
  throw MissingColumn(std::string(column));
}

Writer::Writer(const std::filesystem::path& path) : path_(path) {}

void Writer::row(const std::vector<std::string>& fields) {
  buffer_ += join_row(fields);
  buffer_.push_back('\n');
}

void Writer::save() const {
  std::ofstream out(path_, std::ios::binary | std::ios::trunc);
  out << buffer_;
  if (!out) throw Error("cannot write " + path_.string());
}

}  // namespace uq::csv
