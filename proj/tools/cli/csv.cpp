#include "cli/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "cli/config.hpp"

namespace longmem::cli {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& raw, double& out) {
  const std::string s = trim(raw);
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

}  // namespace

CsvTable parse_csv(const std::string& text) {
  std::size_t pos = 0;
  std::size_t line = 1;
  if (text.rfind("\xEF\xBB\xBF", 0) == 0) pos = 3;

  std::vector<std::vector<std::string>> records;
  std::vector<std::size_t> starts;
  const std::size_t n = text.size();
  while (pos < n) {
    const std::size_t record_line = line;
    std::vector<std::string> record;
    std::string field;
    bool done = false;
    while (!done) {
      field.clear();
      if (pos < n && text[pos] == '"') {
        ++pos;
        for (;;) {
          if (pos >= n) throw ConfigError("line " + std::to_string(record_line) + ": unterminated quoted field");
          const char c = text[pos++];
          if (c == '"') {
            if (pos < n && text[pos] == '"') {
              field.push_back('"');
              ++pos;
            } else {
              break;
            }
          } else {
            if (c == '\n') ++line;
            field.push_back(c);
          }
        }
        if (pos < n && text[pos] != ',' && text[pos] != '\n' && text[pos] != '\r') {
          throw ConfigError("line " + std::to_string(line) + ": text after closing quote");
        }
      } else {
        while (pos < n && text[pos] != ',' && text[pos] != '\n' && text[pos] != '\r') {
          field.push_back(text[pos++]);
        }
      }
      record.push_back(field);
      if (pos >= n) {
        done = true;
      } else if (text[pos] == ',') {
        ++pos;
      } else {
        if (text[pos] == '\r') ++pos;
        if (pos < n && text[pos] == '\n') ++pos;
        ++line;
        done = true;
      }
    }
    const bool blank = record.size() == 1 && trim(record[0]).empty();
    if (!blank) {
      records.push_back(std::move(record));
      starts.push_back(record_line);
    }
  }

  CsvTable table;
  if (records.empty()) throw ConfigError("CSV input is empty");
  table.header = std::move(records.front());
  for (auto& h : table.header) h = trim(h);
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size()) {
      throw ConfigError("line " + std::to_string(starts[r]) + ": expected " +
                        std::to_string(table.header.size()) + " fields, found " +
                        std::to_string(records[r].size()));
    }
    table.rows.push_back(std::move(records[r]));
    table.row_lines.push_back(starts[r]);
  }
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open data file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

Series ingest(const CsvTable& table, const std::string& column) {
  auto find = [&](const std::string& name) -> std::ptrdiff_t {
    for (std::size_t i = 0; i < table.header.size(); ++i) {
      if (table.header[i] == name) return static_cast<std::ptrdiff_t>(i);
    }
    return -1;
  };

  std::string chosen = column;
  if (chosen == "auto") chosen = find("return") >= 0 ? "return" : "price";
  const auto idx = find(chosen);
  if (idx < 0) {
    throw ConfigError(column == "auto" ? "CSV needs a 'return' or 'price' column"
                                       : "CSV has no '" + chosen + "' column");
  }

  Series s;
  s.source_column = chosen;
  std::vector<double> raw;
  raw.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    double v = 0.0;
    if (!parse_number(table.rows[r][static_cast<std::size_t>(idx)], v)) {
      throw ConfigError("line " + std::to_string(table.row_lines[r]) + ": '" + chosen +
                        "' is not a finite number: '" +
                        table.rows[r][static_cast<std::size_t>(idx)] + "'");
    }
    if (chosen == "price" && !(v > 0.0)) {
      throw ConfigError("line " + std::to_string(table.row_lines[r]) + ": price must be positive");
    }
    raw.push_back(v);
  }

  const auto date = find("date");
  if (date >= 0) {
    for (std::size_t r = 1; r < table.rows.size(); ++r) {
      const auto& prev = table.rows[r - 1][static_cast<std::size_t>(date)];
      const auto& cur = table.rows[r][static_cast<std::size_t>(date)];
      if (!(prev < cur)) {
        s.warnings.push_back("line " + std::to_string(table.row_lines[r]) +
                             ": dates are not strictly increasing");
        break;
      }
    }
  }

  if (chosen == "price") {
    for (std::size_t t = 1; t < raw.size(); ++t) s.values.push_back(std::log(raw[t] / raw[t - 1]));
  } else {
    s.values = std::move(raw);
  }
  return s;
}

Series ingest_file(const std::string& path, const std::string& column) {
  return ingest(read_csv(path), column);
}

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

CsvWriter& CsvWriter::field(const std::string& s) {
  if (!first_) out_ << ',';
  first_ = false;
  if (s.find_first_of(",\"\r\n") == std::string::npos) {
    out_ << s;
  } else {
    out_ << '"';
    for (char c : s) {
      if (c == '"') out_ << '"';
      out_ << c;
    }
    out_ << '"';
  }
  return *this;
}

CsvWriter& CsvWriter::field(double x) { return field(format_double(x)); }

CsvWriter& CsvWriter::field(std::size_t x) { return field(std::to_string(x)); }

CsvWriter& CsvWriter::empty() { return field(std::string()); }

void CsvWriter::end_row() {
  out_ << "\r\n";
  first_ = true;
}

}  // namespace longmem::cli
