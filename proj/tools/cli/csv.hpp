#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace longmem::cli {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> row_lines;  // 1-based line where each row starts
};

// RFC 4180: comma separated, optional double quotes with "" escapes, CRLF or LF.
CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::string& path);

struct Series {
  std::vector<double> values;
  std::string source_column;
  std::vector<std::string> warnings;
};

// Returns from a `return` column, or log returns from a `price` column.
// column is "auto", "return" or "price".
Series ingest(const CsvTable& table, const std::string& column = "auto");
Series ingest_file(const std::string& path, const std::string& column = "auto");

// Shortest decimal form that reads back to the same double.
std::string format_double(double x);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  CsvWriter& field(const std::string& s);
  CsvWriter& field(double x);
  CsvWriter& field(std::size_t x);
  CsvWriter& empty();
  void end_row();

 private:
  std::ostream& out_;
  bool first_ = true;
};

}  // namespace longmem::cli
