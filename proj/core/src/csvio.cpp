#include "fermat/csvio.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "fermat/errors.hpp"

namespace fermat {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

double parse_double(const std::string& field) {
  std::size_t a = 0, b = field.size();
  while (a < b && (field[a] == ' ' || field[a] == '\t' || field[a] == '\r')) ++a;
  while (b > a && (field[b - 1] == ' ' || field[b - 1] == '\t' || field[b - 1] == '\r')) --b;
  if (a == b) throw ValidationError("empty numeric field");
  const std::string t = field.substr(a, b - a);
  if (t == "inf") return std::numeric_limits<double>::infinity();
  if (t == "-inf") return -std::numeric_limits<double>::infinity();
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw ValidationError("malformed numeric field: '" + t + "'");
  }
  return value;
}

std::vector<double> parse_csv_doubles(const std::string& line) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    const std::string field =
        comma == std::string::npos ? line.substr(start) : line.substr(start, comma - start);
    out.push_back(parse_double(field));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write file: " + path.string());
  out << content;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& schema,
                     int version, const std::vector<std::string>& columns)
    : out_(path, std::ios::binary), n_cols_(columns.size()) {
  if (!out_) throw ValidationError("cannot write file: " + path.string());
  out_ << "# schema=" << schema << " version=" << version << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out_ << ',';
    out_ << columns[i];
  }
  out_ << '\n';
}

void CsvWriter::begin_row() {
  in_row_ = true;
  row_cells_ = 0;
}

void CsvWriter::cell(double v) { cell(format_double(v)); }
void CsvWriter::cell(std::uint64_t v) { cell(std::to_string(v)); }
void CsvWriter::cell(std::int64_t v) { cell(std::to_string(v)); }

void CsvWriter::cell(const std::string& v) {
  if (!in_row_) throw ValidationError("CsvWriter: cell outside row");
  if (row_cells_) out_ << ',';
  out_ << v;
  ++row_cells_;
}

void CsvWriter::end_row() {
  if (row_cells_ != n_cols_) {
    throw ValidationError("CsvWriter: row has " + std::to_string(row_cells_) +
                          " cells, expected " + std::to_string(n_cols_));
  }
  out_ << '\n';
  in_row_ = false;
}

void CsvWriter::close() { out_.close(); }

}  // namespace fermat
