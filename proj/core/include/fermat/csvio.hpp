#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace fermat {

/// Shortest round-trip decimal representation, locale independent.
/// Infinities serialize as "inf"/"-inf".
std::string format_double(double v);

/// Parse one comma-separated row of doubles; rejects malformed fields.
std::vector<double> parse_csv_doubles(const std::string& line);

/// Strict double parser ("inf" and "-inf" accepted); throws ValidationError.
double parse_double(const std::string& field);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

/// CSV writer for experiment outputs: a `# schema=<name> version=<v>`
/// line, a header row, then records. All floats go through
/// format_double so repeated runs produce byte-identical files.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& schema,
            int version, const std::vector<std::string>& columns);

  void begin_row();
  void cell(double v);
  void cell(std::uint64_t v);
  void cell(std::int64_t v);
  void cell(const std::string& v);
  void end_row();

  void close();

 private:
  std::ofstream out_;
  std::size_t n_cols_;
  std::size_t row_cells_ = 0;
  bool in_row_ = false;
};

}  // namespace fermat
