#include "fermat/matrix_io.hpp"

#include <cstring>
#include <fstream>

#include "fermat/csvio.hpp"
#include "fermat/errors.hpp"

namespace fermat {

namespace {

constexpr char kMagic[8] = {'F', 'E', 'R', 'M', 'A', 'T', '0', '1'};

void check_square(const std::vector<double>& matrix, std::size_t n) {
  if (matrix.size() != n * n) {
    throw ValidationError("distance matrix: size is not n*n");
  }
}

}  // namespace

void save_matrix_csv(const std::vector<double>& matrix, std::size_t n,
                     const std::filesystem::path& path) {
  check_square(matrix, n);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write matrix file: " + path.string());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j) out << ',';
      out << format_double(matrix[i * n + j]);
    }
    out << '\n';
  }
}

std::pair<std::vector<double>, std::size_t> load_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open matrix file: " + path.string());
  std::vector<double> matrix;
  std::size_t n = 0, rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<double> row = parse_csv_doubles(line);
    if (n == 0) n = row.size();
    if (row.size() != n) throw ValidationError(path.string() + ": ragged matrix row");
    matrix.insert(matrix.end(), row.begin(), row.end());
    ++rows;
  }
  if (rows != n) throw ValidationError(path.string() + ": matrix is not square");
  return {std::move(matrix), n};
}

void save_matrix_binary(const std::vector<double>& matrix, std::size_t n,
                        const std::filesystem::path& path) {
  check_square(matrix, n);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write matrix file: " + path.string());
  out.write(kMagic, sizeof(kMagic));
  const std::uint64_t n64 = n;
  out.write(reinterpret_cast<const char*>(&n64), sizeof(n64));
  out.write(reinterpret_cast<const char*>(matrix.data()),
            static_cast<std::streamsize>(matrix.size() * sizeof(double)));
}

std::pair<std::vector<double>, std::size_t> load_matrix_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open matrix file: " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ValidationError(path.string() + ": bad magic (expected FERMAT01)");
  }
  std::uint64_t n64 = 0;
  in.read(reinterpret_cast<char*>(&n64), sizeof(n64));
  if (!in) throw ValidationError(path.string() + ": truncated header");
  const std::size_t n = static_cast<std::size_t>(n64);
  std::vector<double> matrix(n * n);
  in.read(reinterpret_cast<char*>(matrix.data()),
          static_cast<std::streamsize>(matrix.size() * sizeof(double)));
  if (!in) throw ValidationError(path.string() + ": truncated matrix body");
  return {std::move(matrix), n};
}

}  // namespace fermat
