#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

namespace fermat {

/// n x n distance matrix serialization.
/// CSV: n rows of n comma-separated values, "inf" for unreachable.
/// Binary: magic "FERMAT01", u64 n, then row-major 64-bit floats,
/// everything little-endian.
void save_matrix_csv(const std::vector<double>& matrix, std::size_t n,
                     const std::filesystem::path& path);
std::pair<std::vector<double>, std::size_t> load_matrix_csv(const std::filesystem::path& path);

void save_matrix_binary(const std::vector<double>& matrix, std::size_t n,
                        const std::filesystem::path& path);
std::pair<std::vector<double>, std::size_t> load_matrix_binary(const std::filesystem::path& path);

}  // namespace fermat
