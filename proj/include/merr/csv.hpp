#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "merr/types.hpp"

namespace merr {

/// Formats a double with 17 significant digits (round-trips exactly).
std::string format_full(double value);

/// Plain numeric CSV, one row per line, no header.
void write_csv(const std::filesystem::path& path, const Matrix& m);

/// Vectors are written as a single column.
void write_csv(const std::filesystem::path& path, const StateVector& v);

Matrix read_csv(const std::filesystem::path& path);

/// FNV-1a 64-bit over a byte string.
std::uint64_t fnv1a64(const std::string& bytes);

/// FNV-1a 64-bit over a file's contents (binary read).
std::uint64_t fnv1a64_file(const std::filesystem::path& path);

std::string to_hex(std::uint64_t value);

}  // namespace merr
