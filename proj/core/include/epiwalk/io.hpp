#pragma once

#include <cstdint>
#include <string>

namespace epiwalk {

/// Writes via a temp file in the same directory + rename, so readers never
/// see a truncated artifact.
void atomic_write(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

std::uint64_t fnv1a64(const std::string& bytes);
std::string fnv1a64_hex(const std::string& bytes);

/// Fixed-format decimal used in every artifact: 12 digits, '.' separator.
std::string format_fixed(double v);

}  // namespace epiwalk
