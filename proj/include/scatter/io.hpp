#pragma once

#include <cstdint>
#include <string>

namespace scatter::io {

/// Shortest round-trip text for a double.
std::string num(double x);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

/// 64-bit FNV-1a of a byte string, as 16 hex digits.
std::string hash_hex(const std::string& bytes);

inline constexpr const char* kToolVersion = "0.3.0";

}  // namespace scatter::io
