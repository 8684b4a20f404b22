#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace crashforge {

// Formats v with `sig` significant digits (printf %g). All CSV output goes
// through this so byte-level determinism is a property of one code path.
std::string fmt_sig(double v, int sig);

inline std::string fmt_g6(double v) { return fmt_sig(v, 6); }
inline std::string fmt_g9(double v) { return fmt_sig(v, 9); }

// Splits a CSV line on commas; no quoting (none of our schemas need it).
// Trims a trailing '\r' so CRLF files parse.
std::vector<std::string> split_csv(std::string_view line);

std::string trim(std::string_view s);

// Strict numeric parsing; on failure throws ParseError naming row/column.
double parse_double_field(std::string_view text, std::size_t row,
                          std::string_view column);
long long parse_int_field(std::string_view text, std::size_t row,
                          std::string_view column);

// FNV-1a 64-bit over a byte string; used for file checksums / config hashes.
std::uint64_t fnv1a64(std::string_view bytes);
std::string to_hex(std::uint64_t v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace crashforge
