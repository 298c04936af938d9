#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace lexdiv {

// SHA-256 hex digest (lowercase) of the concatenation of the given parts,
// each prefixed with its length so that part boundaries are unambiguous.
std::string sha256_hex(const std::vector<std::string_view>& parts);
std::string sha256_hex(std::string_view data);

// FNV-1a, used by the mock embedding backend.
inline uint64_t fnv1a64(std::string_view s, uint64_t h = 0xCBF29CE484222325ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view data);

// Write to a sibling temp file, then rename into place. Rename is atomic on
// POSIX, so concurrent readers never observe a partial file.
void atomic_write_file(const std::filesystem::path& path, std::string_view data);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string lower_ascii(std::string_view s);

// Fixed-precision formatting helpers; all exported numbers go through these
// so identical inputs always produce identical bytes.
std::string format_double(double v, int precision);
// Table-style cell: mean to 2 decimals, SD in brackets with the leading
// zero dropped when SD < 1, e.g. 2.71(.01) or 11.21(2.52).
std::string format_mean_sd(double mean, double sd);

} // namespace lexdiv
