#ifndef BDDGEN_UTIL_HPP
#define BDDGEN_UTIL_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace bddgen::util {

std::string trim(std::string_view s);
std::string rtrim(std::string_view s);

/// Splits on '\n', tolerating CRLF input ('\r' before the break is dropped).
/// A trailing newline does not produce an extra empty element.
std::vector<std::string> split_lines(std::string_view text);

bool is_blank(std::string_view s);

/// True iff `s` is well-formed UTF-8 (no overlongs, surrogates, or
/// out-of-range code points).
bool utf8_valid(std::string_view s);

/// Drops a leading UTF-8 byte-order mark if present.
std::string_view strip_bom(std::string_view s);

/// SHA-256 of `data` as lowercase hex.
std::string sha256_hex(std::string_view data);

std::string read_file(const std::filesystem::path& path);

/// Writes via a sibling temp file and rename so readers never observe a
/// half-written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view data);

/// Shortest decimal form that still reads back as the same value where
/// practical ("0.75", not "0.750000").
std::string format_double(double v);

/// Replaces path-hostile characters in `name` so it can serve as a
/// directory or file name component.
std::string sanitize_path_component(std::string_view name);

}  // namespace bddgen::util

#endif
