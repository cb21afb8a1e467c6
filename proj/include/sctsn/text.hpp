#pragma once

// Line-oriented helpers shared by the text file formats.

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sctsn {

std::string read_file(const std::string& path);

/// Calls `fn(line_number, tokens)` for every non-blank line after stripping
/// `#` comments. Tokens are whitespace separated.
void for_each_line(std::string_view text,
                   const std::function<void(std::size_t, const std::vector<std::string_view>&)>& fn);

double parse_number(std::string_view s, std::size_t line);
/// Number with an optional k/M/G suffix (powers of 1000).
double parse_si(std::string_view s, std::size_t line);
long long parse_integer(std::string_view s, std::size_t line);
/// Splits `key=value`.
std::pair<std::string_view, std::string_view> split_option(std::string_view tok, std::size_t line);

/// Shortest round-trip decimal form (std::to_chars), stable across runs.
std::string format_double(double v);

} // namespace sctsn
