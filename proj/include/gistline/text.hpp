#pragma once

// Small line-format helpers shared by the content readers.

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gistline::text {

std::string_view trim(std::string_view s);
std::vector<std::string> split_ws(std::string_view s);
std::vector<std::string_view> split_lines(std::string_view s);

/// Drops everything from the first '#' that is not inside double quotes.
std::string_view strip_comment(std::string_view line);

/// Nesting level of a line indented in steps of two spaces. Throws
/// ContentError for tabs or odd indentation.
std::size_t indentation(std::string_view line);

/// First whitespace-delimited word and the remainder.
std::pair<std::string_view, std::string_view> split_keyword(std::string_view s);

/// Splits "a | b | c" on '|' and trims each field.
std::vector<std::string> split_fields(std::string_view s, char sep = '|');

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace gistline::text
