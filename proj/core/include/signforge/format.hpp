#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace signforge {

// Shortest decimal text that parses back to the identical value.
void append_shortest(std::string& out, float v);
void append_shortest(std::string& out, double v);

// Throws UnparsableToken unless the whole token is a number.
float parse_float(std::string_view token);
double parse_double(std::string_view token);

// Splits on runs of ' ' / '\t'; no empty tokens.
std::vector<std::string_view> split_spaces(std::string_view line);

// Splits on a single separator character; keeps empty fields.
std::vector<std::string_view> split_on(std::string_view line, char sep);

// Splits text into lines, dropping a trailing '\r' and a final empty line.
std::vector<std::string_view> split_lines(std::string_view text);

// 128-bit content fingerprint as 32 hex digits.
std::string hex_digest(std::string_view bytes);

std::string read_file(const std::filesystem::path& path);
// Writes via a temporary sibling and renames, so readers never see a
// half-written file.
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace signforge
