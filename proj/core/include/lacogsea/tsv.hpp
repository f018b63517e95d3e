#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace lacogsea::tsv {

std::vector<std::string_view> split(std::string_view line, char delim);

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

/// Fixed 17 significant digits (%.17g).
std::string format_double17(double v);

/// Strict full-string parse; returns false on trailing garbage, empty input,
/// or non-finite values.
bool parse_double(std::string_view text, double& out);

/// Reads every line of a text file, stripping '\n' and a trailing '\r'.
std::vector<std::string> read_lines(const std::filesystem::path& path);

/// Writes `content` to `path`, creating parent directories.
void write_file(const std::filesystem::path& path, std::string_view content);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace lacogsea::tsv
