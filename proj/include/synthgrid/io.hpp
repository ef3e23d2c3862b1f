#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace synthgrid {

/// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(std::string_view value);

/// Splits one CSV record, honouring double-quoted fields.
std::vector<std::string> split_csv_line(std::string_view line);

/// Reads a whole file; throws IoError.
std::string read_text_file(const std::filesystem::path& path);

/// Writes through a temporary sibling and renames it into place, so readers
/// never observe a partial file. Creates parent directories. Throws IoError.
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// Create-once publish: the first writer wins and later calls leave the
/// existing file untouched. Returns true if this call created the file.
bool publish_once(const std::filesystem::path& path, std::string_view content);

/// Non-empty lines with the trailing '\r' removed.
std::vector<std::string> read_lines(const std::filesystem::path& path);

}  // namespace synthgrid
