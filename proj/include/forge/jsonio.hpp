#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace forge::jsonio {

// Whole-file slurp; missing or unreadable files raise ValidationError.
std::string read_file(const std::filesystem::path& path);

// Writes via a sibling temp file plus rename so readers never observe a
// partially written file.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content);

// Non-empty lines of a JSONL payload, with trailing carriage returns removed.
std::vector<std::string> jsonl_lines(std::string_view content);

}  // namespace forge::jsonio
