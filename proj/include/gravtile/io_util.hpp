#pragma once

#include <filesystem>
#include <string>

namespace gravtile {

/// Write `content` to `path` atomically: the file is either complete or
/// absent (temp file in the same directory, then rename).
void atomic_write_file(const std::filesystem::path &path, const std::string &content);

/// Read an entire file; throws std::runtime_error if it cannot be opened.
std::string read_file(const std::filesystem::path &path);

}  // namespace gravtile
