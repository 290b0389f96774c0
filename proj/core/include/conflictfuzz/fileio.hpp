#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace conflictfuzz {

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Writes to a sibling temporary file and renames it into place, so readers
/// never observe a partially written artifact.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Reads a whole file; throws std::runtime_error when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

}  // namespace conflictfuzz
