#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

namespace peerlex::detail {

std::string read_file(const std::filesystem::path& path);

// Calls `fn(line_number, line)` for every line; a trailing '\r' is removed.
void for_each_line(const std::filesystem::path& path,
                   const std::function<void(std::size_t, std::string_view)>& fn);

// Writes to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string_view trim(std::string_view s);
bool is_blank(std::string_view s);

}  // namespace peerlex::detail
