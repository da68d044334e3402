#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace hfaid {

using Json = nlohmann::json;

// Compact dump with sorted keys; the basis of every config digest.
std::string canonical_json(const Json& j);
std::string json_digest(const Json& j);

Json read_json_file(const std::filesystem::path& path);

// Writes via a temporary sibling and rename so readers never observe a
// partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_text_file(const std::filesystem::path& path);

// Calls fn(line_number, json) for each non-blank line. Lines that fail to
// parse are passed to on_error (line number, message) instead.
void for_each_json_line(const std::filesystem::path& path,
                        const std::function<void(std::size_t, const Json&)>& fn,
                        const std::function<void(std::size_t, const std::string&)>& on_error);

}  // namespace hfaid
