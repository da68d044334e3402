#include "hfaid/common/json_util.hpp"

#include <fstream>
#include <sstream>

#include "hfaid/common/error.hpp"
#include "hfaid/common/hashing.hpp"

namespace hfaid {

std::string canonical_json(const Json& j) {
  // nlohmann::json objects are std::map backed, so keys are already sorted.
  return j.dump();
}

std::string json_digest(const Json& j) { return sha256_hex(canonical_json(j)); }

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " -> " + path.string() + ": " + ec.message());
}

void for_each_json_line(const std::filesystem::path& path,
                        const std::function<void(std::size_t, const Json&)>& fn,
                        const std::function<void(std::size_t, const std::string&)>& on_error) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      on_error(line_no, e.what());
      continue;
    }
    fn(line_no, j);
  }
}

}  // namespace hfaid
