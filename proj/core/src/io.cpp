// SPDX-License-Identifier: Apache-2.0

#include "diffsense/io.hpp"

#include <fstream>
#include <sstream>

#include "diffsense/hash.hpp"
#include "diffsense/model.hpp"

namespace diffsense {

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError(path.string() + ": read failed");
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError(path.string() + ": write failed");
}

std::string safe_file_stem(std::string_view name) {
  std::string out;
  bool escaped = name.empty() || name.front() == '.';
  for (char c : name) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
              c == '_' || c == '-' || c == '.';
    out += ok ? c : '_';
    escaped = escaped || !ok;
  }
  if (out.size() > 120) {
    out.resize(120);
    escaped = true;
  }
  if (escaped) out += "-" + sha256_hex(name).substr(0, 8);
  return out;
}

}  // namespace diffsense
