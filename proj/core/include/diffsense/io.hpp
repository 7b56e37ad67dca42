// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace diffsense {

/// Both throw IoError naming the path.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// Maps an arbitrary function name onto a portable file stem. Names that
/// need escaping get a short hash suffix so distinct names stay distinct.
std::string safe_file_stem(std::string_view name);

}  // namespace diffsense
