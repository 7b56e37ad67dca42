// SPDX-License-Identifier: Apache-2.0
//
// Canonical JSON encoding of DiffArtifact (schema_version 1).

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "diffsense/model.hpp"

namespace diffsense {

inline constexpr int kArtifactSchemaVersion = 1;

enum class ParseMode {
  Strict,   // unknown fields and invariant violations are errors
  Lenient,  // unknown fields become warnings
};

struct ParsedArtifact {
  DiffArtifact artifact;
  std::vector<std::string> warnings;
};

/// Throws SchemaError with the JSON path of the first offending field.
ParsedArtifact parse_artifact(std::string_view json_text, ParseMode mode = ParseMode::Strict);

/// Canonical form: fixed key order, absent optionals omitted, two-space
/// indent, trailing newline. serialize(parse(serialize(a))) == serialize(a).
std::string serialize_artifact(const DiffArtifact& artifact);

}  // namespace diffsense
