// SPDX-License-Identifier: Apache-2.0
//
// Loading artifacts and removing address noise from modified functions.
//
// Stripped binaries name functions after their address (`FUN_00104794`), so
// a modified function that moved shows up under two names. Every modified
// function is renamed to `mod_<old>_<new>` and each reference to it is
// rewritten, keeping the rename out of textual diffs and prompts.

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "diffsense/artifact_json.hpp"
#include "diffsense/model.hpp"

namespace diffsense::ingest {

/// Throws IoError when the file cannot be read, SchemaError otherwise.
DiffArtifact load_artifact(const std::filesystem::path& path, ParseMode mode = ParseMode::Strict);

void save_artifact(const std::filesystem::path& path, const DiffArtifact& artifact);

std::string canonical_name(std::string_view old_address, std::string_view new_address);

/// Replaces whole-word occurrences of `token` (identifier boundaries on both
/// sides) with `replacement`.
std::string replace_token(std::string_view text, std::string_view token,
                          std::string_view replacement);

/// Idempotent. Throws Error if two functions would end up sharing a name.
DiffArtifact canonicalize_names(DiffArtifact artifact);

/// Fills text_diff for every Modified function.
DiffArtifact compute_text_diffs(DiffArtifact artifact, std::size_t context = 3);

/// canonicalize_names followed by compute_text_diffs.
DiffArtifact prepare(DiffArtifact artifact);

}  // namespace diffsense::ingest
