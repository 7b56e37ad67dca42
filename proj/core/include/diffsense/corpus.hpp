// SPDX-License-Identifier: Apache-2.0
//
// Synthetic labeled corpora of clean and injected update diffs.
//
// Each project is a small program of pseudo-C functions that evolves over
// consecutive versions. For every version pair the clean diff covers the
// release edits; an injected diff additionally carries one to three marker
// functions wired into an existing function. Edited functions are relocated,
// so address-derived names change the way they do in stripped binaries.
// Marker bodies only contain the substrings the mock rule table reacts to;
// they are inert text, not working code.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "diffsense/model.hpp"

namespace diffsense::corpus {

struct CorpusSpec {
  std::uint64_t seed = 42;
  std::size_t projects = 2;
  std::size_t versions = 3;   // per project; yields versions - 1 pairs
  double inject_rate = 1.0;   // fraction of version pairs that get an injected diff
};

struct CorpusEntry {
  std::string id;
  DiffArtifact artifact;
};

/// Deterministic for a given CorpusSpec. Per pair: one clean diff, then the injected
/// diff if that pair was selected (round(rate * pairs) pairs are selected).
std::vector<CorpusEntry> generate(const CorpusSpec& spec);

struct ManifestRow {
  std::string id;
  std::filesystem::path path;  // relative to the manifest directory
  std::optional<Label> label;
};

/// Writes `<id>.json` per entry plus `manifest.json` into `dir`.
std::vector<ManifestRow> write_corpus(const CorpusSpec& spec, const std::filesystem::path& dir);

/// Scans `dir` for artifact files (everything `*.json` except the manifest),
/// loads each in strict mode and lists them sorted by file name. Throws
/// SchemaError/IoError naming the offending path.
std::vector<ManifestRow> corpus_manifest(const std::filesystem::path& dir);

std::string manifest_json(const std::vector<ManifestRow>& rows);
void write_manifest(const std::filesystem::path& dir, const std::vector<ManifestRow>& rows);
std::vector<ManifestRow> read_manifest(const std::filesystem::path& manifest_path);

}  // namespace diffsense::corpus
