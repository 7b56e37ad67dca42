// SPDX-License-Identifier: Apache-2.0
//
// Line-based unified diffs of decompiled code. Matching follows Python
// difflib's SequenceMatcher (longest matching block, recursively, with the
// "popular line" heuristic for sequences of 200+ lines) so the emitted text
// is byte-identical to `difflib.unified_diff(a, b, "old", "new", lineterm="")`
// joined by newlines.

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace diffsense::textdiff {

struct UnifiedDiff {
  std::string text;  // empty iff the inputs are equal after normalization
  std::size_t hunk_count = 0;

  bool empty() const { return text.empty(); }
};

/// Splits on '\n' and strips trailing whitespace from each line. A final
/// newline does not produce an extra empty line.
std::vector<std::string> split_lines(std::string_view text);

enum class OpTag { Equal, Replace, Delete, Insert };

struct Opcode {
  OpTag tag;
  std::size_t a_begin, a_end, b_begin, b_end;
};

std::vector<Opcode> opcodes(const std::vector<std::string>& a, const std::vector<std::string>& b);

UnifiedDiff unified_diff(std::string_view old_code, std::string_view new_code,
                         std::size_t context = 3);

/// Applies a unified diff produced by unified_diff() to `old_code`. Throws
/// ParseError if a hunk header is malformed or a context/removed line does
/// not match. The result uses normalized lines, each newline-terminated.
std::string apply_patch(std::string_view old_code, std::string_view diff_text);

struct SplitDiff {
  std::string header;               // the `---`/`+++` lines
  std::vector<std::string> hunks;   // each starts with its `@@` line
};

SplitDiff split_hunks(std::string_view diff_text);

}  // namespace diffsense::textdiff
