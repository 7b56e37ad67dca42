// SPDX-License-Identifier: Apache-2.0
//
// Domain types shared by every diffsense module. All of them are plain value
// objects; copies are independent and safe to hand across threads.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace diffsense {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input document does not follow the artifact schema. The message carries
/// the JSON path of the offending field (e.g. `functions[3].kind`).
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Free-form text (vector strings, LLM replies) could not be parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

enum class Label { Malicious, Benign };

std::string_view to_string(Label label);
std::optional<Label> parse_label(std::string_view text);

struct BinaryMeta {
  std::string name;
  std::string version;
  std::string content_hash;  // 64 lowercase hex chars (sha256)
  std::string project_description;
  std::optional<std::string> changelog;

  friend bool operator==(const BinaryMeta&, const BinaryMeta&) = default;
};

struct FunctionId {
  std::optional<std::string> old_address;  // lowercase hex, no 0x prefix
  std::optional<std::string> new_address;
  std::string display_name;

  friend bool operator==(const FunctionId&, const FunctionId&) = default;
};

enum class FunctionKind { Added, Deleted, Modified };

std::string_view to_string(FunctionKind kind);
std::optional<FunctionKind> parse_function_kind(std::string_view text);

struct FunctionRecord {
  FunctionId id;
  FunctionKind kind = FunctionKind::Added;
  std::optional<std::string> code_old;
  std::optional<std::string> code_new;
  std::vector<std::string> callees;  // display names, no duplicates
  std::optional<std::string> text_diff;

  const std::string& name() const { return id.display_name; }

  friend bool operator==(const FunctionRecord&, const FunctionRecord&) = default;
};

struct DiffArtifact {
  BinaryMeta old_binary;
  BinaryMeta new_binary;
  std::vector<FunctionRecord> functions;
  std::optional<Label> label;
  std::optional<std::map<std::string, Label>> function_labels;

  const FunctionRecord* find(std::string_view display_name) const;

  friend bool operator==(const DiffArtifact&, const DiffArtifact&) = default;
};

enum class FssLevel { None = 0, Low = 1, Medium = 2, High = 3 };

enum class FssCategory { Behaviors, Resources, Confidentiality, Integrity, Availability };

inline constexpr FssCategory kAllCategories[] = {
    FssCategory::Behaviors, FssCategory::Resources, FssCategory::Confidentiality,
    FssCategory::Integrity, FssCategory::Availability};

inline constexpr FssLevel kAllLevels[] = {FssLevel::None, FssLevel::Low, FssLevel::Medium,
                                          FssLevel::High};

std::string_view to_string(FssLevel level);          // "none", "low", ...
std::string_view category_name(FssCategory category);  // "behaviors", ...
char category_letter(FssCategory category);            // 'B', 'R', ...
char level_letter(FssLevel level);                     // 'N', 'L', 'M', 'H'
std::optional<FssLevel> parse_level_word(std::string_view word);  // case-insensitive

struct FssClassification {
  FssLevel behaviors = FssLevel::None;
  FssLevel resources = FssLevel::None;
  FssLevel confidentiality = FssLevel::None;
  FssLevel integrity = FssLevel::None;
  FssLevel availability = FssLevel::None;

  FssLevel get(FssCategory category) const;
  void set(FssCategory category, FssLevel level);

  /// Element-wise maximum.
  FssClassification merged(const FssClassification& other) const;

  friend bool operator==(const FssClassification&, const FssClassification&) = default;
};

/// Aggregated score. The value is stored in tenths so that it is exactly
/// representable and compares bit-for-bit across platforms.
struct FssScore {
  double sensitivity = 0.0;
  double impact = 0.0;
  int tenths = 0;

  double value() const { return tenths / 10.0; }
  std::string to_string() const;  // one decimal, e.g. "7.4"

  friend bool operator==(const FssScore&, const FssScore&) = default;
};

struct TokenUsage {
  std::uint64_t input_tokens = 0;
  std::uint64_t output_tokens = 0;

  TokenUsage& operator+=(const TokenUsage& other) {
    input_tokens += other.input_tokens;
    output_tokens += other.output_tokens;
    return *this;
  }
  friend TokenUsage operator+(TokenUsage a, const TokenUsage& b) { return a += b; }
  friend bool operator==(const TokenUsage&, const TokenUsage&) = default;
};

struct FunctionAnalysis {
  FunctionId id;
  FunctionKind kind = FunctionKind::Added;
  std::string summary;
  std::optional<std::string> diff_summary;
  FssClassification classification;
  FssScore score;
  TokenUsage usage;

  friend bool operator==(const FunctionAnalysis&, const FunctionAnalysis&) = default;
};

enum class VerdictKind { Malicious, Benign, Unknown };

std::string_view to_string(VerdictKind verdict);

struct RankedFunction {
  FunctionId id;
  FssScore score;
  FssClassification classification;

  friend bool operator==(const RankedFunction&, const RankedFunction&) = default;
};

struct DiffVerdict {
  VerdictKind verdict = VerdictKind::Unknown;
  std::string rationale;
  std::vector<RankedFunction> top_functions;  // score descending
  TokenUsage usage;

  friend bool operator==(const DiffVerdict&, const DiffVerdict&) = default;
};

/// Checks every type invariant of the artifact. Never throws; an empty
/// result means the artifact is well formed. With `preprocessed` set,
/// Modified functions must also carry their textual diff.
std::vector<std::string> validate_artifact(const DiffArtifact& artifact,
                                           bool preprocessed = false);

bool is_lower_hex(std::string_view text);

}  // namespace diffsense
