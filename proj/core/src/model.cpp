// SPDX-License-Identifier: Apache-2.0

#include "diffsense/model.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <set>
#include <unordered_map>

namespace diffsense {

std::string_view to_string(Label label) {
  return label == Label::Malicious ? "malicious" : "benign";
}

std::optional<Label> parse_label(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "malicious") return Label::Malicious;
  if (lower == "benign") return Label::Benign;
  return std::nullopt;
}

std::string_view to_string(FunctionKind kind) {
  switch (kind) {
    case FunctionKind::Added: return "added";
    case FunctionKind::Deleted: return "deleted";
    case FunctionKind::Modified: return "modified";
  }
  return "?";
}

std::optional<FunctionKind> parse_function_kind(std::string_view text) {
  if (text == "added") return FunctionKind::Added;
  if (text == "deleted") return FunctionKind::Deleted;
  if (text == "modified") return FunctionKind::Modified;
  return std::nullopt;
}

const FunctionRecord* DiffArtifact::find(std::string_view display_name) const {
  for (const auto& fn : functions) {
    if (fn.id.display_name == display_name) return &fn;
  }
  return nullptr;
}

std::string_view to_string(FssLevel level) {
  switch (level) {
    case FssLevel::None: return "none";
    case FssLevel::Low: return "low";
    case FssLevel::Medium: return "medium";
    case FssLevel::High: return "high";
  }
  return "?";
}

std::string_view category_name(FssCategory category) {
  switch (category) {
    case FssCategory::Behaviors: return "behaviors";
    case FssCategory::Resources: return "resources";
    case FssCategory::Confidentiality: return "confidentiality";
    case FssCategory::Integrity: return "integrity";
    case FssCategory::Availability: return "availability";
  }
  return "?";
}

char category_letter(FssCategory category) {
  switch (category) {
    case FssCategory::Behaviors: return 'B';
    case FssCategory::Resources: return 'R';
    case FssCategory::Confidentiality: return 'C';
    case FssCategory::Integrity: return 'I';
    case FssCategory::Availability: return 'A';
  }
  return '?';
}

char level_letter(FssLevel level) {
  switch (level) {
    case FssLevel::None: return 'N';
    case FssLevel::Low: return 'L';
    case FssLevel::Medium: return 'M';
    case FssLevel::High: return 'H';
  }
  return '?';
}

std::optional<FssLevel> parse_level_word(std::string_view word) {
  std::string lower(word);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (FssLevel level : kAllLevels) {
    if (lower == to_string(level)) return level;
  }
  return std::nullopt;
}

FssLevel FssClassification::get(FssCategory category) const {
  switch (category) {
    case FssCategory::Behaviors: return behaviors;
    case FssCategory::Resources: return resources;
    case FssCategory::Confidentiality: return confidentiality;
    case FssCategory::Integrity: return integrity;
    case FssCategory::Availability: return availability;
  }
  return FssLevel::None;
}

void FssClassification::set(FssCategory category, FssLevel level) {
  switch (category) {
    case FssCategory::Behaviors: behaviors = level; break;
    case FssCategory::Resources: resources = level; break;
    case FssCategory::Confidentiality: confidentiality = level; break;
    case FssCategory::Integrity: integrity = level; break;
    case FssCategory::Availability: availability = level; break;
  }
}

FssClassification FssClassification::merged(const FssClassification& other) const {
  FssClassification out;
  for (FssCategory c : kAllCategories) out.set(c, std::max(get(c), other.get(c)));
  return out;
}

std::string FssScore::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%d.%d", tenths / 10, tenths % 10);
  return buf;
}

std::string_view to_string(VerdictKind verdict) {
  switch (verdict) {
    case VerdictKind::Malicious: return "MALICIOUS";
    case VerdictKind::Benign: return "BENIGN";
    case VerdictKind::Unknown: return "UNKNOWN";
  }
  return "?";
}

bool is_lower_hex(std::string_view text) {
  if (text.empty()) return false;
  return std::all_of(text.begin(), text.end(), [](char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
  });
}

namespace {

void check_meta(const BinaryMeta& meta, std::string_view side, std::vector<std::string>& out) {
  std::string prefix(side);
  if (meta.name.empty()) out.push_back(prefix + ".name: must not be empty");
  if (meta.version.empty()) out.push_back(prefix + ".version: must not be empty");
  if (meta.content_hash.size() != 64 || !is_lower_hex(meta.content_hash)) {
    out.push_back(prefix + ".content_hash: must be 64 lowercase hex characters");
  }
}

void check_function(const FunctionRecord& fn, bool preprocessed, std::vector<std::string>& out) {
  const std::string& name = fn.id.display_name.empty() ? std::string("<unnamed>")
                                                       : fn.id.display_name;
  auto add = [&](const std::string& what) { out.push_back(name + ": " + what); };

  if (fn.id.display_name.empty()) add("display-name must not be empty");
  if (!fn.id.old_address && !fn.id.new_address) add("at least one address is required");
  if (fn.id.old_address && !is_lower_hex(*fn.id.old_address))
    add("old-address must be lowercase hex without 0x prefix");
  if (fn.id.new_address && !is_lower_hex(*fn.id.new_address))
    add("new-address must be lowercase hex without 0x prefix");

  switch (fn.kind) {
    case FunctionKind::Added:
      if (fn.id.old_address) add("Added must not carry old-address");
      if (!fn.id.new_address) add("Added requires new-address");
      if (fn.code_old) add("Added must not carry code-old");
      if (!fn.code_new) add("Added requires code-new");
      break;
    case FunctionKind::Deleted:
      if (fn.id.new_address) add("Deleted must not carry new-address");
      if (!fn.id.old_address) add("Deleted requires old-address");
      if (fn.code_new) add("Deleted must not carry code-new");
      if (!fn.code_old) add("Deleted requires code-old");
      break;
    case FunctionKind::Modified:
      if (!fn.id.old_address || !fn.id.new_address) add("Modified requires both addresses");
      if (!fn.code_old) add("Modified requires code-old");
      if (!fn.code_new) add("Modified requires code-new");
      if (preprocessed && !fn.text_diff) add("Modified requires text-diff after preprocessing");
      break;
  }
  if (fn.kind != FunctionKind::Modified && fn.text_diff) add("only Modified may carry text-diff");

  std::set<std::string_view> seen;
  for (const auto& callee : fn.callees) {
    if (!seen.insert(callee).second) add("duplicate callee '" + callee + "'");
  }
}

}  // namespace

std::vector<std::string> validate_artifact(const DiffArtifact& artifact, bool preprocessed) {
  std::vector<std::string> out;
  check_meta(artifact.old_binary, "old", out);
  check_meta(artifact.new_binary, "new", out);

  std::unordered_map<std::string_view, std::size_t> first_index;
  for (std::size_t i = 0; i < artifact.functions.size(); ++i) {
    const auto& fn = artifact.functions[i];
    check_function(fn, preprocessed, out);
    auto [it, inserted] = first_index.emplace(fn.id.display_name, i);
    if (!inserted) {
      out.push_back("duplicate display-name '" + fn.id.display_name + "': functions[" +
                    std::to_string(it->second) + "] and functions[" + std::to_string(i) + "]");
    }
  }

  if (artifact.function_labels) {
    for (const auto& [name, label] : *artifact.function_labels) {
      if (!first_index.contains(name)) {
        out.push_back("function_labels: '" + name + "' does not name a function in the diff");
      }
    }
  }
  return out;
}

}  // namespace diffsense
