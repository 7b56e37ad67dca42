// SPDX-License-Identifier: Apache-2.0

#include "diffsense/ingest.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "diffsense/io.hpp"
#include "diffsense/textdiff.hpp"

namespace diffsense::ingest {

namespace {

bool is_ident_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

}  // namespace

DiffArtifact load_artifact(const std::filesystem::path& path, ParseMode mode) {
  std::string text = read_text_file(path);
  try {
    return parse_artifact(text, mode).artifact;
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

void save_artifact(const std::filesystem::path& path, const DiffArtifact& artifact) {
  write_text_file(path, serialize_artifact(artifact));
}

std::string canonical_name(std::string_view old_address, std::string_view new_address) {
  return "mod_" + std::string(old_address) + "_" + std::string(new_address);
}

std::string replace_token(std::string_view text, std::string_view token,
                          std::string_view replacement) {
  if (token.empty()) return std::string(text);
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (true) {
    auto hit = text.find(token, pos);
    if (hit == std::string_view::npos) break;
    std::size_t end = hit + token.size();
    bool left_ok = hit == 0 || !is_ident_char(text[hit - 1]);
    bool right_ok = end == text.size() || !is_ident_char(text[end]);
    if (left_ok && right_ok) {
      out.append(text.substr(pos, hit - pos));
      out.append(replacement);
      pos = end;
    } else {
      out.append(text.substr(pos, hit + 1 - pos));
      pos = hit + 1;
    }
  }
  out.append(text.substr(pos));
  return out;
}

DiffArtifact canonicalize_names(DiffArtifact artifact) {
  struct Rename {
    std::string from_display;
    std::string old_token;
    std::string new_token;
    std::string canonical;
  };
  std::vector<Rename> renames;
  std::set<std::string> display_names;
  for (const auto& fn : artifact.functions) display_names.insert(fn.id.display_name);

  std::map<std::string, std::string> owner;  // final name -> original display name
  for (const auto& fn : artifact.functions) {
    std::string final_name = fn.id.display_name;
    if (fn.kind == FunctionKind::Modified && fn.id.old_address && fn.id.new_address) {
      final_name = canonical_name(*fn.id.old_address, *fn.id.new_address);
      renames.push_back({fn.id.display_name, "FUN_" + *fn.id.old_address,
                         "FUN_" + *fn.id.new_address, final_name});
    }
    auto [it, inserted] = owner.emplace(final_name, fn.id.display_name);
    if (!inserted) {
      throw Error("canonical name collision: '" + it->second + "' and '" + fn.id.display_name +
                  "' both map to '" + final_name + "'");
    }
  }
  if (renames.empty()) return artifact;

  // Callee strings are display names. Address tokens are only consulted
  // when they do not already name some other function of the diff.
  std::map<std::string, std::string> display_map;
  for (const auto& r : renames) display_map[r.from_display] = r.canonical;
  std::map<std::string, std::string> callee_map = display_map;
  for (const auto& r : renames) {
    for (const auto* token : {&r.old_token, &r.new_token}) {
      if (!display_names.contains(*token)) callee_map.emplace(*token, r.canonical);
    }
  }

  std::size_t next_rename = 0;
  for (auto& fn : artifact.functions) {
    if (fn.kind == FunctionKind::Modified && fn.id.old_address && fn.id.new_address) {
      fn.id.display_name = renames[next_rename++].canonical;
    }
    for (const auto& r : renames) {
      if (fn.code_old) fn.code_old = replace_token(*fn.code_old, r.old_token, r.canonical);
      if (fn.code_new) fn.code_new = replace_token(*fn.code_new, r.new_token, r.canonical);
    }
    std::vector<std::string> callees;
    for (const auto& callee : fn.callees) {
      auto it = callee_map.find(callee);
      const std::string& name = it == callee_map.end() ? callee : it->second;
      if (std::find(callees.begin(), callees.end(), name) == callees.end()) {
        callees.push_back(name);
      }
    }
    fn.callees = std::move(callees);
  }

  if (artifact.function_labels) {
    std::map<std::string, Label> relabeled;
    for (const auto& [name, label] : *artifact.function_labels) {
      auto it = display_map.find(name);
      relabeled.emplace(it == display_map.end() ? name : it->second, label);
    }
    artifact.function_labels = std::move(relabeled);
  }
  return artifact;
}

DiffArtifact compute_text_diffs(DiffArtifact artifact, std::size_t context) {
  for (auto& fn : artifact.functions) {
    if (fn.kind != FunctionKind::Modified) continue;
    fn.text_diff =
        textdiff::unified_diff(fn.code_old.value_or(""), fn.code_new.value_or(""), context).text;
  }
  return artifact;
}

DiffArtifact prepare(DiffArtifact artifact) {
  return compute_text_diffs(canonicalize_names(std::move(artifact)));
}

}  // namespace diffsense::ingest
