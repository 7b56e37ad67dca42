// SPDX-License-Identifier: Apache-2.0

#include "diffsense/artifact_json.hpp"

#include <initializer_list>
#include <nlohmann/json.hpp>

namespace diffsense {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

class Reader {
 public:
  Reader(ParseMode mode, std::vector<std::string>& warnings) : mode_(mode), warnings_(warnings) {}

  [[noreturn]] void fail(const std::string& path, const std::string& what) const {
    throw SchemaError(path + ": " + what);
  }

  void check_keys(const json& obj, const std::string& path,
                  std::initializer_list<std::string_view> known) const {
    for (const auto& [key, value] : obj.items()) {
      bool found = false;
      for (auto k : known) found = found || key == k;
      if (found) continue;
      std::string where = path.empty() ? key : path + "." + key;
      if (mode_ == ParseMode::Strict) fail(where, "unknown field");
      warnings_.push_back(where + ": unknown field ignored");
    }
  }

  const json& object(const json& parent, std::string_view key, const std::string& path) const {
    auto it = parent.find(key);
    if (it == parent.end()) fail(path, "missing");
    if (!it->is_object()) fail(path, "expected object");
    return *it;
  }

  std::string string(const json& parent, std::string_view key, const std::string& path) const {
    auto it = parent.find(key);
    if (it == parent.end()) fail(path, "missing");
    if (!it->is_string()) fail(path, "expected string");
    return it->get<std::string>();
  }

  std::optional<std::string> opt_string(const json& parent, std::string_view key,
                                        const std::string& path) const {
    auto it = parent.find(key);
    if (it == parent.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) fail(path, "expected string or null");
    return it->get<std::string>();
  }

 private:
  ParseMode mode_;
  std::vector<std::string>& warnings_;
};

BinaryMeta read_meta(const Reader& r, const json& root, std::string_view side) {
  std::string path(side);
  const json& obj = r.object(root, side, path);
  r.check_keys(obj, path,
               {"name", "version", "content_hash", "project_description", "changelog"});
  BinaryMeta meta;
  meta.name = r.string(obj, "name", path + ".name");
  meta.version = r.string(obj, "version", path + ".version");
  meta.content_hash = r.string(obj, "content_hash", path + ".content_hash");
  meta.project_description = r.string(obj, "project_description", path + ".project_description");
  meta.changelog = r.opt_string(obj, "changelog", path + ".changelog");
  return meta;
}

FunctionRecord read_function(const Reader& r, const json& obj, const std::string& path) {
  if (!obj.is_object()) r.fail(path, "expected object");
  r.check_keys(obj, path,
               {"kind", "old_address", "new_address", "display_name", "code_old", "code_new",
                "callees", "text_diff"});
  FunctionRecord fn;
  std::string kind = r.string(obj, "kind", path + ".kind");
  auto parsed = parse_function_kind(kind);
  if (!parsed) r.fail(path + ".kind", "invalid kind '" + kind + "'");
  fn.kind = *parsed;
  fn.id.old_address = r.opt_string(obj, "old_address", path + ".old_address");
  fn.id.new_address = r.opt_string(obj, "new_address", path + ".new_address");
  fn.id.display_name = r.string(obj, "display_name", path + ".display_name");
  fn.code_old = r.opt_string(obj, "code_old", path + ".code_old");
  fn.code_new = r.opt_string(obj, "code_new", path + ".code_new");
  fn.text_diff = r.opt_string(obj, "text_diff", path + ".text_diff");

  auto callees = obj.find("callees");
  if (callees == obj.end()) r.fail(path + ".callees", "missing");
  if (!callees->is_array()) r.fail(path + ".callees", "expected array");
  for (std::size_t i = 0; i < callees->size(); ++i) {
    const auto& c = (*callees)[i];
    if (!c.is_string()) r.fail(path + ".callees[" + std::to_string(i) + "]", "expected string");
    fn.callees.push_back(c.get<std::string>());
  }
  return fn;
}

ordered_json write_meta(const BinaryMeta& meta) {
  ordered_json obj;
  obj["name"] = meta.name;
  obj["version"] = meta.version;
  obj["content_hash"] = meta.content_hash;
  obj["project_description"] = meta.project_description;
  if (meta.changelog) obj["changelog"] = *meta.changelog;
  return obj;
}

}  // namespace

ParsedArtifact parse_artifact(std::string_view json_text, ParseMode mode) {
  ParsedArtifact out;
  Reader r(mode, out.warnings);

  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("<document>: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) r.fail("<document>", "expected object");

  auto version = root.find("schema_version");
  if (version == root.end()) r.fail("schema_version", "missing");
  if (!version->is_number_integer()) r.fail("schema_version", "expected integer");
  if (version->get<long long>() != kArtifactSchemaVersion) {
    r.fail("schema_version",
           "unsupported schema version " + std::to_string(version->get<long long>()));
  }
  r.check_keys(root, "",
               {"schema_version", "old", "new", "functions", "label", "function_labels"});

  DiffArtifact& a = out.artifact;
  a.old_binary = read_meta(r, root, "old");
  a.new_binary = read_meta(r, root, "new");

  auto fns = root.find("functions");
  if (fns == root.end()) r.fail("functions", "missing");
  if (!fns->is_array()) r.fail("functions", "expected array");
  for (std::size_t i = 0; i < fns->size(); ++i) {
    a.functions.push_back(read_function(r, (*fns)[i], "functions[" + std::to_string(i) + "]"));
  }

  if (auto label = r.opt_string(root, "label", "label")) {
    auto parsed = parse_label(*label);
    if (!parsed) r.fail("label", "invalid label '" + *label + "'");
    a.label = parsed;
  }

  auto labels = root.find("function_labels");
  if (labels != root.end() && !labels->is_null()) {
    if (!labels->is_object()) r.fail("function_labels", "expected object");
    std::map<std::string, Label> map;
    for (const auto& [name, value] : labels->items()) {
      std::string path = "function_labels." + name;
      if (!value.is_string()) r.fail(path, "expected string");
      auto parsed = parse_label(value.get<std::string>());
      if (!parsed) r.fail(path, "invalid label '" + value.get<std::string>() + "'");
      map.emplace(name, *parsed);
    }
    a.function_labels = std::move(map);
  }

  auto violations = validate_artifact(a);
  if (!violations.empty()) {
    if (mode == ParseMode::Strict) throw SchemaError(violations.front());
    for (auto& v : violations) out.warnings.push_back(std::move(v));
  }
  return out;
}

std::string serialize_artifact(const DiffArtifact& a) {
  ordered_json root;
  root["schema_version"] = kArtifactSchemaVersion;
  root["old"] = write_meta(a.old_binary);
  root["new"] = write_meta(a.new_binary);
  ordered_json fns = ordered_json::array();
  for (const auto& fn : a.functions) {
    ordered_json obj;
    obj["kind"] = to_string(fn.kind);
    if (fn.id.old_address) obj["old_address"] = *fn.id.old_address;
    if (fn.id.new_address) obj["new_address"] = *fn.id.new_address;
    obj["display_name"] = fn.id.display_name;
    if (fn.code_old) obj["code_old"] = *fn.code_old;
    if (fn.code_new) obj["code_new"] = *fn.code_new;
    obj["callees"] = fn.callees;
    if (fn.text_diff) obj["text_diff"] = *fn.text_diff;
    fns.push_back(std::move(obj));
  }
  root["functions"] = std::move(fns);
  if (a.label) root["label"] = to_string(*a.label);
  if (a.function_labels) {
    ordered_json labels = ordered_json::object();
    for (const auto& [name, label] : *a.function_labels) labels[name] = to_string(label);
    root["function_labels"] = std::move(labels);
  }
  return root.dump(2, ' ', false, ordered_json::error_handler_t::replace) + "\n";
}

}  // namespace diffsense
