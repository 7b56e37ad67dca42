// SPDX-License-Identifier: Apache-2.0

#include "diffsense/codec.hpp"

#include <cstdio>

#include "diffsense/fss.hpp"

namespace diffsense::codec {

namespace {

template <typename T>
T field(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(std::string(key) + ": missing");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw SchemaError(std::string(key) + ": wrong type");
  }
}

std::optional<std::string> opt_string(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw SchemaError(std::string(key) + ": wrong type");
  return it->get<std::string>();
}

FunctionId id_from_json(const Json& j) {
  FunctionId id;
  id.display_name = field<std::string>(j, "name");
  id.old_address = opt_string(j, "old_address");
  id.new_address = opt_string(j, "new_address");
  return id;
}

int parse_tenths(const std::string& text) {
  auto dot = text.find('.');
  if (dot == std::string::npos || dot + 2 != text.size())
    throw SchemaError("score: expected one decimal, got '" + text + "'");
  try {
    return std::stoi(text.substr(0, dot)) * 10 + (text[dot + 1] - '0');
  } catch (const std::exception&) {
    throw SchemaError("score: malformed '" + text + "'");
  }
}

}  // namespace

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

Json to_json(const TokenUsage& usage) {
  Json j;
  j["input_tokens"] = usage.input_tokens;
  j["output_tokens"] = usage.output_tokens;
  return j;
}

Json to_json(const FunctionId& id) {
  Json j;
  j["name"] = id.display_name;
  if (id.old_address) j["old_address"] = *id.old_address;
  if (id.new_address) j["new_address"] = *id.new_address;
  return j;
}

Json to_json(const FunctionAnalysis& a) {
  Json j = to_json(a.id);
  j["kind"] = to_string(a.kind);
  j["summary"] = a.summary;
  if (a.diff_summary) j["diff_summary"] = *a.diff_summary;
  j["vector"] = fss::format_vector(a.classification);
  j["score"] = a.score.to_string();
  j["sensitivity"] = format_fixed(a.score.sensitivity, 6);
  j["impact"] = format_fixed(a.score.impact, 6);
  j["usage"] = to_json(a.usage);
  return j;
}

Json to_json(const DiffVerdict& v) {
  Json j;
  j["verdict"] = to_string(v.verdict);
  j["rationale"] = v.rationale;
  Json top = Json::array();
  for (const auto& f : v.top_functions) {
    Json row;
    row["name"] = f.id.display_name;
    row["score"] = f.score.to_string();
    row["vector"] = fss::format_vector(f.classification);
    top.push_back(std::move(row));
  }
  j["top_functions"] = std::move(top);
  j["usage"] = to_json(v.usage);
  return j;
}

TokenUsage usage_from_json(const Json& j) {
  TokenUsage u;
  u.input_tokens = field<std::uint64_t>(j, "input_tokens");
  u.output_tokens = field<std::uint64_t>(j, "output_tokens");
  return u;
}

FunctionAnalysis analysis_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaError("analysis: expected object");
  FunctionAnalysis a;
  a.id = id_from_json(j);
  auto kind = parse_function_kind(field<std::string>(j, "kind"));
  if (!kind) throw SchemaError("kind: invalid");
  a.kind = *kind;
  a.summary = field<std::string>(j, "summary");
  a.diff_summary = opt_string(j, "diff_summary");
  try {
    a.classification = fss::parse_vector(field<std::string>(j, "vector"));
  } catch (const ParseError& e) {
    throw SchemaError(std::string("vector: ") + e.what());
  }
  a.score = fss::score(a.classification);
  if (a.score.tenths != parse_tenths(field<std::string>(j, "score"))) {
    throw SchemaError("score: does not match vector");
  }
  auto usage = j.find("usage");
  if (usage == j.end()) throw SchemaError("usage: missing");
  a.usage = usage_from_json(*usage);
  return a;
}

DiffVerdict verdict_from_json(const Json& j) {
  DiffVerdict v;
  auto verdict = field<std::string>(j, "verdict");
  if (verdict == "MALICIOUS") v.verdict = VerdictKind::Malicious;
  else if (verdict == "BENIGN") v.verdict = VerdictKind::Benign;
  else if (verdict == "UNKNOWN") v.verdict = VerdictKind::Unknown;
  else throw SchemaError("verdict: invalid '" + verdict + "'");
  v.rationale = field<std::string>(j, "rationale");
  for (const auto& row : field<Json>(j, "top_functions")) {
    RankedFunction f;
    f.id.display_name = field<std::string>(row, "name");
    f.classification = fss::parse_vector(field<std::string>(row, "vector"));
    f.score = fss::score(f.classification);
    v.top_functions.push_back(std::move(f));
  }
  if (auto usage = j.find("usage"); usage != j.end()) v.usage = usage_from_json(*usage);
  return v;
}

}  // namespace diffsense::codec
