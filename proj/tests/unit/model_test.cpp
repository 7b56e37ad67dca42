// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "diffsense/artifact_json.hpp"
#include "diffsense/corpus.hpp"
#include "diffsense/hash.hpp"

using namespace diffsense;

namespace {

const std::string kHash(64, 'a');

std::string meta(const std::string& version) {
  return R"({"name": "demo", "version": ")" + version + R"(", "content_hash": ")" + kHash +
         R"(", "project_description": "demo library"})";
}

std::string artifact_with(const std::string& functions, const std::string& extra = "") {
  return R"({"schema_version": 1, "old": )" + meta("1.0") + R"(, "new": )" + meta("1.1") +
         R"(, "functions": )" + functions + extra + "}";
}

std::string schema_error(const std::string& text, ParseMode mode = ParseMode::Strict) {
  try {
    parse_artifact(text, mode);
  } catch (const SchemaError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Artifact, ParsesMinimalDocument) {
  auto parsed = parse_artifact(artifact_with(
      R"([{"kind": "added", "new_address": "401000", "display_name": "FUN_00401000",
           "code_new": "void f(void) {}", "callees": []}])"));
  ASSERT_EQ(parsed.artifact.functions.size(), 1u);
  EXPECT_EQ(parsed.artifact.functions[0].kind, FunctionKind::Added);
  EXPECT_FALSE(parsed.artifact.label.has_value());
  EXPECT_TRUE(parsed.warnings.empty());
}

TEST(Artifact, ErrorsNameTheFieldPath) {
  EXPECT_NE(schema_error(artifact_with(R"([{"display_name": "f", "callees": []}])"))
                .find("functions[0].kind"),
            std::string::npos);
  EXPECT_NE(schema_error(R"({"schema_version": 2})").find("schema_version"), std::string::npos);
  EXPECT_NE(schema_error("not json").size(), 0u);
}

TEST(Artifact, StrictRejectsUnknownFieldsLenientWarns) {
  auto text = artifact_with("[]", R"(, "extra": true)");
  EXPECT_NE(schema_error(text).find("extra"), std::string::npos);
  auto parsed = parse_artifact(text, ParseMode::Lenient);
  ASSERT_EQ(parsed.warnings.size(), 1u);
  EXPECT_NE(parsed.warnings[0].find("extra"), std::string::npos);
}

TEST(Artifact, InvariantViolations) {
  // Added function carrying old code.
  EXPECT_FALSE(schema_error(artifact_with(
                   R"([{"kind": "added", "new_address": "1", "display_name": "f",
                        "code_old": "x", "code_new": "y", "callees": []}])"))
                   .empty());
  // Duplicate display names.
  auto dup = artifact_with(
      R"([{"kind": "added", "new_address": "1", "display_name": "f", "code_new": "y", "callees": []},
          {"kind": "added", "new_address": "2", "display_name": "f", "code_new": "z", "callees": []}])");
  EXPECT_NE(schema_error(dup).find("duplicate display-name"), std::string::npos);
  // Uppercase hex address.
  EXPECT_FALSE(schema_error(artifact_with(
                   R"([{"kind": "added", "new_address": "ABC", "display_name": "f",
                        "code_new": "y", "callees": []}])"))
                   .empty());
  // Function label for a name that is not in the diff.
  EXPECT_FALSE(schema_error(artifact_with("[]", R"(, "function_labels": {"ghost": "benign"})"))
                   .empty());
}

TEST(Artifact, SerializeRoundTripsGeneratedCorpus) {
  corpus::CorpusSpec spec;
  for (const auto& e : corpus::generate(spec)) {
    auto text = serialize_artifact(e.artifact);
    auto back = parse_artifact(text).artifact;
    EXPECT_EQ(back, e.artifact) << e.id;
    EXPECT_EQ(serialize_artifact(back), text);
  }
}

TEST(Model, ClassificationMerge) {
  FssClassification a{FssLevel::High, FssLevel::None, FssLevel::Low, FssLevel::None, FssLevel::None};
  FssClassification b{FssLevel::Low, FssLevel::Medium, FssLevel::None, FssLevel::None,
                      FssLevel::High};
  auto m = a.merged(b);
  EXPECT_EQ(m, (FssClassification{FssLevel::High, FssLevel::Medium, FssLevel::Low, FssLevel::None,
                                  FssLevel::High}));
}

TEST(Model, LabelAndLevelParsing) {
  EXPECT_EQ(parse_label("malicious"), Label::Malicious);
  EXPECT_FALSE(parse_label("evil").has_value());
  EXPECT_EQ(parse_level_word("HIGH"), FssLevel::High);
  EXPECT_EQ(parse_level_word("none"), FssLevel::None);
  EXPECT_FALSE(parse_level_word("severe").has_value());
}

TEST(Hash, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
