// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "diffsense/ingest.hpp"
#include "diffsense/io.hpp"
#include "unit/test_util.hpp"

using namespace diffsense;

namespace {

FunctionRecord modified(std::string old_addr, std::string new_addr, std::string code_old,
                        std::string code_new, std::vector<std::string> callees = {}) {
  FunctionRecord r;
  r.kind = FunctionKind::Modified;
  r.id.old_address = old_addr;
  r.id.new_address = new_addr;
  r.id.display_name = "FUN_" + old_addr;
  r.code_old = std::move(code_old);
  r.code_new = std::move(code_new);
  r.callees = std::move(callees);
  return r;
}

}  // namespace

TEST(Ingest, CanonicalName) {
  EXPECT_EQ(ingest::canonical_name("00101000", "00102000"), "mod_00101000_00102000");
}

TEST(Ingest, ReplaceTokenRespectsIdentifierBoundaries) {
  EXPECT_EQ(ingest::replace_token("FUN_10(FUN_100,xFUN_10,FUN_10_a,FUN_10);", "FUN_10", "g"),
            "g(FUN_100,xFUN_10,FUN_10_a,g);");
}

TEST(Ingest, RenameRemovesAddressOnlyDifferences) {
  DiffArtifact a;
  a.old_binary.name = a.new_binary.name = "demo";
  a.old_binary.version = "1.0";
  a.new_binary.version = "1.1";
  a.old_binary.content_hash = std::string(64, 'a');
  a.new_binary.content_hash = std::string(64, 'b');
  a.functions.push_back(modified("00101000", "00105000",
                                 "int FUN_00101000(void)\n{\n  return FUN_00101100(1);\n}\n",
                                 "int FUN_00105000(void)\n{\n  return FUN_00105100(1);\n}\n",
                                 {"FUN_00105100"}));
  a.functions.push_back(modified("00101100", "00105100",
                                 "int FUN_00101100(int x)\n{\n  return x;\n}\n",
                                 "int FUN_00105100(int x)\n{\n  return x;\n}\n"));
  auto raw = ingest::compute_text_diffs(a);
  EXPECT_FALSE(raw.functions[0].text_diff->empty());

  auto p = ingest::prepare(a);
  for (const auto& f : p.functions) {
    ASSERT_TRUE(f.text_diff.has_value());
    EXPECT_EQ(*f.text_diff, "") << f.name();
  }
  EXPECT_EQ(p.functions[0].name(), "mod_00101000_00105000");
  EXPECT_EQ(p.functions[0].callees, std::vector<std::string>{"mod_00101100_00105100"});
  EXPECT_TRUE(validate_artifact(p, true).empty());
}

TEST(Ingest, CanonicalizationIsIdempotentAndRenamesLabels) {
  DiffArtifact a;
  a.functions.push_back(modified("0010a000", "0010b000", "void FUN_0010a000(void)\n{\n}\n",
                                 "void FUN_0010b000(void)\n{\n  FUN_0010c000();\n}\n",
                                 {"FUN_0010c000"}));
  FunctionRecord added;
  added.kind = FunctionKind::Added;
  added.id.new_address = "0010c000";
  added.id.display_name = "FUN_0010c000";
  added.code_new = "void FUN_0010c000(void)\n{\n}\n";
  a.functions.push_back(added);
  a.function_labels = std::map<std::string, Label>{{"FUN_0010a000", Label::Benign},
                                                   {"FUN_0010c000", Label::Malicious}};
  auto once = ingest::canonicalize_names(a);
  EXPECT_EQ(ingest::canonicalize_names(once), once);
  EXPECT_EQ(once.function_labels->at("mod_0010a000_0010b000"), Label::Benign);
  EXPECT_EQ(once.functions[0].callees, std::vector<std::string>{"FUN_0010c000"});
}

TEST(Ingest, NameCollisionIsAnError) {
  DiffArtifact a;
  a.functions.push_back(modified("00001000", "00002000", "a\n", "b\n"));
  FunctionRecord clash;
  clash.kind = FunctionKind::Added;
  clash.id.new_address = "00009000";
  clash.id.display_name = "mod_00001000_00002000";
  clash.code_new = "c\n";
  a.functions.push_back(clash);
  EXPECT_THROW(ingest::canonicalize_names(a), Error);
}

TEST(Ingest, LoadReportsPath) {
  test::TempDir dir;
  auto path = dir.path() / "broken.json";
  write_text_file(path, "{\"schema_version\": 1,");
  try {
    ingest::load_artifact(path);
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("broken.json"), std::string::npos);
  }
  EXPECT_THROW(ingest::load_artifact(dir.path() / "missing.json"), IoError);
}
