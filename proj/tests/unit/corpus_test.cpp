// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "diffsense/artifact_json.hpp"
#include "diffsense/callgraph.hpp"
#include "diffsense/corpus.hpp"
#include "diffsense/ingest.hpp"
#include "diffsense/io.hpp"
#include "diffsense/llm_backend.hpp"
#include "unit/test_util.hpp"

using namespace diffsense;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> malicious_names(const DiffArtifact& a) {
  std::vector<std::string> out;
  if (!a.function_labels) return out;
  for (const auto& [name, label] : *a.function_labels) {
    if (label == Label::Malicious) out.push_back(name);
  }
  return out;
}

}  // namespace

TEST(Corpus, DefaultSpecShape) {
  corpus::CorpusSpec spec;
  auto entries = corpus::generate(spec);
  ASSERT_EQ(entries.size(), 8u);
  std::size_t clean = 0, injected = 0;
  for (const auto& e : entries) {
    EXPECT_TRUE(validate_artifact(e.artifact).empty()) << e.id;
    if (e.artifact.label == Label::Malicious) {
      ++injected;
      EXPECT_FALSE(malicious_names(e.artifact).empty()) << e.id;
    } else {
      ++clean;
      EXPECT_TRUE(malicious_names(e.artifact).empty()) << e.id;
    }
  }
  EXPECT_EQ(clean, 4u);
  EXPECT_EQ(injected, 4u);
}

TEST(Corpus, DeterministicFiles) {
  test::TempDir a, b;
  corpus::CorpusSpec spec;
  spec.seed = 7;
  corpus::write_corpus(spec, a.path());
  corpus::write_corpus(spec, b.path());
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(a.path())) {
    auto other = b.path() / entry.path().filename();
    ASSERT_TRUE(fs::exists(other));
    EXPECT_EQ(read_text_file(entry.path()), read_text_file(other));
    ++files;
  }
  EXPECT_EQ(files, 9u);

  spec.seed = 8;
  EXPECT_NE(serialize_artifact(corpus::generate(spec)[0].artifact),
            read_text_file(a.path() / (corpus::generate({7, 2, 3, 1.0})[0].id + ".json")));
}

TEST(Corpus, ZeroRateIsAllBenign) {
  auto entries = corpus::generate({42, 3, 4, 0.0});
  EXPECT_EQ(entries.size(), 9u);
  for (const auto& e : entries) EXPECT_EQ(e.artifact.label, Label::Benign);
}

TEST(Corpus, HalfRateInjectsHalfTheSlots) {
  auto entries = corpus::generate({42, 2, 3, 0.5});
  std::size_t injected = 0;
  for (const auto& e : entries) injected += e.artifact.label == Label::Malicious;
  EXPECT_EQ(entries.size(), 6u);
  EXPECT_EQ(injected, 2u);
}

TEST(Corpus, CleanDiffsCarryNoRuleTokens) {
  MockChatBackend mock;
  for (std::uint64_t seed : {1u, 42u, 1234u}) {
    for (const auto& e : corpus::generate({seed, 4, 4, 1.0})) {
      for (const auto& f : e.artifact.functions) {
        bool malicious = e.artifact.function_labels->at(f.name()) == Label::Malicious;
        for (const auto* code : {&f.code_old, &f.code_new}) {
          if (!*code) continue;
          auto cls = mock.classify(**code);
          if (!malicious) EXPECT_EQ(cls, FssClassification{}) << e.id << " " << f.name();
        }
      }
    }
  }
}

TEST(Corpus, PayloadReachableFromOneModifiedTrigger) {
  for (std::uint64_t seed : {3u, 42u, 77u}) {
    for (const auto& e : corpus::generate({seed, 3, 3, 1.0})) {
      if (e.artifact.label != Label::Malicious) continue;
      auto prepared = ingest::canonicalize_names(e.artifact);
      auto graph = build_diff_callgraph(prepared);
      auto bad = malicious_names(prepared);
      std::set<std::string> bad_set(bad.begin(), bad.end());

      std::vector<std::string> triggers;
      for (const auto& [caller, callee] : graph.edges) {
        if (!bad_set.contains(caller) && bad_set.contains(callee)) triggers.push_back(caller);
      }
      ASSERT_EQ(triggers.size(), 1u) << e.id;
      EXPECT_EQ(prepared.find(triggers[0])->kind, FunctionKind::Modified);

      std::set<std::string> seen;
      std::vector<std::string> stack{triggers[0]};
      while (!stack.empty()) {
        auto cur = stack.back();
        stack.pop_back();
        for (const auto& next : graph.callees_of(cur)) {
          if (bad_set.contains(next) && seen.insert(next).second) stack.push_back(next);
        }
      }
      EXPECT_EQ(seen, bad_set) << e.id;
    }
  }
}

TEST(Manifest, ListsCorpusAndRoundTrips) {
  test::TempDir dir;
  auto rows = corpus::write_corpus({}, dir.path());
  EXPECT_EQ(rows.size(), 8u);
  auto scanned = corpus::corpus_manifest(dir.path());
  ASSERT_EQ(scanned.size(), 8u);
  auto read = corpus::read_manifest(dir.path() / "manifest.json");
  ASSERT_EQ(read.size(), 8u);
  for (std::size_t i = 0; i < read.size(); ++i) {
    EXPECT_EQ(read[i].path, rows[i].path);
    EXPECT_EQ(read[i].label, rows[i].label);
  }
}

TEST(Manifest, EmptyDirAndCorruptFile) {
  test::TempDir dir;
  EXPECT_TRUE(corpus::corpus_manifest(dir.path()).empty());
  write_text_file(dir.path() / "bad.json", "{ nope");
  try {
    corpus::corpus_manifest(dir.path());
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.json"), std::string::npos);
  }
}
