// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>

#include "diffsense/callgraph.hpp"
#include "diffsense/corpus.hpp"
#include "diffsense/fss.hpp"
#include "diffsense/ingest.hpp"
#include "diffsense/llm_backend.hpp"
#include "diffsense/pipeline.hpp"
#include "diffsense/textdiff.hpp"

using namespace diffsense;

namespace {

void BM_FssAllVectors(benchmark::State& state) {
  constexpr FssLevel kLevels[] = {FssLevel::None, FssLevel::Low, FssLevel::Medium, FssLevel::High};
  for (auto _ : state) {
    int sum = 0;
    for (auto b : kLevels)
      for (auto r : kLevels)
        for (auto c : kLevels)
          for (auto i : kLevels)
            for (auto a : kLevels) sum += fss::score({b, r, c, i, a}).tenths;
    benchmark::DoNotOptimize(sum);
  }
  state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(BM_FssAllVectors);

std::string code_lines(std::size_t n, std::mt19937_64& rng) {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) out += "  local_" + std::to_string(rng() % 40) + " = 0;\n";
  return out;
}

void BM_UnifiedDiff(benchmark::State& state) {
  std::mt19937_64 rng(1);
  auto n = static_cast<std::size_t>(state.range(0));
  std::string a = code_lines(n, rng), b = a;
  for (int k = 0; k < 8; ++k) {
    auto at = b.find('\n', rng() % b.size());
    if (at != std::string::npos) b.insert(at + 1, "  edited();\n");
  }
  for (auto _ : state) benchmark::DoNotOptimize(textdiff::unified_diff(a, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_UnifiedDiff)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

DiffCallgraph random_graph(std::size_t n, std::mt19937_64& rng) {
  DiffCallgraph g;
  auto name = [](std::size_t i) { return "f" + std::to_string(i); };
  for (std::size_t i = 0; i < n; ++i) g.nodes.insert(name(i));
  for (std::size_t i = 0; i < n; ++i) {
    for (int e = 0; e < 3; ++e) g.edges.emplace(name(i), name(rng() % n));
  }
  return g;
}

void BM_Schedule(benchmark::State& state) {
  std::mt19937_64 rng(2);
  auto g = random_graph(static_cast<std::size_t>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(schedule(g));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Schedule)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

void BM_Prepare(benchmark::State& state) {
  auto entries = corpus::generate({42, 1, 2, 1.0});
  const auto& artifact = entries.back().artifact;
  for (auto _ : state) benchmark::DoNotOptimize(ingest::prepare(artifact));
}
BENCHMARK(BM_Prepare);

void BM_AnalyzeMock(benchmark::State& state) {
  auto entries = corpus::generate({42, 1, 2, 1.0});
  const auto& artifact = entries.back().artifact;
  AppConfig cfg;
  for (auto _ : state) {
    MockChatBackend mock;
    benchmark::DoNotOptimize(pipeline::analyze(artifact, mock, mock, cfg));
  }
}
BENCHMARK(BM_AnalyzeMock)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
