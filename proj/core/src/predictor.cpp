// SPDX-License-Identifier: Apache-2.0

#include "diffsense/predictor.hpp"

#include <algorithm>

#include "diffsense/fss.hpp"

namespace diffsense::predictor {

namespace {

constexpr std::string_view kSystemPrompt =
    "You are a software supply chain security analyst. You review summaries of the functions "
    "that changed between two consecutive releases of a program and decide whether the "
    "update is an ordinary release or carries injected malicious code. Judge whether the "
    "changes fit what the project is supposed to do.";

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::vector<FunctionAnalysis> select_top_k(const std::map<std::string, FunctionAnalysis>& analyses,
                                           std::size_t k) {
  if (k == 0) throw ConfigError("k must be at least 1");
  std::vector<FunctionAnalysis> all;
  all.reserve(analyses.size());
  for (const auto& [name, a] : analyses) all.push_back(a);
  auto before = [](const FunctionAnalysis& x, const FunctionAnalysis& y) {
    if (x.score.tenths != y.score.tenths) return x.score.tenths > y.score.tenths;
    return x.id.display_name < y.id.display_name;
  };
  std::size_t n = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n), all.end(), before);
  all.resize(n);
  return all;
}

std::vector<ChatMessage> build_prediction_prompt(std::span<const FunctionAnalysis> top,
                                                 const BinaryMeta& old_meta,
                                                 const BinaryMeta& new_meta,
                                                 bool include_changelog) {
  std::string user(kPredictionMarker);
  user += "\nProject: " + new_meta.name + "\n";
  user += "Description: " +
          (new_meta.project_description.empty() ? std::string("(none)")
                                                : new_meta.project_description) +
          "\n";
  user += "Update: " + old_meta.version + " -> " + new_meta.version + "\n";

  user += "\n## Most sensitive changed functions (top " + std::to_string(top.size()) +
          " by FSS)\n";
  for (std::size_t i = 0; i < top.size(); ++i) {
    const auto& a = top[i];
    user += "\n### " + std::to_string(i + 1) + ". " + a.id.display_name + "\n";
    user += std::string(kRankedScorePrefix) + a.score.to_string() + " (" +
            fss::format_vector(a.classification) + ")\n";
    user += "Change: " + std::string(to_string(a.kind)) + "\n";
    user += "Summary: " + a.summary + "\n";
    if (a.diff_summary) user += "Diff summary: " + *a.diff_summary + "\n";
  }

  if (include_changelog && new_meta.changelog) {
    user += "\n## Changelog\n" + *new_meta.changelog;
    if (!user.ends_with('\n')) user += '\n';
  }

  user +=
      "\nDo these changes match the project description and the kind of work expected in a "
      "release, or do they add behaviour that looks like injected malware? Explain your "
      "reasoning briefly, then finish with a final line that is exactly `VERDICT: MALICIOUS` "
      "or `VERDICT: BENIGN`.\n";
  return {{Role::System, std::string(kSystemPrompt)}, {Role::User, std::move(user)}};
}

std::optional<VerdictKind> parse_verdict(std::string_view reply) {
  std::string lower(reply);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  std::optional<VerdictKind> found;
  std::size_t pos = 0;
  while ((pos = lower.find("verdict:", pos)) != std::string::npos) {
    pos += 8;
    auto word = lower.find_first_not_of(" \t*`", pos);
    if (word == std::string::npos) break;
    std::string_view rest = std::string_view(lower).substr(word);
    if (rest.starts_with("malicious")) found = VerdictKind::Malicious;
    else if (rest.starts_with("benign")) found = VerdictKind::Benign;
  }
  return found;
}

DiffVerdict predict(ChatBackend& backend, const DiffArtifact& artifact,
                    const std::map<std::string, FunctionAnalysis>& analyses,
                    const PredictConfig& config) {
  DiffVerdict out;
  if (config.k == 0) throw ConfigError("k must be at least 1");
  if (artifact.functions.empty()) {
    out.verdict = VerdictKind::Benign;
    out.rationale = "no changes";
    return out;
  }
  auto top = select_top_k(analyses, config.k);
  for (const auto& a : top) out.top_functions.push_back({a.id, a.score, a.classification});
  if (top.empty()) {
    out.verdict = VerdictKind::Unknown;
    out.rationale = "no function analyses available";
    return out;
  }

  auto conversation = build_prediction_prompt(top, artifact.old_binary, artifact.new_binary,
                                              config.include_changelog);
  for (int attempt = 0; attempt < 2; ++attempt) {
    auto completion = backend.complete(conversation);
    out.usage += completion.usage;
    out.rationale = trim(completion.reply);
    if (auto verdict = parse_verdict(completion.reply)) {
      out.verdict = *verdict;
      return out;
    }
    conversation.push_back(
        {Role::Assistant, completion.reply.empty() ? "(empty reply)" : completion.reply});
    conversation.push_back({Role::User,
                            "Your answer has no verdict line. Finish with a final line that is "
                            "exactly `VERDICT: MALICIOUS` or `VERDICT: BENIGN`."});
  }
  out.verdict = VerdictKind::Unknown;
  return out;
}

}  // namespace diffsense::predictor
