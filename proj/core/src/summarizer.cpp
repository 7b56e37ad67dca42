// SPDX-License-Identifier: Apache-2.0

#include "diffsense/summarizer.hpp"

#include <algorithm>
#include <condition_variable>
#include <mutex>
#include <nlohmann/json.hpp>
#include <set>
#include <thread>

#include "diffsense/codec.hpp"
#include "diffsense/fss.hpp"
#include "diffsense/hash.hpp"
#include "diffsense/io.hpp"
#include "diffsense/textdiff.hpp"

namespace diffsense::summarizer {

namespace {

constexpr std::string_view kSystemPrompt =
    "You are a reverse engineer reviewing a software update of a stripped binary. You are "
    "given one function at a time as decompiled pseudo-C, together with short summaries of "
    "the changed functions it calls. Explain what the function does in two to four "
    "sentences. For modified functions also explain what the update changed.\n"
    "\n"
    "Answer with a single fenced JSON block and nothing else inside the fence:\n"
    "```json\n"
    "{\"summary\": \"<what the function does>\", \"diff_summary\": \"<what changed, modified "
    "functions only>\"}\n"
    "```";

constexpr std::string_view kFssRequest =
    "Classify the function you just summarized. Rate each category as none, low, medium "
    "or high.\n"
    "\n"
    "- behaviors: sensitive behaviors, for example reading system info, opening sockets, "
    "forking processes\n"
    "- resources: sensitive resources, for example network, system files, hardware devices\n"
    "- confidentiality: confidentiality impact, for example sending files over network, "
    "reading passwords or keys\n"
    "- integrity: integrity impact, for example modifying system configuration, overwriting "
    "files, encrypting data\n"
    "- availability: availability impact, for example disabling system services, consuming "
    "unnecessary resources\n"
    "\n"
    "Levels:\n"
    "- none: the function shows nothing of this kind\n"
    "- low: incidental or indirect, e.g. querying the hostname for a log line\n"
    "- medium: deliberate but limited, e.g. reading a user-owned configuration file\n"
    "- high: central to the function, e.g. opening a network connection or rewriting "
    "system files\n"
    "\n"
    "Answer with a single fenced JSON block using exactly these keys and only the values "
    "none, low, medium, high:\n"
    "```json\n"
    "{\"behaviors\": \"none\", \"resources\": \"none\", \"confidentiality\": \"none\", "
    "\"integrity\": \"none\", \"availability\": \"none\"}\n"
    "```";

std::string_view kind_description(FunctionKind kind) {
  switch (kind) {
    case FunctionKind::Added: return "added (only present in the new binary)";
    case FunctionKind::Deleted: return "deleted (only present in the old binary)";
    case FunctionKind::Modified: return "modified (present in both binaries, changed)";
  }
  return "";
}

nlohmann::json parse_json_object(std::string_view reply) {
  std::string block = extract_fenced_json(reply);
  return nlohmann::json::parse(block);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

std::string truncate_code(std::string_view code, std::size_t budget) {
  if (code.size() <= budget) return std::string(code);
  return std::string(code.substr(0, budget)) + "\n/* [truncated: " +
         std::to_string(code.size() - budget) + " more characters omitted] */";
}

std::string truncate_diff(std::string_view diff_text, std::size_t budget) {
  if (diff_text.size() <= budget) return std::string(diff_text);
  auto split = textdiff::split_hunks(diff_text);
  std::string out = split.header;
  std::size_t kept = 0;
  for (const auto& hunk : split.hunks) {
    if (out.size() + hunk.size() > budget) break;
    out += hunk;
    ++kept;
  }
  out += "[truncated: " + std::to_string(split.hunks.size() - kept) + " more hunks omitted]\n";
  return out;
}

std::vector<ChatMessage> build_summary_prompt(const FunctionRecord& fn,
                                              std::span<const DependencySummary> deps,
                                              std::string_view project_description,
                                              const PromptLimits& limits) {
  const bool use_old = fn.kind == FunctionKind::Deleted;
  const std::string& code = use_old ? *fn.code_old : *fn.code_new;

  std::string user;
  user += "## Project\n";
  user += project_description.empty() ? std::string("(no description)") : std::string(project_description);
  user += "\n\n## Function\n";
  user += "Name: " + fn.id.display_name + "\n";
  user += "Change: " + std::string(kind_description(fn.kind)) + "\n";
  user += std::string("Code shown: ") + (use_old ? "old" : "new") + " binary\n";

  user += "\n## Dependencies\n";
  if (deps.empty()) {
    user += "(none)\n";
  } else {
    for (const auto& d : deps) user += "- " + d.name + ": " + d.summary + "\n";
  }

  user += "\n" + std::string(kCodeSectionTitle) + "\n" + std::string(kCodeBlockOpen);
  user += truncate_code(code, limits.code_chars);
  if (!user.ends_with('\n')) user += '\n';
  user += "```\n";

  if (fn.kind == FunctionKind::Modified) {
    user += "\n" + std::string(kDiffSectionTitle) + " (old -> new)\n```diff\n";
    std::string diff = truncate_diff(fn.text_diff.value_or(""), limits.diff_chars);
    user += diff.empty() ? std::string("(no textual change after normalization)\n") : diff;
    user += "```\n";
  }

  return {{Role::System, std::string(kSystemPrompt)}, {Role::User, std::move(user)}};
}

std::vector<ChatMessage> build_fss_prompt(std::vector<ChatMessage> prior) {
  prior.push_back({Role::User, std::string(kFssRequestMarker) + "\n" + std::string(kFssRequest)});
  return prior;
}

std::string extract_fenced_json(std::string_view reply) {
  std::size_t pos = 0;
  while (true) {
    auto open = reply.find("```", pos);
    if (open == std::string_view::npos) break;
    auto eol = reply.find('\n', open);
    if (eol == std::string_view::npos) break;
    auto close = reply.find("```", eol + 1);
    if (close == std::string_view::npos) break;
    std::string tag = lower(std::string(reply.substr(open + 3, eol - open - 3)));
    tag.erase(tag.find_last_not_of(" \t\r") + 1);
    std::string_view body = reply.substr(eol + 1, close - eol - 1);
    if (tag.empty() || tag == "json") {
      auto parsed = nlohmann::json::parse(body, nullptr, false);
      if (!parsed.is_discarded() && parsed.is_object()) return std::string(body);
    }
    pos = close + 3;
  }
  throw ParseError("no fenced JSON object found in reply");
}

SummaryReply parse_summary_reply(std::string_view reply) {
  auto j = parse_json_object(reply);
  SummaryReply out;
  auto s = j.find("summary");
  if (s == j.end()) throw ParseError("missing key 'summary'");
  if (!s->is_string() || s->get<std::string>().empty())
    throw ParseError("'summary' must be a non-empty string");
  out.summary = s->get<std::string>();
  auto d = j.find("diff_summary");
  if (d != j.end() && !d->is_null()) {
    if (!d->is_string()) throw ParseError("'diff_summary' must be a string");
    if (!d->get<std::string>().empty()) out.diff_summary = d->get<std::string>();
  }
  return out;
}

FssClassification parse_fss_reply(std::string_view reply) {
  auto j = parse_json_object(reply);
  FssClassification cls;
  for (FssCategory c : kAllCategories) {
    std::string key(category_name(c));
    auto it = j.find(key);
    if (it == j.end()) throw ParseError("missing key '" + key + "'");
    if (!it->is_string()) throw ParseError("'" + key + "' must be a string");
    auto level = parse_level_word(it->get<std::string>());
    if (!level) {
      throw ParseError("invalid level '" + it->get<std::string>() + "' for " + key);
    }
    cls.set(c, *level);
  }
  return cls;
}

namespace {

std::string render_conversation(std::span<const ChatMessage> messages) {
  std::string out;
  for (const auto& m : messages) {
    out += "=== " + std::string(to_string(m.role)) + " ===\n" + m.content;
    if (!out.ends_with('\n')) out += '\n';
  }
  return out;
}

std::string cache_key(const std::string& model, std::span<const ChatMessage> prompt) {
  return sha256_hex(model + "\n" + render_conversation(prompt));
}

struct TurnResult {
  std::string reply;
  TokenUsage usage;
  std::size_t calls = 0;
};

// One request plus a single corrective re-prompt when the reply does not
// parse. The accepted reply is appended to `conversation`.
template <typename Parse>
auto ask(ChatBackend& backend, std::vector<ChatMessage>& conversation, TokenUsage& usage,
         std::size_t& calls, Parse parse) {
  auto first = backend.complete(conversation);
  ++calls;
  usage += first.usage;
  try {
    auto parsed = parse(first.reply);
    conversation.push_back({Role::Assistant, first.reply});
    return parsed;
  } catch (const std::exception& e) {
    conversation.push_back({Role::Assistant, first.reply.empty() ? "(empty reply)" : first.reply});
    conversation.push_back(
        {Role::User, std::string("Your previous answer could not be used: ") + e.what() +
                         ". Answer again with exactly one fenced JSON block as specified."});
  }
  auto second = backend.complete(conversation);
  ++calls;
  usage += second.usage;
  auto parsed = parse(second.reply);
  conversation.push_back({Role::Assistant, second.reply});
  return parsed;
}

}  // namespace

SummarizationResult run_summarization(const DiffArtifact& artifact, const Schedule& schedule,
                                      ChatBackend& backend, const SummarizerConfig& config) {
  const std::string model = backend.model_id();
  const std::size_t n_comp = schedule.components.size();

  // Component dependency bookkeeping.
  std::vector<std::set<std::size_t>> dependents(n_comp);
  std::vector<std::size_t> pending(n_comp, 0);
  for (std::size_t c = 0; c < n_comp; ++c) {
    std::set<std::size_t> needs;
    for (const auto& name : schedule.components[c]) {
      auto it = schedule.deps.find(name);
      if (it == schedule.deps.end()) continue;
      for (const auto& callee : it->second) {
        auto dc = schedule.component_of.at(callee);
        if (dc != c) needs.insert(dc);
      }
    }
    pending[c] = needs.size();
    for (auto dc : needs) dependents[dc].insert(c);
  }

  std::mutex mu;
  std::condition_variable cv;
  std::set<std::size_t> ready;
  for (std::size_t c = 0; c < n_comp; ++c) {
    if (pending[c] == 0) ready.insert(c);
  }
  std::size_t finished = 0;

  std::map<std::string, FunctionAnalysis> analyses;
  std::map<std::string, std::string> errors;
  SummarizationResult result;

  auto lookup_dep = [&](const std::string& caller, const std::string& callee) {
    std::lock_guard lock(mu);
    if (schedule.is_cycle_stub(caller, callee)) return std::string(kCycleStub);
    auto it = analyses.find(callee);
    if (it == analyses.end()) return std::string(kFailedStub);
    return it->second.summary;
  };

  auto process = [&](const std::string& name) {
    const FunctionRecord* fn = artifact.find(name);
    if (fn == nullptr) throw Error("schedule names unknown function '" + name + "'");

    std::vector<DependencySummary> deps;
    if (auto it = schedule.deps.find(name); it != schedule.deps.end()) {
      for (const auto& callee : it->second) deps.push_back({callee, lookup_dep(name, callee)});
    }
    auto conversation =
        build_summary_prompt(*fn, deps, artifact.new_binary.project_description, config.limits);
    const std::string key = cache_key(model, conversation);

    std::optional<std::filesystem::path> cache_file, prompt_file;
    if (config.run_dir) {
      auto stem = safe_file_stem(name);
      cache_file = *config.run_dir / "analyses" / (stem + ".json");
      prompt_file = *config.run_dir / "prompts" / (stem + ".txt");
      if (std::filesystem::exists(*cache_file)) {
        try {
          auto j = codec::Json::parse(read_text_file(*cache_file));
          if (j.value("cache_key", "") == key && j.value("model", "") == model) {
            auto cached = codec::analysis_from_json(j.at("analysis"));
            std::lock_guard lock(mu);
            ++result.cache_hits;
            analyses[name] = std::move(cached);
            return;
          }
        } catch (const std::exception&) {
          // Unreadable cache entries are recomputed.
        }
      }
    }

    TokenUsage usage;
    std::size_t calls = 0;
    SummaryReply summary;
    FssClassification cls;
    try {
      summary = ask(backend, conversation, usage, calls, parse_summary_reply);
      conversation = build_fss_prompt(std::move(conversation));
      cls = ask(backend, conversation, usage, calls, parse_fss_reply);
    } catch (...) {
      std::lock_guard lock(mu);
      result.backend_calls += calls;
      result.fresh_usage += usage;
      throw;
    }

    FunctionAnalysis a;
    a.id = fn->id;
    a.kind = fn->kind;
    a.summary = std::move(summary.summary);
    if (fn->kind == FunctionKind::Modified) a.diff_summary = std::move(summary.diff_summary);
    a.classification = cls;
    a.score = fss::score(cls);
    a.usage = usage;

    if (cache_file) {
      codec::Json entry;
      entry["cache_key"] = key;
      entry["model"] = model;
      entry["analysis"] = codec::to_json(a);
      write_text_file(*cache_file, entry.dump(2) + "\n");
      write_text_file(*prompt_file, render_conversation(conversation));
    }

    std::lock_guard lock(mu);
    result.backend_calls += calls;
    result.fresh_usage += usage;
    analyses[name] = std::move(a);
  };

  auto worker = [&] {
    while (true) {
      std::size_t comp;
      {
        std::unique_lock lock(mu);
        cv.wait(lock, [&] { return !ready.empty() || finished == n_comp; });
        if (ready.empty()) return;
        comp = *ready.begin();
        ready.erase(ready.begin());
      }
      // Members of a cycle run in name order so later members can use the
      // summaries of earlier ones.
      for (const auto& name : schedule.components[comp]) {
        try {
          process(name);
        } catch (const std::exception& e) {
          std::lock_guard lock(mu);
          errors[name] = e.what();
        }
      }
      {
        std::lock_guard lock(mu);
        ++finished;
        for (auto d : dependents[comp]) {
          if (--pending[d] == 0) ready.insert(d);
        }
      }
      cv.notify_all();
    }
  };

  std::size_t n_threads = std::max<std::size_t>(1, std::min(config.concurrency, n_comp));
  if (n_comp > 0) {
    std::vector<std::jthread> threads;
    for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  }

  for (const auto& name : schedule.order) {
    if (auto it = errors.find(name); it != errors.end()) {
      result.failures.push_back({name, it->second});
    }
  }
  result.analyses = std::move(analyses);
  for (const auto& [name, a] : result.analyses) result.usage += a.usage;
  return result;
}

}  // namespace diffsense::summarizer
