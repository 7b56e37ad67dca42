// SPDX-License-Identifier: Apache-2.0

#include "diffsense/report.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "diffsense/fss.hpp"

namespace diffsense::report {

namespace {

Json usage_block(const TokenUsage& summarization, const TokenUsage& prediction) {
  Json j;
  j["summarization"] = codec::to_json(summarization);
  j["prediction"] = codec::to_json(prediction);
  j["total"] = codec::to_json(summarization + prediction);
  return j;
}

std::string cell(std::string text) {
  std::string out;
  for (char c : text) {
    if (c == '|') out += "\\|";
    else if (c == '\n' || c == '\r') out += ' ';
    else out += c;
  }
  return out;
}

std::string num3(const Json& j) {
  if (j.is_null()) return "n/a";
  return codec::format_fixed(j.get<double>(), 3);
}

std::string integer(const Json& j) { return std::to_string(j.get<std::uint64_t>()); }

void usage_table(std::string& md, const Json& usage) {
  md += "| Step | Input tokens | Output tokens |\n|---|---:|---:|\n";
  for (const char* step : {"summarization", "prediction", "total"}) {
    std::string label = step;
    label[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(label[0])));
    md += "| " + label + " | " + integer(usage[step]["input_tokens"]) + " | " +
          integer(usage[step]["output_tokens"]) + " |\n";
  }
}

Json optional_ratio(const std::optional<double>& v) {
  return v ? Json(round3(*v)) : Json();
}

Json metrics_json(const evaluator::DetectionMetrics& m, std::size_t diffs) {
  Json j;
  j["diffs"] = diffs;
  j["tp"] = m.tp;
  j["fp"] = m.fp;
  j["tn"] = m.tn;
  j["fn"] = m.fn;
  j["unknown"] = m.unknown;
  j["precision"] = optional_ratio(m.precision);
  j["recall"] = optional_ratio(m.recall);
  return j;
}

Json box_json(const std::optional<evaluator::BoxStats>& b) {
  if (!b) return Json();
  Json j;
  j["n"] = b->n;
  j["min"] = round3(b->min);
  j["lower_whisker"] = round3(b->lower_whisker);
  j["q1"] = round3(b->q1);
  j["median"] = round3(b->median);
  j["q3"] = round3(b->q3);
  j["upper_whisker"] = round3(b->upper_whisker);
  j["max"] = round3(b->max);
  j["mean"] = round3(b->mean);
  return j;
}

Json rounded_list(const std::vector<double>& values) {
  Json arr = Json::array();
  for (double v : values) arr.push_back(round3(v));
  return arr;
}

}  // namespace

double round3(double value) { return std::round(value * 1000.0) / 1000.0; }

std::string configuration_name(const predictor::PredictConfig& config) {
  return "k=" + std::to_string(config.k) + (config.include_changelog ? ", changelog" : "");
}

Json analysis_report(const AnalysisInputs& in) {
  Json j;
  j["report_version"] = kReportVersion;
  j["project"] = in.artifact.new_binary.name;
  j["old_version"] = in.artifact.old_binary.version;
  j["new_version"] = in.artifact.new_binary.version;
  j["label"] = in.artifact.label ? Json(to_string(*in.artifact.label)) : Json();
  j["verdict"] = to_string(in.verdict.verdict);
  j["rationale"] = in.verdict.rationale;

  Json predictor;
  predictor["model"] = in.predictor_model;
  predictor["k"] = in.predict.k;
  predictor["changelog"] = in.predict.include_changelog;
  j["predictor"] = std::move(predictor);
  j["summarizer"] = Json{{"model", in.summarizer_model}};

  std::vector<const FunctionAnalysis*> sorted;
  for (const auto& [name, a] : in.summary.analyses) sorted.push_back(&a);
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto* x, const auto* y) {
    if (x->score.tenths != y->score.tenths) return x->score.tenths > y->score.tenths;
    return x->id.display_name < y->id.display_name;
  });

  Json counts;
  counts["functions"] = in.artifact.functions.size();
  counts["analyzed"] = sorted.size();
  counts["failed"] = in.summary.failures.size();
  j["counts"] = std::move(counts);

  Json top = codec::to_json(in.verdict)["top_functions"];
  j["top_functions"] = std::move(top);

  Json functions = Json::array();
  for (const auto* a : sorted) {
    Json row = codec::to_json(*a);
    row.erase("usage");
    functions.push_back(std::move(row));
  }
  j["functions"] = std::move(functions);

  Json failures = Json::array();
  for (const auto& f : in.summary.failures) failures.push_back({{"name", f.name}, {"error", f.error}});
  j["failures"] = std::move(failures);
  j["usage"] = usage_block(in.summary.usage, in.verdict.usage);
  return j;
}

std::string analysis_markdown(const Json& r) {
  std::string md = "# Update analysis: " + r["project"].get<std::string>() + " " +
                   r["old_version"].get<std::string>() + " -> " +
                   r["new_version"].get<std::string>() + "\n\n";
  md += "Verdict: **" + r["verdict"].get<std::string>() + "** (k=" +
        integer(r["predictor"]["k"]) + ", changelog " +
        (r["predictor"]["changelog"].get<bool>() ? "on" : "off") + ", predictor model " +
        r["predictor"]["model"].get<std::string>() + ")\n";
  if (!r["label"].is_null()) md += "Ground truth: " + r["label"].get<std::string>() + "\n";
  md += "\nChanged functions: " + integer(r["counts"]["functions"]) + ", analyzed " +
        integer(r["counts"]["analyzed"]) + ", failed " + integer(r["counts"]["failed"]) +
        "\n\n## Functions by FSS\n\n";
  md += "| # | Function | Change | FSS | Vector | Summary |\n|---:|---|---|---:|---|---|\n";
  std::size_t i = 0;
  for (const auto& f : r["functions"]) {
    md += "| " + std::to_string(++i) + " | " + cell(f["name"].get<std::string>()) + " | " +
          f["kind"].get<std::string>() + " | " + f["score"].get<std::string>() + " | " +
          f["vector"].get<std::string>() + " | " + cell(f["summary"].get<std::string>()) +
          " |\n";
  }
  if (!r["failures"].empty()) {
    md += "\n## Failed functions\n\n| Function | Error |\n|---|---|\n";
    for (const auto& f : r["failures"]) {
      md += "| " + cell(f["name"].get<std::string>()) + " | " +
            cell(f["error"].get<std::string>()) + " |\n";
    }
  }
  md += "\n## Rationale\n\n";
  std::string rationale = r["rationale"].get<std::string>();
  std::size_t start = 0;
  while (start <= rationale.size()) {
    auto end = rationale.find('\n', start);
    if (end == std::string::npos) end = rationale.size();
    md += "> " + rationale.substr(start, end - start) + "\n";
    start = end + 1;
  }
  md += "\n## Token usage\n\n";
  usage_table(md, r["usage"]);
  return md;
}

Json evaluation_report(const EvalInputs& in) {
  Json j;
  j["report_version"] = kReportVersion;
  j["summarizer_model"] = in.summarizer_model;
  j["predictor_model"] = in.predictor_model;

  std::vector<std::string> programs;
  std::size_t mal = 0, functions = 0, failed = 0;
  TokenUsage summarization;
  for (const auto& d : in.diffs) {
    if (std::find(programs.begin(), programs.end(), d.program) == programs.end())
      programs.push_back(d.program);
    if (d.label == Label::Malicious) ++mal;
    functions += d.functions;
    failed += d.failures.size();
    summarization += d.usage;
  }
  std::sort(programs.begin(), programs.end());

  Json corpus;
  corpus["diffs"] = in.diffs.size();
  corpus["malicious"] = mal;
  corpus["benign"] = in.diffs.size() - mal;
  corpus["programs"] = programs;
  corpus["functions"] = functions;
  corpus["failed_functions"] = failed;
  j["corpus"] = std::move(corpus);

  TokenUsage prediction;
  Json configs = Json::array();
  for (const auto& c : in.configurations) {
    if (c.verdicts.size() != in.diffs.size()) throw Error("verdict count does not match diff count");
    std::vector<evaluator::LabeledVerdict> all;
    std::map<std::string, std::vector<evaluator::LabeledVerdict>> by_program;
    Json verdicts = Json::array();
    TokenUsage usage;
    for (std::size_t i = 0; i < in.diffs.size(); ++i) {
      evaluator::LabeledVerdict lv{in.diffs[i].id, c.verdicts[i].verdict, in.diffs[i].label};
      all.push_back(lv);
      by_program[in.diffs[i].program].push_back(lv);
      usage += c.verdicts[i].usage;
      verdicts.push_back({{"diff", in.diffs[i].id},
                          {"label", in.diffs[i].label ? Json(to_string(*in.diffs[i].label)) : Json()},
                          {"verdict", to_string(c.verdicts[i].verdict)}});
    }
    prediction += usage;
    Json cj;
    cj["name"] = configuration_name(c.predict);
    cj["k"] = c.predict.k;
    cj["changelog"] = c.predict.include_changelog;
    cj["overall"] = metrics_json(evaluator::detection_metrics(all), all.size());
    Json rows = Json::array();
    for (const auto& p : programs) {
      const auto& vs = by_program[p];
      Json row = metrics_json(evaluator::detection_metrics(vs), vs.size());
      row["program"] = p;
      rows.push_back(std::move(row));
    }
    cj["programs"] = std::move(rows);
    cj["verdicts"] = std::move(verdicts);
    cj["usage"] = codec::to_json(usage);
    configs.push_back(std::move(cj));
  }
  j["configurations"] = std::move(configs);

  if (in.separation) {
    const auto& s = *in.separation;
    Json sj;
    sj["fss_ben"] = rounded_list(s.fss_ben);
    sj["fss_mal"] = rounded_list(s.fss_mal);
    sj["benign"] = box_json(s.ben);
    sj["malicious"] = box_json(s.mal);
    sj["separation"] = s.separation ? Json(round3(*s.separation)) : Json();
    sj["mean_separation"] = s.mean_separation ? Json(round3(*s.mean_separation)) : Json();
    j["separation"] = std::move(sj);
    j["notice"] = Json();
  } else {
    j["separation"] = Json();
    j["notice"] = "corpus carries no function labels; FSS separation omitted";
  }

  Json failures = Json::array();
  for (const auto& d : in.diffs) {
    for (const auto& f : d.failures)
      failures.push_back({{"diff", d.id}, {"function", f.name}, {"error", f.error}});
  }
  j["failures"] = std::move(failures);
  j["usage"] = usage_block(summarization, prediction);
  return j;
}

std::string evaluation_markdown(const Json& r) {
  const auto& corpus = r["corpus"];
  std::string md = "# Evaluation report\n\n";
  md += "Corpus: " + integer(corpus["diffs"]) + " diffs (" + integer(corpus["malicious"]) +
        " malicious, " + integer(corpus["benign"]) + " benign), " +
        integer(corpus["functions"]) + " changed functions, " +
        integer(corpus["failed_functions"]) + " failed\n";
  md += "Models: summarizer " + r["summarizer_model"].get<std::string>() + ", predictor " +
        r["predictor_model"].get<std::string>() + "\n\n";

  const auto& configs = r["configurations"];
  md += "## Detection (precision / recall)\n\n| Program |";
  for (const auto& c : configs) md += " " + c["name"].get<std::string>() + " |";
  md += "\n|---|";
  for (std::size_t i = 0; i < configs.size(); ++i) md += "---|";
  md += "\n";
  auto pr = [](const Json& m) { return num3(m["precision"]) + " / " + num3(m["recall"]); };
  std::size_t n_programs = corpus["programs"].size();
  for (std::size_t p = 0; p < n_programs; ++p) {
    md += "| " + corpus["programs"][p].get<std::string>() + " |";
    for (const auto& c : configs) md += " " + pr(c["programs"][p]) + " |";
    md += "\n";
  }
  md += "| **All** |";
  for (const auto& c : configs) md += " " + pr(c["overall"]) + " |";
  md += "\n\n## Confusion counts\n\n| Configuration | TP | FP | TN | FN | Unknown |\n"
        "|---|---:|---:|---:|---:|---:|\n";
  for (const auto& c : configs) {
    const auto& m = c["overall"];
    md += "| " + c["name"].get<std::string>() + " | " + integer(m["tp"]) + " | " +
          integer(m["fp"]) + " | " + integer(m["tn"]) + " | " + integer(m["fn"]) + " | " +
          integer(m["unknown"]) + " |\n";
  }

  md += "\n## FSS separation\n\n";
  if (r["separation"].is_null()) {
    md += "Omitted: " + r["notice"].get<std::string>() + "\n";
  } else {
    const auto& s = r["separation"];
    md += "Median separation: " + num3(s["separation"]) + "\nMean separation: " +
          num3(s["mean_separation"]) + "\n\n";
    md += "| Class | n | Min | Lower whisker | Q1 | Median | Q3 | Upper whisker | Max | Mean |\n"
          "|---|---:|---:|---:|---:|---:|---:|---:|---:|---:|\n";
    for (const char* cls : {"benign", "malicious"}) {
      const auto& b = s[cls];
      md += std::string("| ") + cls + " |";
      if (b.is_null()) {
        md += " 0 | n/a | n/a | n/a | n/a | n/a | n/a | n/a | n/a |\n";
        continue;
      }
      md += " " + integer(b["n"]) + " |";
      for (const char* key : {"min", "lower_whisker", "q1", "median", "q3", "upper_whisker",
                              "max", "mean"})
        md += " " + num3(b[key]) + " |";
      md += "\n";
    }
  }

  if (!r["failures"].empty()) {
    md += "\n## Failed functions\n\n| Diff | Function | Error |\n|---|---|---|\n";
    for (const auto& f : r["failures"]) {
      md += "| " + cell(f["diff"].get<std::string>()) + " | " +
            cell(f["function"].get<std::string>()) + " | " + cell(f["error"].get<std::string>()) +
            " |\n";
    }
  }
  md += "\n## Token usage\n\n";
  usage_table(md, r["usage"]);
  return md;
}

}  // namespace diffsense::report
