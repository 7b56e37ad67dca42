// SPDX-License-Identifier: Apache-2.0

#include "diffsense/fss.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace diffsense::fss {

namespace {

// Indexed by FssLevel.
constexpr double kSensitivityWeights[] = {0.0, 0.1, 0.35, 0.6};
constexpr double kImpactWeights[] = {0.0, 0.22, 0.39, 0.56};

bool is_sensitivity(FssCategory c) {
  return c == FssCategory::Behaviors || c == FssCategory::Resources;
}

}  // namespace

double level_weight(FssCategory category, FssLevel level) {
  auto idx = static_cast<std::size_t>(level);
  return is_sensitivity(category) ? kSensitivityWeights[idx] : kImpactWeights[idx];
}

double sensitivity_aggregate(double behaviors, double resources) {
  return 1.0 - (1.0 - behaviors) * (1.0 - resources);
}

double impact_aggregate(double confidentiality, double integrity, double availability) {
  return 1.0 - (1.0 - confidentiality) * (1.0 - integrity) * (1.0 - availability);
}

int roundup_tenths(double x) {
  auto scaled = static_cast<std::int64_t>(std::llround(x * 100000.0));
  if (scaled % 10000 == 0) return static_cast<int>(scaled / 10000);
  return static_cast<int>(scaled / 10000 + 1);
}

double round_up(double x) { return roundup_tenths(x) / 10.0; }

FssScore score(const FssClassification& cls) {
  FssScore out;
  out.sensitivity = sensitivity_aggregate(level_weight(FssCategory::Behaviors, cls.behaviors),
                                          level_weight(FssCategory::Resources, cls.resources));
  out.impact =
      impact_aggregate(level_weight(FssCategory::Confidentiality, cls.confidentiality),
                       level_weight(FssCategory::Integrity, cls.integrity),
                       level_weight(FssCategory::Availability, cls.availability));
  if (out.impact > 0.0) {
    double raw = kSensitivityCoefficient * out.sensitivity + kImpactCoefficient * out.impact;
    out.tenths = std::min(kMaxTenths, roundup_tenths(raw));
  }
  return out;
}

FssClassification parse_vector(std::string_view text) {
  std::vector<std::string_view> tokens;
  while (true) {
    auto slash = text.find('/');
    tokens.push_back(text.substr(0, slash));
    if (slash == std::string_view::npos) break;
    text.remove_prefix(slash + 1);
  }

  FssClassification cls;
  bool seen[5] = {};
  std::size_t start = 0;
  if (!tokens.empty() && tokens.front().starts_with("FSS:")) {
    if (tokens.front() != "FSS:1") {
      throw ParseError("unsupported vector version '" + std::string(tokens.front()) + "'");
    }
    start = 1;
  }
  if (start == tokens.size()) throw ParseError("empty vector");

  for (std::size_t i = start; i < tokens.size(); ++i) {
    std::string_view tok = tokens[i];
    if (tok.size() < 3 || tok[1] != ':') {
      throw ParseError("malformed token '" + std::string(tok) + "'");
    }
    auto cat = std::find_if(std::begin(kAllCategories), std::end(kAllCategories),
                            [&](FssCategory c) { return category_letter(c) == tok[0]; });
    if (cat == std::end(kAllCategories)) {
      throw ParseError("unknown category '" + std::string(tok.substr(0, 1)) + "'");
    }
    std::string_view level_text = tok.substr(2);
    auto lvl = std::find_if(std::begin(kAllLevels), std::end(kAllLevels), [&](FssLevel l) {
      return level_text.size() == 1 && level_letter(l) == level_text[0];
    });
    if (lvl == std::end(kAllLevels)) {
      throw ParseError("invalid level " + std::string(level_text) + " for " +
                       std::string(1, tok[0]));
    }
    auto idx = static_cast<std::size_t>(*cat);
    if (seen[idx]) throw ParseError("duplicate category '" + std::string(1, tok[0]) + "'");
    seen[idx] = true;
    cls.set(*cat, *lvl);
  }
  return cls;
}

std::string format_vector(const FssClassification& cls) {
  std::string out = "FSS:1";
  for (FssCategory c : kAllCategories) {
    out += '/';
    out += category_letter(c);
    out += ':';
    out += level_letter(cls.get(c));
  }
  return out;
}

}  // namespace diffsense::fss
