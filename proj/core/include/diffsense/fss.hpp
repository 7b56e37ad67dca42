// SPDX-License-Identifier: Apache-2.0
//
// Functional Sensitivity Score.
//
// Five categories are classified none/low/medium/high. Behaviors and
// resources feed the sensitivity aggregate S, the three impact categories
// feed the impact aggregate M:
//
//   S   = 1 - (1 - B)(1 - R)
//   M   = 1 - (1 - C)(1 - I)(1 - A)
//   FSS = round_up(5.3 S + 6.1 M)   if M > 0
//         0                        otherwise
//
// The result is capped at 10.0 (the raw all-high value is 10.03).

#pragma once

#include <string>
#include <string_view>

#include "diffsense/model.hpp"

namespace diffsense::fss {

inline constexpr double kSensitivityCoefficient = 5.3;
inline constexpr double kImpactCoefficient = 6.1;
inline constexpr int kMaxTenths = 100;

double level_weight(FssCategory category, FssLevel level);

double sensitivity_aggregate(double behaviors, double resources);
double impact_aggregate(double confidentiality, double integrity, double availability);

/// Smallest multiple of 0.1 that is >= x, computed over scaled integers so
/// that values such as 4.0 (stored as 3.9999999...) are not bumped to 4.1.
int roundup_tenths(double x);
double round_up(double x);

FssScore score(const FssClassification& cls);

/// `FSS:1/B:H/R:M/C:N/I:L/A:N`. The `FSS:1` prefix is optional, categories
/// may appear in any order and omitted ones default to none.
FssClassification parse_vector(std::string_view text);
std::string format_vector(const FssClassification& cls);

}  // namespace diffsense::fss
