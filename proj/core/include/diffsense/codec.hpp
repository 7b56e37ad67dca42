// SPDX-License-Identifier: Apache-2.0
//
// JSON encodings of analysis results, shared by the run cache and reports.

#pragma once

#include <nlohmann/json.hpp>

#include "diffsense/model.hpp"

namespace diffsense::codec {

using Json = nlohmann::ordered_json;

Json to_json(const TokenUsage& usage);
Json to_json(const FunctionId& id);
Json to_json(const FunctionAnalysis& analysis);
Json to_json(const DiffVerdict& verdict);

/// Throw SchemaError on missing or mistyped fields.
TokenUsage usage_from_json(const Json& j);
FunctionAnalysis analysis_from_json(const Json& j);
DiffVerdict verdict_from_json(const Json& j);

/// Fixed-point rendering used wherever reals are serialized.
std::string format_fixed(double value, int decimals);

}  // namespace diffsense::codec
