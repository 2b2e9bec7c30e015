#pragma once

// JSON serialization of the result types. Doubles are written with 17
// significant digits; non-finite values become null.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "lagctrl/config.hpp"
#include "lagctrl/control.hpp"
#include "lagctrl/gram.hpp"
#include "lagctrl/verify.hpp"

namespace lagctrl {

using json = nlohmann::ordered_json;

json to_json(const RunConfig& cfg);
json to_json(const GramReport& g);
json to_json(const NonlinDiag& d);
json to_json(const EnergyDiag& d);
json to_json(const SynthesisReport& r);
json to_json(const SuiteReport& r);
json to_json(const OrderReport& r);

/// {"header": {tool, command, timestamp}, "config": ..., "result": ...}. The
/// timestamp is the only field that varies between identical runs.
json envelope(const std::string& command, const RunConfig& cfg, json result);

/// Pretty-printed with a 2-space indent and %.17g doubles.
std::string dump(const json& j);

void write_json(const json& j, const std::filesystem::path& path);

}  // namespace lagctrl
