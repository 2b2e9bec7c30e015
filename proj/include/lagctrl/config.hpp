#pragma once

// Run configuration: a TOML-style text file with [gas], [problem], [numerics],
// [verify] and [output] sections, plus "section.key=value" overrides.
//
//   # comment
//   [problem]
//   alphas = [0.3, 0.6]
//   omega = [1.5, 2.5]
//   [output]
//   dir = "out"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "lagctrl/control.hpp"
#include "lagctrl/verify.hpp"

namespace lagctrl {

struct OutputConfig {
  std::string dir = "lagctrl-out";
  /// Every k-th snapshot goes into history CSVs.
  int csv_stride = 10;
  bool csv = true;
  bool binary = true;
  /// Sample grid for the xi CSV on omega.
  int xi_t_samples = 41;
  int xi_x_samples = 41;
};

struct RunConfig {
  GasModel gas;
  ControlProblem problem;
  Numerics numerics;
  SuiteOptions verify;
  OutputConfig output;
};

/// Flat "section.key" -> raw value text, in file order of first appearance.
using RawConfig = std::map<std::string, std::string>;

RawConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");
RawConfig parse_config_file(const std::filesystem::path& path);

/// Parses one "section.key=value" override.
std::pair<std::string, std::string> parse_override(const std::string& assignment);

/// Applies raw entries on top of `cfg`. Unknown keys and malformed values throw Config
/// naming the key.
void apply_raw(RunConfig& cfg, const RawConfig& raw);

/// Validates every module precondition; messages name the offending field.
void validate(const RunConfig& cfg);

/// Resolved configuration in the same text format (every field, defaults included).
std::string to_config_text(const RunConfig& cfg);

std::vector<std::string> config_keys();

}  // namespace lagctrl
