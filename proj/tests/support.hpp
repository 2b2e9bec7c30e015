#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace testing {

struct XiPoint {
  double t, x, value;
};

/// Frozen brute-force reference (alpha 0.3, c 1.3, T 2) from tests/fixtures.
inline std::vector<XiPoint> xi_reference() {
  std::ifstream in(std::string(LAGCTRL_FIXTURE_DIR) + "/xi_reference.csv");
  std::vector<XiPoint> pts;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 't') continue;
    std::stringstream ss(line);
    std::string a, b, c;
    std::getline(ss, a, ',');
    std::getline(ss, b, ',');
    std::getline(ss, c, ',');
    pts.push_back({std::stod(a), std::stod(b), std::stod(c)});
  }
  return pts;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("lagctrl-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace testing
