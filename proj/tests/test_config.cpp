#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lagctrl/config.hpp"
#include "lagctrl/report.hpp"

using namespace lagctrl;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("parse sections, comments and arrays") {
  const RawConfig raw = parse_config_text(R"(# header comment
[gas]
c = 1.0   # trailing
[problem]
alphas = [0.2, 0.45, 0.7]
omega = [1.4, 2.6]
[output]
dir = "runs/a"
csv = false
)");
  RunConfig cfg;
  apply_raw(cfg, raw);
  CHECK(cfg.gas.c == 1.0);
  CHECK(cfg.problem.alphas == std::vector<double>{0.2, 0.45, 0.7});
  CHECK(cfg.problem.omega_lo == 1.4);
  CHECK(cfg.problem.omega_hi == 2.6);
  CHECK(cfg.output.dir == "runs/a");
  CHECK_FALSE(cfg.output.csv);
}

TEST_CASE("malformed input is a Config error naming the key") {
  CHECK(kind_of([] { parse_config_text("[gas]\nc = 1\nc = 2\n"); }) == ErrorKind::Config);
  CHECK(kind_of([] { parse_config_text("c = 1\n"); }) == ErrorKind::Config);
  CHECK(kind_of([] { parse_config_text("[gas\n"); }) == ErrorKind::Config);
  RunConfig cfg;
  try {
    apply_raw(cfg, {{"gas.nope", "1"}});
    FAIL("expected Config error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
    CHECK(std::string(e.what()).find("gas.nope") != std::string::npos);
  }
  try {
    apply_raw(cfg, {{"numerics.M", "many"}});
    FAIL("expected Config error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("numerics.M") != std::string::npos);
  }
  CHECK(kind_of([] { parse_config_file("/nonexistent/lagctrl.toml"); }) == ErrorKind::Io);
}

TEST_CASE("overrides") {
  const auto [key, value] = parse_override("numerics.M=256");
  CHECK(key == "numerics.M");
  CHECK(value == "256");
  CHECK(kind_of([] { parse_override("numerics.M"); }) == ErrorKind::Config);
  RunConfig cfg;
  apply_raw(cfg, {{key, value}});
  CHECK(cfg.numerics.M == 256);
}

TEST_CASE("validation names the offending field") {
  RunConfig cfg;
  CHECK_NOTHROW(validate(cfg));
  cfg.problem.alphas = {0.3, 1.2};
  cfg.problem.betas = {0.3, 0.6};
  try {
    validate(cfg);
    FAIL("expected Config error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
    CHECK(std::string(e.what()).find("problem.alphas") != std::string::npos);
  }
  cfg = RunConfig{};
  cfg.problem.eta = 0.6;
  CHECK(kind_of([&] { validate(cfg); }) == ErrorKind::Config);
}

TEST_CASE("resolved configuration round-trips") {
  RunConfig cfg;
  cfg.gas.c = 1.0 / 3.0;
  cfg.problem.betas = {0.3001, 0.5995};
  cfg.numerics.quad.x_panels = 24;
  cfg.output.dir = "elsewhere";
  const std::string text = to_config_text(cfg);
  RunConfig back;
  apply_raw(back, parse_config_text(text));
  CHECK(back.gas.c == cfg.gas.c);
  CHECK(back.problem.betas == cfg.problem.betas);
  CHECK(back.numerics.quad.x_panels == 24);
  CHECK(back.output.dir == "elsewhere");
  CHECK(to_config_text(back) == text);
  for (const auto& key : config_keys()) CHECK(text.find(key.substr(key.find('.') + 1)) != std::string::npos);
}

TEST_CASE("json emitter") {
  json j;
  j["x"] = 0.1;
  j["bad"] = NAN;
  j["v"] = json::array({1.0, 2.5});
  const std::string s = dump(j);
  CHECK(s.find("0.10000000000000001") != std::string::npos);
  CHECK(s.find("null") != std::string::npos);
  CHECK(json::parse(s)["v"][1].get<double>() == 2.5);

  const json env = envelope("gram", RunConfig{}, json::object());
  CHECK(env["header"]["command"] == "gram");
  CHECK(env["header"].contains("timestamp"));
  CHECK(env["config"]["problem"]["alphas"].size() == 2);
}
