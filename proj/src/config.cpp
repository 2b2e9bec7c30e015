#include "lagctrl/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "lagctrl/error.hpp"

namespace lagctrl {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Drops a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw Error(ErrorKind::Config, key + ": " + why);
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || p != t.data() + t.size())
    bad(key, "expected a number, got '" + text + "'");
  return v;
}

long long to_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  long long v = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || p != t.data() + t.size())
    bad(key, "expected an integer, got '" + text + "'");
  return v;
}

int to_int32(const std::string& key, const std::string& text) {
  const long long v = to_int(key, text);
  if (v < -2147483647LL || v > 2147483647LL) bad(key, "integer out of range");
  return static_cast<int>(v);
}

bool to_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true") return true;
  if (t == "false") return false;
  bad(key, "expected true or false, got '" + text + "'");
}

std::string to_str(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t.size() >= 2 && t.front() == '"' && t.back() == '"') return t.substr(1, t.size() - 2);
  if (t.empty() || t.find('"') != std::string::npos) bad(key, "malformed string '" + text + "'");
  return t;
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t.size() < 2 || t.front() != '[' || t.back() != ']')
    bad(key, "expected a list like [0.3, 0.6], got '" + text + "'");
  std::vector<double> out;
  std::stringstream ss(t.substr(1, t.size() - 2));
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) bad(key, "empty list element");
    out.push_back(to_double(key, item));
  }
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s + "]";
}

struct Field {
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define DBL(k, member)                                                            \
  Field{k, [](RunConfig& c, const std::string& v) { c.member = to_double(k, v); }, \
        [](const RunConfig& c) { return fmt(c.member); }}
#define INT(k, member)                                                           \
  Field{k, [](RunConfig& c, const std::string& v) { c.member = to_int32(k, v); }, \
        [](const RunConfig& c) { return std::to_string(c.member); }}
#define BOOL(k, member)                                                         \
  Field{k, [](RunConfig& c, const std::string& v) { c.member = to_bool(k, v); }, \
        [](const RunConfig& c) { return std::string(c.member ? "true" : "false"); }}

const std::vector<Field>& fields() {
  static const std::vector<Field> f{
      DBL("gas.c", gas.c),
      DBL("gas.gamma", gas.gamma),
      Field{"problem.alphas",
            [](RunConfig& c, const std::string& v) { c.problem.alphas = to_list("problem.alphas", v); },
            [](const RunConfig& c) { return fmt_list(c.problem.alphas); }},
      Field{"problem.betas",
            [](RunConfig& c, const std::string& v) { c.problem.betas = to_list("problem.betas", v); },
            [](const RunConfig& c) { return fmt_list(c.problem.betas); }},
      DBL("problem.T", problem.T),
      Field{"problem.omega",
            [](RunConfig& c, const std::string& v) {
              const auto w = to_list("problem.omega", v);
              if (w.size() != 2) bad("problem.omega", "expected [lo, hi]");
              c.problem.omega_lo = w[0];
              c.problem.omega_hi = w[1];
            },
            [](const RunConfig& c) {
              return fmt_list({c.problem.omega_lo, c.problem.omega_hi});
            }},
      DBL("problem.eta", problem.eta),
      INT("numerics.M", numerics.M),
      DBL("numerics.cfl", numerics.cfl),
      DBL("numerics.cfl_limit", numerics.solver.cfl_limit),
      DBL("numerics.positivity_floor", numerics.solver.positivity_floor),
      INT("numerics.N", numerics.N),
      BOOL("numerics.accel", numerics.accel),
      INT("numerics.t_panels", numerics.quad.t_panels),
      INT("numerics.x_panels", numerics.quad.x_panels),
      INT("numerics.gauss_nodes", numerics.quad.nodes),
      INT("numerics.substeps", numerics.substeps),
      DBL("numerics.tol_pos", numerics.tol_pos),
      INT("numerics.max_iter", numerics.max_iter),
      INT("numerics.max_halvings", numerics.max_halvings),
      INT("numerics.stall_limit", numerics.stall_limit),
      DBL("numerics.contraction", numerics.contraction),
      DBL("numerics.fd_rel", numerics.fd_rel),
      DBL("numerics.fd_abs", numerics.fd_abs),
      INT("numerics.probes", numerics.probes),
      Field{"numerics.seed",
            [](RunConfig& c, const std::string& v) {
              const long long s = to_int("numerics.seed", v);
              if (s < 0) bad("numerics.seed", "must be non-negative");
              c.verify.seed = static_cast<std::uint64_t>(s);
            },
            [](const RunConfig& c) { return std::to_string(c.verify.seed); }},
      DBL("verify.tolerance_scale", verify.tolerance_scale),
      INT("verify.trig_cases", verify.trig_cases),
      INT("verify.duality_M", verify.duality_M),
      Field{"output.dir",
            [](RunConfig& c, const std::string& v) { c.output.dir = to_str("output.dir", v); },
            [](const RunConfig& c) { return "\"" + c.output.dir + "\""; }},
      INT("output.csv_stride", output.csv_stride),
      BOOL("output.csv", output.csv),
      BOOL("output.binary", output.binary),
      INT("output.xi_t_samples", output.xi_t_samples),
      INT("output.xi_x_samples", output.xi_x_samples),
  };
  return f;
}

#undef DBL
#undef INT
#undef BOOL

}  // namespace

RawConfig parse_config_text(const std::string& text, const std::string& origin) {
  RawConfig raw;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(strip_comment(line));
    const std::string where = origin + ":" + std::to_string(lineno);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']' || t.size() < 3)
        throw Error(ErrorKind::Config, where + ": malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::Config, where + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw Error(ErrorKind::Config, where + ": empty key");
    if (section.empty()) throw Error(ErrorKind::Config, where + ": key outside a section");
    const std::string full = section + "." + key;
    if (raw.count(full)) throw Error(ErrorKind::Config, where + ": duplicate key " + full);
    raw[full] = trim(t.substr(eq + 1));
  }
  return raw;
}

RawConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

std::pair<std::string, std::string> parse_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw Error(ErrorKind::Config, "override '" + assignment + "' is not section.key=value");
  const std::string key = trim(assignment.substr(0, eq));
  if (key.find('.') == std::string::npos)
    throw Error(ErrorKind::Config, "override key '" + key + "' needs a section prefix");
  return {key, trim(assignment.substr(eq + 1))};
}

void apply_raw(RunConfig& cfg, const RawConfig& raw) {
  for (const auto& [key, value] : raw) {
    bool found = false;
    for (const auto& f : fields())
      if (f.key == key) {
        f.set(cfg, value);
        found = true;
        break;
      }
    if (!found) throw Error(ErrorKind::Config, "unknown config key " + key);
  }
}

void validate(const RunConfig& cfg) {
  // Re-tag module errors as configuration errors.
  auto guard = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Config) throw;
      throw Error(ErrorKind::Config, e.detail());
    }
  };
  guard([&] {
    require(cfg.gas.c > 0.0, ErrorKind::Config, "gas.c must be positive");
    require(cfg.gas.gamma >= 1.0, ErrorKind::Config, "gas.gamma must be >= 1");
    validate(cfg.gas);
  });
  guard([&] { validate(cfg.problem); });
  guard([&] { validate(cfg.numerics); });
  require(cfg.verify.tolerance_scale > 0.0, ErrorKind::Config,
          "verify.tolerance_scale must be positive");
  require(cfg.verify.trig_cases >= 1, ErrorKind::Config, "verify.trig_cases must be >= 1");
  require(cfg.verify.duality_M >= 8, ErrorKind::Config, "verify.duality_M must be >= 8");
  require(!cfg.output.dir.empty(), ErrorKind::Config, "output.dir must not be empty");
  require(cfg.output.csv_stride >= 1, ErrorKind::Config, "output.csv_stride must be >= 1");
  require(cfg.output.xi_t_samples >= 2 && cfg.output.xi_x_samples >= 2, ErrorKind::Config,
          "output.xi_t_samples and output.xi_x_samples must be >= 2");
}

std::string to_config_text(const RunConfig& cfg) {
  std::string out;
  std::string section;
  for (const auto& f : fields()) {
    const auto dot = f.key.find('.');
    const std::string sec = f.key.substr(0, dot);
    if (sec != section) {
      out += (section.empty() ? "[" : "\n[") + sec + "]\n";
      section = sec;
    }
    out += f.key.substr(dot + 1) + " = " + f.get(cfg) + "\n";
  }
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> k;
  for (const auto& f : fields()) k.push_back(f.key);
  return k;
}

}  // namespace lagctrl
