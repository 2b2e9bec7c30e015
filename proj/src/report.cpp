#include "lagctrl/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "lagctrl/error.hpp"

namespace lagctrl {

namespace {

json vec(std::span<const double> v) {
  json a = json::array();
  for (double x : v) a.push_back(x);
  return a;
}

json vec(const Eigen::VectorXd& v) { return vec(std::span<const double>(v.data(), v.size())); }

json mat(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

void put_number(std::string& out, double v) {
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void emit(std::string& out, const json& j, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(2 * depth), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + json(it.key()).dump() + ": ";
        emit(out, it.value(), depth + 1);
      }
      out += "\n" + close + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Short numeric rows stay on one line.
      const bool flat = std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_number(); });
      if (flat) {
        out += "[";
        for (std::size_t k = 0; k < j.size(); ++k) {
          if (k) out += ", ";
          emit(out, j[k], depth + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t k = 0; k < j.size(); ++k) {
        if (k) out += ",\n";
        out += pad;
        emit(out, j[k], depth + 1);
      }
      out += "\n" + close + "]";
      return;
    }
    case json::value_t::number_float:
      put_number(out, j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

json to_json(const RunConfig& c) {
  json j;
  j["gas"] = {{"c", c.gas.c}, {"gamma", c.gas.gamma}};
  j["problem"] = {{"alphas", vec(c.problem.alphas)},
                  {"betas", vec(c.problem.betas)},
                  {"T", c.problem.T},
                  {"omega", vec(std::vector<double>{c.problem.omega_lo, c.problem.omega_hi})},
                  {"eta", c.problem.eta}};
  const Numerics& n = c.numerics;
  j["numerics"] = {{"M", n.M},
                   {"cfl", n.cfl},
                   {"cfl_limit", n.solver.cfl_limit},
                   {"positivity_floor", n.solver.positivity_floor},
                   {"N", n.N},
                   {"accel", n.accel},
                   {"t_panels", n.quad.t_panels},
                   {"x_panels", n.quad.x_panels},
                   {"gauss_nodes", n.quad.nodes},
                   {"substeps", n.substeps},
                   {"tol_pos", n.tol_pos},
                   {"max_iter", n.max_iter},
                   {"max_halvings", n.max_halvings},
                   {"stall_limit", n.stall_limit},
                   {"contraction", n.contraction},
                   {"fd_rel", n.fd_rel},
                   {"fd_abs", n.fd_abs},
                   {"probes", n.probes},
                   {"seed", c.verify.seed}};
  j["verify"] = {{"tolerance_scale", c.verify.tolerance_scale},
                 {"trig_cases", c.verify.trig_cases},
                 {"duality_M", c.verify.duality_M}};
  j["output"] = {{"dir", c.output.dir},
                 {"csv_stride", c.output.csv_stride},
                 {"csv", c.output.csv},
                 {"binary", c.output.binary}};
  return j;
}

json to_json(const GramReport& g) {
  json j;
  j["d"] = g.d;
  j["matrix"] = mat(g.matrix);
  j["det"] = g.det;
  j["spectrum"] = vec(g.spectrum);
  j["min_eigenvalue"] = g.min_eigenvalue;
  j["max_eigenvalue"] = g.max_eigenvalue;
  j["condition_number"] = g.condition_number;
  j["asymmetry"] = g.asymmetry;
  j["degenerate"] = g.degenerate;
  j["truncation"] = g.truncation;
  j["quadrature"] = {{"t_panels", g.quad.t_panels},
                     {"x_panels", g.quad.x_panels},
                     {"nodes", g.quad.nodes}};
  return j;
}

json to_json(const NonlinDiag& d) {
  return {{"mass_initial", d.mass_initial}, {"mass_final", d.mass_final},
          {"max_mass_drift", d.max_mass_drift}, {"min_rho", d.min_rho},
          {"max_abs_u", d.max_abs_u}, {"sup_h1", d.sup_h1},
          {"ux_h1_time", d.ux_h1_time}, {"forcing_l2", d.forcing_l2},
          {"ratio", d.ratio}};
}

json to_json(const EnergyDiag& d) {
  return {{"sup_eta_l2", d.sup_eta_l2}, {"sup_v_l2", d.sup_v_l2},
          {"vx_l2_time", d.vx_l2_time}, {"lhs", d.lhs},
          {"forcing_norm", d.forcing_norm}, {"ratio", d.ratio},
          {"max_mass_drift", d.max_mass_drift}};
}

json to_json(const OrderReport& r) {
  return {{"ordered", r.ordered}, {"min_gap", r.min_gap}, {"probes", r.terminal.size()}};
}

json to_json(const SynthesisReport& r) {
  json j;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["jacobian_source"] = to_string(r.jacobian_source);
  j["epsilon"] = vec(r.epsilon);
  j["residual"] = vec(r.residual);
  j["initial_guess"] = vec(r.initial_guess);
  json log = json::array();
  for (const auto& e : r.log)
    log.push_back({{"iteration", e.iteration},
                   {"residual_norm", e.residual_norm},
                   {"step_norm", e.step_norm},
                   {"damping", e.damping},
                   {"jacobian", to_string(e.source)},
                   {"epsilon", vec(e.epsilon)}});
  j["diagnostics"] = std::move(log);
  j["flow"] = to_json(r.flow);
  j["order"] = to_json(r.order);
  j["gram"] = to_json(r.gram);
  return j;
}

json to_json(const SuiteReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"group", c.group},
                      {"name", c.name},
                      {"status", to_string(c.status)},
                      {"measured", c.measured},
                      {"tolerance", c.tolerance},
                      {"detail", c.detail}});
  return {{"all_pass", r.all_pass()}, {"checks", std::move(checks)}};
}

json envelope(const std::string& command, const RunConfig& cfg, json result) {
  json j;
  j["header"] = {{"tool", "lagctrl"}, {"command", command}, {"timestamp", utc_now()}};
  j["config"] = to_json(cfg);
  j["result"] = std::move(result);
  return j;
}

std::string dump(const json& j) {
  std::string out;
  emit(out, j, 0);
  out += "\n";
  return out;
}

void write_json(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot open " + path.string());
  out << dump(j);
  require(static_cast<bool>(out), ErrorKind::Io, "write failed for " + path.string());
}

}  // namespace lagctrl
