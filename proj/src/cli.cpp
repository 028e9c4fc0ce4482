#include "zenograv/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <unistd.h>

#include "zenograv/decoherence.hpp"
#include "zenograv/feasibility.hpp"
#include "zenograv/massdist.hpp"
#include "zenograv/scatter.hpp"
#include "zenograv/schrod1d.hpp"
#include "zenograv/units.hpp"
#include "zenograv/zeno.hpp"

namespace zenograv::cli {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

// Reads command parameters, records the value actually used for each key and
// rejects keys nobody asked for.
class Params {
 public:
  explicit Params(const nlohmann::json& in) : in_(in) {}

  bool has(const std::string& key) const { return in_.contains(key); }

  double number(const std::string& key, double def, const std::string& unit) {
    double v = def;
    if (in_.contains(key)) v = to_double(key, in_.at(key), unit);
    used_.insert(key);
    resolved_[key] = v;
    return v;
  }

  std::optional<double> optional_number(const std::string& key, const std::string& unit) {
    used_.insert(key);
    if (!in_.contains(key) || in_.at(key).is_null()) {
      resolved_[key] = nullptr;
      return std::nullopt;
    }
    const double v = to_double(key, in_.at(key), unit);
    resolved_[key] = v;
    return v;
  }

  int integer(const std::string& key, int def) {
    int v = def;
    if (in_.contains(key)) {
      const double d = to_double(key, in_.at(key), "count");
      if (d != std::floor(d) || std::abs(d) > 1e9) {
        throw InvalidParameter(key + " must be an integer");
      }
      v = static_cast<int>(d);
    }
    used_.insert(key);
    resolved_[key] = v;
    return v;
  }

  std::string text(const std::string& key, const std::string& def) {
    std::string v = def;
    if (in_.contains(key)) {
      const auto& j = in_.at(key);
      if (!j.is_string()) throw InvalidParameter(key + " must be a string");
      v = j.get<std::string>();
    }
    used_.insert(key);
    resolved_[key] = v;
    return v;
  }

  void finish() const {
    for (const auto& [key, _] : in_.items()) {
      if (!used_.count(key)) throw InvalidParameter("unknown parameter '" + key + "'");
    }
  }

  const ojson& resolved() const { return resolved_; }

 private:
  static double to_double(const std::string& key, const nlohmann::json& j, const std::string& unit) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
      const std::string s = j.get<std::string>();
      char* end = nullptr;
      const double v = std::strtod(s.c_str(), &end);
      if (!s.empty() && end == s.c_str() + s.size()) return v;
    }
    throw InvalidParameter(key + " must be a number (" + unit + ")");
  }

  nlohmann::json in_;
  std::set<std::string> used_;
  ojson resolved_ = ojson::object();
};

struct Context {
  const RunConfig& cfg;
  Params params;
  RunResult result;

  ojson header() const {
    ojson h = ojson::object();
    h["command"] = cfg.command;
    h["seed"] = cfg.seed;
    h["params"] = params.resolved();
    return h;
  }

  std::string csv_preamble() const {
    return "# zenograv " + cfg.command + "\n# config: " + header().dump() + "\n";
  }

  std::string svg_preamble() const {
    std::string dumped = header().dump();
    // "--" may not appear inside an XML comment
    for (std::size_t p = dumped.find("--"); p != std::string::npos; p = dumped.find("--", p)) {
      dumped.replace(p, 2, "- -");
    }
    return "<!-- zenograv " + cfg.command + " config: " + dumped + " -->\n";
  }

  void emit(const std::string& name, const std::string& content) {
    const fs::path path = cfg.output_dir / name;
    write_atomic(path, content);
    result.files.push_back(path);
  }

  void emit_json(const std::string& name, const ojson& body) {
    ojson doc = ojson::object();
    doc["_config"] = header();
    for (const auto& [k, v] : body.items()) doc[k] = v;
    emit(name, doc.dump(2) + "\n");
  }
};

std::string csv_row(const std::vector<double>& values) {
  std::string line;
  bool first = true;
  for (double v : values) {
    if (!first) line += ',';
    line += format_number(v);
    first = false;
  }
  line += '\n';
  return line;
}

ojson from_plain(const nlohmann::json& j) { return ojson::parse(j.dump()); }

ExperimentPoint read_experiment(Params& p) {
  ExperimentPoint pt;
  pt.R = p.number("R", pt.R, "m");
  pt.density = p.number("density", pt.density, "kg/m^3");
  pt.beta = p.number("beta", pt.beta, "b0 / R");
  pt.zeta = p.number("zeta", pt.zeta, "fraction in (0,1)");
  if (p.has("v") && p.has("t_R")) throw InvalidParameter("give either v or t_R, not both");
  if (p.has("v")) {
    const double v = p.number("v", 0.0, "m/s");
    if (!(v > 0.0)) throw InvalidParameter("v must be > 0 m/s");
    pt.t_R = pt.R / v;
  } else {
    pt.t_R = p.number("t_R", pt.t_R, "s");
  }
  pt.m_probe = p.number("m_probe", pt.m_probe, "kg");
  pt.R_probe = p.number("R_probe", pt.R_probe, "m");
  pt.env.pressure = p.number("pressure", pt.env.pressure, "Pa");
  pt.env.T_env = p.number("T_env", pt.env.T_env, "K");
  pt.env.T_int = p.number("T_int", pt.env.T_int, "K");
  pt.env.eps_re = p.number("eps_re", pt.env.eps_re, "in [0,1]");
  pt.env.eps_im = p.number("eps_im", pt.env.eps_im, "in [0,1]");
  pt.t_total_cap = p.number("t_total_cap", pt.t_total_cap, "s");
  pt.theta_min = p.number("theta_min", pt.theta_min, "rad");
  pt.safety_factor = p.number("safety_factor", pt.safety_factor, "dimensionless");
  pt.classicality_threshold = p.number("classicality_threshold", pt.classicality_threshold, "sigma_min / R");
  pt.gamma_zeno = p.optional_number("gamma_zeno", "1/s");
  return pt;
}

// speed from either v or t_R = R / v
double read_speed(Params& p, double R) {
  if (p.has("v") && p.has("t_R")) throw InvalidParameter("give either v or t_R, not both");
  if (p.has("v")) return p.number("v", 0.0, "m/s");
  const double t_R = p.number("t_R", std::pow(10.0, 1.1), "s");
  if (!(t_R > 0.0)) throw InvalidParameter("t_R must be > 0 s");
  return R / t_R;
}

void cmd_scatter(Context& ctx) {
  auto& p = ctx.params;
  const double R = p.number("R", 1e-5, "m");
  const double density = p.number("density", 2600.0, "kg/m^3");
  const double d = p.number("d", 2e-5, "m, separation of the two branches");
  const double beta = p.number("beta", 1.2, "b / R");
  const double l = p.number("l", 0.0, "m");
  const double v = read_speed(p, R);
  const double m_probe = p.number("m_probe", 1e-18, "kg");
  const std::string mode = p.text("source", "superposed");
  p.finish();

  const double b = beta * R;
  std::string branch = "superposed";
  MassDistribution dist = make_superposed_source(R, density, d);
  if (mode == "left" || mode == "right" || mode == "random") {
    Coin coin = mode == "left" ? Coin::kLeft : Coin::kRight;
    if (mode == "random") {
      std::mt19937_64 rng(ctx.cfg.seed);
      coin = std::bernoulli_distribution(0.5)(rng) ? Coin::kRight : Coin::kLeft;
    }
    branch = coin == Coin::kLeft ? "left" : "right";
    const double x = coin == Coin::kLeft ? -0.5 * d : 0.5 * d;
    dist = make_localized_source(R, density, Vec3(x, 0.0, 0.0));
  } else if (mode != "superposed") {
    throw InvalidParameter("source must be superposed, left, right or random");
  }

  auto cfg = ScatterConfig::with_defaults(dist, b, l, v);
  const auto traj = integrate_trajectory(dist, cfg, m_probe);

  std::string csv = ctx.csv_preamble() + "t,x,y,z,vx,vy,vz\n";
  for (const auto& s : traj.samples) {
    csv += csv_row({s.t, s.x.x(), s.x.y(), s.x.z(), s.v.x(), s.v.y(), s.v.z()});
  }
  ctx.emit("scatter.csv", csv);

  const double theta_ruth = rutherford_angle(dist.total_mass(), v, b);
  ojson body = ojson::object();
  body["branch"] = branch;
  body["theta_rad"] = traj.deflection_angle;
  body["theta_rutherford_rad"] = theta_ruth;
  body["hit"] = traj.hit_source;
  body["min_clearance_m"] = traj.min_clearance;
  body["outgoing_dir"] = {traj.outgoing_dir.x(), traj.outgoing_dir.y(), traj.outgoing_dir.z()};
  if (!traj.hit_source) {
    const Vec2 proj = stereographic_project(traj.outgoing_dir);
    body["proj"] = {proj.x(), proj.y()};
  }
  ctx.emit_json("scatter.json", body);
  ctx.result.summary = "scatter branch=" + branch + " theta=" + format_number(traj.deflection_angle) +
                       " rad rutherford=" + format_number(theta_ruth) +
                       " rad hit=" + (traj.hit_source ? "yes" : "no");
}

std::string pattern_svg(const Context& ctx, const ScatterPattern& pat, double dashed) {
  double extent = dashed;
  for (const auto& pt : pat.points()) extent = std::max(extent, pt.proj.norm());
  extent *= 1.15;
  const double size = 600.0;
  auto sx = [&](double x) { return size / 2 + x / extent * size / 2; };
  auto sy = [&](double y) { return size / 2 - y / extent * size / 2; };
  std::string s = ctx.svg_preamble();
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\" viewBox=\"0 0 600 600\">\n";
  s += "<rect width=\"600\" height=\"600\" fill=\"white\"/>\n";
  s += "<line x1=\"0\" y1=\"300\" x2=\"600\" y2=\"300\" stroke=\"#ccc\"/>\n";
  s += "<line x1=\"300\" y1=\"0\" x2=\"300\" y2=\"600\" stroke=\"#ccc\"/>\n";
  s += "<circle cx=\"300\" cy=\"300\" r=\"" + format_number(dashed / extent * size / 2) +
       "\" fill=\"none\" stroke=\"black\" stroke-dasharray=\"6,4\"/>\n";
  for (const auto& pt : pat.points()) {
    const char* color = pt.l < 0 ? "#1f77b4" : (pt.l > 0 ? "#d62728" : "#555555");
    s += "<circle cx=\"" + format_number(sx(pt.proj.x())) + "\" cy=\"" + format_number(sy(pt.proj.y())) +
         "\" r=\"1.6\" fill=\"" + color + "\"/>\n";
  }
  s += "<text x=\"8\" y=\"18\" font-family=\"sans-serif\" font-size=\"12\">projection half-width " +
       format_number(extent) + "</text>\n";
  s += "</svg>\n";
  return s;
}

void cmd_pattern(Context& ctx) {
  auto& p = ctx.params;
  const double R = p.number("R", 1e-5, "m");
  const double density = p.number("density", 2600.0, "kg/m^3");
  const double d = p.number("d", 2e-5, "m, separation of the two branches");
  const double v = read_speed(p, R);
  PatternSpec spec;
  spec.radius = R;
  spec.v = v;
  spec.beta.lo = p.number("beta_min", 1.2, "b / R");
  spec.beta.hi = p.number("beta_max", 2.0, "b / R");
  spec.n_b = p.integer("n_b", 40);
  spec.l.lo = p.number("l_min", 0.0, "m");
  spec.l.hi = p.number("l_max", 2.0 * R, "m");
  spec.n_l = p.integer("n_l", 40);
  spec.m_probe = p.number("m_probe", 1e-18, "kg");
  spec.mirror = p.integer("mirror", 1) != 0;
  p.finish();

  const auto dist = make_superposed_source(R, density, d);
  const auto pat = scan_pattern(dist, spec);
  const double theta_dash = rutherford_angle(dist.total_mass(), v, spec.beta.lo * R);
  const double dashed = 2.0 * std::tan(0.5 * theta_dash);

  std::string csv = ctx.csv_preamble() + "beta,l,b,theta_rad,proj_x,proj_y,hit\n";
  for (const auto& r : pat.records) {
    if (r.failure) continue;
    csv += csv_row({r.beta, r.l, r.b, r.theta, r.proj.x(), r.proj.y(), r.hit ? 1.0 : 0.0});
  }
  ctx.emit("pattern.csv", csv);
  ctx.emit("pattern.svg", pattern_svg(ctx, pat, dashed));

  const int lobes = count_outer_lobes(pat);
  const double rmax = max_projected_radius(pat);
  ojson body = ojson::object();
  body["lobes"] = lobes;
  body["max_projected_radius"] = rmax;
  body["rutherford_radius"] = dashed;
  body["hits"] = pat.hit_count();
  body["failures"] = pat.failure_count();
  body["projection"] = pat.projection_pole;
  ctx.emit_json("pattern.json", body);
  ctx.result.summary = "pattern lobes=" + std::to_string(lobes) + " max_radius=" + format_number(rmax) +
                       " rutherford_radius=" + format_number(dashed) +
                       " hits=" + std::to_string(pat.hit_count()) +
                       " failures=" + std::to_string(pat.failure_count());
}

void cmd_eigen(Context& ctx) {
  auto& p = ctx.params;
  PotentialSpec1D spec;
  spec.a = p.number("a", 1.0, "V0 units");
  spec.b = p.number("b", 4.0, "V0 units");
  spec.c = p.number("c", 1.0, "V0 units, > 0");
  spec.mass = p.number("M", 1e-11, "kg");
  spec.d = p.number("d", 1e-5, "m");
  GridSpec grid;
  grid.x_min = p.number("x_min", grid.x_min, "units of d");
  grid.x_max = p.number("x_max", grid.x_max, "units of d");
  grid.n_points = p.integer("n_points", grid.n_points);
  const int n_states = p.integer("n_states", 2);
  const double x0 = p.number("x0", 1.0, "units of d");
  p.finish();
  if (n_states < 2) throw InvalidParameter("n_states must be >= 2");

  const auto sol = solve_eigen(spec, n_states, grid);
  const auto cls = classify_ground_state(sol, spec);
  const double grad = potential_gradient(spec, x0);

  std::string csv = ctx.csv_preamble() + "x,V_of_x";
  for (int k = 0; k < n_states; ++k) csv += ",psi" + std::to_string(k);
  csv += "\n";
  for (Eigen::Index i = 0; i < sol.x.size(); ++i) {
    std::vector<double> row{sol.x(i), spec.value(sol.x(i))};
    for (const auto& psi : sol.states) row.push_back(psi(i));
    csv += csv_row(row);
  }
  ctx.emit("eigen.csv", csv);

  ojson body = ojson::object();
  body["E0_J"] = sol.energy_joules(0);
  body["E1_J"] = sol.energy_joules(1);
  body["gap_J"] = sol.gap_01();
  body["gradient_J_per_m"] = grad;
  body["label"] = to_string(cls.label);
  body["V0_J"] = sol.v0;
  body["energies_V0"] = sol.energies;
  body["relative_gap"] = cls.relative_gap;
  body["central_fraction"] = cls.central_fraction;
  body["x_barrier"] = cls.x_barrier ? ojson(*cls.x_barrier) : ojson(nullptr);
  body["peak_count"] = cls.peak_count;
  body["unreliable"] = cls.unreliable;
  ctx.emit_json("eigen.json", body);
  ctx.result.summary = "eigen E0=" + format_number(sol.energy_joules(0)) + " J E1=" +
                       format_number(sol.energy_joules(1)) + " J gradient=" + format_number(grad) +
                       " J/m label=" + to_string(cls.label) + (cls.unreliable ? " (unreliable)" : "");
}

CMatrix initial_probe_state(const std::string& name, int dim) {
  if (name == "mixed") return CMatrix::Identity(dim, dim) / static_cast<double>(dim);
  CVector v = CVector::Zero(dim);
  if (name == "zero") {
    v(0) = 1.0;
  } else if (name == "plus") {
    v.setConstant(1.0 / std::sqrt(static_cast<double>(dim)));
  } else {
    throw InvalidParameter("probe_state must be plus, zero or mixed");
  }
  return v * v.adjoint();
}

void cmd_zeno(Context& ctx) {
  auto& p = ctx.params;
  const std::string model_file = p.text("model_file", "");
  const double g = p.number("g", 1.0, "coupling as a rate, 1/s (energy g hbar)");
  const double e_probe = p.number("e_probe", 0.3, "rate, 1/s");
  const double e_source = p.number("e_source", 0.5, "rate, 1/s");
  const double kappa = p.number("kappa", 0.0, "rate, 1/s");
  const std::string probe = p.text("probe_state", "plus");
  const double t = p.number("t", 1.0, "s");
  const double tau_min = p.number("tau_min", 1e-4, "s");
  const double tau_max = p.number("tau_max", 1e-2, "s");
  const int n_tau = p.integer("n_tau", 9);
  p.finish();
  if (!(tau_min > 0.0) || !(tau_max >= tau_min) || n_tau < 1) {
    throw InvalidParameter("need 0 < tau_min <= tau_max (s) and n_tau >= 1");
  }

  std::optional<BipartiteSystem> sys;
  if (!model_file.empty()) {
    std::ifstream in(model_file);
    if (!in) throw IoError("cannot read model file " + model_file);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw InvalidParameter("model file " + model_file + ": " + e.what());
    }
    sys = bipartite_from_json(j);
  } else {
    const double hb = constants::hbar;
    sys = make_coupled_qubits(g * hb, e_probe * hb, e_source * hb, kappa * hb);
  }
  const CMatrix rho0 = initial_probe_state(probe, sys->dim_probe());

  std::vector<double> taus;
  for (int i = 0; i < n_tau; ++i) {
    taus.push_back(n_tau == 1 ? tau_min : tau_min * std::pow(tau_max / tau_min, double(i) / (n_tau - 1)));
  }
  const auto rows = zeno_scan(*sys, t, taus, rho0);
  std::string csv = ctx.csv_preamble() + "tau,N,survival_sim,survival_formula,trace_dist\n";
  for (const auto& r : rows) {
    csv += csv_row({r.tau, static_cast<double>(r.n), r.survival_sim, r.survival_formula, r.trace_dist});
  }
  ctx.emit("zeno.csv", csv);

  // slope of the per-step deficit against tau
  double slope = std::numeric_limits<double>::quiet_NaN();
  if (rows.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
    for (const auto& r : rows) {
      const double deficit = 1.0 - r.survival_sim;
      if (!(deficit > 0.0)) continue;
      const double x = std::log(r.tau), y = std::log(deficit / static_cast<double>(r.n));
      sx += x; sy += y; sxx += x * x; sxy += x * y; n += 1;
    }
    if (n >= 2) slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  const double tau_z = zeno_time_from_variance(*sys, rho0);
  ojson body = ojson::object();
  body["tau_Z_s"] = std::isfinite(tau_z) ? ojson(tau_z) : ojson("inf");
  body["deficit_per_step_exponent"] = std::isfinite(slope) ? ojson(slope) : ojson(nullptr);
  body["dim_probe"] = sys->dim_probe();
  body["dim_source"] = sys->dim_source();
  body["phi_is_eigenstate"] = sys->phi_is_eigenstate();
  ctx.emit_json("zeno.json", body);
  ctx.result.summary = "zeno tau_Z=" + format_number(tau_z) + " s exponent=" + format_number(slope) +
                       " rows=" + std::to_string(rows.size());
}

std::vector<double> log_axis(double lo, double hi, int n, const char* what) {
  if (!(lo > 0.0) || !(hi >= lo) || n < 1) {
    throw InvalidParameter(std::string(what) + " axis needs 0 < min <= max and n >= 1");
  }
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(n == 1 ? lo : lo * std::pow(hi / lo, double(i) / (n - 1)));
  return out;
}

void cmd_decoherence(Context& ctx) {
  auto& p = ctx.params;
  const double r_min = p.number("R_min", 1e-7, "m");
  const double r_max = p.number("R_max", 1e-4, "m");
  const int n_r = p.integer("n_R", 16);
  const double p_min = p.number("p_min", 1e-16, "Pa");
  const double p_max = p.number("p_max", 1e-10, "Pa");
  const int n_p = p.integer("n_p", 16);
  Environment env;
  env.T_env = p.number("T_env", env.T_env, "K");
  env.T_int = p.number("T_int", env.T_int, "K");
  env.eps_re = p.number("eps_re", env.eps_re, "in [0,1]");
  env.eps_im = p.number("eps_im", env.eps_im, "in [0,1]");
  p.finish();

  std::string csv = ctx.csv_preamble() +
                    "R,p,T_env,T_int,gamma_gas,gamma_bb_sc,gamma_bb_abs,gamma_bb_em,gamma_total\n";
  double at_ref = std::numeric_limits<double>::quiet_NaN();
  for (double R : log_axis(r_min, r_max, n_r, "R")) {
    for (double pr : log_axis(p_min, p_max, n_p, "p")) {
      Environment e = env;
      e.pressure = pr;
      const auto d = total_decoherence(e, R);
      csv += csv_row({R, pr, e.T_env, e.T_int, d.gamma_gas, d.gamma_bb_sc, d.gamma_bb_abs,
                      d.gamma_bb_em, d.gamma_total});
    }
  }
  {
    Environment e = env;
    e.pressure = 1e-15;
    at_ref = total_decoherence(e, 1e-5).gamma_total;
  }
  ctx.emit("decoherence.csv", csv);
  ctx.result.summary = "decoherence rows=" + std::to_string(n_r * n_p) +
                       " gamma_total(R=1e-5 m, p=1e-15 Pa)=" + format_number(at_ref) + " 1/s";
}

std::string region_svg(const Context& ctx, const std::vector<RegionCell>& cells, const SweepAxis& a1,
                       const SweepAxis& a2) {
  const double w = 600.0, h = 600.0;
  const double cw = w / a1.n, ch = h / a2.n;
  std::string s = ctx.svg_preamble();
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"660\" height=\"640\" viewBox=\"0 0 660 640\">\n";
  s += "<rect width=\"660\" height=\"640\" fill=\"white\"/>\n";
  for (int i = 0; i < a1.n; ++i) {
    for (int j = 0; j < a2.n; ++j) {
      const auto& c = cells[static_cast<std::size_t>(i) * a2.n + j];
      s += "<rect x=\"" + format_number(40 + i * cw) + "\" y=\"" + format_number(h - (j + 1) * ch) +
           "\" width=\"" + format_number(cw) + "\" height=\"" + format_number(ch) + "\" fill=\"" +
           (c.pass ? "#7fbf7f" : "#dddddd") + "\"/>\n";
    }
  }
  s += "<text x=\"40\" y=\"625\" font-family=\"sans-serif\" font-size=\"12\">" + to_string(a1.param) +
       " " + format_number(a1.lo) + " .. " + format_number(a1.hi) + " (log)</text>\n";
  s += "<text x=\"4\" y=\"14\" font-family=\"sans-serif\" font-size=\"12\">" + to_string(a2.param) + " " +
       format_number(a2.lo) + " .. " + format_number(a2.hi) + " (log)</text>\n";
  s += "</svg>\n";
  return s;
}

void cmd_feasibility(Context& ctx) {
  auto& p = ctx.params;
  const ExperimentPoint pt = read_experiment(p);
  SweepAxis a1, a2;
  a1.param = sweep_param_from_string(p.text("axis1", "t_R"));
  a1.lo = p.number("axis1_min", 1.0, "axis unit");
  a1.hi = p.number("axis1_max", 100.0, "axis unit");
  a1.n = p.integer("n1", 49);
  a2.param = sweep_param_from_string(p.text("axis2", "p"));
  a2.lo = p.number("axis2_min", 1e-16, "axis unit");
  a2.hi = p.number("axis2_max", 1e-10, "axis unit");
  a2.n = p.integer("n2", 16);
  p.finish();

  const auto cells = sweep_region(pt, a1, a2);
  std::string csv = ctx.csv_preamble() +
                    "axis1,axis2,theta_max,t_total,gamma_required,sigma_ratio,mfp,KE_eV,pass\n";
  int passing = 0;
  for (const auto& c : cells) {
    passing += c.pass ? 1 : 0;
    csv += csv_row({c.axis1, c.axis2, c.theta_max, c.t_total, c.gamma_required, c.sigma_ratio, c.mfp,
                    c.ke_ev, c.pass ? 1.0 : 0.0});
  }
  ctx.emit("feasibility.csv", csv);
  ctx.emit("feasibility.svg", region_svg(ctx, cells, a1, a2));
  ctx.result.summary = "feasibility cells=" + std::to_string(cells.size()) +
                       " passing=" + std::to_string(passing);
}

void cmd_report(Context& ctx) {
  auto& p = ctx.params;
  const ExperimentPoint pt = read_experiment(p);
  p.finish();
  const auto rep = evaluate_point(pt);
  ctx.emit_json("report.json", from_plain(to_json(rep)));
  ctx.result.summary = std::string("report ") + (rep.pass() ? "pass" : "fail") +
                       " theta_max=" + format_number(rep.theta_max) +
                       " rad t_total=" + format_number(rep.t_total) +
                       " s gamma_required=" + format_number(rep.gamma_zeno_required) +
                       " 1/s sigma_ratio=" + format_number(rep.sigma_ratio) +
                       " KE=" + format_number(rep.kinetic_energy_ev) + " eV";
}

nlohmann::json parse_value(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  if (s == "null") return nullptr;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (!s.empty() && end == s.c_str() + s.size()) return v;
  return s;
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"scatter", "pattern", "eigen", "zeno",
                                              "decoherence", "feasibility", "report"};
  return names;
}

int exit_code(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kValidation: return 2;
    case ErrorCategory::kNumerical: return 3;
    case ErrorCategory::kIo: return 4;
  }
  return 1;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

void write_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at " + path.string());
  }
}

RunConfig parse_command_line(int argc, const char* const* argv) {
  CLI::App app{"Gravity of a frozen superposed mass: simulations and feasibility"};
  app.require_subcommand(1);
  app.fallthrough();
  app.allow_extras();
  std::string config_file;
  std::string output_dir = ".";
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool dir_given = false;
  app.add_option("--config", config_file, "JSON config file");
  app.add_option_function<std::string>("--output-dir", [&](const std::string& s) {
    output_dir = s;
    dir_given = true;
  }, "directory for output files");
  app.add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& s) {
    seed = s;
    seed_given = true;
  }, "seed for random choices");
  for (const auto& name : commands()) {
    app.add_subcommand(name)->allow_extras();
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    throw;
  } catch (const CLI::ParseError& e) {
    throw InvalidParameter(std::string("command line: ") + e.what());
  }

  RunConfig cfg;
  for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();

  if (!config_file.empty()) {
    std::ifstream in(config_file);
    if (!in) throw IoError("cannot read config file " + config_file);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw InvalidParameter("config file " + config_file + ": " + e.what());
    }
    if (!j.is_object()) throw InvalidParameter("config file must hold a JSON object");
    for (const auto& [key, val] : j.items()) {
      if (key == "command") {
        if (!val.is_string() || val.get<std::string>() != cfg.command) {
          throw InvalidParameter("config file is for command '" + val.dump() + "', not '" + cfg.command + "'");
        }
      } else if (key == "params") {
        if (!val.is_object()) throw InvalidParameter("config 'params' must be an object");
        cfg.params = val;
      } else if (key == "seed") {
        if (!val.is_number_unsigned()) throw InvalidParameter("config 'seed' must be a non-negative integer");
        cfg.seed = val.get<std::uint64_t>();
      } else if (key == "output_dir") {
        if (!val.is_string()) throw InvalidParameter("config 'output_dir' must be a string");
        cfg.output_dir = val.get<std::string>();
      } else {
        throw InvalidParameter("unknown config key '" + key + "'");
      }
    }
  }
  if (seed_given) cfg.seed = seed;
  if (dir_given || config_file.empty()) cfg.output_dir = output_dir;

  const auto extras = app.remaining(true);
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& tok = extras[i];
    if (tok.rfind("--", 0) != 0 || tok.size() < 3) {
      throw InvalidParameter("expected --key value, got '" + tok + "'");
    }
    std::string key = tok.substr(2);
    std::string value;
    if (const auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key = key.substr(0, eq);
    } else {
      if (i + 1 >= extras.size()) throw InvalidParameter("missing value for --" + key);
      value = extras[++i];
    }
    cfg.params[key] = parse_value(value);
  }
  return cfg;
}

RunResult run(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec || !fs::is_directory(cfg.output_dir)) {
    throw IoError("cannot create output directory " + cfg.output_dir.string());
  }
  Context ctx{cfg, Params(cfg.params), {}};
  if (cfg.command == "scatter") cmd_scatter(ctx);
  else if (cfg.command == "pattern") cmd_pattern(ctx);
  else if (cfg.command == "eigen") cmd_eigen(ctx);
  else if (cfg.command == "zeno") cmd_zeno(ctx);
  else if (cfg.command == "decoherence") cmd_decoherence(ctx);
  else if (cfg.command == "feasibility") cmd_feasibility(ctx);
  else if (cfg.command == "report") cmd_report(ctx);
  else throw InvalidParameter("unknown command '" + cfg.command + "'");
  return ctx.result;
}

int main_entry(int argc, const char* const* argv) {
  try {
    const RunConfig cfg = parse_command_line(argc, argv);
    const RunResult res = run(cfg);
    std::cout << res.summary << "\n";
    return 0;
  } catch (const CLI::CallForHelp&) {
    std::cout << "usage: zenograv <scatter|pattern|eigen|zeno|decoherence|feasibility|report> "
                 "[--config file.json] [--output-dir dir] [--seed n] [--key value ...]\n";
    return 0;
  } catch (const Error& e) {
    std::cerr << "zenograv: " << e.what() << "\n";
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "zenograv: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace zenograv::cli
