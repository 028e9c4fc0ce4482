#include "zenograv/feasibility.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include "zenograv/error.hpp"
#include "zenograv/massdist.hpp"
#include "zenograv/parallel.hpp"
#include "zenograv/scatter.hpp"
#include "zenograv/units.hpp"
#include "zenograv/zeno.hpp"

namespace zenograv {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs fn and turns library errors into an indeterminate verdict.
ConstraintResult guarded(const std::string& name, const std::function<ConstraintResult()>& fn) {
  try {
    ConstraintResult r = fn();
    r.name = name;
    return r;
  } catch (const Error& e) {
    ConstraintResult r;
    r.name = name;
    r.verdict = Verdict::kIndeterminate;
    r.value = r.limit = r.margin = kNaN;
    r.note = e.what();
    return r;
  }
}

ConstraintResult at_least(double value, double limit, bool sharp) {
  ConstraintResult r;
  r.value = value;
  r.limit = limit;
  r.margin = value / limit;
  r.verdict = (sharp ? r.margin > 1.0 : r.margin >= 1.0) ? Verdict::kPass : Verdict::kFail;
  return r;
}

ConstraintResult at_most(double value, double limit, bool sharp) {
  ConstraintResult r;
  r.value = value;
  r.limit = limit;
  r.margin = value == 0.0 ? std::numeric_limits<double>::infinity() : limit / value;
  r.verdict = (sharp ? r.margin > 1.0 : r.margin >= 1.0) ? Verdict::kPass : Verdict::kFail;
  return r;
}

void require_finite_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidParameter(std::string(what) + " must be > 0");
}

}  // namespace

double ExperimentPoint::source_mass() const { return sphere_mass(R, density); }

void ExperimentPoint::validate() const {
  require_finite_positive(R, "R (m)");
  require_finite_positive(density, "density (kg/m^3)");
  if (!(beta > 1.0)) throw InvalidParameter("beta must be > 1");
  if (!(zeta > 0.0 && zeta < 1.0)) throw InvalidParameter("zeta must lie in (0, 1)");
  require_finite_positive(t_R, "t_R (s)");
  require_finite_positive(m_probe, "m_probe (kg)");
  if (!(R_probe >= 0.0)) throw InvalidParameter("R_probe must be >= 0 m");
  require_finite_positive(t_total_cap, "t_total_cap (s)");
  require_finite_positive(theta_min, "theta_min (rad)");
  if (!(safety_factor >= 1.0)) throw InvalidParameter("safety_factor must be >= 1");
  require_finite_positive(classicality_threshold, "classicality_threshold");
  if (gamma_zeno && !(*gamma_zeno > 0.0)) throw InvalidParameter("gamma_zeno must be > 0 s^-1");
  env.validate();
}

nlohmann::json to_json(const ExperimentPoint& pt) {
  nlohmann::json j = {{"R", pt.R},
                      {"density", pt.density},
                      {"beta", pt.beta},
                      {"zeta", pt.zeta},
                      {"t_R", pt.t_R},
                      {"m_probe", pt.m_probe},
                      {"R_probe", pt.R_probe},
                      {"pressure", pt.env.pressure},
                      {"T_env", pt.env.T_env},
                      {"T_int", pt.env.T_int},
                      {"eps_re", pt.env.eps_re},
                      {"eps_im", pt.env.eps_im},
                      {"t_total_cap", pt.t_total_cap},
                      {"theta_min", pt.theta_min},
                      {"safety_factor", pt.safety_factor},
                      {"classicality_threshold", pt.classicality_threshold}};
  if (pt.gamma_zeno) j["gamma_zeno"] = *pt.gamma_zeno;
  return j;
}

ExperimentPoint experiment_from_json(const nlohmann::json& j, ExperimentPoint pt) {
  if (!j.is_object()) throw InvalidParameter("experiment point must be a JSON object");
  if (j.contains("v") && j.contains("t_R")) {
    throw InvalidParameter("give either v or t_R, not both");
  }
  nlohmann::json env_keys = nlohmann::json::object();
  std::optional<double> v;
  for (const auto& [key, val] : j.items()) {
    if (val.is_null() && key == "gamma_zeno") {
      pt.gamma_zeno.reset();
      continue;
    }
    if (!val.is_number()) throw InvalidParameter("key '" + key + "' must be a number");
    const double x = val.get<double>();
    if (key == "R") pt.R = x;
    else if (key == "density") pt.density = x;
    else if (key == "beta") pt.beta = x;
    else if (key == "zeta") pt.zeta = x;
    else if (key == "t_R") pt.t_R = x;
    else if (key == "v") v = x;
    else if (key == "m_probe") pt.m_probe = x;
    else if (key == "R_probe") pt.R_probe = x;
    else if (key == "pressure" || key == "T_env" || key == "T_int" || key == "eps_re" || key == "eps_im")
      env_keys[key] = x;
    else if (key == "t_total_cap") pt.t_total_cap = x;
    else if (key == "theta_min") pt.theta_min = x;
    else if (key == "safety_factor") pt.safety_factor = x;
    else if (key == "classicality_threshold") pt.classicality_threshold = x;
    else if (key == "gamma_zeno") pt.gamma_zeno = x;
    else throw InvalidParameter("unknown experiment key '" + key + "'");
  }
  pt.env = environment_from_json(env_keys, pt.env);
  if (v) {
    require_finite_positive(*v, "v (m/s)");
    pt.t_R = pt.R / *v;
  }
  pt.validate();
  return pt;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kPass: return "pass";
    case Verdict::kFail: return "fail";
    case Verdict::kNotApplicable: return "not-applicable";
    case Verdict::kIndeterminate: return "indeterminate";
  }
  return "unknown";
}

bool ConstraintReport::pass() const {
  for (const auto& c : constraints) {
    if (c.verdict == Verdict::kFail || c.verdict == Verdict::kIndeterminate) return false;
  }
  return true;
}

const ConstraintResult& ConstraintReport::constraint(const std::string& name) const {
  for (const auto& c : constraints) {
    if (c.name == name) return c;
  }
  throw InvalidParameter("no constraint named '" + name + "'");
}

ConstraintReport evaluate_point(const ExperimentPoint& pt) {
  pt.validate();
  ConstraintReport rep;
  rep.point = pt;
  rep.v = pt.v();
  rep.source_mass = pt.source_mass();
  rep.kinetic_energy_ev = joules_to_ev(0.5 * pt.m_probe * rep.v * rep.v);
  const double b0 = pt.beta * pt.R;
  const double safety = pt.safety_factor;

  rep.theta_max = rep.t_total = rep.t_used = rep.tau_z = kNaN;
  rep.rate_dynamics = rep.rate_survival = rep.gamma_zeno_required = kNaN;
  rep.sigma_min = rep.sigma_ratio = rep.momentum_ratio = rep.mfp = rep.path_length = kNaN;

  rep.constraints.push_back(guarded("deflection", [&] {
    rep.theta_max = rutherford_angle(rep.source_mass, rep.v, b0);
    return at_least(rep.theta_max, pt.theta_min, true);
  }));

  rep.constraints.push_back(guarded("duration", [&] {
    rep.t_total = kepler_scatter_time(rep.source_mass, pt.density, pt.beta, pt.zeta, pt.t_R).t_total;
    rep.t_used = std::min(rep.t_total, pt.t_total_cap);
    return at_most(rep.t_total, pt.t_total_cap, true);
  }));

  // Constraints below use the capped time; they need the Kepler value.
  const bool have_time = std::isfinite(rep.t_used);

  rep.constraints.push_back(guarded("zeno_rate", [&] {
    if (!have_time) throw NumericalFailure("scattering time unavailable");
    rep.tau_z = zeno_time_estimate(pt.m_probe, rep.source_mass, b0);
    const auto bounds = zeno_rate_bounds(rep.tau_z, rep.t_used);
    rep.rate_dynamics = bounds.rate_dynamics;
    rep.rate_survival = bounds.rate_survival;
    rep.decoherence = total_decoherence(pt.env, pt.R);
    rep.gamma_zeno_required = std::max(rep.decoherence.gamma_total, bounds.combined());
    if (!pt.gamma_zeno) {
      ConstraintResult r;
      r.verdict = Verdict::kNotApplicable;
      r.value = kNaN;
      r.limit = safety * rep.gamma_zeno_required;
      r.margin = kNaN;
      r.note = "no Zeno rate given; limit is the rate the set-up must provide";
      return r;
    }
    return at_least(*pt.gamma_zeno, safety * rep.gamma_zeno_required, false);
  }));

  rep.constraints.push_back(guarded("classicality", [&] {
    if (!have_time) throw NumericalFailure("scattering time unavailable");
    rep.sigma_min = minimal_spread(pt.m_probe, rep.t_used).sigma;
    rep.sigma_ratio = rep.sigma_min / pt.R;
    return at_most(rep.sigma_ratio, pt.classicality_threshold, false);
  }));

  rep.constraints.push_back(guarded("momentum_spread", [&] {
    if (!have_time) throw NumericalFailure("scattering time unavailable");
    rep.momentum_ratio = momentum_floor(pt.m_probe, rep.t_used, rep.v).ratio;
    return at_most(rep.momentum_ratio, 1.0 / safety, false);
  }));

  rep.constraints.push_back(guarded("mean_free_path", [&] {
    if (!have_time) throw NumericalFailure("scattering time unavailable");
    rep.mfp = mean_free_path(pt.env, pt.R_probe).length;
    rep.path_length = rep.v * rep.t_used;
    return at_least(rep.mfp, safety * rep.path_length, false);
  }));
  return rep;
}

nlohmann::json to_json(const ConstraintReport& rep) {
  auto num = [](double x) -> nlohmann::json {
    if (std::isfinite(x)) return x;
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return nullptr;
  };
  nlohmann::json constraints = nlohmann::json::array();
  for (const auto& c : rep.constraints) {
    nlohmann::json jc = {{"name", c.name},
                         {"verdict", to_string(c.verdict)},
                         {"value", num(c.value)},
                         {"limit", num(c.limit)},
                         {"margin", num(c.margin)}};
    if (!c.note.empty()) jc["note"] = c.note;
    constraints.push_back(jc);
  }
  const auto& d = rep.decoherence;
  return {{"pass", rep.pass()},
          {"v_m_per_s", num(rep.v)},
          {"source_mass_kg", num(rep.source_mass)},
          {"theta_max_rad", num(rep.theta_max)},
          {"t_total_s", num(rep.t_total)},
          {"t_used_s", num(rep.t_used)},
          {"tau_Z_s", num(rep.tau_z)},
          {"rate_dynamics_per_s", num(rep.rate_dynamics)},
          {"rate_survival_per_s", num(rep.rate_survival)},
          {"decoherence",
           {{"gamma_gas", num(d.gamma_gas)},
            {"gamma_bb_sc", num(d.gamma_bb_sc)},
            {"gamma_bb_abs", num(d.gamma_bb_abs)},
            {"gamma_bb_em", num(d.gamma_bb_em)},
            {"gamma_total", num(d.gamma_total)},
            {"regime_gas", to_string(d.regime_gas)},
            {"regime_bb_sc", to_string(d.regime_bb_sc)},
            {"regime_bb_abs", to_string(d.regime_bb_abs)},
            {"regime_bb_em", to_string(d.regime_bb_em)}}},
          {"gamma_zeno_required_per_s", num(rep.gamma_zeno_required)},
          {"sigma_min_m", num(rep.sigma_min)},
          {"sigma_ratio", num(rep.sigma_ratio)},
          {"momentum_ratio", num(rep.momentum_ratio)},
          {"mfp_m", num(rep.mfp)},
          {"path_length_m", num(rep.path_length)},
          {"kinetic_energy_eV", num(rep.kinetic_energy_ev)},
          {"constraints", constraints}};
}

SweepParam sweep_param_from_string(const std::string& name) {
  if (name == "R") return SweepParam::kR;
  if (name == "v") return SweepParam::kV;
  if (name == "t_R") return SweepParam::kTR;
  if (name == "p" || name == "pressure") return SweepParam::kPressure;
  if (name == "T") return SweepParam::kTemperature;
  if (name == "m_probe") return SweepParam::kProbeMass;
  throw InvalidParameter("unknown sweep axis '" + name + "' (R, v, t_R, p, T, m_probe)");
}

std::string to_string(SweepParam p) {
  switch (p) {
    case SweepParam::kR: return "R";
    case SweepParam::kV: return "v";
    case SweepParam::kTR: return "t_R";
    case SweepParam::kPressure: return "p";
    case SweepParam::kTemperature: return "T";
    case SweepParam::kProbeMass: return "m_probe";
  }
  return "unknown";
}

double SweepAxis::value(int i) const {
  if (n == 1) return lo;
  return lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
}

ExperimentPoint with_param(ExperimentPoint pt, SweepParam p, double value) {
  switch (p) {
    case SweepParam::kR: {
      // keep v fixed when R moves
      const double v = pt.v();
      pt.R = value;
      pt.t_R = value / v;
      break;
    }
    case SweepParam::kV: pt.t_R = pt.R / value; break;
    case SweepParam::kTR: pt.t_R = value; break;
    case SweepParam::kPressure: pt.env.pressure = value; break;
    case SweepParam::kTemperature: pt.env.T_env = pt.env.T_int = value; break;
    case SweepParam::kProbeMass: pt.m_probe = value; break;
  }
  return pt;
}

std::vector<RegionCell> sweep_region(const ExperimentPoint& fixed, const SweepAxis& a1,
                                     const SweepAxis& a2) {
  fixed.validate();
  for (const auto* a : {&a1, &a2}) {
    if (a->n < 16) throw InvalidParameter("sweep axes need at least 16 points");
    if (!(a->lo > 0.0) || !(a->hi > a->lo)) {
      throw InvalidParameter("sweep axes need 0 < lo < hi (log spacing)");
    }
  }
  if (a1.param == a2.param) throw InvalidParameter("sweep axes must differ");
  const auto tied = [](SweepParam p) { return p == SweepParam::kV || p == SweepParam::kTR; };
  if (tied(a1.param) && tied(a2.param)) {
    throw InvalidParameter("v and t_R are tied by t_R = R / v; sweep one of them");
  }
  const bool r_first = a1.param == SweepParam::kR || a2.param == SweepParam::kR;

  std::vector<RegionCell> cells(static_cast<std::size_t>(a1.n) * a2.n);
  parallel_for(cells.size(), [&](std::size_t k) {
    const int i = static_cast<int>(k / a2.n);
    const int j = static_cast<int>(k % a2.n);
    RegionCell& cell = cells[k];
    cell.axis1 = a1.value(i);
    cell.axis2 = a2.value(j);
    // Apply R first so a paired t_R or v axis is not disturbed by the R update.
    ExperimentPoint pt = fixed;
    if (r_first) {
      const auto& ra = a1.param == SweepParam::kR ? a1 : a2;
      const auto& other = a1.param == SweepParam::kR ? a2 : a1;
      const double rv = a1.param == SweepParam::kR ? cell.axis1 : cell.axis2;
      const double ov = a1.param == SweepParam::kR ? cell.axis2 : cell.axis1;
      pt = with_param(with_param(pt, ra.param, rv), other.param, ov);
    } else {
      pt = with_param(with_param(pt, a1.param, cell.axis1), a2.param, cell.axis2);
    }
    try {
      const auto rep = evaluate_point(pt);
      cell.theta_max = rep.theta_max;
      cell.t_total = rep.t_total;
      cell.gamma_required = rep.gamma_zeno_required;
      cell.sigma_ratio = rep.sigma_ratio;
      cell.mfp = rep.mfp;
      cell.ke_ev = rep.kinetic_energy_ev;
      cell.pass = rep.pass();
    } catch (const Error&) {
      cell.theta_max = cell.t_total = cell.gamma_required = kNaN;
      cell.sigma_ratio = cell.mfp = cell.ke_ev = kNaN;
      cell.pass = false;
    }
  });
  return cells;
}

}  // namespace zenograv
