#include "zenograv/decoherence.hpp"

#include <cmath>
#include <limits>

#include "zenograv/error.hpp"
#include "zenograv/units.hpp"

namespace zenograv {
namespace {

using constants::pi;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidParameter(std::string(what) + " must be > 0");
}

void require_nonnegative(double v, const char* what) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidParameter(std::string(what) + " must be >= 0");
}

ChannelRate channel(double lambda_loc, double lambda_th, double x) {
  ChannelRate out;
  out.localization = lambda_loc;
  out.wavelength = lambda_th;
  out.rate = gamma_regime(lambda_loc, lambda_th, x, &out.regime);
  return out;
}

}  // namespace

void Environment::validate() const {
  require_nonnegative(pressure, "pressure (Pa)");
  require_positive(T_env, "T_env (K)");
  require_positive(T_int, "T_int (K)");
  if (!(eps_re >= 0.0 && eps_re <= 1.0) || !(eps_im >= 0.0 && eps_im <= 1.0)) {
    throw InvalidParameter("permittivity surrogate components must lie in [0, 1]");
  }
}

nlohmann::json to_json(const Environment& env) {
  return {{"pressure", env.pressure}, {"T_env", env.T_env}, {"T_int", env.T_int},
          {"eps_re", env.eps_re},     {"eps_im", env.eps_im}};
}

Environment environment_from_json(const nlohmann::json& j, Environment base) {
  if (!j.is_object()) throw InvalidParameter("environment must be a JSON object");
  for (const auto& [key, val] : j.items()) {
    if (!val.is_number()) throw InvalidParameter("environment key '" + key + "' must be a number");
    const double v = val.get<double>();
    if (key == "pressure") base.pressure = v;
    else if (key == "T_env") base.T_env = v;
    else if (key == "T_int") base.T_int = v;
    else if (key == "eps_re") base.eps_re = v;
    else if (key == "eps_im") base.eps_im = v;
    else throw InvalidParameter("unknown environment key '" + key + "'");
  }
  base.validate();
  return base;
}

std::string to_string(WavelengthRegime r) {
  switch (r) {
    case WavelengthRegime::kLong: return "long";
    case WavelengthRegime::kShort: return "short";
    case WavelengthRegime::kIntermediate: return "intermediate";
  }
  return "unknown";
}

double gamma_distance(double lambda_loc, double lambda_th, double x) {
  require_nonnegative(lambda_loc, "localization parameter");
  require_positive(lambda_th, "thermal wavelength");
  const double s = x / lambda_th;
  return -lambda_th * lambda_th * lambda_loc * std::expm1(-s * s);
}

double gamma_regime(double lambda_loc, double lambda_th, double x, WavelengthRegime* regime) {
  const double s = std::abs(x) / lambda_th;
  WavelengthRegime r = WavelengthRegime::kIntermediate;
  double rate = 0.0;
  if (s <= 0.1) {
    r = WavelengthRegime::kLong;
    rate = lambda_loc * x * x;
  } else if (s >= 10.0) {
    r = WavelengthRegime::kShort;
    rate = lambda_th * lambda_th * lambda_loc;
  } else {
    rate = gamma_distance(lambda_loc, lambda_th, x);
  }
  if (regime) *regime = r;
  return rate;
}

double gas_thermal_wavelength(double T_env) {
  require_positive(T_env, "T_env (K)");
  return 2.0 * pi * constants::hbar / std::sqrt(2.0 * pi * constants::m_H2 * constants::k_B * T_env);
}

GasRate rest_gas_rate(const Environment& env, double R, double x) {
  env.validate();
  require_positive(R, "R (m)");
  require_nonnegative(x, "separation x (m)");
  const double lam = gas_thermal_wavelength(env.T_env);
  GasRate out;
  out.short_wavelength = lam / constants::hbar * (16.0 * pi / 3.0) * env.pressure * R * R;
  out.coefficient_form = 1.96e26 * env.pressure * R * R / std::sqrt(env.T_env);
  const double vbar = std::sqrt(8.0 * constants::k_B * env.T_env / (pi * constants::m_H2));
  out.kinetic_localization = 8.0 * std::sqrt(2.0 * pi) * constants::m_H2 * vbar * env.pressure *
                             R * R / (3.0 * std::sqrt(3.0) * constants::hbar * constants::hbar);
  out.channel = channel(out.short_wavelength / (lam * lam), lam, x);
  return out;
}

GasRate rest_gas_rate(const Environment& env, double R) { return rest_gas_rate(env, R, R); }

double blackbody_thermal_wavelength(double T) {
  require_positive(T, "temperature (K)");
  return std::pow(pi, 2.0 / 3.0) * constants::hbar * constants::c / (constants::k_B * T);
}

BlackbodyRates blackbody_rates(const Environment& env, double R, double x) {
  env.validate();
  require_positive(R, "R (m)");
  require_nonnegative(x, "separation x (m)");
  const double lam_e = blackbody_thermal_wavelength(env.T_env);
  const double lam_i = blackbody_thermal_wavelength(env.T_int);
  const double c = constants::c;
  const double fact8 = 40320.0;

  const double sc = std::pow(1.0 / lam_e, 9) *
                    (fact8 * 8.0 * std::riemann_zeta(9.0) * std::pow(pi, 5) * c * std::pow(R, 6) / 9.0) *
                    env.eps_re * env.eps_re;
  const double abs_em_geom = 16.0 * std::pow(pi, 9) * c * R * R * R / 189.0 * env.eps_im;
  const double ab = std::pow(1.0 / lam_e, 6) * abs_em_geom;
  const double em = std::pow(1.0 / lam_i, 6) * abs_em_geom;

  BlackbodyRates out;
  out.scattering = channel(sc, lam_e, x);
  out.absorption = channel(ab, lam_e, x);
  out.emission = channel(em, lam_i, x);
  out.scattering_coefficient_form = 5e36 * std::pow(R, 6) * std::pow(env.T_env, 9);
  out.absorption_coefficient_form = 5e25 * R * R * R * std::pow(env.T_env, 6);
  out.emission_coefficient_form = 5e25 * R * R * R * std::pow(env.T_int, 6);
  return out;
}

DecoherenceBreakdown total_decoherence(const Environment& env, double R) {
  const auto gas = rest_gas_rate(env, R, R);
  const auto bb = blackbody_rates(env, R, R);
  DecoherenceBreakdown out;
  out.gamma_gas = gas.channel.rate;
  out.gamma_bb_sc = bb.scattering.rate;
  out.gamma_bb_abs = bb.absorption.rate;
  out.gamma_bb_em = bb.emission.rate;
  out.gamma_total = out.gamma_gas + out.gamma_bb_sc + out.gamma_bb_abs + out.gamma_bb_em;
  out.regime_gas = gas.channel.regime;
  out.regime_bb_sc = bb.scattering.regime;
  out.regime_bb_abs = bb.absorption.regime;
  out.regime_bb_em = bb.emission.regime;
  return out;
}

double wavepacket_spread(double m, double t, double du) {
  require_positive(m, "probe mass (kg)");
  require_nonnegative(t, "time (s)");
  require_positive(du, "initial width (m)");
  const double q = constants::hbar * t / (m * du);
  return std::sqrt(2.0 * du * du + 0.5 * q * q);
}

MinimalSpread minimal_spread(double m, double t) {
  require_positive(m, "probe mass (kg)");
  require_positive(t, "time (s)");
  return {std::sqrt(constants::hbar * t / (2.0 * m)), std::sqrt(2.0 * constants::hbar * t / m)};
}

MomentumFloor momentum_floor(double m, double t, double v) {
  require_positive(m, "probe mass (kg)");
  require_positive(t, "time (s)");
  require_positive(v, "probe speed (m/s)");
  MomentumFloor out;
  out.dp_min = std::sqrt(constants::hbar * m / (2.0 * t));
  out.ratio = out.dp_min / (m * v);
  return out;
}

MeanFreePath mean_free_path(const Environment& env, double R_probe) {
  env.validate();
  require_nonnegative(R_probe, "probe radius (m)");
  MeanFreePath out;
  const double r = constants::d_H2 / 2.0 + R_probe;
  out.cross_section = pi * r * r;
  if (env.pressure == 0.0) {
    out.length = std::numeric_limits<double>::infinity();
    out.coefficient_form = std::numeric_limits<double>::infinity();
    return out;
  }
  out.length = constants::k_B * env.T_env / (std::sqrt(2.0) * out.cross_section * env.pressure);
  out.coefficient_form = 3.6e-15 * env.T_env / env.pressure;
  return out;
}

}  // namespace zenograv
