#pragma once

#include <string>

#include <json.hpp>

namespace zenograv {

struct Environment {
  double pressure = 1e-15;  // Pa
  double T_env = 1.0;       // K
  double T_int = 1.0;       // K, internal temperature of the source
  // Re and Im of (eps - 1) / (eps + 2); (1, 1) is the worst case.
  double eps_re = 1.0;
  double eps_im = 1.0;

  void validate() const;
};

nlohmann::json to_json(const Environment& env);
// Missing keys keep their defaults; unknown keys are rejected.
Environment environment_from_json(const nlohmann::json& j, Environment base = {});

enum class WavelengthRegime {
  kLong,          // x <= lambda/10: Lambda x^2
  kShort,         // x >= 10 lambda: lambda^2 Lambda
  kIntermediate,  // full saturating form
};

std::string to_string(WavelengthRegime r);

// lambda^2 Lambda (1 - exp(-x^2 / lambda^2)), s^-1.
double gamma_distance(double lambda_loc, double lambda_th, double x);

// Rate in the regime chosen from x / lambda_th.
double gamma_regime(double lambda_loc, double lambda_th, double x, WavelengthRegime* regime);

struct ChannelRate {
  double rate = 0.0;         // s^-1 at the requested separation
  double localization = 0.0; // Lambda, m^-2 s^-1
  double wavelength = 0.0;   // lambda_th, m
  WavelengthRegime regime = WavelengthRegime::kIntermediate;
};

// lambda_th = 2 pi hbar / sqrt(2 pi m_H2 k_B T_e)
double gas_thermal_wavelength(double T_env);

struct GasRate {
  ChannelRate channel;
  // (lambda_th / hbar)(16 pi / 3) p R^2, the short-wavelength rate.
  double short_wavelength = 0.0;
  // 1.96e26 p R^2 / sqrt(T_e)
  double coefficient_form = 0.0;
  // Lambda from the mean molecular speed, 8 sqrt(2 pi) m vbar p R^2 / (3 sqrt(3) hbar^2).
  double kinetic_localization = 0.0;
};

// Rest-gas (H2) collisional decoherence at separation x (default x = R).
// The localization parameter is the one whose saturated value reproduces the
// short-wavelength rate.
GasRate rest_gas_rate(const Environment& env, double R, double x);
GasRate rest_gas_rate(const Environment& env, double R);

// lambda_th = pi^(2/3) hbar c / (k_B T)
double blackbody_thermal_wavelength(double T);

struct BlackbodyRates {
  ChannelRate scattering;
  ChannelRate absorption;
  ChannelRate emission;
  // Lambda forms 5e36 R^6 T_e^9 and 5e25 R^3 T^6.
  double scattering_coefficient_form = 0.0;
  double absorption_coefficient_form = 0.0;
  double emission_coefficient_form = 0.0;
};

BlackbodyRates blackbody_rates(const Environment& env, double R, double x);

struct DecoherenceBreakdown {
  double gamma_gas = 0.0;
  double gamma_bb_sc = 0.0;
  double gamma_bb_abs = 0.0;
  double gamma_bb_em = 0.0;
  double gamma_total = 0.0;
  WavelengthRegime regime_gas = WavelengthRegime::kIntermediate;
  WavelengthRegime regime_bb_sc = WavelengthRegime::kIntermediate;
  WavelengthRegime regime_bb_abs = WavelengthRegime::kIntermediate;
  WavelengthRegime regime_bb_em = WavelengthRegime::kIntermediate;
};

// All channels at separation x = R.
DecoherenceBreakdown total_decoherence(const Environment& env, double R);

// sqrt(2 du^2 + (hbar t / (m du))^2 / 2)
double wavepacket_spread(double m, double t, double du);

struct MinimalSpread {
  double du = 0.0;     // sqrt(hbar t / (2 m))
  double sigma = 0.0;  // sqrt(2 hbar t / m)
};

MinimalSpread minimal_spread(double m, double t);

struct MomentumFloor {
  double dp_min = 0.0;  // sqrt(hbar m / (2 t)), kg m/s
  double ratio = 0.0;   // dp_min / (m v)
};

MomentumFloor momentum_floor(double m, double t, double v);

struct MeanFreePath {
  double length = 0.0;            // k_B T / (sqrt 2 A p), m; +inf at p = 0
  double coefficient_form = 0.0;  // 3.6e-15 T / p
  double cross_section = 0.0;     // pi (d_H2 / 2 + R_probe)^2, m^2
};

MeanFreePath mean_free_path(const Environment& env, double R_probe);

}  // namespace zenograv
