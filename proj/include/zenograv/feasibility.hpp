#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "zenograv/decoherence.hpp"

namespace zenograv {

struct ExperimentPoint {
  double R = 1e-5;          // source radius (m)
  double density = 2600.0;  // kg/m^3
  double beta = 1.2;        // impact parameter b0 = beta R
  double zeta = 0.75;       // fraction of the asymptotic anomaly swept
  double t_R = 12.589254117941673;  // R / v (s), 10^1.1
  double m_probe = 1e-18;   // kg
  double R_probe = 1e-6;    // m, enters the mean free path only
  Environment env;
  double t_total_cap = 100.0;  // s
  double theta_min = 1e-4;     // rad
  // Factor used for "much greater / much smaller".
  double safety_factor = 100.0;
  // sigma_min / R must not exceed this.
  double classicality_threshold = 2e-2;
  // Zeno measurement rate the set-up provides (1/s). Without it the Zeno
  // constraint is reported as not applicable.
  std::optional<double> gamma_zeno;

  double v() const { return R / t_R; }
  double source_mass() const;
  void validate() const;
};

nlohmann::json to_json(const ExperimentPoint& pt);
// Keys as in to_json plus "v" as an alternative to "t_R"; unknown keys throw.
ExperimentPoint experiment_from_json(const nlohmann::json& j, ExperimentPoint base = {});

enum class Verdict { kPass, kFail, kNotApplicable, kIndeterminate };
std::string to_string(Verdict v);

struct ConstraintResult {
  std::string name;
  Verdict verdict = Verdict::kIndeterminate;
  double value = 0.0;
  double limit = 0.0;
  double margin = 0.0;  // >= 1 passes (> 1 for the sharp thresholds)
  std::string note;
};

struct ConstraintReport {
  ExperimentPoint point;
  double v = 0.0;               // m/s
  double source_mass = 0.0;     // kg
  double theta_max = 0.0;       // rad
  double t_total = 0.0;         // s, Kepler value before the cap
  double t_used = 0.0;          // min(t_total, cap)
  double tau_z = 0.0;           // s
  double rate_dynamics = 0.0;   // 1 / tau_Z
  double rate_survival = 0.0;   // t_used / tau_Z^2
  DecoherenceBreakdown decoherence;
  double gamma_zeno_required = 0.0;  // max(decoherence, dynamics)
  double sigma_min = 0.0;       // m
  double sigma_ratio = 0.0;     // sigma_min / R
  double momentum_ratio = 0.0;  // dp_min / (m v)
  double mfp = 0.0;             // m
  double path_length = 0.0;     // v t_used
  double kinetic_energy_ev = 0.0;
  std::vector<ConstraintResult> constraints;

  // Every applicable constraint passes.
  bool pass() const;
  const ConstraintResult& constraint(const std::string& name) const;
};

// Constraint names: deflection, duration, zeno_rate, classicality,
// momentum_spread, mean_free_path. A failing sub-evaluation marks only the
// constraints that depend on it as indeterminate.
ConstraintReport evaluate_point(const ExperimentPoint& pt);

nlohmann::json to_json(const ConstraintReport& report);

enum class SweepParam { kR, kV, kTR, kPressure, kTemperature, kProbeMass };
SweepParam sweep_param_from_string(const std::string& name);
std::string to_string(SweepParam p);

struct SweepAxis {
  SweepParam param = SweepParam::kTR;
  double lo = 1.0;
  double hi = 100.0;
  int n = 16;  // log-spaced, >= 16

  double value(int i) const;
};

struct RegionCell {
  double axis1 = 0.0;
  double axis2 = 0.0;
  double theta_max = 0.0;
  double t_total = 0.0;
  double gamma_required = 0.0;
  double sigma_ratio = 0.0;
  double mfp = 0.0;
  double ke_ev = 0.0;
  bool pass = false;
};

// Cells in axis1-major order. Temperature sets both T_env and T_int; v and
// t_R are tied through t_R = R / v and cannot be swept together.
std::vector<RegionCell> sweep_region(const ExperimentPoint& fixed, const SweepAxis& a1,
                                     const SweepAxis& a2);

ExperimentPoint with_param(ExperimentPoint pt, SweepParam p, double value);

}  // namespace zenograv
