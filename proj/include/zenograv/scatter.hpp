#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "zenograv/error.hpp"
#include "zenograv/massdist.hpp"

namespace zenograv {

using Vec2 = Eigen::Vector2d;

// Probe launch and integration controls. The probe's incoming asymptote is
// the line through (l, b, z) parallel to +z with speed v; z_start is the
// finite stand-in for z -> -infinity.
struct ScatterConfig {
  double b = 0.0;        // impact parameter along y (m)
  double l = 0.0;        // offset along x (m)
  double v = 0.0;        // asymptotic speed along +z (m/s)
  double z_start = 0.0;  // launch plane (m, negative)
  double dt_max = 0.0;   // max step (s)
  double t_max = 0.0;    // integration cutoff (s)
  double r_stop = 0.0;   // termination radius (m), > |z_start|
  double rel_tol = 1e-9;
  // Launch on the monopole hyperbola that has the requested asymptote and
  // report the asymptotic outgoing direction of the osculating monopole orbit
  // at exit. When false, launch with (0,0,v) at (l,b,z_start) and report the
  // raw final velocity.
  bool asymptotic_matching = true;

  void validate() const;

  // z_start = -50 L, r_stop = 100 L with L = max(d, R) of the distribution,
  // dt_max = 2 L / v and a t_max that covers the straight path ten times.
  static ScatterConfig with_defaults(const MassDistribution& dist, double b,
                                     double l, double v);
};

struct TrajectorySample {
  double t = 0.0;
  Vec3 x = Vec3::Zero();
  Vec3 v = Vec3::Zero();
};

struct ProbeTrajectory {
  std::vector<TrajectorySample> samples;
  bool hit_source = false;
  double deflection_angle = 0.0;  // rad, in [0, pi]
  Vec3 incoming_dir = Vec3::UnitZ();
  Vec3 outgoing_dir = Vec3::UnitZ();
  // Smallest distance from the path to any component surface (m); negative
  // when the path enters a component.
  double min_clearance = 0.0;
};

class UnterminatedTrajectory : public NumericalFailure {
 public:
  explicit UnterminatedTrajectory(ProbeTrajectory partial)
      : NumericalFailure("unterminated-trajectory: t_max exceeded before escape"),
        partial_(std::move(partial)) {}
  const ProbeTrajectory& partial() const { return partial_; }

 private:
  ProbeTrajectory partial_;
};

class IntegratorFailure : public NumericalFailure {
 public:
  explicit IntegratorFailure(const std::string& what)
      : NumericalFailure("integrator-failure: " + what) {}
};

class ProjectionSingular : public NumericalFailure {
 public:
  ProjectionSingular()
      : NumericalFailure("projection-singular: direction at the -z pole") {}
};

// Adaptive Dormand-Prince integration of a probe in the static field of
// `dist`. The mass of the probe cancels from the trajectory; it is accepted
// for symmetry with the energy bookkeeping in callers.
ProbeTrajectory integrate_trajectory(const MassDistribution& dist,
                                     const ScatterConfig& cfg, double m_probe);

// Deflection 2 arccot(v^2 b0 / (G M)).
double rutherford_angle(double mass, double v, double b0);
// Small-angle form (8 pi G rho / 3 beta) t_R^2.
double rutherford_angle_small(double density, double beta, double t_R);

struct KeplerScatterTime {
  double t_total = 0.0;       // s, twice periapsis -> zeta * phi_inf
  double theta = 0.0;         // rad
  double phi_inf = 0.0;       // asymptotic true anomaly (rad)
  double eccentricity = 0.0;
  double h = 0.0;             // specific angular momentum (m^2/s)
  double mu = 0.0;            // G M (m^3/s^2)
};

// Time of flight between periapsis and true anomaly phi on a hyperbola.
double hyperbolic_time_from_periapsis(double mu, double h, double e,
                                      double phi);

// Source of mass M and density rho probed at b0 = beta R with v = R / t_R.
KeplerScatterTime kepler_scatter_time(double mass, double density, double beta,
                                      double zeta, double t_R);

// Projection from the pole (0,0,-1) onto the plane z = +1.
Vec2 stereographic_project(const Vec3& direction);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct PatternSpec {
  double radius = 0.0;  // R; impact parameters are b = beta R
  Interval beta{1.2, 2.0};
  Interval l{0.0, 0.0};  // offsets (m); l > 0 values are also run mirrored
  int n_b = 1;
  int n_l = 1;
  double v = 0.0;
  double m_probe = 0.0;
  bool mirror = true;
};

struct PatternPoint {
  double beta = 0.0;
  double l = 0.0;
  double b = 0.0;
  double theta = 0.0;
  Vec2 proj = Vec2::Zero();
  bool hit = false;
  std::optional<std::string> failure;
};

struct ScatterPattern {
  std::vector<PatternPoint> records;  // grid order: beta-major, then l
  std::string projection_pole = "pole (0,0,-1), plane z=+1, scale 2";

  // Records that integrated cleanly and did not hit the source.
  std::vector<PatternPoint> points() const;
  int hit_count() const;
  int failure_count() const;
};

ScatterPattern scan_pattern(const MassDistribution& dist,
                            const PatternSpec& spec);

// Outer-envelope lobe count: points with |proj| >= frac * max |proj| grouped
// by azimuth; gaps wider than `gap_factor` times the mean azimuth spacing
// (over the occupied span, wrap-around excluded) separate groups.
int count_outer_lobes(const ScatterPattern& pattern, double frac = 0.95,
                      double gap_factor = 5.0);
double max_projected_radius(const ScatterPattern& pattern);

enum class Coin { kLeft, kRight };

ProbeTrajectory collapsed_scatter(const MassDistribution& dist_left,
                                  const MassDistribution& dist_right,
                                  const ScatterConfig& cfg, double m_probe,
                                  Coin which);

}  // namespace zenograv
