#include "zenograv/scatter.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>

#include "zenograv/ode.hpp"
#include "zenograv/parallel.hpp"
#include "zenograv/units.hpp"

namespace zenograv {
namespace {

using State = DormandPrince<6>::State;

// max(d, R): largest center separation or largest radius.
double length_scale(const MassDistribution& dist) {
  const auto& comps = dist.components();
  double scale = 0.0;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    scale = std::max(scale, comps[i].radius);
    for (std::size_t j = i + 1; j < comps.size(); ++j) {
      scale = std::max(scale, (comps[i].center - comps[j].center).norm());
    }
  }
  return scale;
}

struct LaunchState {
  Vec3 x;
  Vec3 v;
};

// Point on the monopole (total mass at the barycenter) hyperbola whose
// incoming asymptote is the line through (l, b, .) along +z with speed v,
// placed where it crosses z = z_start.
LaunchState launch_state(const MassDistribution& dist, const ScatterConfig& cfg) {
  const LaunchState straight{Vec3(cfg.l, cfg.b, cfg.z_start),
                             Vec3(0.0, 0.0, cfg.v)};
  if (!cfg.asymptotic_matching) return straight;
  const Vec3 c = dist.barycenter();
  const double mu = constants::G * dist.total_mass();
  const Vec3 offset(cfg.l - c.x(), cfg.b - c.y(), 0.0);
  const double B = offset.norm();
  if (!(mu > 0.0) || !(B > 0.0)) return straight;

  // e^2 - 1 = (v^2 B / mu)^2 exactly for a hyperbola with this asymptote.
  const double s = cfg.v * cfg.v * B / mu;
  const double e = std::sqrt(1.0 + s * s);
  const double h = cfg.v * B;
  const double semilatus = h * h / mu;
  const Vec3 zhat = Vec3::UnitZ();
  const Vec3 phat = offset / B;
  const Vec3 P = (zhat + s * phat) / e;  // periapsis direction
  const Vec3 Q = (s * zhat - phat) / e;
  const double f_inf = std::atan2(s, -1.0);

  auto position = [&](double f) {
    const double r = semilatus / (1.0 + e * std::cos(f));
    return Vec3(c + r * (std::cos(f) * P + std::sin(f) * Q));
  };
  if (position(0.0).z() <= cfg.z_start) {
    throw InvalidParameter(
        "z_start must lie before the periapsis of the incoming hyperbola");
  }
  double lo = -f_inf;
  double hi = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= -f_inf) break;
    if (position(mid).z() < cfg.z_start) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double f = hi;
  const Vec3 vel = mu / h * (-std::sin(f) * P + (e + std::cos(f)) * Q);
  return {position(f), vel};
}

// Asymptotic outgoing direction of the osculating monopole orbit. Falls back
// to the instantaneous velocity when the orbit is not hyperbolic.
Vec3 asymptotic_direction(const MassDistribution& dist, const Vec3& x,
                          const Vec3& v) {
  const Vec3 vhat = v.normalized();
  const double mu = constants::G * dist.total_mass();
  if (!(mu > 0.0)) return vhat;
  const Vec3 r = x - dist.barycenter();
  const double rn = r.norm();
  const double energy = 0.5 * v.squaredNorm() - mu / rn;
  const Vec3 hvec = r.cross(v);
  const double hn = hvec.norm();
  if (!(energy > 0.0) || !(hn > 0.0)) return vhat;
  const Vec3 evec = v.cross(hvec) / mu - r / rn;
  const double e = evec.norm();
  if (!(e > 1.0)) return vhat;
  const double s = std::sqrt(2.0 * energy) * hn / mu;  // sqrt(e^2 - 1)
  const Vec3 P = evec / e;
  const Vec3 Q = (hvec / hn).cross(P);
  return ((-P + s * Q) / e).normalized();
}

double segment_distance(const Vec3& a, const Vec3& b, const Vec3& p) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (a + t * ab - p).norm();
}

double angle_between(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] =
        n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  }
  return out;
}

}  // namespace

void ScatterConfig::validate() const {
  if (!(v > 0.0)) throw InvalidParameter("probe speed v must be > 0 m/s");
  if (!(z_start < 0.0)) throw InvalidParameter("z_start must be < 0 m");
  if (!(dt_max > 0.0)) throw InvalidParameter("dt_max must be > 0 s");
  if (!(t_max > 0.0)) throw InvalidParameter("t_max must be > 0 s");
  if (!(r_stop > std::abs(z_start))) {
    throw InvalidParameter("r_stop must exceed |z_start| (m)");
  }
  if (!(rel_tol > 0.0)) throw InvalidParameter("rel_tol must be > 0");
  if (!std::isfinite(b) || !std::isfinite(l)) {
    throw InvalidParameter("impact parameter b and offset l must be finite (m)");
  }
}

ScatterConfig ScatterConfig::with_defaults(const MassDistribution& dist,
                                           double b, double l, double v) {
  if (!(v > 0.0)) throw InvalidParameter("probe speed v must be > 0 m/s");
  const double L = length_scale(dist);
  ScatterConfig cfg;
  cfg.b = b;
  cfg.l = l;
  cfg.v = v;
  cfg.z_start = -50.0 * L;
  cfg.r_stop = 100.0 * L;
  cfg.dt_max = 2.0 * L / v;
  cfg.t_max = 10.0 * 150.0 * L / v;
  return cfg;
}

ProbeTrajectory integrate_trajectory(const MassDistribution& dist,
                                     const ScatterConfig& cfg,
                                     double /*m_probe*/) {
  cfg.validate();
  const LaunchState launch = launch_state(dist, cfg);

  State y;
  y << launch.x, launch.v;
  if (!y.allFinite()) throw IntegratorFailure("non-finite launch state");

  const double L = std::max(length_scale(dist), std::abs(cfg.b));
  State scale;
  scale << Vec3::Constant(cfg.rel_tol * 1e-2 * L), Vec3::Constant(cfg.rel_tol * 1e-4 * cfg.v);
  const DormandPrince<6> stepper(cfg.rel_tol, scale);
  const auto rhs = [&dist](double, const State& s) {
    State d;
    d << s.tail<3>(), acceleration_at(dist, s.head<3>());
    return d;
  };

  ProbeTrajectory traj;
  traj.incoming_dir = Vec3::UnitZ();
  traj.min_clearance = std::numeric_limits<double>::infinity();
  auto update_clearance = [&](const Vec3& a, const Vec3& b) {
    for (const auto& c : dist.components()) {
      const double clearance = segment_distance(a, b, c.center) - c.radius;
      traj.min_clearance = std::min(traj.min_clearance, clearance);
      if (clearance < 0.0) traj.hit_source = true;
    }
  };

  double t = 0.0;
  State k1 = rhs(t, y);
  traj.samples.push_back({t, y.head<3>(), y.tail<3>()});
  update_clearance(y.head<3>(), y.head<3>());
  double h = std::min(cfg.dt_max, 0.1 * L / cfg.v);
  int rejections = 0;

  while (true) {
    if (t > cfg.t_max) throw UnterminatedTrajectory(std::move(traj));
    h = std::min(h, cfg.dt_max);
    const auto step = stepper.attempt(rhs, t, y, k1, h);
    if (!step.y.allFinite() || !std::isfinite(step.error)) {
      h *= 0.2;
      if (++rejections > 50) throw IntegratorFailure("non-finite state");
      continue;
    }
    if (step.error <= 1.0) {
      update_clearance(y.head<3>(), step.y.head<3>());
      t += h;
      y = step.y;
      k1 = step.dydt;
      traj.samples.push_back({t, y.head<3>(), y.tail<3>()});
      rejections = 0;
      const Vec3 x = y.head<3>();
      if (x.norm() > cfg.r_stop && x.dot(y.tail<3>()) > 0.0) break;
    } else if (++rejections > 100) {
      throw IntegratorFailure("too many consecutive step rejections");
    }
    h = DormandPrince<6>::next_step(h, step.error);
    if (h < 1e-14 * std::max(t, cfg.dt_max)) {
      throw IntegratorFailure("step size underflow");
    }
  }

  const auto& last = traj.samples.back();
  traj.outgoing_dir = cfg.asymptotic_matching
                          ? asymptotic_direction(dist, last.x, last.v)
                          : Vec3(last.v.normalized());
  traj.deflection_angle = angle_between(traj.incoming_dir, traj.outgoing_dir);
  return traj;
}

double rutherford_angle(double mass, double v, double b0) {
  if (!(mass > 0.0) || !(v > 0.0) || !(b0 > 0.0)) {
    throw InvalidParameter("rutherford_angle needs M > 0 kg, v > 0 m/s, b0 > 0 m");
  }
  // arccot(x) = atan(1/x) for x > 0
  return 2.0 * std::atan(constants::G * mass / (v * v * b0));
}

double rutherford_angle_small(double density, double beta, double t_R) {
  return 8.0 * constants::pi * constants::G * density / (3.0 * beta) * t_R * t_R;
}

double hyperbolic_time_from_periapsis(double mu, double h, double e,
                                      double phi) {
  if (!(e > 1.0)) throw InvalidParameter("eccentricity must exceed 1");
  const double e2m1 = (e - 1.0) * (e + 1.0);
  const double u = std::sqrt((e - 1.0) / (e + 1.0)) * std::tan(phi / 2.0);
  if (!(std::abs(u) < 1.0)) {
    throw InvalidParameter("true anomaly beyond the asymptote");
  }
  const double scaled = e * std::sin(phi) / (e2m1 * (1.0 + e * std::cos(phi))) -
                        2.0 * std::atanh(u) / std::pow(e2m1, 1.5);
  return scaled * h * h * h / (mu * mu);
}

KeplerScatterTime kepler_scatter_time(double mass, double density, double beta,
                                      double zeta, double t_R) {
  if (!(mass > 0.0) || !(density > 0.0)) {
    throw InvalidParameter("mass (kg) and density (kg/m^3) must be > 0");
  }
  if (!(beta > 1.0)) throw InvalidParameter("beta must be > 1");
  if (!(zeta > 0.0 && zeta < 1.0)) throw InvalidParameter("zeta must be in (0,1)");
  if (!(t_R > 0.0)) throw InvalidParameter("t_R must be > 0 s");

  const double radius = std::cbrt(3.0 * mass / (4.0 * constants::pi * density));
  const double v = radius / t_R;
  KeplerScatterTime out;
  out.theta = rutherford_angle(mass, v, beta * radius);
  out.phi_inf = 0.5 * (constants::pi + out.theta);
  // cos(phi_inf) = -1/e with cos(phi_inf) = -sin(theta/2)
  out.eccentricity = 1.0 / std::sin(0.5 * out.theta);
  if (!(out.eccentricity > 1.0)) {
    throw InvalidParameter("non-hyperbolic scattering (e <= 1)");
  }
  out.mu = constants::G * mass;
  const double k = 4.0 / 3.0 * constants::pi * constants::G * density;
  // (G M)^2 / h^3 = k^2 t_R^3 / beta^3
  out.h = std::cbrt(out.mu * out.mu * beta * beta * beta /
                    (k * k * t_R * t_R * t_R));
  out.t_total = 2.0 * hyperbolic_time_from_periapsis(
                          out.mu, out.h, out.eccentricity, zeta * out.phi_inf);
  return out;
}

Vec2 stereographic_project(const Vec3& direction) {
  if (!direction.allFinite() || std::abs(direction.norm() - 1.0) > 1e-9) {
    throw InvalidParameter("projection needs a unit direction (|u| = 1 within 1e-9)");
  }
  const double denom = 1.0 + direction.z();
  if (denom < 1e-12) throw ProjectionSingular();
  return {2.0 * direction.x() / denom, 2.0 * direction.y() / denom};
}

std::vector<PatternPoint> ScatterPattern::points() const {
  std::vector<PatternPoint> out;
  for (const auto& r : records) {
    if (!r.hit && !r.failure) out.push_back(r);
  }
  return out;
}

int ScatterPattern::hit_count() const {
  return static_cast<int>(std::count_if(records.begin(), records.end(),
                                        [](const auto& r) { return r.hit; }));
}

int ScatterPattern::failure_count() const {
  return static_cast<int>(std::count_if(
      records.begin(), records.end(),
      [](const auto& r) { return r.failure.has_value(); }));
}

ScatterPattern scan_pattern(const MassDistribution& dist,
                            const PatternSpec& spec) {
  if (spec.n_b < 1 || spec.n_l < 1) {
    throw InvalidParameter("grid counts n_b and n_l must be >= 1");
  }
  if (!(spec.radius > 0.0)) throw InvalidParameter("pattern radius must be > 0 m");
  if (!(spec.beta.lo <= spec.beta.hi) || !(spec.l.lo <= spec.l.hi)) {
    throw InvalidParameter("pattern ranges must satisfy lo <= hi");
  }
  if (!(spec.v > 0.0)) throw InvalidParameter("probe speed v must be > 0 m/s");

  std::vector<double> offsets;
  for (double l : linspace(spec.l.lo, spec.l.hi, spec.n_l)) {
    offsets.push_back(l);
    if (spec.mirror && l != 0.0) offsets.push_back(-l);
  }
  std::sort(offsets.begin(), offsets.end());

  ScatterPattern pattern;
  for (double beta : linspace(spec.beta.lo, spec.beta.hi, spec.n_b)) {
    for (double l : offsets) {
      PatternPoint p;
      p.beta = beta;
      p.l = l;
      p.b = beta * spec.radius;
      pattern.records.push_back(p);
    }
  }

  parallel_for(pattern.records.size(), [&](std::size_t i) {
    auto& p = pattern.records[i];
    try {
      const auto cfg = ScatterConfig::with_defaults(dist, p.b, p.l, spec.v);
      const auto traj = integrate_trajectory(dist, cfg, spec.m_probe);
      p.theta = traj.deflection_angle;
      p.hit = traj.hit_source;
      p.proj = stereographic_project(traj.outgoing_dir);
    } catch (const Error& e) {
      p.failure = e.what();
    }
  });
  return pattern;
}

double max_projected_radius(const ScatterPattern& pattern) {
  double r = 0.0;
  for (const auto& p : pattern.points()) r = std::max(r, p.proj.norm());
  return r;
}

int count_outer_lobes(const ScatterPattern& pattern, double frac,
                      double gap_factor) {
  const auto pts = pattern.points();
  const double rmax = max_projected_radius(pattern);
  std::vector<double> az;
  for (const auto& p : pts) {
    if (p.proj.norm() >= frac * rmax) az.push_back(std::atan2(p.proj.y(), p.proj.x()));
  }
  if (az.size() < 2) return static_cast<int>(az.size());
  std::sort(az.begin(), az.end());
  std::vector<double> gaps;
  for (std::size_t i = 1; i < az.size(); ++i) gaps.push_back(az[i] - az[i - 1]);
  // Mean spacing inside the occupied span; the wrap-around gap is excluded.
  const double mean = (az.back() - az.front()) / static_cast<double>(az.size() - 1);
  if (!(mean > 0.0)) return 1;
  gaps.push_back(2.0 * constants::pi + az.front() - az.back());
  const auto wide = std::count_if(gaps.begin(), gaps.end(), [&](double g) {
    return g > gap_factor * mean;
  });
  return std::max<int>(1, static_cast<int>(wide));
}

ProbeTrajectory collapsed_scatter(const MassDistribution& dist_left,
                                  const MassDistribution& dist_right,
                                  const ScatterConfig& cfg, double m_probe,
                                  Coin which) {
  return integrate_trajectory(which == Coin::kLeft ? dist_left : dist_right, cfg,
                              m_probe);
}

}  // namespace zenograv
