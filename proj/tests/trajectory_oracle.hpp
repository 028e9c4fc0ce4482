#pragma once

// Helpers for timing ODE trajectories against orbit formulas.

#include <cmath>

#include <doctest.h>

#include "zenograv/scatter.hpp"

namespace oracle {

using zenograv::MassDistribution;
using zenograv::ProbeTrajectory;
using zenograv::TrajectorySample;
using zenograv::Vec3;

// Cubic Hermite position between two samples at fraction u.
inline zenograv::Vec3 hermite(const TrajectorySample& a, const TrajectorySample& b,
             const MassDistribution&, double u) {
  const double h = b.t - a.t;
  const double h00 = 2 * u * u * u - 3 * u * u + 1, h10 = u * u * u - 2 * u * u + u;
  const double h01 = -2 * u * u * u + 3 * u * u, h11 = u * u * u - u * u;
  return h00 * a.x + h10 * h * a.v + h01 * b.x + h11 * h * b.v;
}

// Time at which the true anomaly (about the origin, periapsis direction
// `P`, plane normal `n`) crosses `target`.
inline double crossing_time(const ProbeTrajectory& traj, const MassDistribution& dist,
                     const Vec3& P, const Vec3& n, double target) {
  auto anomaly = [&](const Vec3& x) { return std::atan2(P.cross(x).dot(n), P.dot(x)); };
  for (std::size_t i = 1; i < traj.samples.size(); ++i) {
    const auto& a = traj.samples[i - 1];
    const auto& b = traj.samples[i];
    const double fa = anomaly(a.x) - target, fb = anomaly(b.x) - target;
    if (fa <= 0 && fb > 0) {
      double lo = 0, hi = 1;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (anomaly(hermite(a, b, dist, mid)) - target <= 0 ? lo : hi) = mid;
      }
      return a.t + 0.5 * (lo + hi) * (b.t - a.t);
    }
  }
  FAIL("no crossing found");
  return 0;
}

}  // namespace oracle
