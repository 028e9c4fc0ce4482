#include <doctest.h>

#include <cmath>

#include "trajectory_oracle.hpp"
#include "zenograv/error.hpp"
#include "zenograv/feasibility.hpp"
#include "zenograv/scatter.hpp"
#include "zenograv/units.hpp"

using namespace zenograv;

TEST_CASE("experiment point json") {
  ExperimentPoint pt;
  CHECK(pt.v() * pt.t_R == doctest::Approx(pt.R).epsilon(1e-12));
  CHECK(pt.source_mass() == doctest::Approx(1.0890854532e-11).epsilon(1e-9));
  const auto round = experiment_from_json(to_json(pt));
  CHECK(round.t_R == pt.t_R);
  CHECK_FALSE(round.gamma_zeno.has_value());
  const auto withv = experiment_from_json({{"v", 1e-6}});
  CHECK(withv.t_R == doctest::Approx(10.0));
  CHECK_THROWS_AS(experiment_from_json({{"v", 1e-6}, {"t_R", 3.0}}), InvalidParameter);
  CHECK_THROWS_AS(experiment_from_json({{"velocity", 1e-6}}), InvalidParameter);
  CHECK_THROWS_AS(experiment_from_json({{"beta", 0.9}}), InvalidParameter);
  CHECK(experiment_from_json({{"pressure", 1e-12}}).env.pressure == 1e-12);
}

TEST_CASE("reference point") {
  ExperimentPoint pt;
  const auto rep = evaluate_point(pt);
  CHECK(rep.theta_max == doctest::Approx(1.920e-4).epsilon(2e-3));
  CHECK(rep.t_total == doctest::Approx(72.935).epsilon(1e-3));
  CHECK(rep.tau_z == doctest::Approx(1.741).epsilon(2e-3));
  CHECK(rep.rate_dynamics == doctest::Approx(0.574).epsilon(3e-3));
  CHECK(rep.rate_survival == doctest::Approx(24.06).epsilon(3e-3));
  CHECK(rep.decoherence.gamma_total == doctest::Approx(30.31).epsilon(1e-3));
  CHECK(rep.gamma_zeno_required == doctest::Approx(30.31).epsilon(1e-3));
  CHECK(rep.sigma_ratio == doctest::Approx(0.0124).epsilon(1e-2));
  CHECK(rep.kinetic_energy_ev == doctest::Approx(1.969e-12).epsilon(2e-3));
  CHECK(rep.mfp > 1.0);
  CHECK(rep.momentum_ratio == doctest::Approx(1.07e-3).epsilon(2e-2));
  CHECK(rep.pass());
  CHECK(rep.constraint("zeno_rate").verdict == Verdict::kNotApplicable);
  for (const char* name : {"deflection", "duration", "classicality", "momentum_spread", "mean_free_path"}) {
    CHECK(rep.constraint(name).verdict == Verdict::kPass);
    CHECK(rep.constraint(name).margin >= 1.0);
  }

  SUBCASE("with a Zeno rate") {
    pt.gamma_zeno = 1e4;
    CHECK(evaluate_point(pt).constraint("zeno_rate").verdict == Verdict::kPass);
    pt.gamma_zeno = 1e3;
    const auto r = evaluate_point(pt);
    CHECK(r.constraint("zeno_rate").verdict == Verdict::kFail);
    CHECK_FALSE(r.pass());
    CHECK(r.constraint("zeno_rate").limit == doctest::Approx(100.0 * rep.gamma_zeno_required));
  }
  SUBCASE("kinetic energy 3e-12 eV needs t_R = 10 s") {
    pt.t_R = 10.0;
    CHECK(evaluate_point(pt).kinetic_energy_ev == doctest::Approx(3.12e-12).epsilon(1e-2));
  }
  SUBCASE("t_R = 1 s fails the deflection threshold") {
    pt.t_R = 1.0;
    const auto r = evaluate_point(pt);
    CHECK(r.constraint("deflection").verdict == Verdict::kFail);
    CHECK(r.theta_max == doctest::Approx(rep.theta_max / std::pow(10.0, 2.2)).epsilon(1e-3));
  }
  SUBCASE("high pressure inflates the gas channel") {
    pt.env.pressure = 1e-6;
    const auto r = evaluate_point(pt);
    CHECK(r.decoherence.gamma_gas / rep.decoherence.gamma_gas == doctest::Approx(1e9).epsilon(1e-12));
    CHECK(r.gamma_zeno_required > 1e9);
  }
  SUBCASE("fast probe still reports every constraint") {
    pt.t_R = 0.01;
    const auto r = evaluate_point(pt);
    CHECK(r.constraints.size() == 6);
  }
}

TEST_CASE("report json") {
  const auto j = to_json(evaluate_point(ExperimentPoint{}));
  CHECK(j.at("pass").get<bool>());
  CHECK(j.at("constraints").size() == 6);
  CHECK(j.at("kinetic_energy_eV").get<double>() > 0.0);
}

TEST_CASE("feasibility agrees with direct trajectories") {
  ExperimentPoint pt;
  const auto dist = make_superposed_source(pt.R, pt.density, 0.0);
  for (double lg : {1.0, 1.05, 1.1, 1.15, 1.2}) {
    pt.t_R = std::pow(10.0, lg);
    const auto rep = evaluate_point(pt);
    REQUIRE(rep.pass());
    auto cfg = ScatterConfig::with_defaults(dist, pt.beta * pt.R, 0.0, pt.v());
    cfg.dt_max = pt.t_R / 20;
    const auto traj = integrate_trajectory(dist, cfg, pt.m_probe);
    CHECK(traj.deflection_angle == doctest::Approx(rep.theta_max).epsilon(0.05));

    const auto& s0 = traj.samples.front();
    const double mu = constants::G * pt.source_mass();
    const Vec3 hvec = s0.x.cross(s0.v);
    const Vec3 P = (s0.v.cross(hvec) / mu - s0.x.normalized()).normalized();
    const Vec3 n = hvec.normalized();
    const double phi_inf = 0.5 * (constants::pi + rep.theta_max);
    const double phi = pt.zeta * phi_inf;
    const double elapsed = oracle::crossing_time(traj, dist, P, n, phi) -
                           oracle::crossing_time(traj, dist, P, n, -phi);
    CHECK(elapsed == doctest::Approx(rep.t_total).epsilon(0.05));
  }
}

TEST_CASE("sweep region") {
  ExperimentPoint pt;
  SUBCASE("t_R window at beta 1.2, zeta 0.75") {
    const SweepAxis tr{SweepParam::kTR, std::pow(10.0, 0.5), std::pow(10.0, 1.7), 49};
    const SweepAxis p{SweepParam::kPressure, 1e-16, 1e-14, 16};
    const auto cells = sweep_region(pt, tr, p);
    REQUIRE(cells.size() == 49u * 16u);
    double lo = 1e9, hi = 0.0;
    for (const auto& c : cells) {
      if (c.axis2 != p.lo) continue;
      if (c.theta_max > 1e-4 && c.t_total < 100.0) {
        lo = std::min(lo, c.axis1);
        hi = std::max(hi, c.axis1);
      }
    }
    CHECK(std::log10(lo) == doctest::Approx(1.0).epsilon(0.05));
    CHECK(std::log10(hi) == doctest::Approx(1.2).epsilon(0.05));
  }
  SUBCASE("monotone in pressure") {
    pt.gamma_zeno = 3000.0;
    const SweepAxis p{SweepParam::kPressure, 1e-16, 1e-10, 24};
    const SweepAxis m{SweepParam::kProbeMass, 1e-19, 1e-16, 16};
    const auto cells = sweep_region(pt, m, p);
    for (int i = 0; i < m.n; ++i) {
      for (int j = 1; j < p.n; ++j) {
        const auto& prev = cells[i * p.n + j - 1];
        const auto& cur = cells[i * p.n + j];
        CHECK(cur.gamma_required >= prev.gamma_required);
        CHECK(cur.mfp <= prev.mfp);
        if (!prev.pass) CHECK_FALSE(cur.pass);
      }
    }
  }
  SUBCASE("t_R = 10 s contour passes (1e-5 m, 1e-6 m/s)") {
    const SweepAxis r{SweepParam::kR, 1e-6, 1e-4, 17};
    const SweepAxis v{SweepParam::kV, 1e-7, 1e-5, 17};
    const auto cells = sweep_region(pt, r, v);
    const auto& c = cells[8 * 17 + 8];
    CHECK(c.axis1 == doctest::Approx(1e-5));
    CHECK(c.axis2 == doctest::Approx(1e-6));
    CHECK(c.ke_ev == doctest::Approx(3.12e-12).epsilon(1e-2));
    const auto direct = evaluate_point(with_param(with_param(pt, SweepParam::kR, 1e-5), SweepParam::kV, 1e-6));
    CHECK(direct.point.t_R == doctest::Approx(10.0));
    CHECK(c.theta_max == doctest::Approx(direct.theta_max));
  }
  SUBCASE("classicality contour near 1e-18 to 2e-18 kg at R = 1e-5 m") {
    pt.t_R = 17.0;  // t_total close to the 100 s cap
    const SweepAxis m{SweepParam::kProbeMass, 1e-19, 1e-17, 41};
    const SweepAxis r{SweepParam::kR, 1e-6, 1e-4, 17};
    const auto cells = sweep_region(pt, m, r);
    // sigma_min / R = 1e-2 at t = 100 s: m = 2 hbar t / (R/100)^2
    const double m_star = 2.0 * constants::hbar * 100.0 / 1e-14;
    CHECK(m_star == doctest::Approx(2.1e-18).epsilon(1e-2));
    for (const auto& c : cells) {
      if (std::abs(c.axis2 - 1e-5) > 1e-12) continue;
      if (c.t_total < 100.0) continue;
      if (c.axis1 < 0.9 * m_star) CHECK(c.sigma_ratio > 1e-2);
      if (c.axis1 > 1.1 * m_star) CHECK(c.sigma_ratio < 1e-2);
    }
  }
  SUBCASE("determinism and validation") {
    const SweepAxis a{SweepParam::kTemperature, 0.5, 10.0, 16};
    const SweepAxis b{SweepParam::kR, 1e-6, 1e-4, 16};
    const auto c1 = sweep_region(pt, a, b);
    const auto c2 = sweep_region(pt, a, b);
    for (std::size_t k = 0; k < c1.size(); ++k) {
      CHECK(c1[k].gamma_required == c2[k].gamma_required);
      CHECK(c1[k].pass == c2[k].pass);
    }
    CHECK_THROWS_AS(sweep_region(pt, SweepAxis{SweepParam::kV, 1e-7, 1e-5, 16},
                                 SweepAxis{SweepParam::kTR, 1, 10, 16}),
                    InvalidParameter);
    CHECK_THROWS_AS(sweep_region(pt, SweepAxis{SweepParam::kR, 1e-6, 1e-4, 8}, b), InvalidParameter);
    CHECK(sweep_param_from_string("m_probe") == SweepParam::kProbeMass);
    CHECK_THROWS_AS(sweep_param_from_string("x"), InvalidParameter);
  }
}
