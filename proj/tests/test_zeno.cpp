#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Eigenvalues>

#include "oracles.hpp"
#include "zenograv/error.hpp"
#include "zenograv/units.hpp"
#include "zenograv/zeno.hpp"

using namespace zenograv;
using Complex = std::complex<double>;

namespace {
const double kHbar = constants::hbar;

// exp(-i h t / hbar) for Hermitian h by eigendecomposition.
CMatrix eig_propagator(const CMatrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  CVector phase(h.rows());
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    phase(i) = std::exp(Complex(0.0, -es.eigenvalues()(i) * t / kHbar));
  }
  return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

CMatrix random_hermitian(std::mt19937_64& rng, int n, double scale) {
  std::normal_distribution<double> nd;
  CMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Complex(nd(rng), nd(rng));
  return scale * 0.5 * (a + a.adjoint());
}

CMatrix pure(const CVector& v) { return v * v.adjoint(); }

CMatrix plus_state() {
  CVector v(2);
  v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  return pure(v);
}

// Survival of the phi branch by carrying the whole unnormalized state vector
// through U and the projector, independent of the library bookkeeping.
double brute_survival(const BipartiteSystem& sys, double tau, int n, const CVector& probe) {
  const CMatrix u = eig_propagator(sys.hamiltonian(), tau);
  CVector psi(sys.dim_probe() * sys.dim_source());
  for (int a = 0; a < sys.dim_probe(); ++a)
    for (int s = 0; s < sys.dim_source(); ++s)
      psi(a * sys.dim_source() + s) = probe(a) * sys.phi()(s);
  const CMatrix keep = sys.freeze_projector();
  for (int k = 0; k < n; ++k) psi = keep * (u * psi);
  return psi.squaredNorm();
}

// Random 3 (x) 3 system whose variance is not proportional to the identity,
// scaled so that operator norms are about hbar (times of order 1 s).
BipartiteSystem random_system(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  CVector phi(3);
  for (int i = 0; i < 3; ++i) phi(i) = Complex(nd(rng), nd(rng));
  phi.normalize();
  return BipartiteSystem(random_hermitian(rng, 3, 0.3 * kHbar),
                         random_hermitian(rng, 3, 0.3 * kHbar),
                         random_hermitian(rng, 9, 0.3 * kHbar), phi);
}

CMatrix mixed_probe() {
  CMatrix rho = CMatrix::Zero(3, 3);
  rho(0, 0) = 0.6;
  rho(1, 1) = 0.3;
  rho(2, 2) = 0.1;
  rho(0, 1) = rho(1, 0) = 0.2;
  return rho;
}

CVector plus_vector() {
  CVector v(2);
  v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  return v;
}
}  // namespace

TEST_CASE("expm agrees with the eigendecomposition propagator") {
  std::mt19937_64 rng(7);
  for (int n : {1, 2, 4, 9, 16}) {
    for (double scale : {1e-3, 0.3, 2.0, 40.0, 900.0}) {
      const CMatrix h = random_hermitian(rng, n, scale);
      const CMatrix expected = eig_propagator(h * kHbar, 1.0);
      const CMatrix got = expm(Complex(0.0, -1.0) * h);
      CHECK(operator_norm(got - expected) < 1e-10 * std::max(1.0, scale));
    }
  }
  CHECK(operator_norm(expm(CMatrix::Zero(3, 3)) - CMatrix::Identity(3, 3)) == 0.0);
  CMatrix nil(2, 2);
  nil << 0, 1, 0, 0;
  CMatrix expected(2, 2);
  expected << 1, 1, 0, 1;
  CHECK(operator_norm(expm(nil) - expected) < 1e-15);
}

TEST_CASE("kron and trace distance") {
  CMatrix a(2, 2), b(2, 2);
  a << 1, 2, 3, 4;
  b << 0, 1, 1, 0;
  const CMatrix k = kron(a, b);
  CHECK(k(0, 1) == Complex(1.0));
  CHECK(k(3, 2) == Complex(4.0));
  CHECK(k(2, 1) == Complex(3.0));
  CHECK(k(2, 0) == Complex(0.0));
  CVector up(2), down(2);
  up << 1, 0;
  down << 0, 1;
  CHECK(trace_distance(pure(up), pure(down)) == doctest::Approx(1.0));
  CHECK(trace_distance(pure(up), plus_state()) == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("system validation") {
  CVector phi(2);
  phi << 1, 0;
  CMatrix bad(2, 2);
  bad << 0, 1, 0, 0;
  CHECK_THROWS_AS(BipartiteSystem(bad, CMatrix::Identity(2, 2), CMatrix::Zero(4, 4), phi),
                  InvalidParameter);
  CHECK_THROWS_AS(BipartiteSystem(CMatrix::Identity(2, 2), CMatrix::Identity(2, 2),
                                  CMatrix::Zero(3, 3), phi),
                  InvalidParameter);
  CHECK_THROWS_AS(BipartiteSystem(CMatrix::Identity(2, 2), CMatrix::Identity(2, 2),
                                  CMatrix::Zero(4, 4), 2.0 * phi),
                  InvalidParameter);
  const auto sys = make_coupled_qubits(kHbar, 0.3 * kHbar, 0.5 * kHbar, 0.0);
  CHECK(sys.phi_is_eigenstate());
  CHECK_THROWS_AS(strobo_evolve(sys, 0.0, 3, plus_state()), InvalidParameter);
  CHECK_THROWS_AS(strobo_evolve(sys, 0.1, 3, 2.0 * plus_state()), InvalidParameter);
}

TEST_CASE("effective Hamiltonian of a product interaction") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix hp = random_hermitian(rng, 3, 1.0);
    const CMatrix hs = random_hermitian(rng, 3, 1.0);
    const CMatrix a = random_hermitian(rng, 3, 1.0);
    const CMatrix b = random_hermitian(rng, 3, 1.0);
    std::normal_distribution<double> nd;
    CVector phi(3);
    for (int i = 0; i < 3; ++i) phi(i) = Complex(nd(rng), nd(rng));
    phi.normalize();
    const BipartiteSystem sys(hp, hs, kron(a, b), phi);
    const Complex es = phi.dot(hs * phi);
    const Complex eb = phi.dot(b * phi);
    const CMatrix expected = hp + es * CMatrix::Identity(3, 3) + eb * a;
    CHECK(operator_norm(effective_hamiltonian(sys) - expected) < 1e-12);

    // Tr_S[(1 (x) P_phi) H] by explicit partial trace.
    const CMatrix m = sys.freeze_projector() * sys.hamiltonian();
    CMatrix ptrace = CMatrix::Zero(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int s = 0; s < 3; ++s) ptrace(i, j) += m(i * 3 + s, j * 3 + s);
    CHECK(operator_norm(ptrace - expected) < 1e-12);

    const CMatrix var = zeno_variance(sys);
    Eigen::SelfAdjointEigenSolver<CMatrix> ev(var, Eigen::EigenvaluesOnly);
    CHECK(ev.eigenvalues().minCoeff() > -1e-10 * operator_norm(var));
  }
}

TEST_CASE("decoupled source gives H_P plus a constant") {
  CVector phi(2);
  phi << 1, 0;
  CMatrix hp(2, 2), hs(2, 2);
  hp << 0, 0.4 * kHbar, 0.4 * kHbar, 0.1 * kHbar;
  hs << 0.7 * kHbar, 0, 0, -0.7 * kHbar;
  const BipartiteSystem sys(hp, hs, CMatrix::Zero(4, 4), phi);
  const CMatrix h_eff = effective_hamiltonian(sys);
  CHECK(operator_norm(h_eff - hp - 0.7 * kHbar * CMatrix::Identity(2, 2)) < 1e-12 * kHbar);
  CHECK(operator_norm(zeno_variance(sys)) < 1e-12 * kHbar * kHbar);

  const double tau = 0.05;
  const int n = 40;
  const auto res = strobo_evolve(sys, tau, n, plus_state());
  CHECK(res.survival_prob == doctest::Approx(1.0).epsilon(1e-13));
  const CMatrix u = eig_propagator(hp, n * tau);
  CHECK(trace_distance(res.probe_state, u * plus_state() * u.adjoint()) < 1e-10);
  CHECK(res.frozen_fidelity == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("commuting freeze keeps survival at one") {
  // H_int = kappa sigma_z (x) sigma_z commutes with 1 (x) P_0.
  const auto sys = make_coupled_qubits(0.0, 0.3 * kHbar, 0.5 * kHbar, 0.8 * kHbar);
  const auto res = strobo_evolve(sys, 0.2, 25, plus_state());
  CHECK(res.survival_prob == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(res.rejected_prob < 1e-13);
  CHECK(operator_norm(zeno_variance(sys)) < 1e-12 * kHbar * kHbar);
  const CMatrix u = eig_propagator(effective_hamiltonian(sys), 25 * 0.2);
  CHECK(trace_distance(res.probe_state, u * plus_state() * u.adjoint()) < 1e-10);
  CHECK(res.effective_H_error < 1e-12);
}

TEST_CASE("coupled qubits: variance and survival deficit") {
  const double g = kHbar;  // tau_Z = 1 s
  const auto sys = make_coupled_qubits(g, 0.3 * kHbar, 0.5 * kHbar, 0.0);
  CHECK(operator_norm(zeno_variance(sys) - g * g * CMatrix::Identity(2, 2)) < 1e-12 * g * g);
  CHECK(zeno_time_from_variance(sys, plus_state()) == doctest::Approx(1.0).epsilon(1e-12));

  SUBCASE("single-step deficit matches the variance") {
    const double tau = 1e-2;
    const auto res = strobo_evolve(sys, tau, 1, plus_state());
    CHECK((1.0 - res.survival_prob) / (tau * tau) == doctest::Approx(1.0).epsilon(0.01));
  }

  SUBCASE("library survival equals the state-vector oracle") {
    for (int n : {1, 10, 100, 1000}) {
      const double tau = 0.1 / n;
      const auto res = strobo_evolve(sys, tau, n, plus_state());
      CHECK(res.survival_prob ==
            doctest::Approx(brute_survival(sys, tau, n, plus_vector())).epsilon(1e-10));
      CHECK(res.survival_prob + res.rejected_prob == doctest::Approx(1.0).epsilon(1e-10));
    }
  }

  SUBCASE("per-step deficit scales as tau^2") {
    std::vector<double> lt, ld;
    const double t = 0.1;
    for (int n : {10, 100, 1000}) {
      const double tau = t / n;
      const double deficit = 1.0 - brute_survival(sys, tau, n, plus_vector());
      lt.push_back(std::log(tau));
      ld.push_back(std::log(deficit / n));
      CHECK(deficit == doctest::Approx(n * tau * tau).epsilon(0.05));
    }
    CHECK(oracle::fit_slope(lt, ld) == doctest::Approx(2.0).epsilon(0.05));
  }

  SUBCASE("product formula within 5% for tau <= tau_Z / 100") {
    for (double tau : {1e-2, 3e-3}) {
      const int n = 200;
      const auto res = strobo_evolve(sys, tau, n, plus_state());
      const auto est = survival_probability(tau, 1.0, n);
      CHECK(std::abs(res.survival_prob - est.product) < 0.05 * est.product);
    }
  }
}

TEST_CASE("frozen limit: conditional probe state approaches H_phi evolution") {
  const auto sys = random_system(5);
  const double t = 1.0;
  const CMatrix u = eig_propagator(effective_hamiltonian(sys), t);
  const CMatrix ideal = u * mixed_probe() * u.adjoint();
  double prev = 1.0;
  std::vector<double> lt, ld;
  for (int k = 4; k <= 12; ++k) {
    const int n = 1 << k;
    const auto res = strobo_evolve(sys, t / n, n, mixed_probe());
    const double d = trace_distance(res.probe_state, ideal);
    CHECK(res.ideal_trace_distance == doctest::Approx(d).epsilon(1e-9));
    CHECK(d < prev);
    prev = d;
    lt.push_back(std::log(t / n));
    ld.push_back(std::log(d));
    CHECK(res.probe_state.trace().real() == doctest::Approx(1.0).epsilon(1e-10));
    Eigen::SelfAdjointEigenSolver<CMatrix> ev(res.probe_state, Eigen::EigenvaluesOnly);
    CHECK(ev.eigenvalues().minCoeff() > -1e-10);
  }
  CHECK(oracle::fit_slope(lt, ld) == doctest::Approx(1.0).epsilon(0.1));
  const double tau_z = zeno_time_from_variance(sys, mixed_probe());
  const auto fine = strobo_evolve(sys, 1e-3 * tau_z, static_cast<int>(std::lround(t / (1e-3 * tau_z))),
                                  mixed_probe());
  CHECK(fine.ideal_trace_distance < 1e-3);
}

TEST_CASE("random systems: bookkeeping and survival oracle") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto sys = random_system(seed);
    const auto res = strobo_evolve(sys, 0.02, 30, mixed_probe());
    CHECK(res.survival_prob + res.rejected_prob == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(res.survival_prob >= 0.0);
    CHECK(res.survival_prob <= 1.0);
    // mixed state as the average of its eigenvector branches
    Eigen::SelfAdjointEigenSolver<CMatrix> es(mixed_probe());
    double expected = 0.0;
    for (int i = 0; i < 3; ++i) {
      expected += es.eigenvalues()(i) * brute_survival(sys, 0.02, 30, es.eigenvectors().col(i));
    }
    CHECK(res.survival_prob == doctest::Approx(expected).epsilon(1e-10));
    const double tau_z = zeno_time_from_variance(sys, mixed_probe());
    const double tau = tau_z / 100.0;
    const auto one = strobo_evolve(sys, tau, 1, mixed_probe());
    CHECK((1.0 - one.survival_prob) / (tau / tau_z) / (tau / tau_z) ==
          doctest::Approx(1.0).epsilon(0.01));
  }
}

TEST_CASE("non-selective channel") {
  const auto sys = make_coupled_qubits(kHbar, 0.3 * kHbar, 0.5 * kHbar, 0.0);
  const CMatrix u = propagator(sys.hamiltonian(), 0.01);
  CMatrix rho = kron(plus_state(), pure(sys.phi()));
  for (int k = 0; k < 50; ++k) rho = dephasing_step(sys, u, rho);
  CHECK(rho.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(is_hermitian(rho, 1e-10));
  // coherences between the phi and rejected subspaces are removed
  const CMatrix cross = sys.freeze_projector() * rho * sys.reject_projector();
  CHECK(operator_norm(cross) < 1e-14);
  const auto res = strobo_evolve(sys, 0.01, 50, plus_state());
  CHECK(operator_norm(res.nonselective_state - rho) < 1e-12);
  CHECK(res.frozen_fidelity == doctest::Approx(res.survival_prob).epsilon(1e-3));
  CHECK(res.frozen_fidelity >= res.survival_prob - 1e-12);
}

TEST_CASE("zeno time estimate") {
  CHECK(zeno_time_estimate(1e-18, 1e-11, 1.2e-5) == doctest::Approx(1.896).epsilon(1e-3));
  CHECK(zeno_time_estimate(1e-18, 1e-11, 2.4e-5) ==
        doctest::Approx(2.0 * zeno_time_estimate(1e-18, 1e-11, 1.2e-5)));
  CHECK(std::isinf(zeno_time_estimate(0.0, 1e-11, 1.2e-5)));
  CHECK_THROWS_AS(zeno_time_estimate(1e-18, 0.0, 1.2e-5), InvalidParameter);
}

TEST_CASE("zeno rate bounds") {
  const auto b = zeno_rate_bounds(1.9, 100.0);
  CHECK(b.rate_dynamics == doctest::Approx(0.526).epsilon(1e-3));
  CHECK(b.rate_survival == doctest::Approx(27.7).epsilon(1e-2));
  CHECK(b.combined() == b.rate_survival);
  CHECK(zeno_rate_bounds(10.0, 100.0).combined() == doctest::Approx(1.0));
  CHECK_THROWS_AS(zeno_rate_bounds(0.0, 1.0), InvalidParameter);
}

TEST_CASE("survival probability forms") {
  const auto s = survival_probability(1e-3, 1.0, 100000);
  CHECK(s.product == doctest::Approx(0.904837).epsilon(1e-5));
  CHECK(s.linearized == doctest::Approx(0.9));
  CHECK(std::abs(s.product - s.linearized) < 0.01);
  CHECK_FALSE(s.out_of_regime);
  CHECK(survival_probability(2.0, 1.0, 3).out_of_regime);
}

TEST_CASE("zeno scan and model json") {
  const auto sys = make_coupled_qubits(kHbar, 0.3 * kHbar, 0.5 * kHbar, 0.1 * kHbar);
  const auto round = bipartite_from_json(to_json(sys));
  CHECK(operator_norm(round.hamiltonian() - sys.hamiltonian()) == 0.0);
  auto j = to_json(sys);
  j["extra"] = 1;
  CHECK_THROWS_AS(bipartite_from_json(j), InvalidParameter);

  const auto rows = zeno_scan(sys, 0.5, {0.05, 0.01, 0.005}, plus_state());
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].n == 10);
  CHECK(rows[2].n == 100);
  for (const auto& r : rows) {
    CHECK(r.survival_sim == doctest::Approx(r.survival_formula).epsilon(0.05));
  }
  CHECK(rows[2].survival_sim > rows[0].survival_sim);
  const auto rsys = random_system(9);
  const auto rrows = zeno_scan(rsys, 0.5, {0.05, 0.005}, mixed_probe());
  CHECK(rrows[1].trace_dist < rrows[0].trace_dist);
}
