#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <json.hpp>

#include "zenograv/linalg.hpp"

namespace zenograv {

// Probe (x) source model with H = H_P (x) 1 + 1 (x) H_S + H_int. Product
// indices run source-fastest: |a, s> -> a * dim_S + s. Energies in J.
class BipartiteSystem {
 public:
  // Throws InvalidParameter on shape mismatch, non-Hermitian blocks
  // (1e-12 relative, operator norm) or |phi| != 1 (1e-12).
  BipartiteSystem(CMatrix h_probe, CMatrix h_source, CMatrix h_int, CVector phi);

  int dim_probe() const { return static_cast<int>(h_probe_.rows()); }
  int dim_source() const { return static_cast<int>(h_source_.rows()); }
  const CMatrix& h_probe() const { return h_probe_; }
  const CMatrix& h_source() const { return h_source_; }
  const CMatrix& h_int() const { return h_int_; }
  const CVector& phi() const { return phi_; }

  CMatrix hamiltonian() const;
  // 1 (x) |phi><phi| and its complement on the product space.
  CMatrix freeze_projector() const;
  CMatrix reject_projector() const;
  // H_S phi = E phi within 1e-10 relative.
  bool phi_is_eigenstate() const;
  // <phi|H_S|phi>
  double source_energy() const;

 private:
  CMatrix h_probe_;
  CMatrix h_source_;
  CMatrix h_int_;
  CVector phi_;
};

// (1 (x) <phi|) m (1 (x) |phi>), an operator on the probe space. Equals
// Tr_S[(1 (x) P_phi) m].
CMatrix phi_block(const BipartiteSystem& sys, const CMatrix& m);

// H_phi = Tr_S[(1 (x) P_phi) H]
CMatrix effective_hamiltonian(const BipartiteSystem& sys);

// Delta H^2_phi = Tr_S[(1 (x) P_phi) H^2] - H_phi^2
CMatrix zeno_variance(const BipartiteSystem& sys);

struct StroboscopicResult {
  int n_steps = 0;
  double tau = 0.0;            // s
  double survival_prob = 0.0;  // phi-branch probability after n_steps
  double rejected_prob = 0.0;  // accumulated P_perp outcomes
  CMatrix probe_state;         // conditional probe state on the phi branch
  double frozen_fidelity = 0.0;   // <phi| Tr_P rho_nonselective |phi>
  double effective_H_error = 0.0; // || <phi|U(tau)|phi> - exp(-i H_phi tau/hbar) ||
  // Trace distance of probe_state to exp(-i H_phi t/hbar) evolution, t = n tau.
  double ideal_trace_distance = 0.0;
  CMatrix nonselective_state;  // full product-space state of the dephasing channel
};

// n rounds of exact unitary evolution for tau followed by the two-outcome
// measurement {P_phi, P_perp} on the source. The source starts in phi.
StroboscopicResult strobo_evolve(const BipartiteSystem& sys, double tau, int n,
                                 const CMatrix& initial_probe);

// One round of the non-selective channel sum_j (1 (x) P_j) U rho U^dag (1 (x) P_j).
CMatrix dephasing_step(const BipartiteSystem& sys, const CMatrix& propagator,
                       const CMatrix& rho);

// exp(-i h t / hbar)
CMatrix propagator(const CMatrix& h, double t);

// hbar b0 / (G m M); +infinity when m == 0.
double zeno_time_estimate(double m_probe, double m_source, double b0);

struct ZenoRateBounds {
  double rate_dynamics = 0.0;  // 1 / tau_Z
  double rate_survival = 0.0;  // t_total / tau_Z^2
  double combined() const { return std::max(rate_dynamics, rate_survival); }
};

ZenoRateBounds zeno_rate_bounds(double tau_z, double t_total);

struct SurvivalEstimate {
  double product = 1.0;     // [1 - (tau/tau_Z)^2]^N
  double linearized = 1.0;  // 1 - N (tau/tau_Z)^2
  bool out_of_regime = false;  // tau >= tau_Z
};

SurvivalEstimate survival_probability(double tau, double tau_z, long long n);

// Two-qubit test model: H_P = e_P sigma_x, H_S = e_S sigma_z,
// H_int = g sigma_x (x) sigma_x + kappa sigma_z (x) sigma_z, phi = |0>.
// Delta H^2_phi = g^2 1, H_phi = H_P + e_S + kappa sigma_z.
BipartiteSystem make_coupled_qubits(double g, double e_probe, double e_source,
                                    double kappa);

// Model file: {"H_P": M, "H_S": M, "H_int": M, "phi": [[re, im], ...]} with
// M a row-major array of rows of [re, im] pairs.
BipartiteSystem bipartite_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BipartiteSystem& sys);

struct ZenoScanRow {
  double tau = 0.0;
  long long n = 0;
  double survival_sim = 0.0;
  double survival_formula = 0.0;
  double trace_dist = 0.0;
};

// Survival and frozen-limit distance at fixed t = n tau for each tau.
// The formula column uses tau_Z = hbar / sqrt(<Delta H^2_phi>) in the initial
// probe state.
std::vector<ZenoScanRow> zeno_scan(const BipartiteSystem& sys, double t_total,
                                   const std::vector<double>& taus,
                                   const CMatrix& initial_probe);

// hbar / sqrt(Tr[rho Delta H^2_phi]).
double zeno_time_from_variance(const BipartiteSystem& sys, const CMatrix& probe_state);

void validate_density_matrix(const CMatrix& rho, int dim);

}  // namespace zenograv
