#include "zenograv/zeno.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include <Eigen/Eigenvalues>

#include "zenograv/error.hpp"
#include "zenograv/units.hpp"

namespace zenograv {
namespace {

using Complex = std::complex<double>;

CMatrix lift(const BipartiteSystem& sys) {
  return kron(CMatrix::Identity(sys.dim_probe(), sys.dim_probe()),
              CMatrix(sys.phi()));
}

CMatrix pauli_x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

CMatrix pauli_z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

CMatrix matrix_from_json(const nlohmann::json& j, const char* name) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) {
    throw InvalidParameter(std::string(name) + " must be an array of rows of [re, im] pairs");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  CMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j.at(static_cast<std::size_t>(r));
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw InvalidParameter(std::string(name) + " has ragged rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto& z = row.at(static_cast<std::size_t>(c));
      if (!z.is_array() || z.size() != 2) {
        throw InvalidParameter(std::string(name) + " entries must be [re, im] pairs (J)");
      }
      m(r, c) = Complex(z.at(0).get<double>(), z.at(1).get<double>());
    }
  }
  return m;
}

nlohmann::json matrix_to_json(const CMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back({m(r, c).real(), m(r, c).imag()});
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

BipartiteSystem::BipartiteSystem(CMatrix h_probe, CMatrix h_source,
                                 CMatrix h_int, CVector phi)
    : h_probe_(std::move(h_probe)),
      h_source_(std::move(h_source)),
      h_int_(std::move(h_int)),
      phi_(std::move(phi)) {
  const auto dp = h_probe_.rows();
  const auto ds = h_source_.rows();
  if (dp < 1 || ds < 1 || h_probe_.cols() != dp || h_source_.cols() != ds) {
    throw InvalidParameter("H_P and H_S must be non-empty square matrices");
  }
  if (h_int_.rows() != dp * ds || h_int_.cols() != dp * ds) {
    throw InvalidParameter("H_int must act on the dim_P * dim_S product space");
  }
  if (phi_.size() != ds) throw InvalidParameter("phi must have dim_S entries");
  if (!is_hermitian(h_probe_) || !is_hermitian(h_source_) || !is_hermitian(h_int_)) {
    throw InvalidParameter("Hamiltonian blocks must be Hermitian (J)");
  }
  if (std::abs(phi_.norm() - 1.0) > 1e-12) {
    throw InvalidParameter("phi must be a unit vector");
  }
}

CMatrix BipartiteSystem::hamiltonian() const {
  const auto dp = dim_probe();
  const auto ds = dim_source();
  return kron(h_probe_, CMatrix::Identity(ds, ds)) +
         kron(CMatrix::Identity(dp, dp), h_source_) + h_int_;
}

CMatrix BipartiteSystem::freeze_projector() const {
  return kron(CMatrix::Identity(dim_probe(), dim_probe()), phi_ * phi_.adjoint());
}

CMatrix BipartiteSystem::reject_projector() const {
  const auto n = dim_probe() * dim_source();
  return CMatrix::Identity(n, n) - freeze_projector();
}

double BipartiteSystem::source_energy() const {
  return (phi_.adjoint() * h_source_ * phi_)(0, 0).real();
}

bool BipartiteSystem::phi_is_eigenstate() const {
  const double scale = std::max(operator_norm(h_source_), 1e-300);
  return (h_source_ * phi_ - source_energy() * phi_).norm() <= 1e-10 * scale;
}

CMatrix phi_block(const BipartiteSystem& sys, const CMatrix& m) {
  const CMatrix v = lift(sys);
  return v.adjoint() * m * v;
}

CMatrix effective_hamiltonian(const BipartiteSystem& sys) {
  return phi_block(sys, sys.hamiltonian());
}

CMatrix zeno_variance(const BipartiteSystem& sys) {
  const CMatrix h = sys.hamiltonian();
  const CMatrix h_phi = phi_block(sys, h);
  const CMatrix var = phi_block(sys, h * h) - h_phi * h_phi;
  return 0.5 * (var + var.adjoint());
}

CMatrix propagator(const CMatrix& h, double t) {
  return expm(Complex(0.0, -t / constants::hbar) * h);
}

void validate_density_matrix(const CMatrix& rho, int dim) {
  if (rho.rows() != dim || rho.cols() != dim) {
    throw InvalidParameter("probe density matrix must be dim_P x dim_P");
  }
  if (!is_hermitian(rho, 1e-10)) {
    throw InvalidParameter("probe density matrix must be Hermitian");
  }
  if (std::abs(rho.trace() - Complex(1.0)) > 1e-10) {
    throw InvalidParameter("probe density matrix must have unit trace");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10) {
    throw InvalidParameter("probe density matrix must be positive semidefinite");
  }
}

CMatrix dephasing_step(const BipartiteSystem& sys, const CMatrix& u,
                       const CMatrix& rho) {
  const CMatrix evolved = u * rho * u.adjoint();
  const CMatrix keep = sys.freeze_projector();
  const CMatrix reject = sys.reject_projector();
  return keep * evolved * keep + reject * evolved * reject;
}

StroboscopicResult strobo_evolve(const BipartiteSystem& sys, double tau, int n,
                                 const CMatrix& initial_probe) {
  if (!(tau > 0.0)) throw InvalidParameter("step duration tau must be > 0 s");
  if (n < 0) throw InvalidParameter("step count must be >= 0");
  validate_density_matrix(initial_probe, sys.dim_probe());

  const CMatrix u = propagator(sys.hamiltonian(), tau);
  const CMatrix v = lift(sys);
  const CMatrix reject = sys.reject_projector();
  const CMatrix h_phi = effective_hamiltonian(sys);

  StroboscopicResult out;
  out.n_steps = n;
  out.tau = tau;

  // phi branch stays alpha (x) P_phi; only the probe block is carried.
  CMatrix alpha = initial_probe;
  CMatrix rho_ns = kron(initial_probe, sys.phi() * sys.phi().adjoint());
  for (int k = 0; k < n; ++k) {
    const CMatrix sigma = u * (v * alpha * v.adjoint()) * u.adjoint();
    alpha = v.adjoint() * sigma * v;
    out.rejected_prob += (reject * sigma).trace().real();
    rho_ns = dephasing_step(sys, u, rho_ns);
  }
  out.survival_prob = alpha.trace().real();
  out.probe_state = out.survival_prob > 0.0 ? CMatrix(alpha / out.survival_prob) : alpha;
  out.nonselective_state = rho_ns;

  const CMatrix rho_s = [&] {
    const int dp = sys.dim_probe();
    const int ds = sys.dim_source();
    CMatrix acc = CMatrix::Zero(ds, ds);
    for (int a = 0; a < dp; ++a) acc += rho_ns.block(a * ds, a * ds, ds, ds);
    return acc;
  }();
  out.frozen_fidelity = (sys.phi().adjoint() * rho_s * sys.phi())(0, 0).real();

  out.effective_H_error = operator_norm(v.adjoint() * u * v - propagator(h_phi, tau));
  const CMatrix u_ideal = propagator(h_phi, n * tau);
  out.ideal_trace_distance =
      trace_distance(out.probe_state, u_ideal * initial_probe * u_ideal.adjoint());
  return out;
}

double zeno_time_estimate(double m_probe, double m_source, double b0) {
  if (!(m_probe >= 0.0) || !(m_source > 0.0) || !(b0 > 0.0)) {
    throw InvalidParameter("zeno time needs m >= 0 kg, M > 0 kg, b0 > 0 m");
  }
  if (m_probe == 0.0) return std::numeric_limits<double>::infinity();
  return constants::hbar * b0 / (constants::G * m_probe * m_source);
}

ZenoRateBounds zeno_rate_bounds(double tau_z, double t_total) {
  if (!(tau_z > 0.0)) throw InvalidParameter("tau_Z must be > 0 s");
  if (!(t_total >= 0.0)) throw InvalidParameter("t_total must be >= 0 s");
  return {1.0 / tau_z, t_total / (tau_z * tau_z)};
}

SurvivalEstimate survival_probability(double tau, double tau_z, long long n) {
  if (!(tau > 0.0) || !(tau_z > 0.0) || n < 0) {
    throw InvalidParameter("survival needs tau > 0 s, tau_Z > 0 s and N >= 0");
  }
  const double x = (tau / tau_z) * (tau / tau_z);
  SurvivalEstimate out;
  out.out_of_regime = tau >= tau_z;
  const auto nn = static_cast<double>(n);
  out.product = n == 0 ? 1.0 : std::exp(nn * std::log1p(-std::min(x, 1.0)));
  out.linearized = 1.0 - nn * x;
  return out;
}

BipartiteSystem make_coupled_qubits(double g, double e_probe, double e_source,
                                    double kappa) {
  CVector phi(2);
  phi << 1.0, 0.0;
  return BipartiteSystem(e_probe * pauli_x(), e_source * pauli_z(),
                         g * kron(pauli_x(), pauli_x()) +
                             kappa * kron(pauli_z(), pauli_z()),
                         phi);
}

BipartiteSystem bipartite_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidParameter("model file must hold a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (key != "H_P" && key != "H_S" && key != "H_int" && key != "phi") {
      throw InvalidParameter("unknown model key '" + key + "'");
    }
  }
  for (const char* key : {"H_P", "H_S", "H_int", "phi"}) {
    if (!j.contains(key)) throw InvalidParameter(std::string("model is missing '") + key + "'");
  }
  try {
    const auto& jphi = j.at("phi");
    if (!jphi.is_array()) throw InvalidParameter("phi must be an array of [re, im]");
    CVector phi(static_cast<Eigen::Index>(jphi.size()));
    for (std::size_t i = 0; i < jphi.size(); ++i) {
      const auto& z = jphi.at(i);
      if (!z.is_array() || z.size() != 2) throw InvalidParameter("phi entries must be [re, im]");
      phi(static_cast<Eigen::Index>(i)) = Complex(z.at(0).get<double>(), z.at(1).get<double>());
    }
    return BipartiteSystem(matrix_from_json(j.at("H_P"), "H_P"),
                           matrix_from_json(j.at("H_S"), "H_S"),
                           matrix_from_json(j.at("H_int"), "H_int"), phi);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidParameter(std::string("model file: ") + e.what());
  }
}

nlohmann::json to_json(const BipartiteSystem& sys) {
  nlohmann::json phi = nlohmann::json::array();
  for (Eigen::Index i = 0; i < sys.phi().size(); ++i) {
    phi.push_back({sys.phi()(i).real(), sys.phi()(i).imag()});
  }
  return {{"H_P", matrix_to_json(sys.h_probe())},
          {"H_S", matrix_to_json(sys.h_source())},
          {"H_int", matrix_to_json(sys.h_int())},
          {"phi", phi}};
}

double zeno_time_from_variance(const BipartiteSystem& sys, const CMatrix& probe_state) {
  const double var = (probe_state * zeno_variance(sys)).trace().real();
  if (!(var > 0.0)) return std::numeric_limits<double>::infinity();
  return constants::hbar / std::sqrt(var);
}

std::vector<ZenoScanRow> zeno_scan(const BipartiteSystem& sys, double t_total,
                                   const std::vector<double>& taus,
                                   const CMatrix& initial_probe) {
  if (!(t_total > 0.0)) throw InvalidParameter("scan time t must be > 0 s");
  const double tau_z = zeno_time_from_variance(sys, initial_probe);
  std::vector<ZenoScanRow> rows;
  for (double tau : taus) {
    ZenoScanRow row;
    row.tau = tau;
    row.n = std::llround(t_total / tau);
    if (row.n < 1 || row.n > 100000000) {
      throw InvalidParameter("t / tau must give between 1 and 1e8 steps");
    }
    const auto res = strobo_evolve(sys, tau, static_cast<int>(row.n), initial_probe);
    row.survival_sim = res.survival_prob;
    row.survival_formula = std::isfinite(tau_z)
                               ? survival_probability(tau, tau_z, row.n).product
                               : 1.0;
    row.trace_dist = res.ideal_trace_distance;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace zenograv
