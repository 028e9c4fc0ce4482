#include "zenograv/schrod1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "zenograv/units.hpp"

namespace zenograv {
namespace {

// Number of eigenvalues of the tridiagonal (diag, off) strictly below x.
int sturm_count(const Eigen::VectorXd& diag, double off2, double x) {
  int count = 0;
  double q = 1.0;
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    q = diag(i) - x - (i == 0 ? 0.0 : off2 / q);
    if (q == 0.0) q = -std::numeric_limits<double>::epsilon() * (std::abs(diag(i)) + 1.0);
    if (q < 0.0) ++count;
  }
  return count;
}

// Solves (T - shift) y = rhs in place for a constant off-diagonal.
void tridiagonal_solve(const Eigen::VectorXd& diag, double off, double shift,
                       Eigen::VectorXd& rhs) {
  const Eigen::Index n = diag.size();
  Eigen::VectorXd c(n);
  const double tiny = std::numeric_limits<double>::epsilon() * (std::abs(off) + 1.0);
  double piv = diag(0) - shift;
  if (std::abs(piv) < tiny) piv = tiny;
  c(0) = off / piv;
  rhs(0) /= piv;
  for (Eigen::Index i = 1; i < n; ++i) {
    piv = diag(i) - shift - off * c(i - 1);
    if (std::abs(piv) < tiny) piv = tiny;
    c(i) = off / piv;
    rhs(i) = (rhs(i) - off * rhs(i - 1)) / piv;
  }
  for (Eigen::Index i = n - 2; i >= 0; --i) rhs(i) -= c(i) * rhs(i + 1);
}

}  // namespace

void PotentialSpec1D::validate() const {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) {
    throw InvalidParameter("potential coefficients must be finite");
  }
  if (!(c > 0.0)) throw InvalidParameter("c must be > 0 so the potential confines");
  if (!(mass > 0.0) || !std::isfinite(mass)) throw InvalidParameter("M must be > 0 kg");
  if (!(d > 0.0) || !std::isfinite(d)) throw InvalidParameter("d must be > 0 m");
}

double PotentialSpec1D::v0() const {
  return constants::hbar * constants::hbar / (2.0 * mass * d * d);
}

double PotentialSpec1D::value(double x) const {
  const double x2 = x * x;
  return x2 * (a + x2 * (-b + c * x2));
}

double PotentialSpec1D::derivative(double x) const {
  const double x2 = x * x;
  return x * (2.0 * a + x2 * (-4.0 * b + 6.0 * c * x2));
}

void GridSpec::validate() const {
  if (!(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max)) {
    throw InvalidParameter("grid needs finite x_min < x_max");
  }
  if (n_points < 1000) throw InvalidParameter("grid needs n_points >= 1000");
}

double EigenSolution::gap_01() const {
  if (energies.size() < 2) throw InvalidParameter("gap needs at least two states");
  return (energies[1] - energies[0]) * v0;
}

EigenSolution solve_eigen(const PotentialSpec1D& spec, int n_states, const GridSpec& grid) {
  spec.validate();
  grid.validate();
  const int n = grid.n_points;
  if (n_states < 1 || n_states > n - 2) {
    throw InvalidParameter("n_states must be between 1 and n_points - 2");
  }
  const double h = (grid.x_max - grid.x_min) / (n - 1);
  const Eigen::Index m = n - 2;
  Eigen::VectorXd diag(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    diag(i) = 2.0 / (h * h) + spec.value(grid.x_min + (i + 1) * h);
  }
  const double off = -1.0 / (h * h);
  const double off2 = off * off;

  // Gershgorin bounds.
  const double lo0 = diag.minCoeff() - 2.0 * std::abs(off);
  const double hi0 = diag.maxCoeff() + 2.0 * std::abs(off);
  const double scale = std::max(std::abs(lo0), std::abs(hi0));

  EigenSolution sol;
  sol.grid = grid;
  sol.v0 = spec.v0();
  sol.x = Eigen::VectorXd::LinSpaced(n, grid.x_min, grid.x_max);

  for (int k = 0; k < n_states; ++k) {
    double lo = lo0, hi = hi0;
    while (hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * scale) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (sturm_count(diag, off2, mid) > k ? hi : lo) = mid;
    }
    const double lambda = 0.5 * (lo + hi);

    Eigen::VectorXd v = Eigen::VectorXd::Ones(m);
    for (Eigen::Index i = 0; i < m; ++i) v(i) += 1e-3 * std::sin(0.37 * static_cast<double>(i));
    for (int it = 0; it < 6; ++it) {
      tridiagonal_solve(diag, off, lambda, v);
      for (int j = 0; j < k; ++j) {
        const Eigen::VectorXd prev = sol.states[j].segment(1, m);
        v -= (prev.dot(v) * h) * prev;
      }
      v /= std::sqrt(v.squaredNorm() * h);
    }
    // Rayleigh quotient of the converged vector.
    double num = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      double tv = diag(i) * v(i);
      if (i > 0) tv += off * v(i - 1);
      if (i + 1 < m) tv += off * v(i + 1);
      num += v(i) * tv;
    }
    sol.energies.push_back(num * h);

    Eigen::Index lead = 0;
    const double vmax = v.cwiseAbs().maxCoeff();
    while (std::abs(v(lead)) < 1e-3 * vmax) ++lead;
    if (v(lead) < 0.0) v = -v;

    Eigen::VectorXd psi = Eigen::VectorXd::Zero(n);
    psi.segment(1, m) = v;
    const double edge = std::max(std::abs(v(0)), std::abs(v(m - 1)));
    if (edge > 1e-6 * vmax) {
      throw GridInsufficient("state " + std::to_string(k) +
                             " does not decay before the domain edge; widen [x_min, x_max]");
    }
    sol.states.push_back(std::move(psi));
  }
  return sol;
}

double potential_gradient(const PotentialSpec1D& spec, double x) {
  spec.validate();
  return spec.v0() / spec.d * std::abs(spec.derivative(x));
}

std::vector<double> critical_points(const PotentialSpec1D& spec, double x_min, double x_max) {
  std::vector<double> roots;
  const int n = 20000;
  const double h = (x_max - x_min) / n;
  double xa = x_min;
  double fa = spec.derivative(xa);
  for (int i = 1; i <= n; ++i) {
    const double xb = x_min + i * h;
    const double fb = spec.derivative(xb);
    if (fa == 0.0) {
      roots.push_back(xa);
    } else if (fa * fb < 0.0) {
      double lo = xa, hi = xb, flo = fa;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = spec.derivative(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    xa = xb;
    fa = fb;
  }
  return roots;
}

std::string to_string(GroundStateLabel label) {
  switch (label) {
    case GroundStateLabel::kNearDegenerateDoubleWell: return "near-degenerate-double-well";
    case GroundStateLabel::kDelocalizedTripleWell: return "delocalized-triple-well";
    case GroundStateLabel::kCentralHarmonicLike: return "central-harmonic-like";
  }
  return "unknown";
}

GroundStateClass classify_ground_state(const EigenSolution& sol, const PotentialSpec1D& spec) {
  if (sol.states.size() < 2) throw InvalidParameter("classification needs two solved states");
  GroundStateClass out;
  const double e0 = sol.energies[0], e1 = sol.energies[1];
  const double gap = e1 - e0;
  out.relative_gap = gap / std::max(std::abs(e0), std::numeric_limits<double>::min());

  const int n = sol.grid.n_points;
  const double h = (sol.grid.x_max - sol.grid.x_min) / (n - 1);
  const double spectrum_scale = 4.0 / (h * h) + std::max(std::abs(spec.value(sol.grid.x_min)),
                                                         std::abs(spec.value(sol.grid.x_max)));
  out.unreliable = gap < 100.0 * std::numeric_limits<double>::epsilon() * spectrum_scale;

  for (double xc : critical_points(spec, 0.0, sol.grid.x_max)) {
    if (xc <= 0.0) continue;
    const double curvature = spec.value(xc + 1e-4) + spec.value(xc - 1e-4) - 2.0 * spec.value(xc);
    if (curvature < 0.0) {
      out.x_barrier = xc;
      break;
    }
  }

  const Eigen::VectorXd& psi = sol.states[0];
  if (out.x_barrier) {
    double inside = 0.0;
    for (int i = 0; i < n; ++i) {
      if (std::abs(sol.x(i)) < *out.x_barrier) inside += psi(i) * psi(i) * h;
    }
    out.central_fraction = inside;
  }
  const double pmax = psi.cwiseAbs2().maxCoeff();
  for (int i = 1; i + 1 < n; ++i) {
    const double p = psi(i) * psi(i);
    if (p > 1e-6 * pmax && p > psi(i - 1) * psi(i - 1) && p >= psi(i + 1) * psi(i + 1)) {
      ++out.peak_count;
    }
  }

  if (out.relative_gap < kNearDegenerateGap) {
    out.label = GroundStateLabel::kNearDegenerateDoubleWell;
  } else if (!out.x_barrier || out.central_fraction >= kCentralDominance) {
    out.label = GroundStateLabel::kCentralHarmonicLike;
  } else {
    out.label = GroundStateLabel::kDelocalizedTripleWell;
  }
  return out;
}

nlohmann::json to_json(const PotentialSpec1D& spec) {
  return {{"a", spec.a}, {"b", spec.b}, {"c", spec.c}, {"M", spec.mass}, {"d", spec.d}};
}

PotentialSpec1D potential_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidParameter("potential must be a JSON object");
  PotentialSpec1D spec;
  for (const auto& [key, val] : j.items()) {
    if (!val.is_number()) throw InvalidParameter("potential key '" + key + "' must be a number");
    const double v = val.get<double>();
    if (key == "a") spec.a = v;
    else if (key == "b") spec.b = v;
    else if (key == "c") spec.c = v;
    else if (key == "M") spec.mass = v;
    else if (key == "d") spec.d = v;
    else throw InvalidParameter("unknown potential key '" + key + "'");
  }
  spec.validate();
  return spec;
}

}  // namespace zenograv
