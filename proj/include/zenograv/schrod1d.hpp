#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "zenograv/error.hpp"

namespace zenograv {

// V(x) = a x^2 - b x^4 + c x^6 in units of V0 = hbar^2 / (2 M d^2), x in
// units of d.
struct PotentialSpec1D {
  double a = 1.0;
  double b = 4.0;
  double c = 1.0;
  double mass = 1e-11;  // kg
  double d = 1e-5;      // m

  void validate() const;
  double v0() const;  // J
  double value(double x) const;
  double derivative(double x) const;
};

struct GridSpec {
  double x_min = -4.0;
  double x_max = 4.0;
  int n_points = 4000;  // including both Dirichlet endpoints

  void validate() const;
};

class GridInsufficient : public NumericalFailure {
 public:
  explicit GridInsufficient(const std::string& what)
      : NumericalFailure("grid-insufficient: " + what) {}
};

struct EigenSolution {
  GridSpec grid;
  double v0 = 0.0;                      // J
  std::vector<double> energies;         // units of V0, ascending
  Eigen::VectorXd x;                    // units of d
  std::vector<Eigen::VectorXd> states;  // sum h psi^2 = 1

  double energy_joules(std::size_t k) const { return energies.at(k) * v0; }
  double gap_01() const;  // J
};

// Lowest n_states of -psi'' + V psi = E psi with a three-point Laplacian and
// Dirichlet ends. Eigenvalues by Sturm bisection, vectors by inverse
// iteration. Throws GridInsufficient when any state has boundary amplitude
// above 1e-6 of its maximum.
EigenSolution solve_eigen(const PotentialSpec1D& spec, int n_states,
                          const GridSpec& grid = {});

// V0 / d * |V'(x)|, J/m.
double potential_gradient(const PotentialSpec1D& spec, double x);

// Stationary points of V in [x_min, x_max], ascending.
std::vector<double> critical_points(const PotentialSpec1D& spec, double x_min, double x_max);

enum class GroundStateLabel {
  kNearDegenerateDoubleWell,
  kDelocalizedTripleWell,
  kCentralHarmonicLike,
};

std::string to_string(GroundStateLabel label);

struct GroundStateClass {
  double relative_gap = 0.0;  // (E1 - E0) / |E0|
  std::optional<double> x_barrier;  // innermost positive local maximum of V
  double central_fraction = 1.0;    // |psi0|^2 weight inside |x| < x_barrier
  int peak_count = 0;               // local maxima of |psi0|^2
  GroundStateLabel label = GroundStateLabel::kCentralHarmonicLike;
  // E1 - E0 is below the bisection resolution of the discrete operator.
  bool unreliable = false;
};

// Labels, in order of precedence:
//   relative_gap < kNearDegenerateGap         -> near-degenerate double well
//   no barrier or central_fraction >= kCentralDominance -> central harmonic
//   otherwise                                 -> delocalized triple well
inline constexpr double kNearDegenerateGap = 1e-3;
inline constexpr double kCentralDominance = 0.9;

GroundStateClass classify_ground_state(const EigenSolution& sol,
                                       const PotentialSpec1D& spec);

nlohmann::json to_json(const PotentialSpec1D& spec);
PotentialSpec1D potential_from_json(const nlohmann::json& j);

}  // namespace zenograv
