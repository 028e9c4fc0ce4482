#pragma once

#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <json.hpp>

namespace zenograv {

using Vec3 = Eigen::Vector3d;

// Uniform-density sphere. A weighted collection of these stands in for the
// source density M |phi(X)|^2 rho(X + r).
struct SphereComponent {
  Vec3 center = Vec3::Zero();  // m
  double radius = 0.0;         // m
  double mass = 0.0;           // kg
};

class MassDistribution {
 public:
  // Throws InvalidParameter on an empty list or non-positive radius/mass.
  explicit MassDistribution(std::vector<SphereComponent> components);

  const std::vector<SphereComponent>& components() const { return components_; }
  double total_mass() const { return total_mass_; }
  Vec3 barycenter() const;
  // Largest distance from the barycenter to any component surface.
  double extent() const;
  // Set when two components intersect. Superposition still applies.
  bool overlapping() const { return overlapping_; }
  // True if x lies inside (or on) any component.
  bool contains(const Vec3& x) const;

 private:
  std::vector<SphereComponent> components_;
  double total_mass_ = 0.0;
  bool overlapping_ = false;
};

// Two spheres of mass M/2 at (-d/2,0,0) and (+d/2,0,0), M = 4/3 pi rho R^3.
// For d == 0 a single sphere of mass M at the origin.
MassDistribution make_superposed_source(double radius, double density,
                                        double separation);

// Single sphere of mass M = 4/3 pi rho R^3 at `center`.
MassDistribution make_localized_source(double radius, double density,
                                       const Vec3& center);

double sphere_mass(double radius, double density);

// Gravitational potential energy of a probe of mass m_probe (J). Inside a
// component the uniform-sphere interior potential is used.
double potential_at(const MassDistribution& dist, const Vec3& x, double m_probe);

// -grad potential_at (N).
Vec3 force_at(const MassDistribution& dist, const Vec3& x, double m_probe);

// Acceleration field, force_at / m_probe (m s^-2).
Vec3 acceleration_at(const MassDistribution& dist, const Vec3& x);

void to_json(nlohmann::json& j, const MassDistribution& dist);
MassDistribution mass_distribution_from_json(const nlohmann::json& j);

}  // namespace zenograv
