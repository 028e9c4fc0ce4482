#include "zenograv/massdist.hpp"

#include <cmath>
#include <string>

#include "zenograv/error.hpp"
#include "zenograv/units.hpp"

namespace zenograv {

MassDistribution::MassDistribution(std::vector<SphereComponent> components)
    : components_(std::move(components)) {
  if (components_.empty()) {
    throw InvalidParameter("mass distribution needs at least one component");
  }
  for (const auto& c : components_) {
    if (!(c.radius > 0.0) || !(c.mass > 0.0) || !c.center.allFinite()) {
      throw InvalidParameter(
          "sphere component requires radius > 0 m, mass > 0 kg and a finite "
          "center");
    }
    total_mass_ += c.mass;
  }
  for (std::size_t i = 0; i < components_.size(); ++i) {
    for (std::size_t j = i + 1; j < components_.size(); ++j) {
      const double gap = (components_[i].center - components_[j].center).norm();
      if (gap < components_[i].radius + components_[j].radius) {
        overlapping_ = true;
      }
    }
  }
}

Vec3 MassDistribution::barycenter() const {
  Vec3 acc = Vec3::Zero();
  for (const auto& c : components_) acc += c.mass * c.center;
  return acc / total_mass_;
}

double MassDistribution::extent() const {
  const Vec3 bc = barycenter();
  double r = 0.0;
  for (const auto& c : components_) {
    r = std::max(r, (c.center - bc).norm() + c.radius);
  }
  return r;
}

bool MassDistribution::contains(const Vec3& x) const {
  for (const auto& c : components_) {
    if ((x - c.center).norm() <= c.radius) return true;
  }
  return false;
}

double sphere_mass(double radius, double density) {
  return 4.0 / 3.0 * constants::pi * density * radius * radius * radius;
}

MassDistribution make_superposed_source(double radius, double density,
                                        double separation) {
  if (!(radius > 0.0)) throw InvalidParameter("radius R must be > 0 m");
  if (!(density > 0.0)) throw InvalidParameter("density must be > 0 kg/m^3");
  if (!(separation >= 0.0)) {
    throw InvalidParameter("separation d must be >= 0 m");
  }
  const double mass = sphere_mass(radius, density);
  if (separation == 0.0) {
    return MassDistribution({{Vec3::Zero(), radius, mass}});
  }
  return MassDistribution({{Vec3(-separation / 2, 0, 0), radius, mass / 2},
                           {Vec3(separation / 2, 0, 0), radius, mass / 2}});
}

MassDistribution make_localized_source(double radius, double density,
                                       const Vec3& center) {
  if (!(radius > 0.0)) throw InvalidParameter("radius R must be > 0 m");
  if (!(density > 0.0)) throw InvalidParameter("density must be > 0 kg/m^3");
  return MassDistribution({{center, radius, sphere_mass(radius, density)}});
}

double potential_at(const MassDistribution& dist, const Vec3& x,
                    double m_probe) {
  double v = 0.0;
  for (const auto& c : dist.components()) {
    const double r = (x - c.center).norm();
    const double gm = constants::G * m_probe * c.mass;
    if (r >= c.radius) {
      v -= gm / r;
    } else {
      const double R = c.radius;
      v -= gm * (3.0 * R * R - r * r) / (2.0 * R * R * R);
    }
  }
  return v;
}

Vec3 acceleration_at(const MassDistribution& dist, const Vec3& x) {
  Vec3 a = Vec3::Zero();
  for (const auto& c : dist.components()) {
    const Vec3 dx = x - c.center;
    const double r = dx.norm();
    const double gm = constants::G * c.mass;
    if (r >= c.radius) {
      a -= gm / (r * r * r) * dx;
    } else {
      a -= gm / (c.radius * c.radius * c.radius) * dx;
    }
  }
  return a;
}

Vec3 force_at(const MassDistribution& dist, const Vec3& x, double m_probe) {
  return m_probe * acceleration_at(dist, x);
}

void to_json(nlohmann::json& j, const MassDistribution& dist) {
  j = nlohmann::json::object();
  auto& arr = j["components"] = nlohmann::json::array();
  for (const auto& c : dist.components()) {
    arr.push_back({{"center", {c.center.x(), c.center.y(), c.center.z()}},
                   {"radius", c.radius},
                   {"mass", c.mass}});
  }
}

MassDistribution mass_distribution_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("components") ||
      !j.at("components").is_array()) {
    throw InvalidParameter("mass distribution JSON needs a 'components' array");
  }
  std::vector<SphereComponent> comps;
  for (const auto& item : j.at("components")) {
    for (const auto& [key, _] : item.items()) {
      if (key != "center" && key != "radius" && key != "mass") {
        throw InvalidParameter("unknown sphere component key '" + key + "'");
      }
    }
    try {
      const auto center = item.at("center").get<std::vector<double>>();
      if (center.size() != 3) {
        throw InvalidParameter("sphere center must have 3 coordinates (m)");
      }
      comps.push_back({Vec3(center[0], center[1], center[2]),
                       item.at("radius").get<double>(),
                       item.at("mass").get<double>()});
    } catch (const nlohmann::json::exception& e) {
      throw InvalidParameter(std::string("sphere component: ") + e.what());
    }
  }
  return MassDistribution(std::move(comps));
}

}  // namespace zenograv
