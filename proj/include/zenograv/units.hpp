#pragma once

// SI constants shared across the toolkit. Every quantity in the library is
// expressed in the canonical SI unit for its dimension.

namespace zenograv {

struct PhysicalConstants {
  double G;      // m^3 kg^-1 s^-2
  double hbar;   // J s
  double k_B;    // J K^-1
  double c;      // m s^-1
  double m_H2;   // kg, 2 x 1.00784 u
  double d_H2;   // m, kinetic diameter of H2
  double eV;     // J
};

namespace constants {

inline constexpr double G = 6.67430e-11;
inline constexpr double hbar = 1.054571817e-34;
inline constexpr double k_B = 1.380649e-23;
inline constexpr double c = 299792458.0;
inline constexpr double atomic_mass_unit = 1.66053906660e-27;
inline constexpr double m_H2 = 2.0 * 1.00784 * atomic_mass_unit;
inline constexpr double d_H2 = 2.89e-10;
inline constexpr double eV = 1.602176634e-19;
inline constexpr double pi = 3.14159265358979323846;

}  // namespace constants

inline constexpr PhysicalConstants kConstants{
    constants::G,    constants::hbar, constants::k_B, constants::c,
    constants::m_H2, constants::d_H2, constants::eV};

constexpr double joules_to_ev(double joules) { return joules / constants::eV; }
constexpr double ev_to_joules(double ev) { return ev * constants::eV; }

}  // namespace zenograv
