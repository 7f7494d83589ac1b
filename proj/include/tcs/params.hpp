#pragma once

#include <string>

namespace tcs {

// CODATA 2018 values. Fixed at compile time so golden outputs stay stable.
struct PhysicalConstants {
  double c = 299792458.0;             // m/s (exact)
  double hbar = 1.054571817e-34;      // J s (exact)
  double kB = 1.380649e-23;           // J/K (exact)
  double g_earth = 9.80665;           // m/s^2, standard gravity
  double amu = 1.66053906660e-27;     // kg
};

inline constexpr PhysicalConstants kConstants{};

struct AtomSpec {
  std::string name;
  double mass = 0.0;              // kg
  double clock_wavelength = 0.0;  // m
  double magic_wavelength = 0.0;  // m

  void validate() const;
};

// 171Yb with the 1S0-3P0 clock line and its tweezer magic wavelength.
AtomSpec ytterbium171();

struct TrapSpec {
  double depth_kelvin = 0.0;  // V0 / kB
  double waist = 0.0;         // 1/e^2 intensity radius, m

  double depth_joule() const { return depth_kelvin * kConstants.kB; }
  void validate() const;
};

TrapSpec default_tweezer();  // 300 uK, 1 um waist

struct Geometry {
  double arm_separation = 0.0;  // h, m; arm 1 sits above arm 2
  double phase_duration = 0.0;  // T, s

  void validate() const;
};

Geometry default_geometry();  // h = 10 mm, T = 10 s

struct TrapFrequencies {
  double radial = 0.0;  // rad/s
  double axial = 0.0;   // rad/s
};

struct LambDicke {
  double radial = 0.0;
  double axial = 0.0;
};

double clock_angular_frequency(const AtomSpec& atom);

// epsilon = (omega0 / c^2) g h, in rad/s.
double gravitational_redshift(double omega0, double g, double h);

// Harmonic expansion of a Gaussian tweezer V(r,z) = -V0 w0^2/w(z)^2 exp(-2r^2/w(z)^2):
//   omega_r = sqrt(4 V0 / (m w0^2)),  omega_z = sqrt(2 V0 / (m zR^2)),  zR = pi w0^2 / lambda_trap.
TrapFrequencies trap_frequencies(const AtomSpec& atom, const TrapSpec& trap);

// Ground-state extent x0 = sqrt(hbar / (2 m omega)); eta = 2 pi x0 / lambda_clock.
double lamb_dicke(const AtomSpec& atom, double omega_trap);

struct DerivedQuantities {
  double omega0 = 0.0;
  double epsilon = 0.0;
  TrapFrequencies trap;
  LambDicke eta;
  double visibility = 0.0;  // sin(T epsilon / 2)
};

DerivedQuantities derive(const AtomSpec& atom, const TrapSpec& trap, const Geometry& geometry,
                         double g = kConstants.g_earth);

}  // namespace tcs
