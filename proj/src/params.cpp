#include "tcs/params.hpp"

#include <cmath>
#include <numbers>

#include "tcs/errors.hpp"

namespace tcs {

namespace {

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw InvalidInput(std::string(what) + " must be positive and finite");
  }
}

}  // namespace

void AtomSpec::validate() const {
  require_positive(mass, "atom mass");
  require_positive(clock_wavelength, "clock wavelength");
  require_positive(magic_wavelength, "magic wavelength");
}

AtomSpec ytterbium171() {
  return AtomSpec{"171Yb", 170.9363315 * kConstants.amu, 578e-9, 759e-9};
}

void TrapSpec::validate() const {
  require_positive(depth_kelvin, "trap depth");
  require_positive(waist, "trap waist");
}

TrapSpec default_tweezer() { return TrapSpec{300e-6, 1e-6}; }

void Geometry::validate() const {
  if (!(arm_separation >= 0.0) || !std::isfinite(arm_separation)) {
    throw InvalidInput("arm separation must be non-negative");
  }
  require_positive(phase_duration, "phase duration");
}

Geometry default_geometry() { return Geometry{10e-3, 10.0}; }

double clock_angular_frequency(const AtomSpec& atom) {
  if (!(atom.clock_wavelength > 0.0)) {
    throw InvalidInput("clock wavelength must be positive");
  }
  return 2.0 * std::numbers::pi * kConstants.c / atom.clock_wavelength;
}

double gravitational_redshift(double omega0, double g, double h) {
  // Arm 1 is the upper arm; a negative height would flip the sign convention.
  if (h < 0.0) {
    throw InvalidInput("arm separation h must be >= 0");
  }
  return omega0 / (kConstants.c * kConstants.c) * g * h;
}

TrapFrequencies trap_frequencies(const AtomSpec& atom, const TrapSpec& trap) {
  atom.validate();
  trap.validate();
  const double v0 = trap.depth_joule();
  const double w0 = trap.waist;
  const double rayleigh = std::numbers::pi * w0 * w0 / atom.magic_wavelength;
  return TrapFrequencies{std::sqrt(4.0 * v0 / (atom.mass * w0 * w0)),
                         std::sqrt(2.0 * v0 / (atom.mass * rayleigh * rayleigh))};
}

double lamb_dicke(const AtomSpec& atom, double omega_trap) {
  require_positive(omega_trap, "trap frequency");
  atom.validate();
  const double x0 = std::sqrt(kConstants.hbar / (2.0 * atom.mass * omega_trap));
  return 2.0 * std::numbers::pi / atom.clock_wavelength * x0;
}

DerivedQuantities derive(const AtomSpec& atom, const TrapSpec& trap, const Geometry& geometry,
                         double g) {
  geometry.validate();
  DerivedQuantities out;
  out.omega0 = clock_angular_frequency(atom);
  out.epsilon = gravitational_redshift(out.omega0, g, geometry.arm_separation);
  out.trap = trap_frequencies(atom, trap);
  out.eta = LambDicke{lamb_dicke(atom, out.trap.radial), lamb_dicke(atom, out.trap.axial)};
  out.visibility = std::sin(geometry.phase_duration * out.epsilon / 2.0);
  return out;
}

}  // namespace tcs
