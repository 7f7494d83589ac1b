#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tcs/errors.hpp"
#include "tcs/params.hpp"

using namespace tcs;

TEST_SUITE("params") {

TEST_CASE("clock frequency of the 578 nm line") {
  const double w0 = clock_angular_frequency(ytterbium171());
  CHECK(w0 == doctest::Approx(2.0 * std::numbers::pi * 299792458.0 / 578e-9).epsilon(1e-15));
  CHECK(w0 / (2.0 * std::numbers::pi) == doctest::Approx(5.1867e14).epsilon(1e-4));
}

TEST_CASE("redshift for 10 mm is about 3.56e-3 rad/s") {
  const auto d = derive(ytterbium171(), default_tweezer(), default_geometry());
  // omega0 g h / c^2 by hand: 3.2589e15 * 9.80665 * 0.01 / 8.98755e16
  CHECK(d.epsilon == doctest::Approx(3.2589127e15 * 9.80665 * 0.01 / 8.987551787368176e16)
                         .epsilon(1e-7));
  CHECK(d.epsilon == doctest::Approx(3.556e-3).epsilon(1e-3));
  CHECK(d.epsilon / d.omega0 == doctest::Approx(9.80665 * 0.01 / 8.987551787368176e16));
}

TEST_CASE("visibility sin(T eps / 2) rounds to 0.02") {
  const auto d = derive(ytterbium171(), default_tweezer(), default_geometry());
  CHECK(d.visibility == doctest::Approx(0.0178).epsilon(5e-3));
  CHECK(std::round(d.visibility * 100.0) / 100.0 == doctest::Approx(0.02));
}

TEST_CASE("Lamb-Dicke parameters at 300 uK, 1 um") {
  const auto d = derive(ytterbium171(), default_tweezer(), default_geometry());
  CHECK(d.eta.radial == doctest::Approx(0.3).epsilon(0.05));
  CHECK(d.eta.axial == doctest::Approx(0.73).epsilon(0.05));
  CHECK(d.trap.radial > d.trap.axial);
}

TEST_CASE("trap frequencies follow the harmonic expansion") {
  const AtomSpec atom = ytterbium171();
  const TrapSpec trap = default_tweezer();
  const auto f = trap_frequencies(atom, trap);
  const double v0 = 300e-6 * 1.380649e-23;
  CHECK(f.radial == doctest::Approx(std::sqrt(4.0 * v0 / (atom.mass * 1e-12))));
  const double zr = std::numbers::pi * 1e-12 / 759e-9;
  CHECK(f.axial == doctest::Approx(std::sqrt(2.0 * v0 / (atom.mass * zr * zr))));
}

TEST_CASE("scaling laws") {
  const AtomSpec atom = ytterbium171();
  TrapSpec deep = default_tweezer();
  deep.depth_kelvin *= 4.0;
  const auto a = trap_frequencies(atom, default_tweezer());
  const auto b = trap_frequencies(atom, deep);
  CHECK(b.radial == doctest::Approx(2.0 * a.radial));
  // eta ~ omega^(-1/2)
  CHECK(lamb_dicke(atom, b.radial) == doctest::Approx(lamb_dicke(atom, a.radial) / std::sqrt(2.0)));
  // epsilon linear in h and g
  const double w0 = clock_angular_frequency(atom);
  CHECK(gravitational_redshift(w0, 9.8, 0.02) ==
        doctest::Approx(2.0 * gravitational_redshift(w0, 9.8, 0.01)));
  CHECK(gravitational_redshift(w0, 9.8, 0.0) == 0.0);
}

TEST_CASE("derive is a pure function") {
  const auto a = derive(ytterbium171(), default_tweezer(), default_geometry());
  const auto b = derive(ytterbium171(), default_tweezer(), default_geometry());
  CHECK(a.epsilon == b.epsilon);
  CHECK(a.eta.radial == b.eta.radial);
  CHECK(a.eta.axial == b.eta.axial);
  CHECK(a.visibility == b.visibility);
}

TEST_CASE("invalid inputs are rejected") {
  AtomSpec atom = ytterbium171();
  atom.mass = 0.0;
  CHECK_THROWS_AS(trap_frequencies(atom, default_tweezer()), InvalidInput);
  TrapSpec trap = default_tweezer();
  trap.waist = -1.0;
  CHECK_THROWS_AS(trap_frequencies(ytterbium171(), trap), InvalidInput);
  CHECK_THROWS_AS(gravitational_redshift(1.0, 9.8, -0.01), InvalidInput);
  Geometry g = default_geometry();
  g.phase_duration = 0.0;
  CHECK_THROWS_AS(derive(ytterbium171(), default_tweezer(), g), InvalidInput);
  CHECK_THROWS_AS(lamb_dicke(ytterbium171(), std::nan("")), InvalidInput);
}

}
