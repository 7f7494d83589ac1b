#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <numbers>

#include "tcs/errors.hpp"
#include "tcs/tdse.hpp"

using namespace tcs;
using namespace tcs::tdse;

namespace {

// Same trap pair as the default, but fast enough for unit tests.
TrapProtocol quick_protocol() {
  TrapProtocol p = default_protocol();
  p.t_split = 0.02;
  return p;
}

double lower_after(const TrapProtocol& p, const Grid1D& grid) {
  return run_splitter(p, grid, 2, false).populations.lower;
}

}  // namespace

TEST_SUITE("tdse") {

TEST_CASE("schedules") {
  const TrapProtocol p = default_protocol();
  CHECK(separation_schedule(0.0, p) == doctest::Approx(p.d_max));
  CHECK(separation_schedule(p.t_split / 2, p) == doctest::Approx(p.d_min));
  CHECK(separation_schedule(p.t_split, p) == doctest::Approx(p.d_max));
  CHECK(detuning_schedule(0.0, p) == p.delta_max);
  CHECK(detuning_schedule(p.t_split / 4, p) == doctest::Approx(p.delta_max / 2));
  CHECK(detuning_schedule(p.t_split * 0.75, p) == 0.0);
  CHECK_THROWS_AS(separation_schedule(-1.0, p), InvalidInput);
  // deeper upper well at t = 0
  CHECK(potential(p.d_max / 2, 0.0, p) < potential(-p.d_max / 2, 0.0, p));
}

TEST_CASE("gravity tilts the potential toward the lower arm") {
  TrapProtocol p = default_protocol();
  p.delta_max = 0.0;
  p.gravity = true;
  const double x = p.d_max / 2;
  CHECK(potential(x, 0.0, p) - potential(-x, 0.0, p) == doctest::Approx(p.mass * p.g * p.d_max).epsilon(1e-6));
  p.compensation_gradient = -p.mass * p.g;
  CHECK(std::abs(potential(x, 0.0, p) - potential(-x, 0.0, p)) < 1e-12 * p.v0);
}

TEST_CASE("ground state sits in the deeper well near the harmonic energy") {
  const TrapProtocol p = default_protocol();
  const Grid1D grid = default_grid(p, 512);
  const GroundState gs = ground_state(p, grid);
  CHECK(gs.psi.norm() == doctest::Approx(1.0).epsilon(1e-12));
  const ArmPopulations a = arm_populations(gs.psi);
  CHECK(a.upper > 0.999999);
  const double hw = kConstants.hbar * std::sqrt(4.0 * p.v0 / (p.mass * p.sigma * p.sigma));
  CHECK(gs.energy + p.v0 == doctest::Approx(hw / 2).epsilon(0.05));
  CHECK(gs.energy + p.v0 < hw / 2);  // Gaussian well is softer than its parabola
}

TEST_CASE("norm is conserved") {
  const TrapProtocol p = quick_protocol();
  const Grid1D grid = default_grid(p, 256);
  const SplitResult r = run_splitter(p, grid, 5, false);
  CHECK(r.max_norm_drift < 1e-10);
  CHECK(r.populations.upper + r.populations.lower == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r.trajectory.snapshots.size() == 5);
  CHECK(r.trajectory.snapshots.front().t == 0.0);
  CHECK(r.trajectory.snapshots.back().t == doctest::Approx(p.t_split));
}

TEST_CASE("a symmetric pair splits exactly in half") {
  TrapProtocol p = quick_protocol();
  p.delta_max = 0.0;
  const Grid1D grid = default_grid(p, 256);
  const ArmPopulations a = run_splitter(p, grid, 2, false).populations;
  CHECK(a.upper == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(a.lower == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("gravity favours the lower arm and the gradient undoes it") {
  TrapProtocol p = quick_protocol();
  const Grid1D grid = default_grid(p, 256);
  const double off = lower_after(p, grid);
  p.gravity = true;
  const double on = lower_after(p, grid);
  CHECK(on > off);
  p.compensation_gradient = -p.mass * p.g;
  CHECK(lower_after(p, grid) == doctest::Approx(off).epsilon(1e-8));
}

TEST_CASE("populations converge under dt halving and grid doubling") {
  const TrapProtocol p = quick_protocol();
  const Grid1D grid = default_grid(p, 256);
  Grid1D half = grid, quarter = grid;
  half.dt /= 2;
  quarter.dt /= 4;
  const double base = lower_after(p, grid);
  const double d1 = lower_after(p, half) - base;
  const double d2 = lower_after(p, quarter) - base - d1;
  // Strang splitting: each halving cuts the change by four
  CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(0.1));
  CHECK(std::abs(d1) * 4.0 / 3.0 < 2e-3);
  CHECK(std::abs(lower_after(p, default_grid(p, 512)) - base) < 1e-6);
}

TEST_CASE("adiabaticity of the initial ground state is one") {
  const TrapProtocol p = quick_protocol();
  const Grid1D grid = default_grid(p, 256);
  const SplitResult r = run_splitter(p, grid, 3, true);
  CHECK(r.adiabatic_overlap <= 1.0 + 1e-9);
  const AdiabaticityReport rep = adiabaticity(r.trajectory, p, grid);
  REQUIRE(rep.per_snapshot.size() == 3);
  CHECK(rep.per_snapshot.front() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(rep.min_overlap == doctest::Approx(r.adiabatic_overlap));
}

TEST_CASE("playing a slow protocol backwards returns the start") {
  TrapProtocol p = quick_protocol();
  p.d_min = 2.0 * p.sigma;  // wells stay apart: trivially adiabatic
  const Grid1D grid = default_grid(p, 256);
  const SplitResult r = run_splitter(p, grid, 2, false);
  CHECK(combiner_return_overlap(r, p, grid) > 0.999);
}

TEST_CASE("symmetric pair: ground state is centred and the density stays even") {
  TrapProtocol p = quick_protocol();
  p.delta_max = 0.0;
  const Grid1D grid = default_grid(p, 256);
  const GroundState gs = ground_state(p, grid);
  double mean = 0.0;
  for (std::size_t i = 0; i < grid.n_points; ++i) mean += grid.x(i) * std::norm(gs.psi.samples[i]) * grid.dx();
  CHECK(std::abs(mean) < 1e-8 * p.d_max);

  const Trajectory tr = evolve(gs.psi, p, grid, {.n_snapshots = 2});
  const auto& s = tr.snapshots.back().psi.samples;
  const std::size_t n = s.size();
  double peak = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    peak = std::max(peak, std::norm(s[i]));
    worst = std::max(worst, std::abs(std::norm(s[i]) - std::norm(s[(n - i) % n])));
  }
  CHECK(worst < 1e-8 * peak);
}

TEST_CASE("free Gaussian spreads at the textbook rate") {
  TrapProtocol p = default_protocol();
  p.v0 = 1e-40;  // wells switched off in practice
  const double s0 = 0.5 * p.sigma;
  const double tau = 2.0 * p.mass * s0 * s0 / kConstants.hbar;  // width grows by sqrt 2
  p.t_split = tau;
  Grid1D grid = default_grid(p, 512);
  grid.dt = tau / 200;

  WaveFunction1D psi{std::vector<Complex>(grid.n_points), grid.x_min, grid.dx()};
  for (std::size_t i = 0; i < grid.n_points; ++i) {
    const double x = grid.x(i);
    psi.samples[i] = std::exp(-x * x / (4 * s0 * s0)) / std::pow(2 * std::numbers::pi * s0 * s0, 0.25);
  }
  const Trajectory tr = evolve(psi, p, grid, {.n_snapshots = 5});
  for (const Snapshot& snap : tr.snapshots) {
    double m2 = 0.0;
    for (std::size_t i = 0; i < grid.n_points; ++i) {
      m2 += grid.x(i) * grid.x(i) * std::norm(snap.psi.samples[i]) * grid.dx();
    }
    const double u = kConstants.hbar * snap.t / (2 * p.mass * s0 * s0);
    CHECK(std::sqrt(m2) == doctest::Approx(s0 * std::sqrt(1 + u * u)).epsilon(1e-6));
  }
}

TEST_CASE("a frozen potential leaves its ground state alone") {
  TrapProtocol p = quick_protocol();
  p.delta_max = 0.0;
  p.d_min = p.d_max * (1 - 1e-9);
  const Grid1D grid = default_grid(p, 256);
  const GroundState gs = ground_state(p, grid);
  const Trajectory tr = evolve(gs.psi, p, grid, {.n_snapshots = 2});
  CHECK(std::norm(overlap(gs.psi, tr.snapshots.back().psi)) > 1 - 1e-8);
}

TEST_CASE("lower arm gains monotonically with g") {
  std::vector<TrapProtocol> ps;
  for (double g : {0.0, 1.0, 2.5, 5.0, 7.5, 9.81}) {
    TrapProtocol p = quick_protocol();
    p.gravity = true;
    p.g = g;
    ps.push_back(p);
  }
  const auto pops = sweep_final_populations(ps, 256);
  for (std::size_t i = 1; i < pops.size(); ++i) CHECK(pops[i].lower >= pops[i - 1].lower - 1e-12);
}

TEST_CASE("a sudden split is flagged as non-adiabatic") {
  TrapProtocol p = quick_protocol();
  p.t_split = 2e-5;
  const Grid1D grid = default_grid(p, 256);
  CHECK(run_splitter(p, grid, 21, true).adiabatic_overlap < 0.9);
}

TEST_CASE("parallel sweep matches the serial one") {
  std::vector<TrapProtocol> ps;
  for (double d : {0.4, 0.6, 0.8}) {
    TrapProtocol p = quick_protocol();
    p.t_split = 0.005;
    p.d_min = d * p.sigma;
    ps.push_back(p);
  }
  omp_set_num_threads(3);
  const auto a = sweep_final_populations(ps, 128);
  omp_set_num_threads(omp_get_num_procs());
  const auto b = sweep_final_populations_serial(ps, 128);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].upper == b[i].upper);
    CHECK(a[i].lower == b[i].lower);
  }
}

TEST_CASE("invalid protocols and grids") {
  TrapProtocol p = default_protocol();
  p.d_min = p.d_max;
  CHECK_THROWS_AS(p.validate(), InvalidInput);
  p = default_protocol();
  p.delta_max = 1.0;
  CHECK_THROWS_AS(p.validate(), InvalidInput);
  p = default_protocol();
  Grid1D g = default_grid(p, 256);
  g.n_points = 300;
  CHECK_THROWS_AS(g.validate(p), InvalidInput);
  g = default_grid(p, 256);
  g.dt *= 2;
  CHECK_THROWS_AS(g.validate(p), InvalidInput);
  g = default_grid(p, 256);
  g.x_max = p.d_max / 2;
  CHECK_THROWS_AS(g.validate(p), InvalidInput);
  const Grid1D ok = default_grid(p, 256);
  const GroundState gs = ground_state(p, ok);
  WaveFunction1D bad = gs.psi;
  for (auto& v : bad.samples) v *= 2.0;
  CHECK_THROWS_AS(evolve(bad, p, ok), InvalidInput);
}

}
