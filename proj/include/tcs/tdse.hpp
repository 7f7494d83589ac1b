#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "tcs/params.hpp"

// One-dimensional split-step Fourier solver for the two-tweezer splitter.
//
// Positions increase upward along gravity's axis: the well at +d/2 is arm 1
// (upper, deeper at t = 0), the well at -d/2 is arm 2 (lower). All public
// quantities are SI; the solver works internally in units where hbar = m = 1,
// lengths are in beam waists and energies in hbar^2 / (m sigma^2).
namespace tcs::tdse {

using Complex = std::complex<double>;

struct TrapProtocol {
  double v0 = 0.0;        // well depth, J
  double sigma = 0.0;     // beam waist, m
  double d_max = 0.0;     // initial (and final) trap separation, m
  double d_min = 0.0;     // closest separation, m
  double delta_max = 0.0; // initial relative depth difference
  double t_split = 0.0;   // total splitter duration, s
  bool gravity = false;
  double compensation_gradient = 0.0;  // extra linear slope, J/m
  double mass = 0.0;                   // kg
  double g = kConstants.g_earth;       // m/s^2, used only when gravity is on

  void validate() const;
};

// Reproducible baseline for 171Yb in a 10 uK, 1 um tweezer pair: 5 -> 0.4 -> 5 sigma
// over 0.5 s, Delta_max just below the first level crossing.
TrapProtocol default_protocol();

struct Grid1D {
  double x_min = 0.0;  // m
  double x_max = 0.0;  // m, periodic: x_max itself is not a sample
  std::size_t n_points = 0;
  double dt = 0.0;     // s

  double dx() const { return (x_max - x_min) / static_cast<double>(n_points); }
  double x(std::size_t i) const { return x_min + static_cast<double>(i) * dx(); }

  // Power-of-two size, span covering d_max + 6 sigma, dt < 2 pi hbar / (10 V0).
  void validate(const TrapProtocol& p) const;
};

// Symmetric box of 12 sigma (or d_max + 7 sigma when larger) and the largest
// admissible step rounded down to 0.9 of the stability bound.
Grid1D default_grid(const TrapProtocol& p, std::size_t n_points = 2048);

struct WaveFunction1D {
  std::vector<Complex> samples;  // continuum normalisation: sum |psi|^2 dx = 1
  double x_min = 0.0;
  double dx = 0.0;

  double norm() const;
};

Complex overlap(const WaveFunction1D& a, const WaveFunction1D& b);

double separation_schedule(double t, const TrapProtocol& p);
double detuning_schedule(double t, const TrapProtocol& p);

// V(x, t) in joules.
double potential(double x, double t, const TrapProtocol& p);

enum class Direction {
  forward,   // splitter
  reversed,  // combiner: the splitter's potential played backwards in time
};

struct Snapshot {
  double t = 0.0;           // elapsed time, s
  double separation = 0.0;  // d at the protocol time being applied, m
  double detuning = 0.0;
  WaveFunction1D psi;
};

struct Trajectory {
  Direction direction = Direction::forward;
  std::vector<Snapshot> snapshots;  // first entry is the initial state
  double max_norm_drift = 0.0;
  std::size_t steps = 0;
  double dt = 0.0;  // step actually used, s
};

struct EvolveOptions {
  std::size_t n_snapshots = 41;
  Direction direction = Direction::forward;
  double abort_drift = 1e-6;
};

struct GroundStateOptions {
  double tolerance = 1e-12;  // energy change per step, in units of V0
  std::size_t max_steps = 400000;
};

struct GroundState {
  WaveFunction1D psi;
  double energy = 0.0;  // J
  std::size_t steps = 0;
};

// Imaginary-time relaxation on the t = 0 potential.
GroundState ground_state(const TrapProtocol& p, const Grid1D& grid,
                         const GroundStateOptions& options = {});

// Lowest eigenstate of V(x, t) frozen at protocol time t.
GroundState instantaneous_ground_state(const TrapProtocol& p, const Grid1D& grid, double t,
                                       const GroundStateOptions& options = {});

Trajectory evolve(const WaveFunction1D& psi0, const TrapProtocol& p, const Grid1D& grid,
                  const EvolveOptions& options = {});

struct ArmPopulations {
  double upper = 0.0;  // x > 0, arm 1
  double lower = 0.0;  // x < 0, arm 2
};

ArmPopulations arm_populations(const WaveFunction1D& psi);

struct AdiabaticityOptions {
  double tolerance = 1e-10;
  std::size_t max_iterations = 200000;
};

struct AdiabaticityReport {
  double min_overlap = 1.0;               // min over snapshots
  std::vector<double> per_snapshot;       // population in the lowest-two span
};

// Population of each snapshot inside the span of the two lowest eigenstates
// of the potential frozen at that snapshot's protocol time.
AdiabaticityReport adiabaticity(const Trajectory& trajectory, const TrapProtocol& p,
                                const Grid1D& grid, const AdiabaticityOptions& options = {});

// Convenience driver used by the CLI and the acceptance suite.
struct SplitResult {
  ArmPopulations populations;
  double max_norm_drift = 0.0;
  double adiabatic_overlap = 1.0;
  Trajectory trajectory;
  WaveFunction1D initial;
};

SplitResult run_splitter(const TrapProtocol& p, const Grid1D& grid, std::size_t n_snapshots = 41,
                         bool with_adiabaticity = true);

// |<psi0| U_combiner U_splitter |psi0>|^2, with the combiner being the
// splitter's potential played backwards.
double combiner_return_overlap(const SplitResult& split, const TrapProtocol& p,
                               const Grid1D& grid);

// Evolves a batch of protocols independently; parallel over protocols.
std::vector<ArmPopulations> sweep_final_populations(std::span<const TrapProtocol> protocols,
                                                    std::size_t n_points = 2048);

// Same, one protocol after another.
std::vector<ArmPopulations> sweep_final_populations_serial(
    std::span<const TrapProtocol> protocols, std::size_t n_points = 2048);

}  // namespace tcs::tdse
