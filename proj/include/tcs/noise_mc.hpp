#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tcs/rng.hpp"
#include "tcs/sequence.hpp"

// Monte Carlo measurement campaigns: per-run tweezer-imbalance noise on delta,
// N_a atoms per run each yielding a joint (port, clock state) outcome.
namespace tcs {

enum class NoiseKind {
  none,
  uniform_phase,    // delta T uniform on [0, 2 pi)
  uniform_energy,   // delta - delta0 uniform on [-scale Delta, scale Delta]
  gaussian_energy,  // delta - delta0 normal with sd scale Delta
};

NoiseKind parse_noise_kind(const std::string& name);  // throws ConfigError
std::string to_string(NoiseKind kind);

struct NoiseModel {
  NoiseKind kind = NoiseKind::uniform_phase;
  double scale = 1.0;  // units of Delta; unused by uniform_phase and none

  void validate() const;
};

// When a fresh delta is drawn.
enum class DeltaSampling {
  per_run,       // every (duration, repetition) gets its own delta
  per_duration,  // one delta shared by all repetitions of a duration
};

DeltaSampling parse_delta_sampling(const std::string& name);
std::string to_string(DeltaSampling s);

struct ExperimentPlan {
  std::size_t n_atoms = 20;
  std::size_t n_durations = 8;
  std::size_t n_reps = 5000;
  double t0 = 10.0;                 // s
  double detuning = 0.0;            // Delta, rad/s
  double delta0 = 0.0;              // nominal lower-state detuning, rad/s
  double epsilon = 0.0;             // rad/s
  double drive_frequency = 0.0;     // rad/s
  NoiseModel noise;
  DeltaSampling sampling = DeltaSampling::per_run;
  std::uint64_t seed = kDefaultSeed;
  double overhead = 5.0;            // s per run, bookkeeping only

  void validate() const;

  // t_i = t0 + i (2 pi / Delta) / N1, i = 0..N1-1: one fringe period, no
  // duplicated phase at the window end.
  std::vector<double> durations() const;

  // Window midpoint t0 + pi / Delta.
  double reference_duration() const;
};

// Delta = 2 pi 1 kHz, N_a = 20, N1 = 8, N2 = 5000, T0 = 10 s, epsilon for
// 171Yb at h = 10 mm, uniform-phase noise.
ExperimentPlan fig2_plan();

struct RunResult {
  std::array<std::uint32_t, 4> counts{};  // (g;1, g;2, e;1, e;2)
  double p1_hat = 0.0;
  double pg_hat = 0.0;
  double delta_realized = 0.0;  // rad/s
};

struct EnsembleTable {
  std::size_t n_durations = 0;
  std::size_t n_reps = 0;
  std::size_t n_atoms = 0;
  std::vector<double> durations;
  std::vector<RunResult> rows;  // duration-major

  const RunResult& at(std::size_t duration, std::size_t rep) const {
    return rows[duration * n_reps + rep];
  }
  RunResult& at(std::size_t duration, std::size_t rep) { return rows[duration * n_reps + rep]; }
};

double sample_delta(const NoiseModel& noise, double delta0, double detuning, double T,
                    SplitMix64& rng);

// Multinomial draw of n_atoms outcomes over joint probabilities (g1, g2, e1, e2).
RunResult sample_counts(const std::array<double, 4>& probabilities, std::size_t n_atoms,
                        SplitMix64& rng);

RunResult sample_run(const SequenceParams& p, std::size_t n_atoms, SplitMix64& rng);

// Joint probabilities when the spatial superposition collapses onto one arm
// (probability 1/2 each) right after the splitter; the remaining pulses act
// on the collapsed branch.
std::array<double, 4> incoherent_probabilities(const SequenceParams& p);

RunResult incoherent_run(const SequenceParams& p, std::size_t n_atoms, SplitMix64& rng);

enum class Splitting { coherent, incoherent };

// OpenMP over runs. The result depends only on (plan, splitting).
EnsembleTable simulate_ensemble(const ExperimentPlan& plan,
                                Splitting splitting = Splitting::coherent);

// Single-threaded reference; must match simulate_ensemble bit for bit.
EnsembleTable simulate_ensemble_serial(const ExperimentPlan& plan,
                                       Splitting splitting = Splitting::coherent);

// Duration i of the plan, identical to durations()[i].
double plan_duration(const ExperimentPlan& plan, std::size_t duration);

// Deterministic realised delta for run (i, j).
double realized_delta(const ExperimentPlan& plan, std::size_t duration, std::size_t rep);

// One run of the table; depends only on (plan, i, j, splitting).
RunResult simulate_run(const ExperimentPlan& plan, std::size_t duration, std::size_t rep,
                       Splitting splitting = Splitting::coherent);

struct DurationSummary {
  double T = 0.0;
  double pg_mean = 0.0;
  double pg_stderr = 0.0;
  double p1_mean = 0.0;
  double p1_stderr = 0.0;
};

std::vector<DurationSummary> summarize(const EnsembleTable& table);

// N1 N2 (mean T + overhead), seconds.
double campaign_seconds(const ExperimentPlan& plan);

}  // namespace tcs
