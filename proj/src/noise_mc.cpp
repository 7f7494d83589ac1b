#include "tcs/noise_mc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "tcs/errors.hpp"
#include "tcs/params.hpp"

namespace tcs {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Stream domains, so that delta draws and atom draws never share a key.
constexpr std::uint64_t kDeltaDomain = 1;
constexpr std::uint64_t kCoherentDomain = 2;
constexpr std::uint64_t kIncoherentDomain = 3;
constexpr std::uint64_t kSharedRep = ~std::uint64_t{0};

RunResult estimators(RunResult r, std::size_t n_atoms) {
  const double n = static_cast<double>(n_atoms);
  r.p1_hat = static_cast<double>(r.counts[kG1] + r.counts[kE1]) / n;
  r.pg_hat = static_cast<double>(r.counts[kG1] + r.counts[kG2]) / n;
  return r;
}

SequenceParams run_params(const ExperimentPlan& plan, double T, double delta) {
  SequenceParams p;
  p.T = T;
  p.detuning = plan.detuning;
  p.lower_detuning = delta;
  p.epsilon = plan.epsilon;
  p.drive_frequency = plan.drive_frequency;
  return p;
}

EnsembleTable empty_table(const ExperimentPlan& plan) {
  plan.validate();
  EnsembleTable t;
  t.n_durations = plan.n_durations;
  t.n_reps = plan.n_reps;
  t.n_atoms = plan.n_atoms;
  t.durations = plan.durations();
  t.rows.resize(plan.n_durations * plan.n_reps);
  return t;
}

}  // namespace

NoiseKind parse_noise_kind(const std::string& name) {
  if (name == "none") return NoiseKind::none;
  if (name == "uniform-phase") return NoiseKind::uniform_phase;
  if (name == "uniform-energy") return NoiseKind::uniform_energy;
  if (name == "gaussian-energy") return NoiseKind::gaussian_energy;
  throw ConfigError("unknown noise kind '" + name + "'");
}

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::none:
      return "none";
    case NoiseKind::uniform_phase:
      return "uniform-phase";
    case NoiseKind::uniform_energy:
      return "uniform-energy";
    case NoiseKind::gaussian_energy:
      return "gaussian-energy";
  }
  return "?";
}

DeltaSampling parse_delta_sampling(const std::string& name) {
  if (name == "per-run") return DeltaSampling::per_run;
  if (name == "per-duration") return DeltaSampling::per_duration;
  throw ConfigError("unknown delta sampling '" + name + "'");
}

std::string to_string(DeltaSampling s) {
  return s == DeltaSampling::per_run ? "per-run" : "per-duration";
}

void NoiseModel::validate() const {
  if (!(scale >= 0.0) || !std::isfinite(scale)) {
    throw InvalidInput("noise: scale must be finite and >= 0");
  }
}

void ExperimentPlan::validate() const {
  if (n_atoms < 1 || n_durations < 1 || n_reps < 1) {
    throw InvalidInput("plan: n_atoms, n_durations and n_reps must be >= 1");
  }
  if (n_atoms > 0xffffffffULL) {
    throw InvalidInput("plan: n_atoms too large");
  }
  if (!(t0 > 0.0) || !std::isfinite(t0)) {
    throw InvalidInput("plan: t0 must be positive");
  }
  if (!(detuning > 0.0) || !std::isfinite(detuning)) {
    throw InvalidInput("plan: detuning must be positive");
  }
  if (!std::isfinite(delta0) || !std::isfinite(epsilon) || !std::isfinite(drive_frequency)) {
    throw InvalidInput("plan: delta0, epsilon and drive_frequency must be finite");
  }
  if (!(overhead >= 0.0)) {
    throw InvalidInput("plan: overhead must be >= 0");
  }
  noise.validate();
}

std::vector<double> ExperimentPlan::durations() const {
  std::vector<double> out(n_durations);
  for (std::size_t i = 0; i < n_durations; ++i) out[i] = plan_duration(*this, i);
  return out;
}

double ExperimentPlan::reference_duration() const { return t0 + std::numbers::pi / detuning; }

ExperimentPlan fig2_plan() {
  ExperimentPlan plan;
  plan.detuning = kTwoPi * 1000.0;
  const auto d = derive(ytterbium171(), default_tweezer(), default_geometry());
  plan.epsilon = d.epsilon;
  return plan;
}

double sample_delta(const NoiseModel& noise, double delta0, double detuning, double T,
                    SplitMix64& rng) {
  switch (noise.kind) {
    case NoiseKind::none:
      return delta0;
    case NoiseKind::uniform_phase:
      return delta0 + kTwoPi * rng.uniform() / T;
    case NoiseKind::uniform_energy: {
      const double w = noise.scale * detuning;
      return delta0 + w * (2.0 * rng.uniform() - 1.0);
    }
    case NoiseKind::gaussian_energy: {
      std::normal_distribution<double> normal(0.0, noise.scale * detuning);
      return delta0 + normal(rng);
    }
  }
  throw ConfigError("unknown noise kind");
}

RunResult sample_counts(const std::array<double, 4>& probabilities, std::size_t n_atoms,
                        SplitMix64& rng) {
  RunResult r;
  auto remaining = static_cast<long long>(n_atoms);
  double mass = 1.0;
  for (std::size_t k = 0; k < 3 && remaining > 0; ++k) {
    const double pk = std::max(0.0, probabilities[k]);
    const double q = mass > 0.0 ? std::clamp(pk / mass, 0.0, 1.0) : 0.0;
    long long c = 0;
    if (q >= 1.0) {
      c = remaining;
    } else if (q > 0.0) {
      std::binomial_distribution<long long> binom(remaining, q);
      c = binom(rng);
    }
    r.counts[k] = static_cast<std::uint32_t>(c);
    remaining -= c;
    mass -= pk;
  }
  r.counts[3] = static_cast<std::uint32_t>(remaining);
  return estimators(r, n_atoms);
}

RunResult sample_run(const SequenceParams& p, std::size_t n_atoms, SplitMix64& rng) {
  if (n_atoms < 1) throw InvalidInput("sample_run: n_atoms must be >= 1");
  RunResult r = sample_counts(joint_probabilities(final_state(p)), n_atoms, rng);
  r.delta_realized = p.lower_detuning;
  return r;
}

std::array<double, 4> incoherent_probabilities(const SequenceParams& p) {
  const Unitary4 rest = u_rot(p).adjoint() * u_pi_half().adjoint() * u_bs().adjoint() *
                        u_pi_lower() * u_phase(p);
  const Complex h(std::numbers::sqrt2 / 2.0, 0.0);
  const StateVector4 upper({h, Complex{}, h, Complex{}});
  const StateVector4 lower({Complex{}, h, Complex{}, h});
  const auto a = joint_probabilities(rest * upper);
  const auto b = joint_probabilities(rest * lower);
  return {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2]), 0.5 * (a[3] + b[3])};
}

RunResult incoherent_run(const SequenceParams& p, std::size_t n_atoms, SplitMix64& rng) {
  if (n_atoms < 1) throw InvalidInput("incoherent_run: n_atoms must be >= 1");
  RunResult r = sample_counts(incoherent_probabilities(p), n_atoms, rng);
  r.delta_realized = p.lower_detuning;
  return r;
}

double plan_duration(const ExperimentPlan& plan, std::size_t duration) {
  const double period = kTwoPi / plan.detuning;
  return plan.t0 +
         period * static_cast<double>(duration) / static_cast<double>(plan.n_durations);
}

RunResult simulate_run(const ExperimentPlan& plan, std::size_t i, std::size_t j,
                       Splitting splitting) {
  const double delta = realized_delta(plan, i, j);
  const SequenceParams p = run_params(plan, plan_duration(plan, i), delta);
  const std::uint64_t domain =
      splitting == Splitting::coherent ? kCoherentDomain : kIncoherentDomain;
  SplitMix64 rng = SplitMix64::stream(plan.seed, domain, i, j);
  RunResult r = splitting == Splitting::coherent ? sample_run(p, plan.n_atoms, rng)
                                                 : incoherent_run(p, plan.n_atoms, rng);
  r.delta_realized = delta;
  return r;
}

double realized_delta(const ExperimentPlan& plan, std::size_t duration, std::size_t rep) {
  const double T = plan_duration(plan, duration);
  const std::uint64_t j = plan.sampling == DeltaSampling::per_run ? rep : kSharedRep;
  SplitMix64 rng = SplitMix64::stream(plan.seed, kDeltaDomain, duration, j);
  return sample_delta(plan.noise, plan.delta0, plan.detuning, T, rng);
}

EnsembleTable simulate_ensemble(const ExperimentPlan& plan, Splitting splitting) {
  EnsembleTable t = empty_table(plan);
  const auto total = static_cast<long long>(t.rows.size());
  const auto reps = static_cast<long long>(plan.n_reps);
#pragma omp parallel for schedule(static)
  for (long long k = 0; k < total; ++k) {
    const auto i = static_cast<std::size_t>(k / reps);
    const auto j = static_cast<std::size_t>(k % reps);
    t.rows[static_cast<std::size_t>(k)] = simulate_run(plan, i, j, splitting);
  }
  return t;
}

EnsembleTable simulate_ensemble_serial(const ExperimentPlan& plan, Splitting splitting) {
  EnsembleTable t = empty_table(plan);
  for (std::size_t i = 0; i < plan.n_durations; ++i) {
    for (std::size_t j = 0; j < plan.n_reps; ++j) {
      t.at(i, j) = simulate_run(plan, i, j, splitting);
    }
  }
  return t;
}

std::vector<DurationSummary> summarize(const EnsembleTable& table) {
  std::vector<DurationSummary> out(table.n_durations);
  const double n = static_cast<double>(table.n_reps);
  for (std::size_t i = 0; i < table.n_durations; ++i) {
    double sg = 0.0, s1 = 0.0;
    for (std::size_t j = 0; j < table.n_reps; ++j) {
      sg += table.at(i, j).pg_hat;
      s1 += table.at(i, j).p1_hat;
    }
    const double mg = sg / n, m1 = s1 / n;
    double vg = 0.0, v1 = 0.0;
    for (std::size_t j = 0; j < table.n_reps; ++j) {
      vg += (table.at(i, j).pg_hat - mg) * (table.at(i, j).pg_hat - mg);
      v1 += (table.at(i, j).p1_hat - m1) * (table.at(i, j).p1_hat - m1);
    }
    DurationSummary& s = out[i];
    s.T = table.durations[i];
    s.pg_mean = mg;
    s.p1_mean = m1;
    if (table.n_reps > 1) {
      s.pg_stderr = std::sqrt(vg / (n - 1.0) / n);
      s.p1_stderr = std::sqrt(v1 / (n - 1.0) / n);
    }
  }
  return out;
}

double campaign_seconds(const ExperimentPlan& plan) {
  plan.validate();
  const auto T = plan.durations();
  double mean = 0.0;
  for (double t : T) mean += t;
  mean /= static_cast<double>(T.size());
  return static_cast<double>(plan.n_durations) * static_cast<double>(plan.n_reps) *
         (mean + plan.overhead);
}

}  // namespace tcs
