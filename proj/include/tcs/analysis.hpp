#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tcs/noise_mc.hpp"

namespace tcs {

// P(T) = 1/2 + a sin(Delta T) + b cos(Delta T), offset fixed at 1/2.
struct FringeFit {
  double a = 0.0;
  double b = 0.0;
  double amplitude = 0.0;  // sqrt(a^2 + b^2)
  double amplitude_stderr = 0.0;
  double phase = 0.0;      // atan2(b, a), rad
  double offset = 0.5;
  double rms_residual = 0.0;
  double detuning = 0.0;   // fixed model frequency, rad/s
  std::size_t n_points = 0;
  bool weighted = false;
  // Filled by fit_and_extract.
  double epsilon_hat = 0.0;  // rad/s
  double t_ref = 0.0;        // s
  bool saturated = false;

  double model(double T) const;
};

// Weighted linear least squares (weights 1/stderr^2). Falls back to equal
// weights when any stderr is zero, in which case the parameter errors are
// scaled by the residual variance. Throws FitError on a singular design.
FringeFit fit_fringe(std::span<const double> durations, std::span<const double> pg_means,
                     std::span<const double> pg_stderrs, double detuning);

struct EpsilonEstimate {
  double epsilon_hat = 0.0;  // rad/s
  bool saturated = false;    // 2 A > 1 was clamped
};

// epsilon = (2 / t_ref) asin(2 A).
EpsilonEstimate extract_epsilon(const FringeFit& fit, double t_ref);

FringeFit fit_and_extract(const std::vector<DurationSummary>& summary, double detuning,
                          double t_ref);

struct AccuracyReport {
  double epsilon_true = 0.0;
  double mean_epsilon_hat = 0.0;
  double std_epsilon_hat = 0.0;
  double relative_accuracy = 0.0;  // std / epsilon_true
  std::size_t n_ensembles = 0;     // successful fits
  std::size_t n_saturated = 0;
  std::size_t n_failed = 0;
  std::vector<double> epsilon_hats;
};

// Per-duration means and standard errors of one ensemble, without keeping
// the run table. Same streams as simulate_ensemble.
std::vector<DurationSummary> simulate_summary(const ExperimentPlan& plan);

// Seed of ensemble e, derived from the plan seed.
std::uint64_t ensemble_seed(std::uint64_t seed, std::size_t ensemble);

// OpenMP over ensembles.
AccuracyReport relative_accuracy(const ExperimentPlan& plan, std::size_t n_ensembles);
AccuracyReport relative_accuracy_serial(const ExperimentPlan& plan, std::size_t n_ensembles);

struct Table1Row {
  std::size_t n_atoms = 0;
  std::size_t n_reps = 0;
  double T = 0.0;                 // s
  double reference_runtime_days = 0.0;
  double reference_accuracy = 0.0;    // fraction
};

const std::vector<Table1Row>& table1_rows();

// Fig. 2 plan with the row's N_a, N2 and window start.
ExperimentPlan table1_plan(const Table1Row& row, std::uint64_t seed = kDefaultSeed);

// Arcsine density of 1/2 - A sin(phi), phi uniform.
double arcsine_pdf(double x, double A);
double arcsine_cdf(double x, double A);

struct Histogram {
  std::vector<double> edges;         // size bins + 1
  std::vector<std::size_t> counts;
  std::size_t total = 0;

  std::size_t bins() const { return counts.size(); }
  double fraction(std::size_t k) const;
  double density(std::size_t k) const;  // fraction / width
};

// Edges at (k - 1/2)/N for N <= 100 (one bin per estimator value k/N), else
// 50 uniform bins on [0, 1].
std::vector<double> estimator_edges(std::size_t n_atoms);
std::size_t estimator_bin(double x, std::size_t n_atoms);
Histogram estimator_histogram(std::span<const double> values, std::size_t n_atoms);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Two-sample Kolmogorov-Smirnov with the asymptotic Kolmogorov distribution.
KsResult ks_two_sample(std::span<const double> x, std::span<const double> y);

// Q_KS(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_q(double lambda);

struct Chi2Result {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
  std::size_t merged_bins = 0;
};

// Observed counts against expected fractions; adjacent bins are merged left
// to right until each expected count is >= min_expected.
Chi2Result chi2_test(std::span<const std::size_t> observed, std::span<const double> expected_fraction,
                     double min_expected = 5.0);

// Fractions per estimator bin of P1_hat = Binomial(N_a, 1/2 - A sin phi) / N_a,
// phi uniform, from n_samples synthetic runs.
std::vector<double> arcsine_binomial_fractions(double A, std::size_t n_atoms,
                                               std::size_t n_samples, std::uint64_t seed);

struct CoherenceOptions {
  double ks_alpha = 1e-3;
  double chi2_alpha = 0.01;
  std::size_t mc_samples = 1000000;
  std::uint64_t seed = kDefaultSeed;
};

struct CoherenceReport {
  Histogram coherent;
  Histogram incoherent;
  KsResult ks;
  Chi2Result chi2_arcsine;
  bool chi2_pass = false;
  bool distinguishable = false;
  double coherent_std = 0.0;
  double incoherent_std = 0.0;
  std::vector<double> expected_fraction;  // arcsine convolved with binomial noise
};

std::vector<double> p1_values(const EnsembleTable& table);

CoherenceReport coherence_test(const EnsembleTable& coherent, const EnsembleTable& incoherent,
                               double A, const CoherenceOptions& options = {});

double sample_std(std::span<const double> v);

}  // namespace tcs
