#include "tcs/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <limits>
#include <numeric>
#include <random>

#include <boost/math/special_functions/gamma.hpp>

#include "tcs/errors.hpp"

namespace tcs {

namespace {

constexpr double kPi = std::numbers::pi;

struct EnsembleOutcome {
  double epsilon_hat = 0.0;
  bool saturated = false;
  bool failed = false;
};

EnsembleOutcome one_ensemble(const ExperimentPlan& plan, std::size_t e) {
  ExperimentPlan local = plan;
  local.seed = ensemble_seed(plan.seed, e);
  EnsembleOutcome out;
  try {
    const FringeFit fit =
        fit_and_extract(simulate_summary(local), local.detuning, local.reference_duration());
    out.epsilon_hat = fit.epsilon_hat;
    out.saturated = fit.saturated;
  } catch (const FitError&) {
    out.failed = true;
  }
  return out;
}

AccuracyReport collect(const ExperimentPlan& plan, const std::vector<EnsembleOutcome>& outcomes) {
  AccuracyReport r;
  r.epsilon_true = plan.epsilon;
  for (const auto& o : outcomes) {
    if (o.failed) {
      ++r.n_failed;
      continue;
    }
    if (o.saturated) ++r.n_saturated;
    r.epsilon_hats.push_back(o.epsilon_hat);
  }
  r.n_ensembles = r.epsilon_hats.size();
  if (r.n_ensembles < 2) {
    throw FitError("relative_accuracy: fewer than two successful ensembles");
  }
  r.mean_epsilon_hat = std::accumulate(r.epsilon_hats.begin(), r.epsilon_hats.end(), 0.0) /
                       static_cast<double>(r.n_ensembles);
  r.std_epsilon_hat = sample_std(r.epsilon_hats);
  r.relative_accuracy = r.std_epsilon_hat / std::abs(plan.epsilon);
  return r;
}

void check_accuracy_inputs(const ExperimentPlan& plan, std::size_t n_ensembles) {
  plan.validate();
  if (n_ensembles < 2) throw InvalidInput("relative_accuracy: need at least two ensembles");
  if (!(plan.epsilon != 0.0)) throw InvalidInput("relative_accuracy: epsilon must be nonzero");
}

}  // namespace

double FringeFit::model(double T) const {
  return offset + a * std::sin(detuning * T) + b * std::cos(detuning * T);
}

FringeFit fit_fringe(std::span<const double> durations, std::span<const double> pg_means,
                     std::span<const double> pg_stderrs, double detuning) {
  const std::size_t n = durations.size();
  if (n < 3) throw InvalidInput("fit_fringe: need at least three durations");
  if (pg_means.size() != n || pg_stderrs.size() != n) {
    throw InvalidInput("fit_fringe: input lengths differ");
  }
  if (!(detuning > 0.0)) throw InvalidInput("fit_fringe: detuning must be positive");

  bool weighted = true;
  for (double s : pg_stderrs) {
    if (!(s > 0.0) || !std::isfinite(s)) weighted = false;
  }

  // Normal equations for y - 1/2 = a s + b c.
  double ss = 0.0, sc = 0.0, cc = 0.0, sy = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = weighted ? 1.0 / (pg_stderrs[i] * pg_stderrs[i]) : 1.0;
    const double s = std::sin(detuning * durations[i]);
    const double c = std::cos(detuning * durations[i]);
    const double y = pg_means[i] - 0.5;
    ss += w * s * s;
    sc += w * s * c;
    cc += w * c * c;
    sy += w * s * y;
    cy += w * c * y;
  }
  const double det = ss * cc - sc * sc;
  if (!(std::abs(det) > 1e-12 * std::max(1.0, ss * cc))) {
    throw FitError("fit_fringe: singular design matrix (durations do not span a phase range)");
  }

  FringeFit f;
  f.detuning = detuning;
  f.n_points = n;
  f.weighted = weighted;
  f.a = (cc * sy - sc * cy) / det;
  f.b = (ss * cy - sc * sy) / det;
  f.amplitude = std::hypot(f.a, f.b);
  f.phase = std::atan2(f.b, f.a);

  double rss = 0.0, wrss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = pg_means[i] - f.model(durations[i]);
    rss += r * r;
    if (weighted) wrss += r * r / (pg_stderrs[i] * pg_stderrs[i]);
  }
  f.rms_residual = std::sqrt(rss / static_cast<double>(n));

  // Covariance of (a, b).
  double var_a = cc / det, var_b = ss / det, cov_ab = -sc / det;
  if (!weighted) {
    const double sigma2 = n > 2 ? rss / static_cast<double>(n - 2) : 0.0;
    var_a *= sigma2;
    var_b *= sigma2;
    cov_ab *= sigma2;
  }
  if (f.amplitude > 0.0) {
    const double v = (f.a * f.a * var_a + f.b * f.b * var_b + 2.0 * f.a * f.b * cov_ab) /
                     (f.amplitude * f.amplitude);
    f.amplitude_stderr = std::sqrt(std::max(0.0, v));
  } else {
    f.amplitude_stderr = std::sqrt(std::max(0.0, 0.5 * (var_a + var_b)));
  }
  (void)wrss;
  return f;
}

EpsilonEstimate extract_epsilon(const FringeFit& fit, double t_ref) {
  if (!(t_ref > 0.0)) throw InvalidInput("extract_epsilon: t_ref must be positive");
  if (!(fit.amplitude >= 0.0)) throw InvalidInput("extract_epsilon: amplitude must be >= 0");
  EpsilonEstimate e;
  double v = 2.0 * fit.amplitude;
  if (v > 1.0) {
    v = 1.0;
    e.saturated = true;
  }
  e.epsilon_hat = 2.0 / t_ref * std::asin(v);
  return e;
}

FringeFit fit_and_extract(const std::vector<DurationSummary>& summary, double detuning,
                          double t_ref) {
  std::vector<double> T, m, s;
  for (const auto& d : summary) {
    T.push_back(d.T);
    m.push_back(d.pg_mean);
    s.push_back(d.pg_stderr);
  }
  FringeFit f = fit_fringe(T, m, s, detuning);
  const EpsilonEstimate e = extract_epsilon(f, t_ref);
  f.epsilon_hat = e.epsilon_hat;
  f.saturated = e.saturated;
  f.t_ref = t_ref;
  return f;
}

std::vector<DurationSummary> simulate_summary(const ExperimentPlan& plan) {
  plan.validate();
  std::vector<DurationSummary> out(plan.n_durations);
  std::vector<double> pg(plan.n_reps), p1(plan.n_reps);
  const double n = static_cast<double>(plan.n_reps);
  for (std::size_t i = 0; i < plan.n_durations; ++i) {
    for (std::size_t j = 0; j < plan.n_reps; ++j) {
      const RunResult r = simulate_run(plan, i, j);
      pg[j] = r.pg_hat;
      p1[j] = r.p1_hat;
    }
    DurationSummary& s = out[i];
    s.T = plan_duration(plan, i);
    s.pg_mean = std::accumulate(pg.begin(), pg.end(), 0.0) / n;
    s.p1_mean = std::accumulate(p1.begin(), p1.end(), 0.0) / n;
    if (plan.n_reps > 1) {
      s.pg_stderr = sample_std(pg) / std::sqrt(n);
      s.p1_stderr = sample_std(p1) / std::sqrt(n);
    }
  }
  return out;
}

std::uint64_t ensemble_seed(std::uint64_t seed, std::size_t ensemble) {
  return SplitMix64::key(seed, 0x656e73656d626c65ULL, ensemble);
}

AccuracyReport relative_accuracy(const ExperimentPlan& plan, std::size_t n_ensembles) {
  check_accuracy_inputs(plan, n_ensembles);
  std::vector<EnsembleOutcome> outcomes(n_ensembles);
  std::exception_ptr error;
  const auto total = static_cast<long long>(n_ensembles);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long e = 0; e < total; ++e) {
    try {
      outcomes[static_cast<std::size_t>(e)] = one_ensemble(plan, static_cast<std::size_t>(e));
    } catch (...) {
#pragma omp critical(tcs_accuracy_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return collect(plan, outcomes);
}

AccuracyReport relative_accuracy_serial(const ExperimentPlan& plan, std::size_t n_ensembles) {
  check_accuracy_inputs(plan, n_ensembles);
  std::vector<EnsembleOutcome> outcomes(n_ensembles);
  for (std::size_t e = 0; e < n_ensembles; ++e) outcomes[e] = one_ensemble(plan, e);
  return collect(plan, outcomes);
}

const std::vector<Table1Row>& table1_rows() {
  static const std::vector<Table1Row> rows = {
      {100, 5000, 1.0, 2.8, 0.381},   {100, 10000, 1.0, 5.6, 0.284},
      {20, 5000, 3.0, 3.7, 0.289},    {100, 5000, 3.0, 3.7, 0.129},
      {100, 10000, 3.0, 7.4, 0.098},  {10, 1000, 10.0, 1.4, 0.284},
      {10, 5000, 10.0, 7.0, 0.124},   {20, 5000, 10.0, 7.0, 0.088},
      {100, 1000, 10.0, 1.4, 0.090},  {100, 5000, 10.0, 7.0, 0.038},
      {100, 10000, 10.0, 13.9, 0.027},
  };
  return rows;
}

ExperimentPlan table1_plan(const Table1Row& row, std::uint64_t seed) {
  ExperimentPlan plan = fig2_plan();
  plan.n_atoms = row.n_atoms;
  plan.n_reps = row.n_reps;
  plan.t0 = row.T;
  plan.seed = seed;
  return plan;
}

double arcsine_pdf(double x, double A) {
  if (!(A > 0.0 && A <= 0.5)) throw InvalidInput("arcsine_pdf: A must be in (0, 0.5]");
  const double u = x - 0.5;
  if (!(std::abs(u) < A)) return 0.0;
  return 1.0 / (kPi * std::sqrt(A * A - u * u));
}

double arcsine_cdf(double x, double A) {
  if (!(A > 0.0 && A <= 0.5)) throw InvalidInput("arcsine_cdf: A must be in (0, 0.5]");
  const double u = x - 0.5;
  if (u <= -A) return 0.0;
  if (u >= A) return 1.0;
  return 0.5 + std::asin(u / A) / kPi;
}

double Histogram::fraction(std::size_t k) const {
  return total ? static_cast<double>(counts[k]) / static_cast<double>(total) : 0.0;
}

double Histogram::density(std::size_t k) const { return fraction(k) / (edges[k + 1] - edges[k]); }

std::vector<double> estimator_edges(std::size_t n_atoms) {
  if (n_atoms < 1) throw InvalidInput("estimator_edges: n_atoms must be >= 1");
  std::vector<double> e;
  if (n_atoms <= 100) {
    const double n = static_cast<double>(n_atoms);
    for (std::size_t k = 0; k <= n_atoms + 1; ++k) e.push_back((static_cast<double>(k) - 0.5) / n);
  } else {
    for (std::size_t k = 0; k <= 50; ++k) e.push_back(static_cast<double>(k) / 50.0);
  }
  return e;
}

std::size_t estimator_bin(double x, std::size_t n_atoms) {
  if (n_atoms <= 100) {
    const double k = std::nearbyint(x * static_cast<double>(n_atoms));
    return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(n_atoms)));
  }
  return static_cast<std::size_t>(std::clamp(std::floor(x * 50.0), 0.0, 49.0));
}

Histogram estimator_histogram(std::span<const double> values, std::size_t n_atoms) {
  Histogram h;
  h.edges = estimator_edges(n_atoms);
  h.counts.assign(h.edges.size() - 1, 0);
  for (double v : values) ++h.counts[estimator_bin(v, n_atoms)];
  h.total = values.size();
  return h;
}

double kolmogorov_q(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0, sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = sign * std::exp(-2.0 * j * j * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw InvalidInput("ks_two_sample: empty sample");
  std::vector<double> a(x.begin(), x.end()), b(y.begin(), y.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  KsResult r;
  r.statistic = d;
  const double ne = std::sqrt(na * nb / (na + nb));
  r.p_value = kolmogorov_q((ne + 0.12 + 0.11 / ne) * d);
  return r;
}

Chi2Result chi2_test(std::span<const std::size_t> observed, std::span<const double> expected_fraction,
                     double min_expected) {
  if (observed.size() != expected_fraction.size() || observed.empty()) {
    throw InvalidInput("chi2_test: observed and expected differ in length");
  }
  const double total =
      static_cast<double>(std::accumulate(observed.begin(), observed.end(), std::size_t{0}));
  if (!(total > 0.0)) throw InvalidInput("chi2_test: no observations");

  std::vector<double> obs, exp;
  double o_acc = 0.0, e_acc = 0.0;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    o_acc += static_cast<double>(observed[k]);
    e_acc += expected_fraction[k] * total;
    if (e_acc >= min_expected) {
      obs.push_back(o_acc);
      exp.push_back(e_acc);
      o_acc = e_acc = 0.0;
    }
  }
  if (o_acc > 0.0 || e_acc > 0.0) {
    if (exp.empty()) {
      obs.push_back(o_acc);
      exp.push_back(e_acc);
    } else {
      obs.back() += o_acc;
      exp.back() += e_acc;
    }
  }
  Chi2Result r;
  r.merged_bins = exp.size();
  for (std::size_t k = 0; k < exp.size(); ++k) {
    if (exp[k] > 0.0) {
      r.statistic += (obs[k] - exp[k]) * (obs[k] - exp[k]) / exp[k];
    } else if (obs[k] > 0.0) {
      r.statistic = std::numeric_limits<double>::infinity();
    }
  }
  if (exp.size() < 2) {
    r.dof = 0;
    r.p_value = 1.0;
    return r;
  }
  r.dof = exp.size() - 1;
  r.p_value = std::isfinite(r.statistic)
                  ? boost::math::gamma_q(0.5 * static_cast<double>(r.dof), 0.5 * r.statistic)
                  : 0.0;
  return r;
}

std::vector<double> arcsine_binomial_fractions(double A, std::size_t n_atoms,
                                               std::size_t n_samples, std::uint64_t seed) {
  if (!(A >= 0.0 && A <= 0.5)) throw InvalidInput("arcsine_binomial_fractions: A outside [0, 0.5]");
  if (n_samples < 1) throw InvalidInput("arcsine_binomial_fractions: need samples");
  const std::size_t bins = estimator_edges(n_atoms).size() - 1;
  std::vector<double> out(bins, 0.0);
  std::vector<std::size_t> counts(bins, 0);
  SplitMix64 rng = SplitMix64::stream(seed, 0x617263ULL, n_atoms);
  for (std::size_t s = 0; s < n_samples; ++s) {
    const double p = std::clamp(0.5 - A * std::sin(2.0 * kPi * rng.uniform()), 0.0, 1.0);
    std::binomial_distribution<long long> binom(static_cast<long long>(n_atoms), p);
    const double x = static_cast<double>(binom(rng)) / static_cast<double>(n_atoms);
    ++counts[estimator_bin(x, n_atoms)];
  }
  for (std::size_t k = 0; k < bins; ++k) {
    out[k] = static_cast<double>(counts[k]) / static_cast<double>(n_samples);
  }
  return out;
}

std::vector<double> p1_values(const EnsembleTable& table) {
  std::vector<double> v;
  v.reserve(table.rows.size());
  for (const auto& r : table.rows) v.push_back(r.p1_hat);
  return v;
}

CoherenceReport coherence_test(const EnsembleTable& coherent, const EnsembleTable& incoherent,
                               double A, const CoherenceOptions& options) {
  if (coherent.rows.empty() || incoherent.rows.empty()) {
    throw InvalidInput("coherence_test: empty table");
  }
  if (coherent.n_atoms != incoherent.n_atoms) {
    throw InvalidInput("coherence_test: tables have different n_atoms");
  }
  const std::size_t n_atoms = coherent.n_atoms;
  const auto xc = p1_values(coherent);
  const auto xi = p1_values(incoherent);

  CoherenceReport r;
  r.coherent = estimator_histogram(xc, n_atoms);
  r.incoherent = estimator_histogram(xi, n_atoms);
  r.coherent_std = sample_std(xc);
  r.incoherent_std = sample_std(xi);
  r.ks = ks_two_sample(xc, xi);
  r.distinguishable = r.ks.p_value < options.ks_alpha;
  r.expected_fraction = arcsine_binomial_fractions(A, n_atoms, options.mc_samples, options.seed);
  r.chi2_arcsine = chi2_test(r.coherent.counts, r.expected_fraction);
  r.chi2_pass = r.chi2_arcsine.p_value >= options.chi2_alpha;
  return r;
}

double sample_std(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / (n - 1.0));
}

}  // namespace tcs
