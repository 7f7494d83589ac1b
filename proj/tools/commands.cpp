#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <numbers>

#include <CLI11.hpp>
#include <boost/version.hpp>
#include <fftw3.h>

#include "cli.hpp"
#include "tcs/analysis.hpp"
#include "tcs/config.hpp"
#include "tcs/errors.hpp"
#include "tcs/tdse.hpp"

#ifndef TCS_VERSION
#define TCS_VERSION "0.0.0"
#endif

namespace tcs::cli {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSecondsPerDay = 86400.0;

const char* kSeedScheme =
    "SplitMix64 streams keyed by (seed, domain, duration index, repetition); domains: "
    "1 = lower-state detuning draw, 2 = coherent outcomes, 3 = collapsed-split outcomes. "
    "Ensemble e of an accuracy run uses seed' = key(seed, 'ensemble', e). "
    "Results do not depend on --jobs.";

std::string format_name(Format f) {
  switch (f) {
    case Format::csv:
      return "csv";
    case Format::json:
      return "json";
    default:
      return "both";
  }
}

Json chart(const std::string& title, const std::string& x_label, const std::string& y_label,
           Json series) {
  return Json{{"title", title},
              {"x_axis", {{"label", x_label}}},
              {"y_axis", {{"label", y_label}}},
              {"series", std::move(series)}};
}

Json series(const std::string& name, const std::string& file, const std::string& x,
            const std::string& y, const std::string& style, const std::string& y_error = "") {
  Json s{{"name", name}, {"file", file}, {"x", x}, {"y", y}, {"style", style}};
  if (!y_error.empty()) s["y_error"] = y_error;
  return s;
}

Json fit_json(const FringeFit& f) {
  return Json{{"a", f.a},
              {"b", f.b},
              {"amplitude", f.amplitude},
              {"amplitude_stderr", f.amplitude_stderr},
              {"phase_rad", f.phase},
              {"offset", f.offset},
              {"rms_residual", f.rms_residual},
              {"detuning_rad_s", f.detuning},
              {"n_points", f.n_points},
              {"weighted", f.weighted},
              {"epsilon_hat_rad_s", f.epsilon_hat},
              {"t_ref_s", f.t_ref},
              {"saturated", f.saturated}};
}

Json accuracy_json(const AccuracyReport& r) {
  return Json{{"epsilon_true_rad_s", r.epsilon_true},
              {"mean_epsilon_hat_rad_s", r.mean_epsilon_hat},
              {"std_epsilon_hat_rad_s", r.std_epsilon_hat},
              {"relative_accuracy", r.relative_accuracy},
              {"n_ensembles", r.n_ensembles},
              {"n_saturated", r.n_saturated},
              {"n_failed", r.n_failed}};
}

Json summary_json(const std::vector<DurationSummary>& s) {
  Json out = Json::array();
  for (const auto& d : s) {
    out.push_back({{"T_s", d.T},
                   {"pg_mean", d.pg_mean},
                   {"pg_stderr", d.pg_stderr},
                   {"p1_mean", d.p1_mean},
                   {"p1_stderr", d.p1_stderr}});
  }
  return out;
}

SequenceParams point_params(const ExperimentPlan& plan) {
  SequenceParams p;
  p.T = plan.t0;
  p.detuning = plan.detuning;
  p.lower_detuning = plan.delta0;
  p.epsilon = plan.epsilon;
  p.drive_frequency = plan.drive_frequency;
  return p;
}

}  // namespace

Run::Run(Options options, Json config) : opts_(std::move(options)), config_(std::move(config)) {}

std::uint64_t Run::resolve_seed(const std::optional<std::uint64_t>& from_config) {
  if (opts_.seed_flag) {
    seed_ = *opts_.seed_flag;
    seed_source_ = "--seed";
  } else if (from_config) {
    seed_ = *from_config;
    seed_source_ = "config";
  } else if (const char* env = std::getenv("TCS_SEED"); env && *env) {
    const std::string text = env;
    try {
      if (text.find_first_not_of("0123456789") != std::string::npos) throw std::invalid_argument(text);
      seed_ = std::stoull(text);
    } catch (const std::exception&) {
      throw ConfigError("TCS_SEED must be an unsigned 64-bit integer, got '" + text + "'");
    }
    seed_source_ = "TCS_SEED";
  } else {
    seed_ = kDefaultSeed;
    seed_source_ = "default";
  }
  return seed_;
}

std::filesystem::path Run::path(const std::string& name) {
  files_.push_back(name);
  return opts_.out / name;
}

void Run::write_json(const std::string& name, const Json& j) { tcs::write_json(path(name), j); }

Json Run::manifest(double wall_seconds, const std::string& status) const {
  Json m;
  m["tool"] = "tweezer-clock";
  m["version"] = TCS_VERSION;
  m["command"] = opts_.command;
  m["status"] = status;
  m["config_path"] = opts_.config_path ? opts_.config_path->string() : "";
  m["config"] = config_;
  m["effective_config"] = effective;
  m["seed"] = seed_;
  m["seed_source"] = seed_source_;
  m["seed_scheme"] = kSeedScheme;
  m["format"] = format_name(opts_.format);
  m["jobs"] = opts_.jobs;
  if (!opts_.rows.empty()) m["rows"] = opts_.rows;
  m["rerun"] = "tweezer-clock " + opts_.command +
               " --config <effective_config saved as JSON> --seed " + std::to_string(seed_) +
               " --format " + format_name(opts_.format) +
               (opts_.rows.empty() ? std::string() : " --rows " + opts_.rows);
  m["versions"] = {{"compiler", std::string(__VERSION__)},
                   {"cxx_standard", static_cast<long>(__cplusplus)},
                   {"openmp", static_cast<long>(_OPENMP)},
                   {"fftw", std::string(fftw_version)},
                   {"boost", std::string(BOOST_LIB_VERSION)},
                   {"nlohmann_json",
                    std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                        std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                        std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                   {"cli11", std::string(CLI11_VERSION)}};
  m["wall_time_s"] = wall_seconds;
  m["summary"] = summary;
  m["files"] = files_;
  return m;
}

void cmd_params(Run& run) {
  const ParamsConfig c = parse_params_config(run.config());
  run.effective = to_json(c);
  const DerivedQuantities d = derive(c.atom, c.trap, c.geometry, c.g);
  const double x0_r = std::sqrt(kConstants.hbar / (2.0 * c.atom.mass * d.trap.radial));
  const double x0_z = std::sqrt(kConstants.hbar / (2.0 * c.atom.mass * d.trap.axial));
  const Json j{
      {"omega0_rad_s", d.omega0},
      {"clock_frequency_hz", d.omega0 / (2.0 * kPi)},
      {"epsilon_rad_s", d.epsilon},
      {"fractional_shift", d.epsilon / d.omega0},
      {"trap_radial_rad_s", d.trap.radial},
      {"trap_axial_rad_s", d.trap.axial},
      {"trap_radial_hz", d.trap.radial / (2.0 * kPi)},
      {"trap_axial_hz", d.trap.axial / (2.0 * kPi)},
      {"x0_radial_m", x0_r},
      {"x0_axial_m", x0_z},
      {"eta_radial", d.eta.radial},
      {"eta_axial", d.eta.axial},
      {"visibility", d.visibility},
      {"phase_duration_s", c.geometry.phase_duration},
      {"arm_separation_m", c.geometry.arm_separation},
  };
  std::cout << j.dump(2) << '\n';
  run.summary = {{"epsilon_rad_s", d.epsilon}, {"visibility", d.visibility}};
  if (run.json()) run.write_json("params.json", j);
  if (run.csv()) {
    CsvWriter csv(run.path("params.csv"),
                  {"omega0[rad/s]", "epsilon[rad/s]", "fractional_shift[1]", "trap_radial[rad/s]",
                   "trap_axial[rad/s]", "x0_radial[m]", "x0_axial[m]", "eta_radial[1]",
                   "eta_axial[1]", "visibility[1]", "phase_duration[s]", "arm_separation[m]"});
    csv.row({d.omega0, d.epsilon, d.epsilon / d.omega0, d.trap.radial, d.trap.axial, x0_r, x0_z,
             d.eta.radial, d.eta.axial, d.visibility, c.geometry.phase_duration,
             c.geometry.arm_separation});
  }
}

void cmd_sequence(Run& run) {
  const SequenceConfig c = parse_sequence_config(run.config());
  run.effective = to_json(c);
  const SequenceParams& p = c.params;
  const StateVector4 s = final_state(p);
  const auto probs = joint_probabilities(s);
  const char* names[4] = {"g1", "g2", "e1", "e2"};
  Json amplitudes = Json::object();
  for (std::size_t k = 0; k < 4; ++k) {
    amplitudes[names[k]] = {{"re", s[k].real()}, {"im", s[k].imag()}, {"probability", probs[k]}};
  }
  const Json j{{"amplitudes", amplitudes},
               {"p1", p_upper_port(s)},
               {"p2", p_lower_port(s)},
               {"pg", p_ground(s)},
               {"pe", p_excited(s)},
               {"closed_form_p1", closed_form_p1(p, c.convention)},
               {"closed_form_pg", closed_form_pg(p, c.convention)},
               {"convention", to_string(c.convention)},
               {"port_amplitude", port_amplitude(p, c.convention)},
               {"visibility", visibility(p.T, p.epsilon)},
               {"norm", s.norm_squared()}};
  std::cout << j.dump(2) << '\n';
  run.summary = {{"p1", j["p1"]}, {"pg", j["pg"]}};
  if (run.json()) run.write_json("sequence.json", j);
  if (run.csv()) {
    CsvWriter csv(run.path("sequence.csv"),
                  {"state", "re_amplitude[1]", "im_amplitude[1]", "probability[1]"});
    for (std::size_t k = 0; k < 4; ++k) {
      csv.row({std::string(names[k]), s[k].real(), s[k].imag(), probs[k]});
    }
  }
}

void cmd_fringe(Run& run) {
  std::optional<std::uint64_t> seed;
  FringeConfig c = parse_fringe_config(run.config(), seed);
  c.plan.seed = run.resolve_seed(seed);
  run.effective = to_json(c);

  std::vector<DurationSummary> summary;
  double t_ref = c.plan.reference_duration();
  if (!c.ensemble_csv.empty()) {
    const EnsembleTable table = read_ensemble_csv(c.ensemble_csv);
    summary = summarize(table);
    t_ref = table.durations.front() + kPi / c.plan.detuning;
  } else {
    summary = summarize(simulate_ensemble(c.plan));
  }
  const FringeFit fit = fit_and_extract(summary, c.plan.detuning, t_ref);
  const double expected = 0.5 * visibility(t_ref, c.plan.epsilon);

  Json out = fit_json(fit);
  out["epsilon_true_rad_s"] = c.plan.epsilon;
  out["expected_amplitude"] = expected;
  out["amplitude_deviation_in_stderr"] =
      fit.amplitude_stderr > 0.0 ? (fit.amplitude - expected) / fit.amplitude_stderr : 0.0;
  out["points"] = summary_json(summary);
  run.summary = {{"amplitude", fit.amplitude},
                 {"amplitude_stderr", fit.amplitude_stderr},
                 {"expected_amplitude", expected}};
  if (run.json()) run.write_json("fringe_fit.json", out);
  if (run.csv()) {
    CsvWriter points(run.path("fringe_points.csv"),
                     {"duration_index[index]", "T[s]", "pg_mean[1]", "pg_stderr[1]", "p1_mean[1]",
                      "p1_stderr[1]"});
    for (std::size_t i = 0; i < summary.size(); ++i) {
      const auto& d = summary[i];
      points.row({std::uint64_t{i}, d.T, d.pg_mean, d.pg_stderr, d.p1_mean, d.p1_stderr});
    }
    CsvWriter curve(run.path("fringe_curve.csv"), {"T[s]", "pg_fit[1]"});
    const double t_lo = summary.front().T;
    const double t_hi = t_lo + 2.0 * kPi / c.plan.detuning;
    for (std::size_t k = 0; k < c.curve_samples; ++k) {
      const double T = t_lo + (t_hi - t_lo) * static_cast<double>(k) /
                                  static_cast<double>(c.curve_samples - 1);
      curve.row({T, fit.model(T)});
    }
    run.write_json("fringe_chart.json",
                   chart("Clock-state fringe", "T [s]", "P_g",
                         Json::array({series("simulated", "fringe_points.csv", "T[s]",
                                             "pg_mean[1]", "points", "pg_stderr[1]"),
                                      series("fit", "fringe_curve.csv", "T[s]", "pg_fit[1]",
                                             "line")})));
  }
}

void cmd_ensemble(Run& run) {
  std::optional<std::uint64_t> seed;
  ExperimentPlan plan = parse_ensemble_config(run.config(), seed);
  plan.seed = run.resolve_seed(seed);
  run.effective = to_json(plan);
  const EnsembleTable table = simulate_ensemble(plan);
  const auto summary = summarize(table);
  run.summary = {{"runs", table.rows.size()}};
  if (run.csv()) write_ensemble_csv(run.path("ensemble.csv"), table);
  if (run.json()) {
    run.write_json("ensemble_summary.json",
                   Json{{"n_durations", table.n_durations},
                        {"n_reps", table.n_reps},
                        {"n_atoms", table.n_atoms},
                        {"campaign_days", campaign_seconds(plan) / kSecondsPerDay},
                        {"durations", summary_json(summary)}});
  }
}

void cmd_accuracy(Run& run) {
  std::optional<std::uint64_t> seed;
  AccuracyConfig c = parse_accuracy_config(run.config(), seed);
  c.plan.seed = run.resolve_seed(seed);
  run.effective = to_json(c.plan);
  run.effective["n_ensembles"] = c.n_ensembles;
  const AccuracyReport r = relative_accuracy(c.plan, c.n_ensembles);
  Json j = accuracy_json(r);
  j["campaign_days"] = campaign_seconds(c.plan) / kSecondsPerDay;
  run.summary = {{"relative_accuracy", r.relative_accuracy}};
  if (run.json()) run.write_json("accuracy.json", j);
  if (run.csv()) {
    CsvWriter csv(run.path("accuracy_estimates.csv"), {"fit_index[index]", "epsilon_hat[rad/s]"});
    for (std::size_t e = 0; e < r.epsilon_hats.size(); ++e) {
      csv.row({std::uint64_t{e}, r.epsilon_hats[e]});
    }
  }
}

void cmd_histogram(Run& run) {
  std::optional<std::uint64_t> seed;
  HistogramConfig c = parse_histogram_config(run.config(), seed);
  c.plan.seed = run.resolve_seed(seed);
  c.options.seed = c.plan.seed;
  run.effective = to_json(c);

  const double A = port_amplitude(point_params(c.plan));
  if (!(A > 0.0)) throw ConfigError("histogram: the exit-port amplitude vanishes at this T");
  Json reports = Json::array();
  Json chart_series = Json::array();
  for (const std::size_t n : c.n_atoms) {
    ExperimentPlan plan = c.plan;
    plan.n_atoms = n;
    const EnsembleTable coherent = simulate_ensemble(plan, Splitting::coherent);
    const EnsembleTable incoherent = simulate_ensemble(plan, Splitting::incoherent);
    const CoherenceReport r = coherence_test(coherent, incoherent, A, c.options);
    const double expected_std = std::sqrt(0.25 / static_cast<double>(n));
    Json j{{"n_atoms", n},
           {"port_amplitude", A},
           {"ks_statistic", r.ks.statistic},
           {"ks_p_value", r.ks.p_value},
           {"distinguishable", r.distinguishable},
           {"chi2_statistic", r.chi2_arcsine.statistic},
           {"chi2_dof", r.chi2_arcsine.dof},
           {"chi2_p_value", r.chi2_arcsine.p_value},
           {"chi2_merged_bins", r.chi2_arcsine.merged_bins},
           {"chi2_pass", r.chi2_pass},
           {"coherent_std", r.coherent_std},
           {"incoherent_std", r.incoherent_std},
           {"incoherent_std_expected", expected_std}};
    reports.push_back(j);
    const std::string tag = "N" + std::to_string(n);
    if (run.json()) run.write_json("coherence_" + tag + ".json", j);
    if (run.csv()) {
      const std::string name = "histogram_" + tag + ".csv";
      CsvWriter csv(run.path(name),
                    {"bin_low[1]", "bin_high[1]", "coherent_count[count]",
                     "incoherent_count[count]", "coherent_density[1]", "incoherent_density[1]",
                     "expected_density[1]"});
      for (std::size_t k = 0; k < r.coherent.bins(); ++k) {
        const double width = r.coherent.edges[k + 1] - r.coherent.edges[k];
        csv.row({r.coherent.edges[k], r.coherent.edges[k + 1],
                 std::uint64_t{r.coherent.counts[k]}, std::uint64_t{r.incoherent.counts[k]},
                 r.coherent.density(k), r.incoherent.density(k),
                 r.expected_fraction[k] / width});
      }
      chart_series.push_back(series("coherent N_a=" + std::to_string(n), name, "bin_low[1]",
                                    "coherent_density[1]", "steps"));
      chart_series.push_back(series("incoherent N_a=" + std::to_string(n), name, "bin_low[1]",
                                    "incoherent_density[1]", "steps"));
      chart_series.push_back(series("arcsine (x) binomial N_a=" + std::to_string(n), name,
                                    "bin_low[1]", "expected_density[1]", "steps"));
    }
  }
  if (run.csv()) {
    CsvWriter csv(run.path("arcsine_density.csv"), {"p1[1]", "density[1]"});
    for (std::size_t k = 0; k < c.density_samples; ++k) {
      const double u = (static_cast<double>(k) + 0.5) / static_cast<double>(c.density_samples);
      const double x = 0.5 - A + 2.0 * A * u;
      csv.row({x, arcsine_pdf(x, A)});
    }
    chart_series.push_back(
        series("arcsine density", "arcsine_density.csv", "p1[1]", "density[1]", "line"));
    run.write_json("histogram_chart.json",
                   chart("Exit-port estimator", "P1 estimate", "probability density",
                         chart_series));
  }
  run.summary = {{"panels", reports}};
}

void cmd_tdse(Run& run) {
  const TdseConfig c = parse_tdse_config(run.config());
  run.effective = to_json(c);
  const tdse::TrapProtocol& p = c.protocol;
  const tdse::Grid1D grid = tdse::default_grid(p, c.n_points);
  const tdse::SplitResult split = tdse::run_splitter(p, grid, c.n_snapshots, false);
  std::vector<double> adiabatic;
  double min_adiabatic = 1.0;
  if (c.adiabaticity) {
    const auto rep = tdse::adiabaticity(split.trajectory, p, grid);
    adiabatic = rep.per_snapshot;
    min_adiabatic = rep.min_overlap;
  }
  double return_overlap = 0.0;
  if (c.reverse) return_overlap = tdse::combiner_return_overlap(split, p, grid);

  Json j{{"p_upper", split.populations.upper},
         {"p_lower", split.populations.lower},
         {"imbalance_pp", 100.0 * (split.populations.lower - split.populations.upper)},
         {"max_norm_drift", split.max_norm_drift},
         {"steps", split.trajectory.steps},
         {"dt_s", split.trajectory.dt},
         {"grid", {{"x_min_m", grid.x_min}, {"x_max_m", grid.x_max}, {"n_points", grid.n_points}}}};
  if (c.adiabaticity) j["min_adiabaticity"] = min_adiabatic;
  if (c.reverse) j["combiner_return_overlap"] = return_overlap;
  run.summary = j;
  if (run.json()) run.write_json("tdse_summary.json", j);
  if (run.csv()) {
    CsvWriter csv(run.path("tdse_snapshots.csv"),
                  {"t[s]", "d[m]", "delta[1]", "p_upper[1]", "p_lower[1]", "adiabaticity[1]"});
    const auto& snaps = split.trajectory.snapshots;
    for (std::size_t k = 0; k < snaps.size(); ++k) {
      const auto pop = tdse::arm_populations(snaps[k].psi);
      CsvWriter::Cell a = std::string();
      if (k < adiabatic.size()) a = adiabatic[k];
      csv.row({snaps[k].t, snaps[k].separation, snaps[k].detuning, pop.upper, pop.lower, a});
    }
    run.write_json("tdse_chart.json",
                   chart("Arm populations during splitting", "t [s]", "population",
                         Json::array({series("upper arm", "tdse_snapshots.csv", "t[s]",
                                             "p_upper[1]", "line"),
                                      series("lower arm", "tdse_snapshots.csv", "t[s]",
                                             "p_lower[1]", "line")})));
  }
}

std::size_t cmd_table1(Run& run) {
  std::optional<std::uint64_t> seed;
  const Table1Config c = parse_table1_config(run.config(), seed);
  const std::uint64_t s = run.resolve_seed(seed);
  run.effective = {{"n_ensembles", c.n_ensembles}, {"seed", s}};
  const auto& rows = table1_rows();
  const std::vector<std::size_t> selected =
      run.options().rows.empty() ? [&] {
        std::vector<std::size_t> all(rows.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        return all;
      }()
                                 : parse_row_filter(run.options().rows, rows.size());

  std::unique_ptr<CsvWriter> csv;
  if (run.csv()) {
    csv = std::make_unique<CsvWriter>(
        run.path("table1.csv"),
        std::vector<std::string>{"row[index]", "n_atoms[count]", "n_reps[count]", "T[s]",
                                 "runtime[d]", "reference_runtime[d]", "relative_accuracy[1]",
                                 "reference_accuracy[1]", "relative_deviation[1]",
                                 "n_ensembles[count]", "status"});
  }
  Json out = Json::array();
  Json walls = Json::object();
  std::size_t failures = 0;
  for (const std::size_t i : selected) {
    const Table1Row& row = rows[i];
    const ExperimentPlan plan = table1_plan(row, s);
    const double days = campaign_seconds(plan) / kSecondsPerDay;
    Json entry{{"row", i + 1},
               {"n_atoms", row.n_atoms},
               {"n_reps", row.n_reps},
               {"T_s", row.T},
               {"runtime_days", days},
               {"reference_runtime_days", row.reference_runtime_days},
               {"reference_accuracy", row.reference_accuracy}};
    const auto start = std::chrono::steady_clock::now();
    try {
      const AccuracyReport r = relative_accuracy(plan, c.n_ensembles);
      const double dev = r.relative_accuracy / row.reference_accuracy - 1.0;
      entry["report"] = accuracy_json(r);
      entry["relative_deviation"] = dev;
      entry["status"] = "ok";
      if (csv) {
        csv->row({std::uint64_t{i + 1}, std::uint64_t{row.n_atoms}, std::uint64_t{row.n_reps},
                  row.T, days, row.reference_runtime_days, r.relative_accuracy,
                  row.reference_accuracy, dev, std::uint64_t{r.n_ensembles}, std::string("ok")});
      }
    } catch (const std::exception& e) {
      ++failures;
      entry["status"] = "failed";
      entry["error"] = e.what();
      if (csv) {
        csv->row({std::uint64_t{i + 1}, std::uint64_t{row.n_atoms}, std::uint64_t{row.n_reps},
                  row.T, days, row.reference_runtime_days, std::string(), row.reference_accuracy,
                  std::string(), std::uint64_t{0}, std::string("failed")});
      }
    }
    walls[std::to_string(i + 1)] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.push_back(entry);
  }
  if (run.json()) run.write_json("table1.json", out);
  if (run.csv()) {
    run.write_json("table1_chart.json",
                   chart("Relative accuracy per parameter row", "row", "relative accuracy",
                         Json::array({series("simulated", "table1.csv", "row[index]",
                                             "relative_accuracy[1]", "points"),
                                      series("reference", "table1.csv", "row[index]",
                                             "reference_accuracy[1]", "points")})));
  }
  run.summary = {{"rows", selected.size()}, {"failed", failures}, {"row_wall_time_s", walls}};
  return failures;
}

}  // namespace tcs::cli
