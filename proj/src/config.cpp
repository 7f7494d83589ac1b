#include "tcs/config.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "tcs/errors.hpp"

namespace tcs {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Reads keys from one JSON object and rejects whatever was not asked for.
class Section {
 public:
  Section(const Json& j, std::string context) : j_(j), ctx_(std::move(context)) {
    if (!j_.is_object()) throw ConfigError(ctx_ + ": expected a JSON object");
  }

  bool has(const std::string& key) {
    used_.insert(key);
    return j_.contains(key);
  }

  const Json& raw(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  void number(const std::string& key, double& out) {
    if (!has(key)) return;
    const Json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(where(key) + ": expected a number");
    out = v.get<double>();
    if (!std::isfinite(out)) throw ConfigError(where(key) + ": must be finite");
  }

  void count(const std::string& key, std::size_t& out, std::size_t minimum = 1) {
    if (!has(key)) return;
    out = to_count(j_.at(key), where(key), minimum);
  }

  void flag(const std::string& key, bool& out) {
    if (!has(key)) return;
    const Json& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(where(key) + ": expected true or false");
    out = v.get<bool>();
  }

  void text(const std::string& key, std::string& out) {
    if (!has(key)) return;
    const Json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(where(key) + ": expected a string");
    out = v.get<std::string>();
  }

  void seed(std::optional<std::uint64_t>& out) {
    if (!has("seed")) return;
    const Json& v = j_.at("seed");
    if (!v.is_number_unsigned()) throw ConfigError(where("seed") + ": expected an unsigned integer");
    out = v.get<std::uint64_t>();
  }

  std::string where(const std::string& key) const { return ctx_ + "." + key; }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!used_.count(item.key())) {
        throw ConfigError(ctx_ + ": unknown key '" + item.key() + "'");
      }
    }
  }

  static std::size_t to_count(const Json& v, const std::string& where, std::size_t minimum) {
    if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
    if (v.is_number_unsigned()) {
      const auto u = v.get<std::uint64_t>();
      if (u < minimum) throw ConfigError(where + ": must be >= " + std::to_string(minimum));
      return static_cast<std::size_t>(u);
    }
    const auto i = v.get<std::int64_t>();
    if (i < static_cast<std::int64_t>(minimum)) {
      throw ConfigError(where + ": must be >= " + std::to_string(minimum));
    }
    return static_cast<std::size_t>(i);
  }

 private:
  const Json& j_;
  std::string ctx_;
  std::set<std::string> used_;
};

template <typename F>
void revalidate(const std::string& context, F&& f) {
  try {
    f();
  } catch (const InvalidInput& e) {
    throw ConfigError(context + ": " + e.what());
  }
}

double default_epsilon(double h, double g) {
  return gravitational_redshift(clock_angular_frequency(ytterbium171()), g, h);
}

// Keys shared by every Monte Carlo plan: detuning, redshift, noise.
void read_physics(Section& s, ExperimentPlan& plan) {
  double detuning_hz = plan.detuning / kTwoPi;
  s.number("detuning_hz", detuning_hz);
  plan.detuning = kTwoPi * detuning_hz;
  s.number("delta0_rad_s", plan.delta0);
  s.number("drive_frequency_rad_s", plan.drive_frequency);

  double h = default_geometry().arm_separation;
  double g = kConstants.g_earth;
  s.number("arm_separation_m", h);
  s.number("g_m_s2", g);
  const bool explicit_eps = s.has("epsilon_rad_s");
  if (explicit_eps) {
    s.number("epsilon_rad_s", plan.epsilon);
  } else {
    revalidate("plan", [&] { plan.epsilon = default_epsilon(h, g); });
  }

  if (s.has("noise")) {
    Section n(s.raw("noise"), s.where("noise"));
    std::string kind = to_string(plan.noise.kind);
    n.text("kind", kind);
    plan.noise.kind = parse_noise_kind(kind);
    n.number("scale", plan.noise.scale);
    n.finish();
  }
  if (s.has("sampling")) {
    std::string sampling;
    s.text("sampling", sampling);
    plan.sampling = parse_delta_sampling(sampling);
  }
}

void read_plan(Section& s, ExperimentPlan& plan, std::optional<std::uint64_t>& seed) {
  s.count("n_atoms", plan.n_atoms);
  s.count("n_durations", plan.n_durations);
  s.count("n_reps", plan.n_reps);
  s.number("t0_s", plan.t0);
  s.number("overhead_s", plan.overhead);
  read_physics(s, plan);
  s.seed(seed);
}

}  // namespace

SignConvention parse_convention(const std::string& name) {
  if (name == "matrix-product") return SignConvention::matrix_product;
  if (name == "printed") return SignConvention::printed;
  throw ConfigError("unknown sign convention '" + name + "'");
}

std::string to_string(SignConvention c) {
  return c == SignConvention::printed ? "printed" : "matrix-product";
}

ParamsConfig parse_params_config(const Json& j) {
  ParamsConfig c;
  Section s(j, "params");
  if (s.has("atom")) {
    Section a(s.raw("atom"), "params.atom");
    a.text("name", c.atom.name);
    double mass_amu = c.atom.mass / kConstants.amu;
    double clock_nm = c.atom.clock_wavelength * 1e9;
    double magic_nm = c.atom.magic_wavelength * 1e9;
    a.number("mass_amu", mass_amu);
    a.number("clock_wavelength_nm", clock_nm);
    a.number("magic_wavelength_nm", magic_nm);
    a.finish();
    c.atom.mass = mass_amu * kConstants.amu;
    c.atom.clock_wavelength = clock_nm * 1e-9;
    c.atom.magic_wavelength = magic_nm * 1e-9;
  }
  if (s.has("trap")) {
    Section t(s.raw("trap"), "params.trap");
    double depth_uk = c.trap.depth_kelvin * 1e6;
    double waist_um = c.trap.waist * 1e6;
    t.number("depth_uK", depth_uk);
    t.number("waist_um", waist_um);
    t.finish();
    c.trap.depth_kelvin = depth_uk * 1e-6;
    c.trap.waist = waist_um * 1e-6;
  }
  if (s.has("geometry")) {
    Section g(s.raw("geometry"), "params.geometry");
    g.number("arm_separation_m", c.geometry.arm_separation);
    g.number("phase_duration_s", c.geometry.phase_duration);
    g.finish();
  }
  s.number("g_m_s2", c.g);
  s.finish();
  revalidate("params", [&] {
    c.atom.validate();
    c.trap.validate();
    c.geometry.validate();
  });
  return c;
}

SequenceConfig parse_sequence_config(const Json& j) {
  SequenceConfig c;
  c.params.T = default_geometry().phase_duration;
  c.params.detuning = kTwoPi * 1000.0;
  double h = default_geometry().arm_separation;
  double g = kConstants.g_earth;
  Section s(j, "sequence");
  s.number("T_s", c.params.T);
  s.number("detuning_rad_s", c.params.detuning);
  s.number("lower_detuning_rad_s", c.params.lower_detuning);
  s.number("drive_frequency_rad_s", c.params.drive_frequency);
  s.number("arm_separation_m", h);
  s.number("g_m_s2", g);
  if (s.has("epsilon_rad_s")) {
    s.number("epsilon_rad_s", c.params.epsilon);
  } else {
    revalidate("sequence", [&] { c.params.epsilon = default_epsilon(h, g); });
  }
  if (s.has("convention")) {
    std::string name;
    s.text("convention", name);
    c.convention = parse_convention(name);
  }
  s.finish();
  revalidate("sequence", [&] { c.params.validate(); });
  return c;
}

FringeConfig parse_fringe_config(const Json& j, std::optional<std::uint64_t>& seed) {
  FringeConfig c;
  Section s(j, "fringe");
  read_plan(s, c.plan, seed);
  s.count("curve_samples", c.curve_samples, 2);
  s.text("ensemble_csv", c.ensemble_csv);
  s.finish();
  revalidate("fringe", [&] { c.plan.validate(); });
  return c;
}

ExperimentPlan parse_ensemble_config(const Json& j, std::optional<std::uint64_t>& seed) {
  ExperimentPlan plan = fig2_plan();
  Section s(j, "ensemble");
  read_plan(s, plan, seed);
  s.finish();
  revalidate("ensemble", [&] { plan.validate(); });
  return plan;
}

AccuracyConfig parse_accuracy_config(const Json& j, std::optional<std::uint64_t>& seed) {
  AccuracyConfig c;
  Section s(j, "accuracy");
  read_plan(s, c.plan, seed);
  s.count("n_ensembles", c.n_ensembles, 2);
  s.finish();
  revalidate("accuracy", [&] { c.plan.validate(); });
  if (c.plan.epsilon == 0.0) throw ConfigError("accuracy: epsilon must be nonzero");
  return c;
}

HistogramConfig parse_histogram_config(const Json& j, std::optional<std::uint64_t>& seed) {
  HistogramConfig c;
  c.plan = fig2_plan();
  c.plan.n_durations = 1;
  c.plan.t0 = 10.00025;
  Section s(j, "histogram");
  if (s.has("n_atoms")) {
    const Json& v = s.raw("n_atoms");
    c.n_atoms.clear();
    if (v.is_array()) {
      if (v.empty()) throw ConfigError("histogram.n_atoms: empty list");
      for (const auto& x : v) c.n_atoms.push_back(Section::to_count(x, "histogram.n_atoms", 1));
    } else {
      c.n_atoms.push_back(Section::to_count(v, "histogram.n_atoms", 1));
    }
  }
  s.count("n_reps", c.plan.n_reps);
  s.number("T_s", c.plan.t0);
  read_physics(s, c.plan);
  s.count("mc_samples", c.options.mc_samples);
  s.number("ks_alpha", c.options.ks_alpha);
  s.number("chi2_alpha", c.options.chi2_alpha);
  s.count("density_samples", c.density_samples, 2);
  s.seed(seed);
  s.finish();
  if (!(c.options.ks_alpha > 0.0 && c.options.ks_alpha < 1.0) ||
      !(c.options.chi2_alpha > 0.0 && c.options.chi2_alpha < 1.0)) {
    throw ConfigError("histogram: significance levels must lie in (0, 1)");
  }
  revalidate("histogram", [&] { c.plan.validate(); });
  return c;
}

TdseConfig parse_tdse_config(const Json& j) {
  TdseConfig c;
  tdse::TrapProtocol& p = c.protocol;
  Section s(j, "tdse");
  double depth_uk = p.v0 / kConstants.kB * 1e6;
  double sigma_um = p.sigma * 1e6;
  double d_max = p.d_max / p.sigma;
  double d_min = p.d_min / p.sigma;
  double mass_amu = p.mass / kConstants.amu;
  bool compensate = false;
  s.number("depth_uK", depth_uk);
  s.number("sigma_um", sigma_um);
  s.number("d_max_sigma", d_max);
  s.number("d_min_sigma", d_min);
  s.number("t_split_s", p.t_split);
  s.flag("gravity", p.gravity);
  s.number("g_m_s2", p.g);
  s.number("compensation_gradient_J_m", p.compensation_gradient);
  s.flag("compensate_gravity", compensate);
  s.number("mass_amu", mass_amu);
  p.v0 = depth_uk * 1e-6 * kConstants.kB;
  p.sigma = sigma_um * 1e-6;
  p.d_max = d_max * p.sigma;
  p.d_min = d_min * p.sigma;
  p.mass = mass_amu * kConstants.amu;
  if (s.has("delta_max")) {
    s.number("delta_max", p.delta_max);
  } else if (p.v0 > 0.0 && p.mass > 0.0 && p.sigma > 0.0) {
    const double omega = std::sqrt(4.0 * p.v0 / (p.mass * p.sigma * p.sigma));
    p.delta_max = 0.9 * kConstants.hbar * omega / p.v0;
  }
  if (compensate) {
    if (j.contains("compensation_gradient_J_m")) {
      throw ConfigError("tdse: give either compensate_gravity or compensation_gradient_J_m");
    }
    p.compensation_gradient = -p.mass * p.g;
  }
  s.count("n_points", c.n_points, 16);
  s.count("n_snapshots", c.n_snapshots, 2);
  s.flag("adiabaticity", c.adiabaticity);
  s.flag("reverse", c.reverse);
  s.finish();
  revalidate("tdse", [&] {
    p.validate();
    tdse::default_grid(p, c.n_points).validate(p);
  });
  return c;
}

Table1Config parse_table1_config(const Json& j, std::optional<std::uint64_t>& seed) {
  Table1Config c;
  Section s(j, "table1");
  s.count("n_ensembles", c.n_ensembles, 2);
  s.seed(seed);
  s.finish();
  return c;
}

Json to_json(const ParamsConfig& c) {
  return Json{{"atom",
               {{"name", c.atom.name},
                {"mass_amu", c.atom.mass / kConstants.amu},
                {"clock_wavelength_nm", c.atom.clock_wavelength * 1e9},
                {"magic_wavelength_nm", c.atom.magic_wavelength * 1e9}}},
              {"trap", {{"depth_uK", c.trap.depth_kelvin * 1e6}, {"waist_um", c.trap.waist * 1e6}}},
              {"geometry",
               {{"arm_separation_m", c.geometry.arm_separation},
                {"phase_duration_s", c.geometry.phase_duration}}},
              {"g_m_s2", c.g}};
}

Json to_json(const SequenceConfig& c) {
  return Json{{"T_s", c.params.T},
              {"detuning_rad_s", c.params.detuning},
              {"lower_detuning_rad_s", c.params.lower_detuning},
              {"epsilon_rad_s", c.params.epsilon},
              {"drive_frequency_rad_s", c.params.drive_frequency},
              {"convention", to_string(c.convention)}};
}

Json to_json(const ExperimentPlan& plan) {
  return Json{{"n_atoms", plan.n_atoms},
              {"n_durations", plan.n_durations},
              {"n_reps", plan.n_reps},
              {"t0_s", plan.t0},
              {"detuning_hz", plan.detuning / kTwoPi},
              {"delta0_rad_s", plan.delta0},
              {"epsilon_rad_s", plan.epsilon},
              {"drive_frequency_rad_s", plan.drive_frequency},
              {"noise", {{"kind", to_string(plan.noise.kind)}, {"scale", plan.noise.scale}}},
              {"sampling", to_string(plan.sampling)},
              {"overhead_s", plan.overhead},
              {"seed", plan.seed}};
}

Json to_json(const FringeConfig& c) {
  Json j = to_json(c.plan);
  j["curve_samples"] = c.curve_samples;
  if (!c.ensemble_csv.empty()) j["ensemble_csv"] = c.ensemble_csv;
  return j;
}

Json to_json(const HistogramConfig& c) {
  Json j = to_json(c.plan);
  for (const char* k : {"n_durations", "t0_s", "overhead_s"}) j.erase(k);
  j["T_s"] = c.plan.t0;
  j["n_atoms"] = c.n_atoms;
  j["mc_samples"] = c.options.mc_samples;
  j["ks_alpha"] = c.options.ks_alpha;
  j["chi2_alpha"] = c.options.chi2_alpha;
  j["density_samples"] = c.density_samples;
  return j;
}

Json to_json(const TdseConfig& c) {
  const auto& p = c.protocol;
  return Json{{"depth_uK", p.v0 / kConstants.kB * 1e6},
              {"sigma_um", p.sigma * 1e6},
              {"d_max_sigma", p.d_max / p.sigma},
              {"d_min_sigma", p.d_min / p.sigma},
              {"delta_max", p.delta_max},
              {"t_split_s", p.t_split},
              {"gravity", p.gravity},
              {"g_m_s2", p.g},
              {"compensation_gradient_J_m", p.compensation_gradient},
              {"mass_amu", p.mass / kConstants.amu},
              {"n_points", c.n_points},
              {"n_snapshots", c.n_snapshots},
              {"adiabaticity", c.adiabaticity},
              {"reverse", c.reverse}};
}

std::vector<std::size_t> parse_row_filter(const std::string& spec, std::size_t n_rows) {
  std::vector<std::size_t> rows;
  std::set<std::size_t> seen;
  std::stringstream ss(spec);
  std::string item;
  auto number = [&](const std::string& t) -> std::size_t {
    if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos) {
      throw ConfigError("--rows: '" + t + "' is not a row number");
    }
    const auto v = std::stoull(t);
    if (v < 1 || v > n_rows) {
      throw ConfigError("--rows: row " + t + " outside 1.." + std::to_string(n_rows));
    }
    return static_cast<std::size_t>(v);
  };
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    std::size_t lo, hi;
    if (dash == std::string::npos) {
      lo = hi = number(item);
    } else {
      lo = number(item.substr(0, dash));
      hi = number(item.substr(dash + 1));
      if (hi < lo) throw ConfigError("--rows: empty range '" + item + "'");
    }
    for (std::size_t r = lo; r <= hi; ++r) {
      if (seen.insert(r).second) rows.push_back(r - 1);
    }
  }
  if (rows.empty()) throw ConfigError("--rows: no rows selected");
  std::sort(rows.begin(), rows.end());
  return rows;
}

}  // namespace tcs
