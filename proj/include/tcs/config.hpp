#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tcs/analysis.hpp"
#include "tcs/io.hpp"
#include "tcs/params.hpp"
#include "tcs/sequence.hpp"
#include "tcs/tdse.hpp"

// JSON run configurations. Every key is optional and falls back to the
// documented default; unknown keys, wrong types and out-of-range values raise
// ConfigError.
namespace tcs {

struct ParamsConfig {
  AtomSpec atom = ytterbium171();
  TrapSpec trap = default_tweezer();
  Geometry geometry = default_geometry();
  double g = kConstants.g_earth;
};

struct SequenceConfig {
  SequenceParams params;
  SignConvention convention = kDefaultConvention;
};

struct FringeConfig {
  ExperimentPlan plan = fig2_plan();
  std::size_t curve_samples = 200;
  std::string ensemble_csv;  // fit an existing per-run table instead of simulating
};

struct AccuracyConfig {
  ExperimentPlan plan = fig2_plan();
  std::size_t n_ensembles = 1000;
};

struct HistogramConfig {
  ExperimentPlan plan;                    // n_durations = 1, t0 = T
  std::vector<std::size_t> n_atoms{10, 100};
  CoherenceOptions options;
  std::size_t density_samples = 400;
};

struct TdseConfig {
  tdse::TrapProtocol protocol = tdse::default_protocol();
  std::size_t n_points = 2048;
  std::size_t n_snapshots = 41;
  bool adiabaticity = true;
  bool reverse = true;
};

struct Table1Config {
  std::size_t n_ensembles = 1000;
};

// Each parser also reports the "seed" key when present.
ParamsConfig parse_params_config(const Json& j);
SequenceConfig parse_sequence_config(const Json& j);
FringeConfig parse_fringe_config(const Json& j, std::optional<std::uint64_t>& seed);
ExperimentPlan parse_ensemble_config(const Json& j, std::optional<std::uint64_t>& seed);
AccuracyConfig parse_accuracy_config(const Json& j, std::optional<std::uint64_t>& seed);
HistogramConfig parse_histogram_config(const Json& j, std::optional<std::uint64_t>& seed);
TdseConfig parse_tdse_config(const Json& j);
Table1Config parse_table1_config(const Json& j, std::optional<std::uint64_t>& seed);

// Effective settings, written into the manifest so a run can be repeated.
Json to_json(const ParamsConfig& c);
Json to_json(const SequenceConfig& c);
Json to_json(const ExperimentPlan& plan);
Json to_json(const FringeConfig& c);
Json to_json(const HistogramConfig& c);
Json to_json(const TdseConfig& c);

SignConvention parse_convention(const std::string& name);
std::string to_string(SignConvention c);

// "1,5,8" or "1-3,10"; 1-based row numbers. Throws ConfigError.
std::vector<std::size_t> parse_row_filter(const std::string& spec, std::size_t n_rows);

}  // namespace tcs
