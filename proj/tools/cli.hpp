#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tcs/io.hpp"

namespace tcs::cli {

enum class Format { csv, json, both };

struct Options {
  std::string command;
  std::optional<std::filesystem::path> config_path;
  std::filesystem::path out = ".";
  std::optional<std::uint64_t> seed_flag;
  Format format = Format::both;
  int jobs = 0;  // 0: leave the OpenMP default
  std::string rows;  // table1 only
};

// Shared state of one invocation: where things go and what was written.
class Run {
 public:
  Run(Options options, Json config);

  const Options& options() const { return opts_; }
  const Json& config() const { return config_; }
  bool csv() const { return opts_.format != Format::json; }
  bool json() const { return opts_.format != Format::csv; }

  // Seed resolution: --seed, then the config's "seed", then TCS_SEED, then the
  // built-in constant.
  std::uint64_t resolve_seed(const std::optional<std::uint64_t>& from_config);
  std::uint64_t seed() const { return seed_; }
  const std::string& seed_source() const { return seed_source_; }

  std::filesystem::path path(const std::string& name);  // records the file
  void write_json(const std::string& name, const Json& j);

  Json effective = Json::object();  // settings actually used; a valid --config
  Json summary = Json::object();    // short result block for the manifest

  Json manifest(double wall_seconds, const std::string& status) const;

 private:
  Options opts_;
  Json config_;
  std::uint64_t seed_ = 0;
  std::string seed_source_ = "none";
  std::vector<std::string> files_;
};

void cmd_params(Run& run);
void cmd_sequence(Run& run);
void cmd_fringe(Run& run);
void cmd_ensemble(Run& run);
void cmd_accuracy(Run& run);
void cmd_histogram(Run& run);
void cmd_tdse(Run& run);
// Returns the number of rows that failed; the others are still written.
std::size_t cmd_table1(Run& run);

}  // namespace tcs::cli
