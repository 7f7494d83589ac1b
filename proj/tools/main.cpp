#include <chrono>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <omp.h>

#include "cli.hpp"
#include "tcs/errors.hpp"

namespace {

using tcs::Json;
using tcs::cli::Format;
using tcs::cli::Options;

constexpr int kExitFailure = 1;
constexpr int kExitBadInput = 2;

std::string kind_of(const std::exception& e) {
  if (dynamic_cast<const tcs::StabilityError*>(&e)) return "stability";
  if (dynamic_cast<const tcs::SolverError*>(&e)) return "solver";
  if (dynamic_cast<const tcs::FitError*>(&e)) return "fit";
  if (dynamic_cast<const tcs::ConfigError*>(&e)) return "config";
  if (dynamic_cast<const tcs::InvalidInput*>(&e)) return "invalid_input";
  return "runtime";
}

// Best effort: the directory may be the thing that is broken.
void try_write(const std::filesystem::path& path, const Json& j) {
  try {
    tcs::write_json(path, j);
  } catch (const std::exception&) {
  }
}

int run_command(const Options& opts) {
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  std::unique_ptr<tcs::cli::Run> run;
  auto fail = [&](const std::exception& e, int code) {
    const Json err{{"status", "error"},
                   {"exit_code", code},
                   {"command", opts.command},
                   {"kind", kind_of(e)},
                   {"message", e.what()}};
    std::cerr << "tweezer-clock " << opts.command << ": " << e.what() << '\n';
    std::error_code ec;
    std::filesystem::create_directories(opts.out, ec);
    try_write(opts.out / "error.json", err);
    if (run) try_write(opts.out / "manifest.json", run->manifest(elapsed(), "error"));
    return code;
  };

  try {
    std::error_code ec;
    std::filesystem::create_directories(opts.out, ec);
    if (ec || !std::filesystem::is_directory(opts.out)) {
      throw tcs::ConfigError("cannot create output directory " + opts.out.string());
    }
    Json config = Json::object();
    if (opts.config_path) config = tcs::read_json_file(*opts.config_path);
    if (opts.jobs > 0) omp_set_num_threads(opts.jobs);
    run = std::make_unique<tcs::cli::Run>(opts, config);

    static const std::map<std::string, void (*)(tcs::cli::Run&)> simple{
        {"params", tcs::cli::cmd_params},       {"sequence", tcs::cli::cmd_sequence},
        {"fringe", tcs::cli::cmd_fringe},       {"ensemble", tcs::cli::cmd_ensemble},
        {"accuracy", tcs::cli::cmd_accuracy},   {"histogram", tcs::cli::cmd_histogram},
        {"tdse", tcs::cli::cmd_tdse}};
    if (opts.command == "table1") {
      const std::size_t failed = tcs::cli::cmd_table1(*run);
      if (failed) {
        const Json err{{"status", "error"},
                       {"exit_code", kExitFailure},
                       {"command", opts.command},
                       {"kind", "rows_failed"},
                       {"message", std::to_string(failed) + " row(s) failed; see table1.json"}};
        std::cerr << "tweezer-clock table1: " << failed << " row(s) failed\n";
        tcs::write_json(opts.out / "error.json", err);
        tcs::write_json(opts.out / "manifest.json", run->manifest(elapsed(), "partial"));
        return kExitFailure;
      }
    } else {
      simple.at(opts.command)(*run);
    }
    tcs::write_json(opts.out / "manifest.json", run->manifest(elapsed(), "ok"));
    return 0;
  } catch (const tcs::ConfigError& e) {
    return fail(e, kExitBadInput);
  } catch (const tcs::InvalidInput& e) {
    return fail(e, kExitBadInput);
  } catch (const std::exception& e) {
    return fail(e, kExitFailure);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clock-interferometer simulation toolkit"};
  app.require_subcommand(1);
  Options opts;
  std::string format = "both";

  const std::vector<std::pair<std::string, std::string>> commands{
      {"params", "Derived physical quantities"},
      {"sequence", "Final state of the pulse sequence"},
      {"fringe", "Simulate and fit the clock-state fringe"},
      {"ensemble", "Per-run Monte Carlo table"},
      {"accuracy", "Relative accuracy of the redshift estimate"},
      {"histogram", "Coherent versus collapsed exit-port histograms"},
      {"tdse", "Wavepacket splitting in a double tweezer"},
      {"table1", "Relative accuracy for every parameter row"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opts.config_path, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out, "Output directory")->capture_default_str();
    sub->add_option("--seed", opts.seed_flag, "Master seed (unsigned 64-bit)");
    sub->add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"csv", "json", "both"}))
        ->capture_default_str();
    sub->add_option("--jobs", opts.jobs, "Worker threads (default: all cores)")
        ->check(CLI::PositiveNumber);
    if (name == "table1") sub->add_option("--rows", opts.rows, "Rows to run, e.g. 6,8,10 or 1-3");
    sub->callback([&opts, name = name] { opts.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitBadInput;
  }
  opts.format = format == "csv" ? Format::csv : format == "json" ? Format::json : Format::both;
  return run_command(opts);
}
