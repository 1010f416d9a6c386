#pragma once

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pauselab/instance.hpp"
#include "pauselab/schedule.hpp"
#include "pauselab/units.hpp"

namespace pauselab::cli {

enum class EngineKind { svmc, svmc_tf, ame };

std::string_view to_string(EngineKind e);
EngineKind parse_engine(std::string_view text);
/// Microseconds for the AME, sweeps for both Monte Carlo variants.
TimeUnit engine_time_unit(EngineKind e);

/// One experiment, as read from a JSON document and then overridden by flags.
/// Times are in the engine's unit. Empty grids fall back to the defaults of
/// the command that runs them (see `with_defaults`).
struct ExperimentConfig {
  EngineKind engine = EngineKind::ame;
  std::string instance = "I12_0";     // bundled name or file path
  std::string schedule = "synthetic"; // "synthetic" or CSV path
  std::vector<double> s_pause;
  std::vector<double> t_pause;
  std::vector<double> t_anneal;
  std::vector<double> temperature_mk;
  std::int64_t repetitions = 10'000;
  std::uint64_t seed = 1;

  // AME truncation and bath.
  int levels = 16;
  int base_slices = 1024;
  double coupling_sq = 1e-3;
  double cutoff = 8.0 * std::numbers::pi;  // rad/ns

  // spectrum / gibbs grids.
  int spectrum_levels = 20;
  int s_points = 201;

  // Analysis commands.
  std::string input;                  // CSV (fit, target-time) or fit JSON (tts)
  std::optional<TimeUnit> time_unit;  // must agree with the engine when both are set
  double target_p0 = 0.5;
  std::string target_mode = "interpolate";
  double target_window = 0.01;
  std::string fit_mode = "single";
  int bootstrap = 0;
  int plateau_points = 3;
  std::optional<double> p_gibbs;
  std::optional<double> p_anneal;
  std::optional<double> gamma;        // per time unit

  /// Throws InputError on the first violated invariant.
  void validate() const;
  TimeUnit unit() const;
};

/// Keys are the field names above; unknown keys are rejected.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& config);

/// Fills empty grids with the command's defaults: 12 mK, t_a of 1 us or
/// 10^4 sweeps, and the pause grids of the scan commands.
ExperimentConfig with_defaults(ExperimentConfig config, std::string_view command);

/// FNV-1a 64 of the canonical JSON (sorted keys, shortest round-trip numbers)
/// of the command name and the config, as 16 hex digits.
std::string config_hash(std::string_view command, const ExperimentConfig& config);

IsingInstance resolve_instance(const ExperimentConfig& config);
AnnealSchedule resolve_schedule(const ExperimentConfig& config);

}  // namespace pauselab::cli
