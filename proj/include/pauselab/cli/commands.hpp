#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pauselab/analysis/fit.hpp"
#include "pauselab/cli/config.hpp"

namespace pauselab::cli {

/// Exit codes of the command line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitInterrupted = 130;

/// Raised when a stop was requested; the run directory holds a partial manifest.
class Interrupted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Asks running scans to stop after the grid points in flight. Async-signal-safe.
void request_stop() noexcept;
void clear_stop() noexcept;

struct CommandContext {
  ExperimentConfig config;          // defaults already applied
  std::filesystem::path run_dir;    // empty: output_root()/<command>-<hash>
  int jobs = 1;
  std::ostream* log = nullptr;      // progress lines; may be null
};

/// Every command writes CSV data and a JSON summary into its run directory
/// and returns that directory.
std::filesystem::path cmd_spectrum(const CommandContext& ctx);
std::filesystem::path cmd_pause_scan(const CommandContext& ctx);
std::filesystem::path cmd_relax_scan(const CommandContext& ctx);
std::filesystem::path cmd_target_time(const CommandContext& ctx);
std::filesystem::path cmd_tts(const CommandContext& ctx);
std::filesystem::path cmd_fit(const CommandContext& ctx);
std::filesystem::path cmd_gibbs(const CommandContext& ctx);

/// Decay fit in the JSON form shared by `fit`, `relax-scan` and `tts`.
nlohmann::json decay_fit_json(const analysis::DecayFit& fit, TimeUnit unit);

/// Comma-separated table with a header row. Numbers use shortest round-trip form.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by any of the given names; -1 when absent.
  int column(std::initializer_list<std::string_view> names) const;
};
CsvTable read_csv(const std::filesystem::path& path, bool header_optional = false);
std::string format_number(double v);

/// Parses argv, runs the subcommand, maps failures to exit codes:
/// 0 success, 2 config or input error, 3 numerical failure, 130 interrupted.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pauselab::cli
