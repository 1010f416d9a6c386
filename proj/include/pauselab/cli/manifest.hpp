#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "pauselab/cli/config.hpp"

namespace pauselab::cli {

/// $PAUSELAB_OUTPUT_ROOT, or ./pauselab-runs when unset.
std::filesystem::path output_root();

/// Per-run directory guarded by manifest.json. The manifest records the
/// command, the full config and its hash, code version, timestamps, schedule
/// provenance, every grid point with its seed and result, and every output
/// file. It is rewritten atomically after each completed point, so an
/// interrupted run leaves a valid partial manifest that a rerun of the same
/// config resumes from.
class RunDirectory {
 public:
  /// Creates `dir`, or resumes it when its manifest has the same command and
  /// config hash. A manifest with a different hash is an InputError.
  RunDirectory(std::filesystem::path dir, std::string command, const ExperimentConfig& config,
               std::string schedule_provenance);

  const std::filesystem::path& path() const noexcept { return dir_; }
  bool resumed() const noexcept { return resumed_; }
  const std::string& hash() const noexcept { return hash_; }

  /// Result stored for a completed point, or nullptr.
  const nlohmann::json* completed(const std::string& key) const;
  /// Thread-safe; persists the manifest.
  void record(const std::string& key, std::uint64_t seed, nlohmann::json result);
  /// Atomic write of `relative` under the run directory; registers it as an output.
  void write_output(const std::string& relative, const std::string& content);
  /// Marks the run complete or partial and persists the manifest.
  void finish(bool complete);

  static nlohmann::json read_manifest(const std::filesystem::path& dir);

 private:
  void persist_locked();

  std::filesystem::path dir_;
  std::string hash_;
  bool resumed_ = false;
  nlohmann::json manifest_;
  mutable std::mutex mutex_;
};

/// Files under `dir` (relative, generic form) that the manifest does not list.
std::vector<std::string> orphan_outputs(const std::filesystem::path& dir);

std::string utc_timestamp();

}  // namespace pauselab::cli
