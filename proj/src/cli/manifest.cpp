#include "pauselab/cli/manifest.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <set>

#include "pauselab/error.hpp"

namespace pauselab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kManifest = "manifest.json";

void atomic_write(const fs::path& target, const std::string& content) {
  fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out << content;
    if (!out) throw InputError("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace

fs::path output_root() {
  if (const char* env = std::getenv("PAUSELAB_OUTPUT_ROOT"); env && *env) return env;
  return "pauselab-runs";
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json RunDirectory::read_manifest(const fs::path& dir) {
  std::ifstream in(dir / kManifest);
  if (!in) throw InputError("no manifest in " + dir.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("manifest in " + dir.string() + " is corrupt: " + e.what());
  }
}

RunDirectory::RunDirectory(fs::path dir, std::string command, const ExperimentConfig& config,
                           std::string schedule_provenance)
    : dir_(std::move(dir)), hash_(config_hash(command, config)) {
  if (fs::exists(dir_ / kManifest)) {
    json old = read_manifest(dir_);
    if (old.value("command", "") != command || old.value("config_hash", "") != hash_) {
      throw InputError("run directory " + dir_.string() +
                       " holds a different configuration; choose another output directory");
    }
    manifest_ = std::move(old);
    resumed_ = true;
    manifest_["resumed"] = manifest_.value("resumed", 0) + 1;
  } else {
    fs::create_directories(dir_);
    manifest_ = {{"command", command},
                 {"config", to_json(config)},
                 {"config_hash", hash_},
                 {"version", PAUSELAB_VERSION},
                 {"created", utc_timestamp()},
                 {"schedule_provenance", schedule_provenance},
                 {"status", "partial"},
                 {"points", json::object()},
                 {"outputs", json::array()}};
  }
  std::lock_guard lock(mutex_);
  persist_locked();
}

const json* RunDirectory::completed(const std::string& key) const {
  std::lock_guard lock(mutex_);
  const auto& points = manifest_.at("points");
  auto it = points.find(key);
  if (it == points.end()) return nullptr;
  return &it->at("result");
}

void RunDirectory::record(const std::string& key, std::uint64_t seed, json result) {
  std::lock_guard lock(mutex_);
  manifest_["points"][key] = {{"seed", seed}, {"result", std::move(result)}};
  persist_locked();
}

void RunDirectory::write_output(const std::string& relative, const std::string& content) {
  atomic_write(dir_ / relative, content);
  std::lock_guard lock(mutex_);
  auto& outputs = manifest_["outputs"];
  if (std::find(outputs.begin(), outputs.end(), relative) == outputs.end()) {
    outputs.push_back(relative);
  }
  persist_locked();
}

void RunDirectory::finish(bool complete) {
  std::lock_guard lock(mutex_);
  manifest_["status"] = complete ? "complete" : "partial";
  persist_locked();
}

void RunDirectory::persist_locked() {
  manifest_["updated"] = utc_timestamp();
  atomic_write(dir_ / kManifest, manifest_.dump(2) + "\n");
}

std::vector<std::string> orphan_outputs(const fs::path& dir) {
  const json manifest = RunDirectory::read_manifest(dir);
  std::set<std::string> listed;
  for (const auto& o : manifest.at("outputs")) listed.insert(o.get<std::string>());
  std::vector<std::string> orphans;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string rel = fs::relative(entry.path(), dir).generic_string();
    if (rel == kManifest) continue;
    if (!listed.contains(rel)) orphans.push_back(rel);
  }
  return orphans;
}

}  // namespace pauselab::cli
