#include "pauselab/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "pauselab/error.hpp"

namespace pauselab::cli {

using nlohmann::json;

std::string_view to_string(EngineKind e) {
  switch (e) {
    case EngineKind::svmc: return "svmc";
    case EngineKind::svmc_tf: return "svmc-tf";
    case EngineKind::ame: return "ame";
  }
  return "?";
}

EngineKind parse_engine(std::string_view text) {
  if (text == "svmc") return EngineKind::svmc;
  if (text == "svmc-tf") return EngineKind::svmc_tf;
  if (text == "ame") return EngineKind::ame;
  throw InputError("unknown engine '" + std::string(text) + "' (svmc, svmc-tf, ame)");
}

TimeUnit engine_time_unit(EngineKind e) {
  return e == EngineKind::ame ? TimeUnit::microseconds : TimeUnit::sweeps;
}

TimeUnit ExperimentConfig::unit() const { return time_unit.value_or(engine_time_unit(engine)); }

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw InputError(message);
}

void require_grid(const std::vector<double>& grid, const char* name, double lo, double hi) {
  for (double v : grid) {
    require(std::isfinite(v) && v >= lo && v <= hi,
            std::string(name) + " value out of range: " + std::to_string(v));
  }
}

bool whole(double v) { return std::floor(v) == v; }

}  // namespace

void ExperimentConfig::validate() const {
  require(repetitions >= 1, "repetitions must be at least 1");
  require(levels >= 2, "levels must be at least 2");
  require(base_slices >= 2, "base_slices must be at least 2");
  require(spectrum_levels >= 1, "spectrum_levels must be positive");
  require(s_points >= 2, "s_points must be at least 2");
  require(coupling_sq > 0.0 && std::isfinite(coupling_sq), "coupling_sq must be positive");
  require(cutoff > 0.0 && std::isfinite(cutoff), "cutoff must be positive");
  require(instance != "", "instance must be set");
  require(schedule != "", "schedule must be set");
  require_grid(s_pause, "s_pause", 0.0, 1.0);
  require_grid(t_pause, "t_pause", 0.0, 1e12);
  require_grid(t_anneal, "t_anneal", 0.0, 1e12);
  for (double t : t_anneal) require(t > 0.0, "t_anneal must be positive");
  require_grid(temperature_mk, "temperature_mk", 0.0, 1e6);
  for (double t : temperature_mk) require(t > 0.0, "temperature_mk must be positive");
  if (time_unit) {
    require(*time_unit == engine_time_unit(engine),
            "time_unit " + std::string(pauselab::to_string(*time_unit)) +
                " does not match engine " + std::string(to_string(engine)));
  }
  if (unit() == TimeUnit::sweeps) {
    for (double t : t_anneal) require(whole(t), "sweep counts must be whole numbers");
    for (double t : t_pause) require(whole(t), "sweep counts must be whole numbers");
  }
  require(target_p0 > 0.0 && target_p0 < 1.0, "target_p0 must lie in (0, 1)");
  require(target_mode == "interpolate" || target_mode == "median-window",
          "target_mode must be interpolate or median-window");
  require(target_window > 0.0, "target_window must be positive");
  require(fit_mode == "single" || fit_mode == "two-scale" || fit_mode == "fixed-alpha",
          "fit_mode must be single, two-scale or fixed-alpha");
  require(bootstrap >= 0, "bootstrap must be nonnegative");
  require(plateau_points >= 1, "plateau_points must be positive");
  if (p_gibbs) require(*p_gibbs > 0.0 && *p_gibbs < 1.0, "p_gibbs must lie in (0, 1)");
  if (p_anneal) require(*p_anneal > 0.0 && *p_anneal < 1.0, "p_anneal must lie in (0, 1)");
  if (gamma) require(*gamma > 0.0 && std::isfinite(*gamma), "gamma must be positive");
}

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw InputError("config must be a JSON object");
  static const std::set<std::string> known = {
      "engine", "instance", "schedule", "s_pause", "t_pause", "t_anneal", "temperature_mk",
      "repetitions", "seed", "levels", "base_slices", "coupling_sq", "cutoff",
      "spectrum_levels", "s_points", "input", "time_unit", "target_p0", "target_mode",
      "target_window", "fit_mode", "bootstrap", "plateau_points", "p_gibbs", "p_anneal", "gamma"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) throw InputError("unknown config key '" + key + "'");
  }
  ExperimentConfig c;
  try {
    auto get = [&](const char* key, auto& field) {
      if (doc.contains(key)) doc.at(key).get_to(field);
    };
    auto get_opt = [&](const char* key, std::optional<double>& field) {
      if (doc.contains(key) && !doc.at(key).is_null()) field = doc.at(key).get<double>();
    };
    if (doc.contains("engine")) c.engine = parse_engine(doc.at("engine").get<std::string>());
    get("instance", c.instance);
    get("schedule", c.schedule);
    get("s_pause", c.s_pause);
    get("t_pause", c.t_pause);
    get("t_anneal", c.t_anneal);
    get("temperature_mk", c.temperature_mk);
    get("repetitions", c.repetitions);
    get("seed", c.seed);
    get("levels", c.levels);
    get("base_slices", c.base_slices);
    get("coupling_sq", c.coupling_sq);
    get("cutoff", c.cutoff);
    get("spectrum_levels", c.spectrum_levels);
    get("s_points", c.s_points);
    get("input", c.input);
    if (doc.contains("time_unit") && !doc.at("time_unit").is_null()) {
      c.time_unit = parse_time_unit(doc.at("time_unit").get<std::string>());
    }
    get("target_p0", c.target_p0);
    get("target_mode", c.target_mode);
    get("target_window", c.target_window);
    get("fit_mode", c.fit_mode);
    get("bootstrap", c.bootstrap);
    get("plateau_points", c.plateau_points);
    get_opt("p_gibbs", c.p_gibbs);
    get_opt("p_anneal", c.p_anneal);
    get_opt("gamma", c.gamma);
  } catch (const json::exception& e) {
    throw InputError(std::string("config field has the wrong type: ") + e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw InputError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["engine"] = std::string(to_string(c.engine));
  j["instance"] = c.instance;
  j["schedule"] = c.schedule;
  j["s_pause"] = c.s_pause;
  j["t_pause"] = c.t_pause;
  j["t_anneal"] = c.t_anneal;
  j["temperature_mk"] = c.temperature_mk;
  j["repetitions"] = c.repetitions;
  j["seed"] = c.seed;
  j["levels"] = c.levels;
  j["base_slices"] = c.base_slices;
  j["coupling_sq"] = c.coupling_sq;
  j["cutoff"] = c.cutoff;
  j["spectrum_levels"] = c.spectrum_levels;
  j["s_points"] = c.s_points;
  j["input"] = c.input;
  j["time_unit"] = std::string(pauselab::to_string(c.unit()));
  j["target_p0"] = c.target_p0;
  j["target_mode"] = c.target_mode;
  j["target_window"] = c.target_window;
  j["fit_mode"] = c.fit_mode;
  j["bootstrap"] = c.bootstrap;
  j["plateau_points"] = c.plateau_points;
  j["p_gibbs"] = c.p_gibbs ? json(*c.p_gibbs) : json(nullptr);
  j["p_anneal"] = c.p_anneal ? json(*c.p_anneal) : json(nullptr);
  j["gamma"] = c.gamma ? json(*c.gamma) : json(nullptr);
  return j;
}

ExperimentConfig with_defaults(ExperimentConfig c, std::string_view command) {
  const bool ame = c.engine == EngineKind::ame;
  if (c.temperature_mk.empty()) c.temperature_mk = {12.0};
  if (c.t_anneal.empty()) c.t_anneal = {ame ? 1.0 : 10'000.0};
  const double ta = c.t_anneal.front();
  if (command == "pause-scan") {
    if (c.s_pause.empty()) {
      for (int k = 0; k <= 20; ++k) c.s_pause.push_back(0.30 + 0.02 * k);
    }
    if (c.t_pause.empty()) c.t_pause = {ta, 10.0 * ta, 100.0 * ta};
  } else if (command == "relax-scan") {
    if (c.s_pause.empty()) c.s_pause = {ame ? 0.46 : 0.44};
    if (c.t_pause.empty()) {
      c.t_pause.push_back(0.0);
      for (int k = 0; k <= 16; ++k) {
        const double t = ta * std::pow(10.0, -1.0 + 0.25 * k);
        c.t_pause.push_back(ame ? t : std::round(t));
      }
    }
  }
  return c;
}

std::string config_hash(std::string_view command, const ExperimentConfig& config) {
  json doc;
  doc["command"] = std::string(command);
  doc["config"] = to_json(config);
  const std::string text = doc.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << h;
  return out.str();
}

IsingInstance resolve_instance(const ExperimentConfig& config) {
  if (config.instance == "I12_0") return i12_0();
  return load_instance(config.instance);
}

AnnealSchedule resolve_schedule(const ExperimentConfig& config) {
  if (config.schedule == "synthetic") return synthetic_schedule();
  return load_schedule(config.schedule);
}

}  // namespace pauselab::cli
