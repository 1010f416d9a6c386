#include <CLI11.hpp>
#include <csignal>
#include <filesystem>
#include <functional>
#include <map>
#include <ostream>

#include "pauselab/cli/commands.hpp"
#include "pauselab/error.hpp"

namespace pauselab::cli {

namespace {

/// Flag values collected before the config file is read; only flags given on
/// the command line override the file.
struct Overrides {
  std::string config_path, output, engine, instance, schedule, input, time_unit, target_mode,
      fit_mode;
  std::vector<double> s_pause, t_pause, t_anneal, temperature;
  std::int64_t repetitions = 0;
  std::uint64_t seed = 0;
  int levels = 0, base_slices = 0, spectrum_levels = 0, s_points = 0, bootstrap = 0,
      plateau_points = 0;
  double coupling_sq = 0, cutoff = 0, target = 0, target_window = 0, p_gibbs = 0, p_anneal = 0,
         gamma = 0;
  int jobs = 1;
};

void add_options(CLI::App& sub, Overrides& o) {
  sub.add_option("--config", o.config_path, "JSON experiment config")->check(CLI::ExistingFile);
  sub.add_option("--output", o.output, "run directory (default $PAUSELAB_OUTPUT_ROOT/<cmd>-<hash>)");
  sub.add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
  sub.add_option("--engine", o.engine, "svmc, svmc-tf or ame");
  sub.add_option("--instance", o.instance, "instance file or I12_0");
  sub.add_option("--schedule", o.schedule, "schedule CSV or 'synthetic'");
  sub.add_option("--s-pause", o.s_pause, "pause locations")->delimiter(',');
  sub.add_option("--t-pause", o.t_pause, "pause durations (engine time unit)")->delimiter(',');
  sub.add_option("--t-anneal", o.t_anneal, "anneal times (engine time unit)")->delimiter(',');
  sub.add_option("--temperature", o.temperature, "temperatures in mK")->delimiter(',');
  sub.add_option("--repetitions", o.repetitions, "Monte Carlo repetitions per point");
  sub.add_option("--seed", o.seed, "master seed");
  sub.add_option("--levels", o.levels, "kept levels for the master equation");
  sub.add_option("--base-slices", o.base_slices, "uniform slices of the eigenbasis track");
  sub.add_option("--coupling-sq", o.coupling_sq, "bath coupling kappa^2");
  sub.add_option("--cutoff", o.cutoff, "bath cutoff frequency, rad/ns");
  sub.add_option("--spectrum-levels", o.spectrum_levels, "levels written by spectrum");
  sub.add_option("--s-points", o.s_points, "uniform s grid size for spectrum and gibbs");
  sub.add_option("--input", o.input, "input CSV or fit JSON");
  sub.add_option("--time-unit", o.time_unit, "microseconds or sweeps");
  sub.add_option("--target", o.target, "target ground-state probability P*");
  sub.add_option("--target-mode", o.target_mode, "interpolate or median-window");
  sub.add_option("--target-window", o.target_window, "half-width for median-window");
  sub.add_option("--fit-mode", o.fit_mode, "single, two-scale or fixed-alpha");
  sub.add_option("--bootstrap", o.bootstrap, "binomial bootstrap resamples");
  sub.add_option("--plateau-points", o.plateau_points, "points averaged for a fixed alpha");
  sub.add_option("--p-gibbs", o.p_gibbs, "P_G for tts");
  sub.add_option("--p-anneal", o.p_anneal, "P_a for tts");
  sub.add_option("--gamma", o.gamma, "decay rate for tts, per time unit");
}

ExperimentConfig build_config(const CLI::App& sub, const Overrides& o) {
  ExperimentConfig c = o.config_path.empty() ? ExperimentConfig{} : load_config(o.config_path);
  auto given = [&](const char* flag) { return sub.count(flag) > 0; };
  if (given("--engine")) c.engine = parse_engine(o.engine);
  if (given("--instance")) c.instance = o.instance;
  if (given("--schedule")) c.schedule = o.schedule;
  if (given("--s-pause")) c.s_pause = o.s_pause;
  if (given("--t-pause")) c.t_pause = o.t_pause;
  if (given("--t-anneal")) c.t_anneal = o.t_anneal;
  if (given("--temperature")) c.temperature_mk = o.temperature;
  if (given("--repetitions")) c.repetitions = o.repetitions;
  if (given("--seed")) c.seed = o.seed;
  if (given("--levels")) c.levels = o.levels;
  if (given("--base-slices")) c.base_slices = o.base_slices;
  if (given("--coupling-sq")) c.coupling_sq = o.coupling_sq;
  if (given("--cutoff")) c.cutoff = o.cutoff;
  if (given("--spectrum-levels")) c.spectrum_levels = o.spectrum_levels;
  if (given("--s-points")) c.s_points = o.s_points;
  if (given("--input")) c.input = o.input;
  if (given("--time-unit")) c.time_unit = parse_time_unit(o.time_unit);
  if (given("--target")) c.target_p0 = o.target;
  if (given("--target-mode")) c.target_mode = o.target_mode;
  if (given("--target-window")) c.target_window = o.target_window;
  if (given("--fit-mode")) c.fit_mode = o.fit_mode;
  if (given("--bootstrap")) c.bootstrap = o.bootstrap;
  if (given("--plateau-points")) c.plateau_points = o.plateau_points;
  if (given("--p-gibbs")) c.p_gibbs = o.p_gibbs;
  if (given("--p-anneal")) c.p_anneal = o.p_anneal;
  if (given("--gamma")) c.gamma = o.gamma;
  return c;
}

extern "C" void on_interrupt(int) { request_stop(); }

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  using Command = std::filesystem::path (*)(const CommandContext&);
  const std::map<std::string, std::pair<Command, const char*>> commands = {
      {"spectrum", {cmd_spectrum, "lowest levels vs s and the minimum gap"}},
      {"pause-scan", {cmd_pause_scan, "ground-state probability over (s_p, t_p, T, t_a)"}},
      {"relax-scan", {cmd_relax_scan, "pause-duration scan at fixed s_p with decay fits"}},
      {"target-time", {cmd_target_time, "pause time to reach P* per s_p, log-linear fit"}},
      {"tts", {cmd_tts, "time-to-solution report and pause verdict"}},
      {"fit", {cmd_fit, "decay fit of t_p,P0[,shots] data"}},
      {"gibbs", {cmd_gibbs, "instantaneous Gibbs ground population and relaxation rate"}},
  };
  CLI::App app{"Anneal-pause experiments: SVMC, SVMC-TF and adiabatic master equation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", PAUSELAB_VERSION);
  Overrides o;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, entry] : commands) {
    auto* sub = app.add_subcommand(name, entry.second);
    add_options(*sub, o);
    subs[name] = sub;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  std::string name;
  for (const auto& [n, sub] : subs) {
    if (sub->parsed()) name = n;
  }
  clear_stop();
  auto* previous = std::signal(SIGINT, on_interrupt);
  int code = kExitOk;
  try {
    CommandContext ctx;
    ctx.config = with_defaults(build_config(*subs[name], o), name);
    ctx.config.validate();
    ctx.run_dir = o.output;
    ctx.jobs = o.jobs;
    ctx.log = &err;
    const auto dir = commands.at(name).first(ctx);
    out << dir.string() << '\n';
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    code = kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    code = kExitConfig;
  } catch (const Interrupted& e) {
    err << e.what() << '\n';
    code = kExitInterrupted;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    code = kExitNumerical;
  }
  std::signal(SIGINT, previous);
  return code;
}

}  // namespace pauselab::cli
