#include "pauselab/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "pauselab/analysis/target.hpp"
#include "pauselab/analysis/tts.hpp"
#include "pauselab/cli/manifest.hpp"
#include "pauselab/error.hpp"
#include "pauselab/quantum/ame.hpp"
#include "pauselab/quantum/bath.hpp"
#include "pauselab/quantum/spectrum.hpp"
#include "pauselab/rng.hpp"
#include "pauselab/svmc/svmc.hpp"

namespace pauselab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::atomic<bool> g_stop{false};

void log_line(const CommandContext& ctx, const std::string& line) {
  if (ctx.log) *ctx.log << line << '\n' << std::flush;
}

fs::path run_directory(const CommandContext& ctx, std::string_view command) {
  if (!ctx.run_dir.empty()) return ctx.run_dir;
  return output_root() / (std::string(command) + "-" + config_hash(command, ctx.config));
}

std::string provenance(const ExperimentConfig& c) {
  return c.schedule == "synthetic" ? std::string("synthetic") : "loaded:" + c.schedule;
}

/// Runs job(i) for i in [0, count) on at most `jobs` threads, lowest index
/// first. Stops handing out work once a stop is requested; the first
/// exception is rethrown after all workers finish.
void run_jobs(std::size_t count, int jobs, const std::function<void(std::size_t)>& job) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      if (g_stop.load()) return;
      {
        std::lock_guard lock(failure_mutex);
        if (failure) return;
      }
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        job(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(count)));
  std::vector<std::thread> pool;
  for (int k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

void check_stop(RunDirectory& dir) {
  if (g_stop.load()) {
    dir.finish(false);
    throw Interrupted("interrupted; partial results kept in " + dir.path().string());
  }
}

std::string point_key(double temperature, double t_a, double s_p, double t_p) {
  return "T=" + format_number(temperature) + "|ta=" + format_number(t_a) +
         "|sp=" + format_number(s_p) + "|tp=" + format_number(t_p);
}

std::string file_key(double temperature, double t_a, double s_p, double t_p) {
  return "T" + format_number(temperature) + "_ta" + format_number(t_a) + "_sp" +
         format_number(s_p) + "_tp" + format_number(t_p);
}

quantum::BathParams bath_for(const ExperimentConfig& c, double temperature_mk) {
  quantum::BathParams bath;
  bath.temperature = Temperature::from_millikelvin(temperature_mk);
  bath.coupling_sq = c.coupling_sq;
  bath.cutoff = c.cutoff;
  bath.validate();
  return bath;
}

std::vector<SpinConfig> ground_configs(const IsingInstance& inst) {
  if (inst.size() > kMaxEnumerationQubits) {
    throw InputError("instance too large to enumerate its ground states");
  }
  return brute_force_spectrum(inst, 1).levels.front().configs;
}

struct ScanRow {
  double temperature, t_a, s_p, t_p;
  double p0, two_sigma;
  std::int64_t successes, trials;
};

json row_json(const ScanRow& r) {
  return {{"P0", r.p0}, {"two_sigma", r.two_sigma}, {"successes", r.successes},
          {"trials", r.trials}};
}

ScanRow row_from_json(double temperature, double t_a, double s_p, double t_p, const json& j) {
  return {temperature, t_a, s_p, t_p, j.at("P0").get<double>(), j.at("two_sigma").get<double>(),
          j.at("successes").get<std::int64_t>(), j.at("trials").get<std::int64_t>()};
}

std::string scan_csv(const std::vector<ScanRow>& rows, EngineKind engine) {
  std::ostringstream out;
  out << "engine,T_mK,t_a,s_p,t_p,P0,two_sigma,successes,trials\n";
  for (const auto& r : rows) {
    out << to_string(engine) << ',' << format_number(r.temperature) << ','
        << format_number(r.t_a) << ',' << format_number(r.s_p) << ',' << format_number(r.t_p)
        << ',' << format_number(r.p0) << ',' << format_number(r.two_sigma) << ',' << r.successes
        << ',' << r.trials << '\n';
  }
  return out.str();
}

struct ScanOutcome {
  std::vector<ScanRow> rows;  // grid order: T, t_a, s_p, t_p
  std::map<std::pair<double, double>, double> baseline;  // (T, t_a) -> P0
};

/// Shared by pause-scan and relax-scan: every (T, t_a, s_p, t_p) grid point,
/// resumable point by point.
ScanOutcome run_scan(const CommandContext& ctx, RunDirectory& dir) {
  const auto& c = ctx.config;
  const IsingInstance inst = resolve_instance(c);
  const AnnealSchedule sched = resolve_schedule(c);
  std::vector<double> t_ps = c.t_pause;
  std::sort(t_ps.begin(), t_ps.end());
  t_ps.erase(std::unique(t_ps.begin(), t_ps.end()), t_ps.end());

  struct Family {
    std::size_t it, ia, is;
  };
  std::vector<Family> families;
  for (std::size_t it = 0; it < c.temperature_mk.size(); ++it) {
    for (std::size_t ia = 0; ia < c.t_anneal.size(); ++ia) {
      for (std::size_t is = 0; is < c.s_pause.size(); ++is) families.push_back({it, ia, is});
    }
  }
  auto family_done = [&](const Family& f) {
    for (double tp : t_ps) {
      if (!dir.completed(point_key(c.temperature_mk[f.it], c.t_anneal[f.ia], c.s_pause[f.is], tp))) {
        return false;
      }
    }
    return true;
  };
  auto baseline_key = [&](std::size_t it, std::size_t ia) {
    return "T=" + format_number(c.temperature_mk[it]) + "|ta=" + format_number(c.t_anneal[ia]) +
           "|baseline";
  };

  ScanOutcome outcome;
  if (c.engine == EngineKind::ame) {
    std::vector<std::pair<std::size_t, std::size_t>> groups;
    for (std::size_t it = 0; it < c.temperature_mk.size(); ++it) {
      for (std::size_t ia = 0; ia < c.t_anneal.size(); ++ia) groups.emplace_back(it, ia);
    }
    bool pending = false;
    for (const auto& f : families) pending = pending || !family_done(f);
    for (const auto& [it, ia] : groups) pending = pending || !dir.completed(baseline_key(it, ia));
    if (pending) {
      quantum::TrackOptions to;
      to.levels = c.levels;
      to.base_slices = c.base_slices;
      to.required_points = c.s_pause;
      log_line(ctx, "building eigenbasis track (" + std::to_string(c.base_slices) + " slices)");
      const auto track = quantum::build_track(inst, sched, to);
      log_line(ctx, "track: " + std::to_string(track.slices.size()) + " slices");
      check_stop(dir);
      run_jobs(groups.size(), ctx.jobs, [&](std::size_t g) {
        const auto [it, ia] = groups[g];
        const double temp = c.temperature_mk[it], ta = c.t_anneal[ia];
        const quantum::AmePropagator prop(track, bath_for(c, temp));
        if (!dir.completed(baseline_key(it, ia))) {
          const double base = prop.evolve(AnnealPlan(ta)).ground_probability;
          dir.record(baseline_key(it, ia), 0, {{"P0", base}});
        }
        for (std::size_t is = 0; is < c.s_pause.size(); ++is) {
          if (g_stop.load()) return;
          if (family_done({it, ia, is})) continue;
          const auto p = prop.pause_scan(ta, {c.s_pause[is]}, t_ps);
          for (std::size_t j = 0; j < t_ps.size(); ++j) {
            ScanRow r{temp, ta, c.s_pause[is], t_ps[j], p[0][j], 0.0, 0, 0};
            dir.record(point_key(temp, ta, c.s_pause[is], t_ps[j]), 0, row_json(r));
          }
          log_line(ctx, "T=" + format_number(temp) + " mK t_a=" + format_number(ta) +
                            " s_p=" + format_number(c.s_pause[is]) + " done");
        }
      });
    }
  } else {
    const auto ground = ground_configs(inst);
    const auto variant = c.engine == EngineKind::svmc ? svmc::Variant::standard
                                                      : svmc::Variant::transverse_field;
    std::vector<std::int64_t> checkpoints;
    for (double tp : t_ps) checkpoints.push_back(static_cast<std::int64_t>(tp));
    auto sample_rows = [&](std::uint64_t seed, const std::vector<SpinConfig>& samples) {
      std::ostringstream out;
      out << "seed,rep,bitstring,ising_energy,is_ground\n";
      for (std::size_t rep = 0; rep < samples.size(); ++rep) {
        const auto& s = samples[rep];
        const bool hit = std::find(ground.begin(), ground.end(), s) != ground.end();
        out << seed << ',' << rep << ',' << s.label() << ',' << format_number(ising_energy(inst, s))
            << ',' << (hit ? 1 : 0) << '\n';
      }
      return out.str();
    };
    // Baseline per (T, t_a): the same anneal without a pause.
    for (std::size_t it = 0; it < c.temperature_mk.size(); ++it) {
      for (std::size_t ia = 0; ia < c.t_anneal.size(); ++ia) {
        if (dir.completed(baseline_key(it, ia))) continue;
        const std::uint64_t seed = derive_seed(c.seed, {it, ia, 0xba5e});
        const svmc::SvmcParams params{variant, Temperature::from_millikelvin(c.temperature_mk[it]),
                                      seed};
        const svmc::SweepPlan plan{static_cast<std::int64_t>(c.t_anneal[ia]), std::nullopt, 0};
        const auto est = svmc::estimate_success(inst, sched, plan, params, c.repetitions, ground,
                                                ctx.jobs);
        dir.record(baseline_key(it, ia), seed,
                   {{"P0", est.probability()}, {"two_sigma", est.two_sigma()}});
        check_stop(dir);
      }
    }
    run_jobs(families.size(), ctx.jobs, [&](std::size_t k) {
      const Family f = families[k];
      if (family_done(f)) return;
      const double temp = c.temperature_mk[f.it], ta = c.t_anneal[f.ia], sp = c.s_pause[f.is];
      const std::uint64_t seed = derive_seed(c.seed, {f.it, f.ia, f.is});
      const svmc::SvmcParams params{variant, Temperature::from_millikelvin(temp), seed};
      std::vector<std::vector<SpinConfig>> samples(t_ps.size());
      for (std::int64_t rep = 0; rep < c.repetitions; ++rep) {
        const auto family = svmc::run_pause_family(inst, sched, static_cast<std::int64_t>(ta), sp,
                                                   checkpoints, params,
                                                   static_cast<std::uint64_t>(rep));
        for (std::size_t j = 0; j < t_ps.size(); ++j) samples[j].push_back(family[j]);
      }
      for (std::size_t j = 0; j < t_ps.size(); ++j) {
        svmc::SuccessEstimate est{0, c.repetitions};
        for (const auto& s : samples[j]) {
          if (std::find(ground.begin(), ground.end(), s) != ground.end()) ++est.successes;
        }
        dir.write_output("samples/" + file_key(temp, ta, sp, t_ps[j]) + ".csv",
                         sample_rows(seed, samples[j]));
        ScanRow r{temp, ta, sp, t_ps[j], est.probability(), est.two_sigma(), est.successes,
                  est.trials};
        dir.record(point_key(temp, ta, sp, t_ps[j]), seed, row_json(r));
      }
      log_line(ctx, "T=" + format_number(temp) + " mK t_a=" + format_number(ta) +
                        " s_p=" + format_number(sp) + " done");
    });
  }
  check_stop(dir);

  for (std::size_t it = 0; it < c.temperature_mk.size(); ++it) {
    for (std::size_t ia = 0; ia < c.t_anneal.size(); ++ia) {
      outcome.baseline[{c.temperature_mk[it], c.t_anneal[ia]}] =
          dir.completed(baseline_key(it, ia))->at("P0").get<double>();
      for (double sp : c.s_pause) {
        for (double tp : t_ps) {
          const double temp = c.temperature_mk[it], ta = c.t_anneal[ia];
          const json* r = dir.completed(point_key(temp, ta, sp, tp));
          outcome.rows.push_back(row_from_json(temp, ta, sp, tp, *r));
        }
      }
    }
  }
  return outcome;
}

json fit_two_json(const analysis::TwoScaleFit& f) {
  return {{"model", "two-scale"}, {"alpha", f.alpha},     {"beta1", f.beta1},
          {"gamma1", f.gamma1},    {"beta2", f.beta2},     {"gamma2", f.gamma2},
          {"residual_rms", f.residual_rms}, {"at_bound", f.at_bound}, {"converged", f.converged}};
}

json runs_json(const analysis::RunsTest& r) {
  return {{"runs", r.runs}, {"positive", r.positive}, {"negative", r.negative},
          {"z", r.z},       {"p_value", r.p_value},   {"rejects_single_at_5pct", r.rejects_randomness()}};
}

/// Single-scale unless its residual signs fail the runs test at 5% and the
/// two-scale model at least halves the residual.
std::string preferred_model(const analysis::DecayFit& single, const analysis::TwoScaleFit& two,
                            const analysis::RunsTest& runs) {
  return runs.rejects_randomness() && two.residual_rms < 0.5 * single.residual_rms ? "two-scale"
                                                                                  : "single";
}

void write_json(RunDirectory& dir, const std::string& name, const json& j) {
  dir.write_output(name, j.dump(2) + "\n");
}

}  // namespace

void request_stop() noexcept { g_stop.store(true); }
void clear_stop() noexcept { g_stop.store(false); }

std::string format_number(double v) {
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    return std::to_string(static_cast<long long>(v));
  }
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

int CsvTable::column(std::initializer_list<std::string_view> names) const {
  for (std::size_t k = 0; k < header.size(); ++k) {
    for (auto n : names) {
      if (header[k] == n) return static_cast<int>(k);
    }
  }
  return -1;
}

CsvTable read_csv(const fs::path& path, bool header_optional) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      field.erase(0, field.find_first_not_of(" \t"));
      field.erase(field.find_last_not_of(" \t") + 1);
      fields.push_back(field);
    }
    if (first) {
      first = false;
      double probe;
      const auto& f0 = fields.front();
      const bool numeric =
          std::from_chars(f0.data(), f0.data() + f0.size(), probe).ec == std::errc{};
      if (!numeric || !header_optional) {
        if (numeric) throw InputError(path.string() + ": missing header row");
        table.header = std::move(fields);
        continue;
      }
    }
    table.rows.push_back(std::move(fields));
  }
  return table;
}

namespace {

double cell(const CsvTable& t, std::size_t row, int col, const fs::path& path) {
  const auto& r = t.rows[row];
  if (col < 0 || static_cast<std::size_t>(col) >= r.size()) {
    throw InputError(path.string() + ": row " + std::to_string(row + 1) + " is too short");
  }
  double v;
  const auto& s = r[col];
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw InputError(path.string() + ": '" + s + "' is not a number");
  }
  return v;
}

std::vector<analysis::DecayPoint> read_decay_points(const fs::path& path) {
  const CsvTable t = read_csv(path, true);
  int ct = 0, cp = 1, cs = 2;
  if (!t.header.empty()) {
    ct = t.column({"t_p", "t_pause"});
    cp = t.column({"P0", "p0"});
    cs = t.column({"shots", "trials"});
    if (ct < 0 || cp < 0) throw InputError(path.string() + ": needs t_p and P0 columns");
  }
  std::vector<analysis::DecayPoint> pts;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    analysis::DecayPoint p{cell(t, r, ct, path), cell(t, r, cp, path), 0.0};
    if (cs >= 0 && static_cast<std::size_t>(cs) < t.rows[r].size()) p.shots = cell(t, r, cs, path);
    pts.push_back(p);
  }
  if (pts.size() < 3) throw InputError(path.string() + ": need at least three points to fit");
  std::sort(pts.begin(), pts.end(),
            [](const auto& a, const auto& b) { return a.t_pause < b.t_pause; });
  return pts;
}

}  // namespace

json decay_fit_json(const analysis::DecayFit& f, TimeUnit unit) {
  return {{"model", "single"},
          {"alpha", f.alpha},
          {"beta", f.beta},
          {"gamma", f.gamma},
          {"gamma_inverse", f.gamma > 0.0 ? 1.0 / f.gamma : INFINITY},
          {"p_anneal", f.p_anneal()},
          {"residual_rms", f.residual_rms},
          {"at_bound", f.at_bound},
          {"converged", f.converged},
          {"time_unit", std::string(to_string(unit))}};
}

fs::path cmd_spectrum(const CommandContext& ctx) {
  const auto& c = ctx.config;
  RunDirectory dir(run_directory(ctx, "spectrum"), "spectrum", c, provenance(c));
  const IsingInstance inst = resolve_instance(c);
  const AnnealSchedule sched = resolve_schedule(c);
  quantum::SliceOptions so;
  const long long space = 1LL << inst.size();
  so.levels = static_cast<int>(std::min<long long>(c.spectrum_levels, space));
  quantum::SliceSolver solver(inst, sched, so);
  std::vector<quantum::SpectrumSlice> slices;
  json crossings = json::array();
  for (int k = 0; k < c.s_points; ++k) {
    const double s = static_cast<double>(k) / (c.s_points - 1);
    auto slice = solver.solve(s);
    if (slice.overlap.size() > 0) {
      // A level whose best continuation is another index has crossed or
      // nearly crossed a neighbour.
      for (Eigen::Index a = 0; a < slice.overlap.rows(); ++a) {
        Eigen::Index best;
        const double w = slice.overlap.row(a).cwiseAbs().maxCoeff(&best);
        if (w >= 0.5 && best != a) {
          crossings.push_back({{"s", s}, {"level", a}, {"continues_as", best}});
        }
      }
    }
    slices.push_back(std::move(slice));
    if (g_stop.load()) check_stop(dir);
  }
  dir.write_output("spectrum.csv", quantum::format_spectrum_csv(slices, so.levels));
  const auto gap = quantum::min_gap(inst, sched);
  json summary = {{"levels", so.levels},
                  {"s_points", c.s_points},
                  {"min_gap", {{"s", gap.s},
                               {"gap_ghz", gap.gap_ghz},
                               {"sector", std::string(quantum::to_string(gap.sector))},
                               {"plateau", gap.plateau}}},
                  {"parity_resolved", solver.parity_resolved()},
                  {"level_swaps", crossings}};
  write_json(dir, "summary.json", summary);
  dir.finish(true);
  return dir.path();
}

fs::path cmd_pause_scan(const CommandContext& ctx) {
  const auto& c = ctx.config;
  RunDirectory dir(run_directory(ctx, "pause-scan"), "pause-scan", c, provenance(c));
  const ScanOutcome out = run_scan(ctx, dir);
  dir.write_output("results.csv", scan_csv(out.rows, c.engine));
  json curves = json::array();
  for (const auto& [key, base] : out.baseline) {
    for (double tp : c.t_pause) {
      double best = -1.0, where = 0.0;
      for (const auto& r : out.rows) {
        if (r.temperature == key.first && r.t_a == key.second && r.t_p == tp && r.p0 > best) {
          best = r.p0;
          where = r.s_p;
        }
      }
      curves.push_back({{"T_mK", key.first}, {"t_a", key.second}, {"t_p", tp},
                        {"baseline_P0", base}, {"peak_s_p", where}, {"peak_P0", best}});
    }
  }
  json summary = {{"engine", std::string(to_string(c.engine))},
                  {"time_unit", std::string(to_string(c.unit()))},
                  {"curves", curves}};
  write_json(dir, "summary.json", summary);
  dir.finish(true);
  return dir.path();
}

fs::path cmd_relax_scan(const CommandContext& ctx) {
  const auto& c = ctx.config;
  RunDirectory dir(run_directory(ctx, "relax-scan"), "relax-scan", c, provenance(c));
  const ScanOutcome out = run_scan(ctx, dir);
  dir.write_output("results.csv", scan_csv(out.rows, c.engine));
  json fits = json::array();
  for (const auto& [key, base] : out.baseline) {
    for (double sp : c.s_pause) {
      std::vector<analysis::DecayPoint> pts;
      for (const auto& r : out.rows) {
        if (r.temperature == key.first && r.t_a == key.second && r.s_p == sp) {
          pts.push_back({r.t_p, r.p0, static_cast<double>(r.trials)});
        }
      }
      std::sort(pts.begin(), pts.end(),
                [](const auto& a, const auto& b) { return a.t_pause < b.t_pause; });
      if (pts.size() < 5) throw InputError("relax-scan needs at least five pause durations");
      const auto single = analysis::fit_single_decay(pts);
      const auto two = analysis::fit_two_scale_decay(pts);
      const auto res = analysis::fit_residuals(single, pts);
      const auto runs = analysis::runs_test(res);
      json entry = {{"T_mK", key.first},
                    {"t_a", key.second},
                    {"s_p", sp},
                    {"baseline_P0", base},
                    {"single", decay_fit_json(single, c.unit())},
                    {"two_scale", fit_two_json(two)},
                    {"runs_test", runs_json(runs)},
                    {"preferred", preferred_model(single, two, runs)}};
      fits.push_back(entry);
    }
  }
  write_json(dir, "summary.json", {{"engine", std::string(to_string(c.engine))}, {"fits", fits}});
  if (fits.size() == 1) write_json(dir, "fit.json", fits[0]["single"]);
  dir.finish(true);
  return dir.path();
}

fs::path cmd_target_time(const CommandContext& ctx) {
  const auto& c = ctx.config;
  if (c.input.empty()) throw InputError("target-time needs --input with s_p,t_p,P0 columns");
  RunDirectory dir(run_directory(ctx, "target-time"), "target-time", c, provenance(c));
  const CsvTable t = read_csv(c.input);
  const int cs = t.column({"s_p", "s_pause"}), ct = t.column({"t_p", "t_pause"}),
            cp = t.column({"P0", "p0"});
  if (cs < 0 || ct < 0 || cp < 0) throw InputError(c.input + ": needs s_p, t_p and P0 columns");
  // Scan outputs may hold several temperatures and anneal times; keep the first of each.
  const int ctemp = t.column({"T_mK"}), cta = t.column({"t_a"});
  std::vector<analysis::PauseSample> samples;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (ctemp >= 0 && cell(t, r, ctemp, c.input) != c.temperature_mk.front()) continue;
    if (cta >= 0 && cell(t, r, cta, c.input) != c.t_anneal.front()) continue;
    samples.push_back({cell(t, r, cs, c.input), cell(t, r, ct, c.input), cell(t, r, cp, c.input)});
  }
  const auto mode = c.target_mode == "interpolate" ? analysis::TargetMode::interpolate
                                                   : analysis::TargetMode::median_window;
  const auto result = analysis::pause_time_to_target(samples, c.target_p0, mode, c.target_window);
  std::ostringstream csv;
  csv << "s_p,t_star,iqr_low,iqr_high,samples,monotone\n";
  for (const auto& p : result.points) {
    csv << format_number(p.s_pause) << ',' << format_number(p.t_pause) << ','
        << format_number(p.iqr_low) << ',' << format_number(p.iqr_high) << ',' << p.samples << ','
        << (p.monotone ? 1 : 0) << '\n';
  }
  dir.write_output("target_times.csv", csv.str());
  json omitted = json::array();
  for (const auto& o : result.omitted) omitted.push_back({{"s_p", o.s_pause}, {"reason", o.reason}});
  json summary = {{"target_p0", c.target_p0}, {"mode", c.target_mode},
                  {"time_unit", std::string(to_string(c.unit()))}, {"omitted", omitted}};
  if (result.points.size() >= 2) {
    const auto line = analysis::fit_log_target_times(result.points);
    summary["log_fit"] = {{"slope", line.slope}, {"intercept", line.intercept},
                          {"r_squared", line.r_squared}};
  }
  write_json(dir, "summary.json", summary);
  dir.finish(true);
  return dir.path();
}

fs::path cmd_fit(const CommandContext& ctx) {
  const auto& c = ctx.config;
  if (c.input.empty()) throw InputError("fit needs --input with t_p,P0[,shots] rows");
  RunDirectory dir(run_directory(ctx, "fit"), "fit", c, provenance(c));
  const auto pts = read_decay_points(c.input);
  json summary;
  std::function<double(double)> predict;
  if (c.fit_mode == "two-scale") {
    const auto f = analysis::fit_two_scale_decay(pts);
    summary = fit_two_json(f);
    summary["time_unit"] = std::string(to_string(c.unit()));
    predict = [f](double t) { return f.predict(t); };
  } else {
    const auto f = c.fit_mode == "single" ? analysis::fit_single_decay(pts)
                                          : analysis::fit_fixed_alpha_decay(pts, c.plateau_points);
    summary = decay_fit_json(f, c.unit());
    summary["mode"] = c.fit_mode;
    const auto res = analysis::fit_residuals(f, pts);
    summary["runs_test"] = runs_json(analysis::runs_test(res));
    predict = [f](double t) { return f.predict(t); };
    if (c.bootstrap > 0) {
      const auto b = analysis::bootstrap_single_decay(pts, c.bootstrap, c.seed);
      summary["bootstrap"] = {{"resamples", b.resamples},
                              {"stddev", b.stddev},
                              {"low", b.low},
                              {"high", b.high}};
    }
  }
  std::ostringstream csv;
  csv << "t_p,P0,predicted,residual\n";
  for (const auto& p : pts) {
    const double y = predict(p.t_pause);
    csv << format_number(p.t_pause) << ',' << format_number(p.p0) << ',' << format_number(y) << ','
        << format_number(p.p0 - y) << '\n';
  }
  dir.write_output("fit_curve.csv", csv.str());
  write_json(dir, "fit.json", summary);
  dir.finish(true);
  return dir.path();
}

fs::path cmd_tts(const CommandContext& ctx) {
  const auto& c = ctx.config;
  double pg = 0.0, pa = 0.0, gamma = 0.0;
  if (!c.input.empty()) {
    std::ifstream in(c.input);
    if (!in) throw InputError("cannot open " + c.input);
    json fit;
    try {
      fit = json::parse(in);
      if (fit.value("model", "single") != "single") {
        throw InputError("tts needs a single-scale fit");
      }
      const TimeUnit unit = parse_time_unit(fit.at("time_unit").get<std::string>());
      if (unit != c.unit()) {
        throw InputError("fit is in " + std::string(to_string(unit)) + " but the report is in " +
                         std::string(to_string(c.unit())));
      }
      pg = fit.at("alpha").get<double>();
      pa = fit.at("alpha").get<double>() - fit.at("beta").get<double>();
      gamma = fit.at("gamma").get<double>();
    } catch (const json::exception& e) {
      throw InputError(c.input + ": not a fit summary: " + e.what());
    }
  }
  if (c.p_gibbs) pg = *c.p_gibbs;
  if (c.p_anneal) pa = *c.p_anneal;
  if (c.gamma) gamma = *c.gamma;
  if (!(pg > 0.0 && pg < 1.0) || !(pa > 0.0 && pa < 1.0) || !(gamma > 0.0)) {
    throw InputError("tts needs P_G and P_a in (0, 1) and gamma > 0 (from --input or flags)");
  }
  RunDirectory dir(run_directory(ctx, "tts"), "tts", c, provenance(c));
  const double ta = c.t_anneal.front();
  const auto report = analysis::make_tts_report(pg, pa, ta, Rate{gamma, c.unit()});
  std::ostringstream csv;
  csv << "t_p,P0,tts\n";
  for (const auto& p : report.curve) {
    csv << format_number(p.t_pause) << ',' << format_number(p.p0) << ',' << format_number(p.tts)
        << '\n';
  }
  dir.write_output("tts_curve.csv", csv.str());
  const auto& cond = report.condition;
  json summary = {
      {"time_unit", std::string(to_string(c.unit()))},
      {"p_gibbs", pg},
      {"p_anneal", pa},
      {"t_anneal", ta},
      {"gamma", gamma},
      {"gamma_inverse", 1.0 / gamma},
      {"condition_satisfiable", cond.satisfiable},
      {"gamma_min", cond.satisfiable ? json(cond.gamma_min.value) : json(nullptr)},
      {"required_gamma_inverse", cond.satisfiable ? json(1.0 / cond.gamma_min.value) : json(nullptr)},
      {"verdict", report.reduces ? "reduces" : "does-not-reduce"},
      {"optimal_pause", {{"t_p", report.optimum.t_pause},
                         {"tts", report.optimum.tts},
                         {"interior", report.optimum.interior}}}};
  write_json(dir, "tts.json", summary);
  dir.finish(true);
  return dir.path();
}

fs::path cmd_gibbs(const CommandContext& ctx) {
  const auto& c = ctx.config;
  RunDirectory dir(run_directory(ctx, "gibbs"), "gibbs", c, provenance(c));
  const IsingInstance inst = resolve_instance(c);
  const AnnealSchedule sched = resolve_schedule(c);
  quantum::SliceOptions so;
  so.levels = static_cast<int>(std::min<long long>(c.levels, 1LL << inst.size()));
  quantum::SliceSolver solver(inst, sched, so);
  std::vector<quantum::BathParams> baths;
  for (double t : c.temperature_mk) baths.push_back(bath_for(c, t));
  std::ostringstream csv;
  csv << "s,T_mK,ground_population,relaxation_rate_per_us\n";
  std::vector<std::pair<double, double>> lowest(baths.size(), {INFINITY, 0.0});
  for (int k = 0; k < c.s_points; ++k) {
    const double s = static_cast<double>(k) / (c.s_points - 1);
    const auto slice = solver.solve(s);
    for (std::size_t b = 0; b < baths.size(); ++b) {
      const double gs = quantum::instantaneous_ground_population(
          slice, quantum::gibbs_populations(slice, baths[b]));
      const double rate = quantum::relaxation_rate(slice, baths[b]).value;
      csv << format_number(s) << ',' << format_number(c.temperature_mk[b]) << ','
          << format_number(gs) << ',' << format_number(rate) << '\n';
      if (gs < lowest[b].first) lowest[b] = {gs, s};
    }
    if (g_stop.load()) check_stop(dir);
  }
  dir.write_output("gibbs.csv", csv.str());
  json minima = json::array();
  for (std::size_t b = 0; b < baths.size(); ++b) {
    minima.push_back({{"T_mK", c.temperature_mk[b]},
                      {"s", lowest[b].second},
                      {"ground_population", lowest[b].first}});
  }
  const auto gap = quantum::min_gap(inst, sched);
  write_json(dir, "summary.json",
             {{"lowest_ground_population", minima},
              {"min_gap", {{"s", gap.s}, {"gap_ghz", gap.gap_ghz}}}});
  dir.finish(true);
  return dir.path();
}

}  // namespace pauselab::cli
