#include "pauselab/svmc/svmc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "pauselab/error.hpp"

namespace pauselab::svmc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = std::numbers::pi / 2.0;

// (A, B) in GHz after each anneal sweep k = 1..N, plus the pause point.
struct SweepTable {
  std::vector<double> a;
  std::vector<double> b;
  double pause_a = 0.0;
  double pause_b = 0.0;
  std::int64_t pause_after = -1;  // sweep index after which the pause runs

  SweepTable(const AnnealSchedule& schedule, std::int64_t anneal_sweeps,
             std::optional<double> s_pause) {
    a.resize(anneal_sweeps + 1);
    b.resize(anneal_sweeps + 1);
    for (std::int64_t k = 0; k <= anneal_sweeps; ++k) {
      const double s = anneal_sweeps == 0 ? 1.0 : static_cast<double>(k) / anneal_sweeps;
      const auto v = schedule.eval(s);
      a[k] = v.a_ghz;
      b[k] = v.b_ghz;
    }
    if (s_pause) {
      const auto v = schedule.eval(*s_pause);
      pause_a = v.a_ghz;
      pause_b = v.b_ghz;
      pause_after = std::llround(*s_pause * static_cast<double>(anneal_sweeps));
    }
  }
};

// Runs sweeps first..last (inclusive, 1-based anneal indices) with drift checks.
void ramp(RotorSystem& system, const SweepTable& table, std::int64_t first, std::int64_t last,
          double beta, Variant variant, Engine& rng, std::int64_t& sweeps_done,
          std::int64_t& accepted, std::int64_t stride, std::vector<TrajectoryFrame>* trajectory) {
  const auto n_a = static_cast<std::int64_t>(table.a.size()) - 1;
  for (std::int64_t k = first; k <= last; ++k) {
    accepted += system.sweep(table.a[k], table.b[k], beta, variant, rng);
    ++sweeps_done;
    if (sweeps_done % kResyncInterval == 0) {
      const double drift = system.resynchronize(table.a[k], table.b[k]);
      if (drift > kDriftToleranceGHz) throw NumericalError("SVMC energy drift exceeded tolerance");
    }
    if (trajectory && stride > 0 && sweeps_done % stride == 0) {
      trajectory->push_back({sweeps_done, static_cast<double>(k) / n_a, system.state().angles});
    }
  }
}

void hold(RotorSystem& system, const SweepTable& table, std::int64_t count, double s_pause,
          double beta, Variant variant, Engine& rng, std::int64_t& sweeps_done,
          std::int64_t& accepted, std::int64_t stride, std::vector<TrajectoryFrame>* trajectory) {
  for (std::int64_t k = 0; k < count; ++k) {
    accepted += system.sweep(table.pause_a, table.pause_b, beta, variant, rng);
    ++sweeps_done;
    if (sweeps_done % kResyncInterval == 0) {
      const double drift = system.resynchronize(table.pause_a, table.pause_b);
      if (drift > kDriftToleranceGHz) throw NumericalError("SVMC energy drift exceeded tolerance");
    }
    if (trajectory && stride > 0 && sweeps_done % stride == 0) {
      trajectory->push_back({sweeps_done, s_pause, system.state().angles});
    }
  }
}

bool is_ground(const SpinConfig& c, std::span<const SpinConfig> ground) {
  return std::find(ground.begin(), ground.end(), c) != ground.end();
}

// Splits [0, count) over `jobs` threads; body(rep) must be thread safe.
template <class Body>
void parallel_for(std::int64_t count, int jobs, Body body) {
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(std::min<std::int64_t>(count, 256))));
  if (jobs == 1) {
    for (std::int64_t r = 0; r < count; ++r) body(r);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> workers;
  for (int j = 0; j < jobs; ++j) {
    workers.emplace_back([&] {
      try {
        for (std::int64_t r = next++; r < count && !failed; r = next++) body(r);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::string_view to_string(Variant v) {
  return v == Variant::standard ? "svmc" : "svmc-tf";
}

Variant parse_variant(std::string_view text) {
  if (text == "svmc" || text == "standard") return Variant::standard;
  if (text == "svmc-tf" || text == "tf" || text == "transverse_field") return Variant::transverse_field;
  throw InputError("unknown SVMC variant '" + std::string(text) + "'");
}

RotorState RotorState::uniform(int n, double theta) {
  return RotorState{std::vector<double>(static_cast<std::size_t>(n), theta)};
}

RotorState RotorState::from_config(const SpinConfig& config) {
  RotorState out;
  out.angles.resize(config.size());
  for (int i = 0; i < config.size(); ++i) out.angles[i] = config.bit(i) ? kPi : 0.0;
  return out;
}

bool RotorState::valid() const {
  return std::all_of(angles.begin(), angles.end(),
                     [](double t) { return t >= 0.0 && t <= kPi; });
}

double semiclassical_energy(const RotorState& state, const IsingInstance& instance, double a_ghz,
                            double b_ghz) {
  if (static_cast<int>(state.angles.size()) != instance.size()) {
    throw InputError("rotor state size does not match the instance");
  }
  double transverse = 0.0;
  double ising = 0.0;
  for (int i = 0; i < instance.size(); ++i) {
    transverse += std::sin(state.angles[i]);
    ising += instance.field_vector()[i] * std::cos(state.angles[i]);
  }
  for (const auto& c : instance.couplings()) {
    ising += c.value * std::cos(state.angles[c.i]) * std::cos(state.angles[c.j]);
  }
  return -a_ghz * transverse + b_ghz * ising;
}

double proposal_half_width(double a_ghz, double b_ghz) {
  if (b_ghz <= 0.0) return kPi;
  return std::min(1.0, a_ghz / b_ghz) * kPi;
}

double reflect_angle(double x) {
  if (x < 0.0) return -x;
  if (x > kPi) return 2.0 * kPi - x;
  return x;
}

double propose_angle(Variant variant, double theta, double a_ghz, double b_ghz, Engine& rng) {
  if (variant == Variant::standard) {
    return std::uniform_real_distribution<double>(0.0, kPi)(rng);
  }
  const double w = proposal_half_width(a_ghz, b_ghz);
  if (w == 0.0) return theta;
  const double eps = std::uniform_real_distribution<double>(-w, w)(rng);
  return reflect_angle(theta + eps);
}

double proposal_density(Variant variant, double theta, double theta_new, double a_ghz,
                        double b_ghz) {
  if (theta_new < 0.0 || theta_new > kPi) return 0.0;
  if (variant == Variant::standard) return 1.0 / kPi;
  const double w = proposal_half_width(a_ghz, b_ghz);
  if (w == 0.0) return 0.0;  // point mass at theta; no density
  // Preimages x of theta_new under reflect_angle inside [theta - w, theta + w).
  auto inside = [&](double x) { return x - theta >= -w && x - theta < w; };
  int hits = 0;
  if (inside(theta_new)) ++hits;
  if (theta_new > 0.0 && inside(-theta_new)) ++hits;
  if (theta_new < kPi && inside(2.0 * kPi - theta_new)) ++hits;
  return hits / (2.0 * w);
}

SpinConfig read_out(const RotorState& state, Engine& rng) {
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < state.angles.size(); ++i) {
    const double t = state.angles[i];
    bool one;
    if (t < kHalfPi) {
      one = false;
    } else if (t > kHalfPi) {
      one = true;
    } else {
      one = (rng() >> 63) != 0;
    }
    if (one) bits |= std::uint64_t{1} << i;
  }
  return SpinConfig(static_cast<int>(state.angles.size()), bits);
}

RotorSystem::RotorSystem(const IsingInstance& instance, RotorState initial)
    : instance_(&instance), state_(std::move(initial)) {
  if (static_cast<int>(state_.angles.size()) != instance.size()) {
    throw InputError("rotor state size does not match the instance");
  }
  if (!state_.valid()) throw InputError("rotor angles must lie in [0, pi]");
  cos_.resize(state_.angles.size());
  sin_.resize(state_.angles.size());
  resynchronize(0.0, 0.0);
}

double RotorSystem::tracked_energy(double a_ghz, double b_ghz) const {
  return -a_ghz * sum_sin_ + b_ghz * ising_part_;
}

double RotorSystem::resynchronize(double a_ghz, double b_ghz) {
  const double before = tracked_energy(a_ghz, b_ghz);
  sum_sin_ = 0.0;
  ising_part_ = 0.0;
  const auto& h = instance_->field_vector();
  for (std::size_t i = 0; i < state_.angles.size(); ++i) {
    cos_[i] = std::cos(state_.angles[i]);
    sin_[i] = std::sin(state_.angles[i]);
    sum_sin_ += sin_[i];
    ising_part_ += h[i] * cos_[i];
  }
  for (const auto& c : instance_->couplings()) ising_part_ += c.value * cos_[c.i] * cos_[c.j];
  return std::abs(before - tracked_energy(a_ghz, b_ghz));
}

std::int64_t RotorSystem::sweep(double a_ghz, double b_ghz, double beta_per_ghz, Variant variant,
                                Engine& rng) {
  const auto& adjacency = instance_->neighbours();
  const auto& h = instance_->field_vector();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::int64_t accepted = 0;
  for (std::size_t i = 0; i < state_.angles.size(); ++i) {
    const double proposed = propose_angle(variant, state_.angles[i], a_ghz, b_ghz, rng);
    double local = h[i];
    for (const auto& [j, J] : adjacency[i]) local += J * cos_[j];
    const double c = std::cos(proposed);
    const double s = std::sin(proposed);
    const double d_sin = s - sin_[i];
    const double d_ising = (c - cos_[i]) * local;
    const double delta = -a_ghz * d_sin + b_ghz * d_ising;
    if (delta <= 0.0 || unit(rng) < std::exp(-beta_per_ghz * delta)) {
      state_.angles[i] = proposed;
      cos_[i] = c;
      sin_[i] = s;
      sum_sin_ += d_sin;
      ising_part_ += d_ising;
      ++accepted;
    }
  }
  return accepted;
}

SweepPlan SweepPlan::from_anneal_plan(const AnnealPlan& plan) {
  auto as_count = [](double t, const char* what) {
    const double r = std::round(t);
    if (std::abs(r - t) > 1e-9 || r < 0.0) {
      throw InputError(std::string(what) + " must be a whole number of sweeps");
    }
    return static_cast<std::int64_t>(r);
  };
  SweepPlan out;
  out.anneal_sweeps = as_count(plan.anneal_time(), "anneal time");
  out.s_pause = plan.pause_location();
  out.pause_sweeps = as_count(plan.pause_duration(), "pause duration");
  return out;
}

void SweepPlan::validate() const {
  if (anneal_sweeps < 0) throw InputError("anneal sweeps must be nonnegative");
  if (pause_sweeps < 0) throw InputError("pause sweeps must be nonnegative");
  if (s_pause && !(*s_pause >= 0.0 && *s_pause <= 1.0)) {
    throw InputError("pause location must lie in [0, 1]");
  }
  if (pause_sweeps > 0 && !s_pause) throw InputError("pause sweeps given without a pause location");
}

namespace {

AnnealSample run_with_table(const IsingInstance& instance, const SweepTable& table,
                            const SweepPlan& plan, const SvmcParams& params,
                            std::uint64_t repetition, const RunOptions& options) {
  auto rng = make_engine(params.seed, {repetition});
  RotorSystem system(instance, options.initial ? *options.initial
                                               : RotorState::uniform(instance.size(), kHalfPi));
  const double beta = params.temperature.beta_per_ghz();
  AnnealSample out;
  std::int64_t done = 0;
  auto* traj = options.trajectory_stride > 0 ? &out.trajectory : nullptr;
  const std::int64_t n_a = plan.anneal_sweeps;
  if (plan.s_pause && plan.pause_sweeps > 0) {
    const std::int64_t k_p = table.pause_after;
    ramp(system, table, 1, k_p, beta, params.variant, rng, done, out.accepted,
         options.trajectory_stride, traj);
    hold(system, table, plan.pause_sweeps, *plan.s_pause, beta, params.variant, rng, done,
         out.accepted, options.trajectory_stride, traj);
    ramp(system, table, k_p + 1, n_a, beta, params.variant, rng, done, out.accepted,
         options.trajectory_stride, traj);
  } else {
    ramp(system, table, 1, n_a, beta, params.variant, rng, done, out.accepted,
         options.trajectory_stride, traj);
  }
  out.config = read_out(system.state(), rng);
  return out;
}

}  // namespace

AnnealSample run_anneal(const IsingInstance& instance, const AnnealSchedule& schedule,
                        const SweepPlan& plan, const SvmcParams& params, std::uint64_t repetition,
                        const RunOptions& options) {
  plan.validate();
  const SweepTable table(schedule, plan.anneal_sweeps, plan.s_pause);
  return run_with_table(instance, table, plan, params, repetition, options);
}

namespace {

std::vector<SpinConfig> pause_family_with_table(const IsingInstance& instance,
                                                const SweepTable& table, double s_pause,
                                                std::span<const std::int64_t> checkpoints,
                                                const SvmcParams& params,
                                                std::uint64_t repetition) {
  auto rng = make_engine(params.seed, {repetition});
  RotorSystem system(instance, RotorState::uniform(instance.size(), kHalfPi));
  const double beta = params.temperature.beta_per_ghz();
  const auto n_a = static_cast<std::int64_t>(table.a.size()) - 1;
  std::int64_t done = 0;
  std::int64_t accepted = 0;
  ramp(system, table, 1, table.pause_after, beta, params.variant, rng, done, accepted, 0, nullptr);
  std::vector<SpinConfig> out;
  out.reserve(checkpoints.size());
  std::int64_t paused = 0;
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    hold(system, table, checkpoints[c] - paused, s_pause, beta, params.variant, rng, done,
         accepted, 0, nullptr);
    paused = checkpoints[c];
    RotorSystem branch = system;
    auto branch_rng = make_engine(params.seed, {repetition, c + 1});
    std::int64_t branch_done = done;
    ramp(branch, table, table.pause_after + 1, n_a, beta, params.variant, branch_rng, branch_done,
         accepted, 0, nullptr);
    out.push_back(read_out(branch.state(), branch_rng));
  }
  return out;
}

}  // namespace

std::vector<SpinConfig> run_pause_family(const IsingInstance& instance,
                                         const AnnealSchedule& schedule,
                                         std::int64_t anneal_sweeps, double s_pause,
                                         std::span<const std::int64_t> checkpoints,
                                         const SvmcParams& params, std::uint64_t repetition) {
  SweepPlan plan{anneal_sweeps, s_pause, 0};
  plan.validate();
  if (!std::is_sorted(checkpoints.begin(), checkpoints.end()) ||
      (!checkpoints.empty() && checkpoints.front() < 0)) {
    throw InputError("pause checkpoints must be nonnegative and ascending");
  }
  const SweepTable table(schedule, anneal_sweeps, s_pause);
  return pause_family_with_table(instance, table, s_pause, checkpoints, params, repetition);
}

double SuccessEstimate::probability() const {
  return trials == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(trials);
}

double SuccessEstimate::two_sigma() const {
  if (trials == 0) return 0.0;
  const double p = probability();
  return 2.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

SuccessEstimate estimate_success(const IsingInstance& instance, const AnnealSchedule& schedule,
                                 const SweepPlan& plan, const SvmcParams& params,
                                 std::int64_t repetitions, std::span<const SpinConfig> ground,
                                 int jobs) {
  plan.validate();
  if (repetitions <= 0) throw InputError("repetitions must be positive");
  const SweepTable table(schedule, plan.anneal_sweeps, plan.s_pause);
  std::atomic<std::int64_t> successes{0};
  parallel_for(repetitions, jobs, [&](std::int64_t rep) {
    const auto sample =
        run_with_table(instance, table, plan, params, static_cast<std::uint64_t>(rep), {});
    if (is_ground(sample.config, ground)) ++successes;
  });
  return {successes.load(), repetitions};
}

std::vector<SuccessEstimate> estimate_pause_family(
    const IsingInstance& instance, const AnnealSchedule& schedule, std::int64_t anneal_sweeps,
    double s_pause, std::span<const std::int64_t> checkpoints, const SvmcParams& params,
    std::int64_t repetitions, std::span<const SpinConfig> ground, int jobs) {
  SweepPlan plan{anneal_sweeps, s_pause, 0};
  plan.validate();
  if (repetitions <= 0) throw InputError("repetitions must be positive");
  if (!std::is_sorted(checkpoints.begin(), checkpoints.end()) ||
      (!checkpoints.empty() && checkpoints.front() < 0)) {
    throw InputError("pause checkpoints must be nonnegative and ascending");
  }
  const SweepTable table(schedule, anneal_sweeps, s_pause);
  std::vector<std::atomic<std::int64_t>> counts(checkpoints.size());
  parallel_for(repetitions, jobs, [&](std::int64_t rep) {
    const auto configs = pause_family_with_table(instance, table, s_pause, checkpoints, params,
                                                 static_cast<std::uint64_t>(rep));
    for (std::size_t c = 0; c < configs.size(); ++c) {
      if (is_ground(configs[c], ground)) ++counts[c];
    }
  });
  std::vector<SuccessEstimate> out;
  for (auto& c : counts) out.push_back({c.load(), repetitions});
  return out;
}

double two_proportion_p_value(const SuccessEstimate& a, const SuccessEstimate& b) {
  if (a.trials == 0 || b.trials == 0) throw InputError("two-proportion test needs trials");
  const double pooled = static_cast<double>(a.successes + b.successes) /
                        static_cast<double>(a.trials + b.trials);
  const double se = std::sqrt(pooled * (1.0 - pooled) *
                              (1.0 / static_cast<double>(a.trials) + 1.0 / static_cast<double>(b.trials)));
  if (se == 0.0) return a.probability() == b.probability() ? 1.0 : 0.0;
  const double z = (a.probability() - b.probability()) / se;
  return std::erfc(std::abs(z) / std::sqrt(2.0));
}

}  // namespace pauselab::svmc
