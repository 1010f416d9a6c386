#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "pauselab/instance.hpp"
#include "pauselab/rng.hpp"
#include "pauselab/schedule.hpp"
#include "pauselab/units.hpp"

namespace pauselab::svmc {

/// standard: new angle uniform on [0, pi].
/// transverse_field: theta + eps with eps uniform on +-min(1, A/B) pi,
/// reflected back into [0, pi] (SVMC-TF).
enum class Variant { standard, transverse_field };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view text);

/// Rotor angles theta_i in [0, pi]; theta = 0 is +z, pi/2 is +x.
struct RotorState {
  std::vector<double> angles;

  static RotorState uniform(int n, double theta);
  /// theta = 0 for bit 0 (z = +1), pi for bit 1.
  static RotorState from_config(const SpinConfig& config);
  bool valid() const;
};

/// -A sum sin(theta_i) + B (sum J_ij cos cos + sum h_i cos), in GHz.
double semiclassical_energy(const RotorState& state, const IsingInstance& instance, double a_ghz,
                            double b_ghz);

/// Half-width of the SVMC-TF proposal window, min(1, A/B) pi.
double proposal_half_width(double a_ghz, double b_ghz);

/// Folds theta + eps (|eps| <= pi) back into [0, pi] by reflection at 0 and pi.
double reflect_angle(double x);

double propose_angle(Variant variant, double theta, double a_ghz, double b_ghz, Engine& rng);

/// Transition density q(theta -> theta') of propose_angle, per radian.
double proposal_density(Variant variant, double theta, double theta_new, double a_ghz,
                        double b_ghz);

/// Bit 0 for theta < pi/2, 1 for theta > pi/2, fair coin at exactly pi/2.
SpinConfig read_out(const RotorState& state, Engine& rng);

/// Rotor system with cached trigonometry for incremental Metropolis updates.
class RotorSystem {
 public:
  RotorSystem(const IsingInstance& instance, RotorState initial);

  /// One sweep: each rotor in index order proposes a move, accepted with
  /// probability min(1, exp(-beta dE)). Returns the number accepted.
  std::int64_t sweep(double a_ghz, double b_ghz, double beta_per_ghz, Variant variant, Engine& rng);

  /// Energy from the incrementally tracked sums.
  double tracked_energy(double a_ghz, double b_ghz) const;
  /// Recomputes the sums from scratch; returns |tracked - exact| in GHz at (A, B).
  double resynchronize(double a_ghz, double b_ghz);

  const RotorState& state() const noexcept { return state_; }

 private:
  const IsingInstance* instance_;
  RotorState state_;
  std::vector<double> cos_;
  std::vector<double> sin_;
  double sum_sin_ = 0.0;
  double ising_part_ = 0.0;
};

struct SvmcParams {
  Variant variant = Variant::transverse_field;
  Temperature temperature = Temperature::from_millikelvin(12.0);
  std::uint64_t seed = 1;
};

/// Anneal in sweeps: s = k / anneal_sweeps after sweep k; the pause (if
/// any) runs pause_sweeps sweeps at exactly s_pause, inserted after sweep
/// round(s_pause * anneal_sweeps).
struct SweepPlan {
  std::int64_t anneal_sweeps = 10'000;
  std::optional<double> s_pause;
  std::int64_t pause_sweeps = 0;

  static SweepPlan from_anneal_plan(const AnnealPlan& plan);
  void validate() const;
};

struct TrajectoryFrame {
  std::int64_t sweep;
  double s;
  std::vector<double> angles;
};

struct AnnealSample {
  SpinConfig config;
  std::int64_t accepted = 0;
  std::vector<TrajectoryFrame> trajectory;  // filled when requested
};

struct RunOptions {
  std::optional<RotorState> initial;  // default: every rotor at pi/2
  std::int64_t trajectory_stride = 0; // record angles every k sweeps; 0 = off
};

/// Energy drift tolerance checked every kResyncInterval sweeps.
inline constexpr std::int64_t kResyncInterval = 1000;
inline constexpr double kDriftToleranceGHz = 1e-8;

/// One anneal; the engine stream is derived from (params.seed, repetition).
AnnealSample run_anneal(const IsingInstance& instance, const AnnealSchedule& schedule,
                        const SweepPlan& plan, const SvmcParams& params, std::uint64_t repetition,
                        const RunOptions& options = {});

/// One anneal paused at s_pause, branching at every checkpoint (pause lengths,
/// ascending): a copy of the paused state is ramped to s = 1 and read out.
/// Returns one configuration per checkpoint; each branch is a valid sample
/// of the plan with that pause length.
std::vector<SpinConfig> run_pause_family(const IsingInstance& instance,
                                         const AnnealSchedule& schedule,
                                         std::int64_t anneal_sweeps, double s_pause,
                                         std::span<const std::int64_t> checkpoints,
                                         const SvmcParams& params, std::uint64_t repetition);

struct SuccessEstimate {
  std::int64_t successes = 0;
  std::int64_t trials = 0;

  double probability() const;
  /// Two binomial standard errors, 2 sqrt(p (1 - p) / N).
  double two_sigma() const;
};

/// Independent repetitions over `jobs` worker threads; counts are
/// aggregated so the result is independent of scheduling.
SuccessEstimate estimate_success(const IsingInstance& instance, const AnnealSchedule& schedule,
                                 const SweepPlan& plan, const SvmcParams& params,
                                 std::int64_t repetitions, std::span<const SpinConfig> ground,
                                 int jobs = 1);

/// Success counts for every checkpoint of run_pause_family.
std::vector<SuccessEstimate> estimate_pause_family(
    const IsingInstance& instance, const AnnealSchedule& schedule, std::int64_t anneal_sweeps,
    double s_pause, std::span<const std::int64_t> checkpoints, const SvmcParams& params,
    std::int64_t repetitions, std::span<const SpinConfig> ground, int jobs = 1);

/// Two-proportion z-test; returns the two-sided p-value.
double two_proportion_p_value(const SuccessEstimate& a, const SuccessEstimate& b);

}  // namespace pauselab::svmc
