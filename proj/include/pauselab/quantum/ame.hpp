#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "pauselab/quantum/bath.hpp"
#include "pauselab/quantum/spectrum.hpp"
#include "pauselab/schedule.hpp"

namespace pauselab::quantum {

/// Density matrix on the kept levels of one slice. Trace may fall below one
/// by the population that left the truncated space.
struct TruncatedDensityMatrix {
  double s = 0.0;
  Eigen::MatrixXcd rho;

  static TruncatedDensityMatrix pure(double s, int levels, int level);
  double trace() const;
  double hermiticity_error() const;  // max |rho - rho^dagger|
  double min_eigenvalue() const;
  Eigen::VectorXd populations() const;
};

struct AmeOptions {
  double step_tolerance = 1e-8;   // local error per RK4 step-doubling step
  double leakage_limit = 1e-2;    // abort when 1 - trace exceeds this
  bool record_trajectory = false;
};

struct AmeFrame {
  double s = 0.0;
  double t_us = 0.0;
  Eigen::VectorXd populations;
  double trace = 1.0;
};

struct AmeResult {
  double ground_probability = 0.0;  // summed over the final ground manifold
  TruncatedDensityMatrix final_state;
  double leakage = 0.0;
  std::vector<AmeFrame> trajectory;
};

/// One grid interval seen from the moving eigenframe. Levels present at
/// both ends are tracked: `from[j]` in the earlier slice continues as `to[j]`
/// in the later one, whose vector is multiplied by `sign[j]` so that the
/// tracked overlap block is a rotation exp(X) close to the identity.
struct FrameStep {
  std::vector<int> from;
  std::vector<int> to;
  std::vector<double> sign;
  Eigen::MatrixXd rotation_log;  // X, real antisymmetric
  Eigen::VectorXd mid_energy;    // GHz, endpoint average per tracked level
};

/// Builds the interval data from consecutive slices; levels whose overlap
/// row (or column) has norm below 1/2 are leaving (or entering) the kept set.
FrameStep frame_step(const SpectrumSlice& previous, const SpectrumSlice& next);

/// Propagates the Davies master equation along a precomputed track.
/// Each grid interval is Strang split: half a step of the earlier slice's
/// dissipator (adaptive RK4), the coherent step in the moving frame, half a
/// step of the later slice's dissipator. The coherent step integrates
/// i dc/dt = (2 pi E - i X / dt) c exactly, with E the mid-interval energies:
/// as dt -> 0 it is the overlap projection, for slow ramps it follows the
/// levels adiabatically. A pause is propagated with the matrix exponential of
/// the frozen generator. The pause location must be a grid point.
///
/// Population on levels that leave the kept set is dropped; the running
/// total is the reported leakage.
class AmePropagator {
 public:
  AmePropagator(const SpectrumTrack& track, const BathParams& bath, AmeOptions options = {});

  /// Ground state of the first slice.
  TruncatedDensityMatrix initial_state() const;

  /// Ramp from grid index `from` to `to` at rate ds/dt = 1/t_a (t_a in us).
  void ramp(TruncatedDensityMatrix& state, std::size_t from, std::size_t to, double anneal_time_us,
            double t_offset_us, std::vector<AmeFrame>* frames) const;
  /// Hold at grid index `index` for `duration_us`.
  void hold(TruncatedDensityMatrix& state, std::size_t index, double duration_us) const;

  double ground_probability(const TruncatedDensityMatrix& state) const;

  AmeResult evolve(const AnnealPlan& plan) const;

  /// P0 for every (s_p, t_p) pair sharing one prefix ramp per s_p.
  /// result[i][j] belongs to pause_locations[i], pause_durations[j].
  std::vector<std::vector<double>> pause_scan(double anneal_time_us,
                                              const std::vector<double>& pause_locations,
                                              const std::vector<double>& pause_durations_us) const;

  const SpectrumTrack& track() const noexcept { return *track_; }
  const DaviesGenerator& generator(std::size_t index) const { return generators_.at(index); }

 private:
  void dissipate_for(TruncatedDensityMatrix& state, std::size_t index, double t_ns,
                     double& step_hint) const;
  void coherent_step(TruncatedDensityMatrix& state, std::size_t to, double dt_ns) const;

  const SpectrumTrack* track_;
  BathParams bath_;
  AmeOptions options_;
  std::vector<DaviesGenerator> generators_;
  std::vector<FrameStep> steps_;  // [k] maps slice k-1 to slice k
};

/// Orthogonal transport between consecutive kept bases built from their
/// overlap matrix: polar factor on the matched rows and columns, zero for
/// levels entering or leaving the kept set.
Eigen::MatrixXd transport_from_overlap(const Eigen::MatrixXd& overlap);

AmeResult ame_evolve(const SpectrumTrack& track, const AnnealPlan& plan, const BathParams& bath,
                     const AmeOptions& options = {});

/// CSV with header s,t,P0..P(m-1),trace.
std::string format_trajectory_csv(const std::vector<AmeFrame>& frames);

/// CSV with header s,E0..E(k-1) in GHz.
std::string format_spectrum_csv(const std::vector<SpectrumSlice>& slices, int levels);

}  // namespace pauselab::quantum
