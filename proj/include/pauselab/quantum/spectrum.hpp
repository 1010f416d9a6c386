#pragma once

#include <Eigen/Dense>
#include <memory>
#include <utility>
#include <vector>

#include "pauselab/instance.hpp"
#include "pauselab/quantum/eigensolver.hpp"
#include "pauselab/quantum/hamiltonian.hpp"
#include "pauselab/schedule.hpp"

namespace pauselab::quantum {

/// Lowest m levels of H(s) in the instantaneous eigenbasis.
struct SpectrumSlice {
  double s = 0.0;
  double a_ghz = 0.0;
  double b_ghz = 0.0;
  Eigen::VectorXd energies;  // GHz, ascending
  /// P eigenvalue of each level: +1, -1, or 0 when the instance has fields.
  std::vector<int> parity;
  /// <E_a| Z_i |E_b> for every qubit i (real symmetric m x m).
  std::vector<Eigen::MatrixXd> sigma_z;
  /// <E_a(previous slice)|E_b(this slice)>; empty on the first slice.
  Eigen::MatrixXd overlap;
  /// Computational-basis amplitudes (2^n x m) when requested.
  Eigen::MatrixXd vectors;
  double max_residual = 0.0;  // worst ||H v - E v|| over kept levels, GHz

  int levels() const noexcept { return static_cast<int>(energies.size()); }
  /// Z = sum_i Z_i in the kept basis.
  Eigen::MatrixXd total_sigma_z() const;

  /// Sector-resolved vectors, kept for warm starts; (basis, column) per level.
  std::vector<Eigen::MatrixXd> sector_vectors;
  std::vector<std::pair<int, int>> level_source;
};

struct SliceOptions {
  int levels = 16;
  double tolerance = 1e-10;  // relative eigen-residual
  bool keep_vectors = false;
};

/// Sequential eigen-solves along s. Each solve is warm-started from the last
/// accepted slice and gauge-aligned to it (sign or Procrustes rotation inside
/// near-degenerate clusters), so consecutive overlaps are near identity away
/// from level crossings.
class SliceSolver {
 public:
  SliceSolver(const IsingInstance& instance, const AnnealSchedule& schedule, SliceOptions options = {});
  ~SliceSolver();
  SliceSolver(SliceSolver&&) noexcept;
  SliceSolver& operator=(SliceSolver&&) noexcept;

  /// Solve at s relative to the accepted state without committing.
  SpectrumSlice propose(double s) const;
  void accept(const SpectrumSlice& slice);
  SpectrumSlice solve(double s);

  bool parity_resolved() const noexcept;
  const SliceOptions& options() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct TrackOptions {
  int levels = 16;
  int base_slices = 1024;
  /// Grid points that must appear exactly (pause locations).
  std::vector<double> required_points;
  /// A kept level whose best overlap with the next slice is below this
  /// triggers bisection of the interval.
  double overlap_threshold = 0.99;
  int max_bisections = 8;
  double tolerance = 1e-10;
};

struct SpectrumTrack {
  std::vector<SpectrumSlice> slices;  // ascending s from 0 to 1
  /// Levels forming the classical ground manifold at s = 1.
  int ground_multiplicity = 1;
  bool parity_resolved = false;

  std::size_t index_of(double s) const;  // exact grid point; throws if absent
  /// Smallest best-overlap over all kept levels and intervals, ignoring
  /// levels leaving the truncated space.
  double worst_overlap() const;
};

SpectrumTrack build_track(const IsingInstance& instance, const AnnealSchedule& schedule,
                          const TrackOptions& options = {});

struct MinGap {
  double s = 0.0;
  double gap_ghz = 0.0;
  Sector sector = Sector::full;  // sector the gap was measured in
  bool plateau = false;          // several grid points tie; s is their midpoint
};

/// Smallest E_1 - E_0 over s in [0, 1]. Z2-symmetric instances use the even
/// sector: the parity partner of the ground state becomes degenerate with it
/// and is never reached by Z2-preserving dynamics. Coarse grid then golden
/// section to `s_tolerance`.
MinGap min_gap(const IsingInstance& instance, const AnnealSchedule& schedule, int grid = 101,
               double s_tolerance = 1e-4);

/// Gap function used by min_gap, exposed for tests.
double sector_gap(const IsingInstance& instance, const AnnealSchedule& schedule, double s);

struct ScalingPoint {
  double lambda = 0.0;
  double element = 0.0;  // |<E_0^-| Z |E_1^+>|
  double even_parity = 0.0;  // <E_1^+|P|E_1^+>
  double odd_parity = 0.0;   // <E_0^-|P|E_0^->
};

struct ScalingResult {
  std::vector<ScalingPoint> points;
  double slope = 0.0;  // d log M / d log lambda, least squares
  double intercept = 0.0;
};

/// Matrix element between the odd member of the ground doublet and the first
/// even excited state of H_p + lambda H_x. Perturbatively it scales as
/// lambda^d with d the Hamming distance between the two classical manifolds.
ScalingResult matrix_element_scaling(const IsingInstance& instance, const std::vector<double>& lambdas,
                                     double tolerance = 1e-13);

}  // namespace pauselab::quantum
