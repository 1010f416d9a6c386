#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pauselab/quantum/spectrum.hpp"
#include "pauselab/units.hpp"

namespace pauselab::quantum {

/// Independent Ohmic baths, one per qubit, coupled through Z_i.
struct BathParams {
  Temperature temperature = Temperature::from_millikelvin(12.0);
  double coupling_sq = 1e-3;                 // kappa^2, dimensionless
  double cutoff = 8.0 * std::numbers::pi;    // omega_c, rad/ns

  void validate() const;
  /// Inverse temperature in ns/rad, so beta * omega is dimensionless.
  double beta() const noexcept { return 1.0 / (kTwoPi * temperature.ghz()); }
};

/// gamma(omega) = 2 pi kappa^2 omega exp(-|omega|/omega_c) / (1 - exp(-beta omega)),
/// omega in rad/ns, result in 1/ns. Continuous at 0 with value 2 pi kappa^2 / beta.
/// Satisfies gamma(-omega) = exp(-beta omega) gamma(omega).
double spectral_density(double omega, const BathParams& bath);

/// Bohr frequencies closer than this share one Davies bin.
inline constexpr double kBohrToleranceGHz = 1e-6;

/// Davies generator in the instantaneous eigenbasis of one slice:
///   d rho/dt = -i [H, rho] + sum_{omega,i} gamma(omega) (L rho L^T - {L^T L, rho}/2)
/// with L_{omega,i} = sum_{E_b - E_a ~ omega} <a|Z_i|b> |a><b|. Time in ns.
class DaviesGenerator {
 public:
  struct Term {
    int a, c, b, d;  // (a, c) += coef * rho(b, d)
    double coef;
  };
  struct Bin {
    double omega_ghz;  // representative Bohr frequency (cycles/ns)
    double rate;       // gamma(2 pi omega), 1/ns
    std::vector<std::pair<int, int>> transitions;  // (a, b): |a><b|
  };

  DaviesGenerator(const SpectrumSlice& slice, const BathParams& bath);

  int levels() const noexcept { return static_cast<int>(energies_.size()); }
  const Eigen::VectorXd& energies() const noexcept { return energies_; }
  const std::vector<Bin>& bins() const noexcept { return bins_; }

  /// Dissipative part only; it commutes with the coherent part.
  void dissipate(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) const;
  /// Full right-hand side including -i [H, rho].
  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho) const;
  /// Dissipator as a real m^2 x m^2 matrix on column-major vec(rho).
  Eigen::MatrixXd dissipator_matrix() const;
  /// Invariant blocks of the dissipator: sets of vec(rho) indices it never
  /// mixes (populations form one block; coherences group by Bohr frequency).
  std::vector<std::vector<int>> invariant_blocks() const;
  /// exp(D t) rho, block by block.
  Eigen::MatrixXcd dissipate_exactly(const Eigen::MatrixXcd& rho, double t_ns) const;
  /// Multiplies rho_ac by exp(-i 2 pi (E_a - E_c) t_ns).
  void rotate_phases(Eigen::MatrixXcd& rho, double t_ns) const;

 private:
  Eigen::VectorXd energies_;
  std::vector<Bin> bins_;
  std::vector<Term> jumps_;
  std::vector<Term> anticommutator_;  // (b, d) entries of sum gamma L^T L, a = c unused
};

inline DaviesGenerator lindblad_generator(const SpectrumSlice& slice, const BathParams& bath) {
  return DaviesGenerator(slice, bath);
}

/// Boltzmann weights of the kept levels at the bath temperature.
Eigen::VectorXd gibbs_populations(const SpectrumSlice& slice, const BathParams& bath);

/// Population of the levels that continue into the final ground manifold:
/// the lowest level of each parity sector, or level 0 without symmetry.
double instantaneous_ground_population(const SpectrumSlice& slice, const Eigen::VectorXd& populations);

/// Decay rate of the first excited state into the ground manifold,
/// gamma(omega_10) sum_i |<0|Z_i|1>|^2, in 1/us. Parity-resolved slices use
/// the pair (first odd level, second even level), the only pair the
/// Z_i couple in the excited-to-ground direction.
Rate relaxation_rate(const SpectrumSlice& slice, const BathParams& bath);

}  // namespace pauselab::quantum
