#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string_view>
#include <vector>

#include "pauselab/instance.hpp"
#include "pauselab/schedule.hpp"

namespace pauselab::quantum {

inline constexpr int kMaxQubits = 16;

/// Eigenspaces of P = prod_i X_i. `full` is the whole 2^n space; `even` and
/// `odd` need a Z2-symmetric instance (no local fields).
enum class Sector { full, even, odd };

std::string_view to_string(Sector sector);

/// Orthonormal basis of a sector. In the even/odd sectors basis vector k
/// (0 <= k < 2^(n-1)) is (|k> +- |~k>) / sqrt 2, where k has its top bit
/// clear and ~k is the bitwise complement; in the full sector it is |k>.
class SectorBasis {
 public:
  SectorBasis(const IsingInstance& instance, Sector sector);

  Sector sector() const noexcept { return sector_; }
  int qubits() const noexcept { return n_; }
  Eigen::Index dim() const noexcept { return dim_; }
  /// +1 even, -1 odd, 0 full.
  int parity() const noexcept;

  /// H_p in Ising units on this basis (diagonal).
  const Eigen::VectorXd& ising_diagonal() const noexcept { return diag_; }

  /// z_i = +-1 of the representative bitstring of every basis vector.
  Eigen::VectorXd z_column(int qubit) const;

  /// Amplitudes in the computational basis (length 2^n).
  Eigen::VectorXd embed(const Eigen::Ref<const Eigen::VectorXd>& v) const;

 private:
  Sector sector_;
  int n_;
  Eigen::Index dim_;
  Eigen::VectorXd diag_;
};

using RowBlock = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// H = A H_x + B H_p with H_x = -sum_i X_i, restricted to a sector.
/// A, B in GHz; the operator is never stored.
class TransverseIsingHamiltonian {
 public:
  TransverseIsingHamiltonian(const SectorBasis& basis, double a_ghz, double b_ghz);

  Eigen::Index dim() const noexcept { return basis_->dim(); }
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  const SectorBasis& basis() const noexcept { return *basis_; }

  /// y = H x for a block of column vectors stored row-major.
  void apply(const RowBlock& x, RowBlock& y) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;

  /// Gershgorin bounds on the spectrum.
  double lower_bound() const;
  double upper_bound() const;
  double norm_bound() const { return std::max(std::abs(lower_bound()), std::abs(upper_bound())); }

  Eigen::MatrixXd dense() const;

 private:
  const SectorBasis* basis_;
  double a_;
  double b_;
};

}  // namespace pauselab::quantum
