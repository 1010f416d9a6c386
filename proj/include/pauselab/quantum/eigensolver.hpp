#pragma once

#include <Eigen/Dense>

#include "pauselab/quantum/hamiltonian.hpp"

namespace pauselab::quantum {

struct EigenOptions {
  int wanted = 16;
  int guard = 8;  // extra block columns beyond `wanted`
  /// Converged when every wanted residual ||H v - lambda v|| <= tolerance * ||H||.
  double tolerance = 1e-10;
  int degree = 16;  // Chebyshev filter degree per iteration
  int max_iterations = 400;
  /// Spaces at or below this size go straight to a dense solver.
  Eigen::Index dense_cutoff = 256;
};

struct EigenResult {
  Eigen::VectorXd values;   // ascending, `wanted` entries
  Eigen::MatrixXd vectors;  // orthonormal columns in the operator's basis
  Eigen::VectorXd residuals;
  double norm_estimate = 0.0;
  int iterations = 0;
};

/// Lowest eigenpairs by Chebyshev-filtered subspace iteration. `warm` may hold
/// any number of columns approximating the wanted space (for example the
/// previous slice of a sweep); missing columns are filled randomly.
/// Throws NumericalError when the tolerance is not met.
EigenResult lowest_eigenpairs(const TransverseIsingHamiltonian& h, const EigenOptions& options,
                              const Eigen::MatrixXd* warm = nullptr);

/// Same contract on an explicit symmetric matrix (tests, tiny systems).
EigenResult lowest_eigenpairs_dense(const Eigen::MatrixXd& h, int wanted);

}  // namespace pauselab::quantum
