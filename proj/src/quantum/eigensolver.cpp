#include "pauselab/quantum/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "pauselab/error.hpp"

namespace pauselab::quantum {
namespace {

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& x) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
  return qr.householderQ() * Eigen::MatrixXd::Identity(x.rows(), x.cols());
}

// Scaled three-term Chebyshev filter: damps [lo, hi], amplifies below lo.
// `floor` estimates the bottom of the spectrum and fixes the scaling.
RowBlock chebyshev_filter(const TransverseIsingHamiltonian& h, RowBlock x, int degree, double lo,
                          double hi, double floor) {
  const double e = 0.5 * (hi - lo);
  const double c = 0.5 * (hi + lo);
  double sigma = e / (floor - c);
  const double tau = 2.0 / sigma;
  RowBlock y;
  h.apply(x, y);
  y = (y - c * x) * (sigma / e);
  RowBlock hy;
  for (int k = 2; k <= degree; ++k) {
    const double sigma_next = 1.0 / (tau - sigma);
    h.apply(y, hy);
    RowBlock next = (hy - c * y) * (2.0 * sigma_next / e) - (sigma * sigma_next) * x;
    x.swap(y);
    y.swap(next);
    sigma = sigma_next;
  }
  return y;
}

}  // namespace

EigenResult lowest_eigenpairs_dense(const Eigen::MatrixXd& h, int wanted) {
  if (h.rows() != h.cols()) throw InputError("matrix must be square");
  if (wanted < 1 || wanted > h.rows()) throw InputError("wanted eigenpair count out of range");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  if (es.info() != Eigen::Success) throw NumericalError("dense eigensolver failed");
  EigenResult out;
  out.values = es.eigenvalues().head(wanted);
  out.vectors = es.eigenvectors().leftCols(wanted);
  out.residuals = (h * out.vectors - out.vectors * out.values.asDiagonal()).colwise().norm();
  out.norm_estimate = es.eigenvalues().cwiseAbs().maxCoeff();
  return out;
}

EigenResult lowest_eigenpairs(const TransverseIsingHamiltonian& h, const EigenOptions& options,
                              const Eigen::MatrixXd* warm) {
  const Eigen::Index dim = h.dim();
  if (options.wanted < 1 || options.wanted > dim) {
    throw InputError("wanted eigenpair count out of range");
  }
  const Eigen::Index block = std::min<Eigen::Index>(dim, options.wanted + options.guard);
  if (dim <= options.dense_cutoff || block * 3 >= dim) {
    auto out = lowest_eigenpairs_dense(h.dense(), options.wanted);
    out.norm_estimate = h.norm_bound();
    return out;
  }

  Eigen::MatrixXd x(dim, block);
  Eigen::Index seeded = 0;
  if (warm != nullptr && warm->rows() == dim) {
    seeded = std::min<Eigen::Index>(block, warm->cols());
    x.leftCols(seeded) = warm->leftCols(seeded);
  }
  if (seeded < block) {
    std::mt19937_64 rng(0x5eed + static_cast<std::uint64_t>(dim));
    std::normal_distribution<double> normal;
    for (Eigen::Index j = seeded; j < block; ++j) {
      for (Eigen::Index i = 0; i < dim; ++i) x(i, j) = normal(rng);
    }
  }
  x = orthonormalize(x);

  const double hi = h.upper_bound();
  const double scale = h.norm_bound();
  const double threshold = options.tolerance * scale;
  EigenResult out;
  out.norm_estimate = scale;
  RowBlock xr;
  RowBlock wr;
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    // Rayleigh-Ritz on span(x).
    xr = x;
    h.apply(xr, wr);
    Eigen::MatrixXd w = wr;
    Eigen::MatrixXd g = x.transpose() * w;
    g = 0.5 * (g + g.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    const Eigen::VectorXd theta = es.eigenvalues();
    x = x * es.eigenvectors();
    w = w * es.eigenvectors();
    const Eigen::VectorXd res = (w - x * theta.asDiagonal()).colwise().norm();
    const double worst = res.head(options.wanted).maxCoeff();
    if (worst <= threshold) {
      out.values = theta.head(options.wanted);
      out.vectors = x.leftCols(options.wanted);
      out.residuals = res.head(options.wanted);
      out.iterations = iter;
      return out;
    }
    const double lo = theta[block - 1];
    if (!(hi > lo)) throw NumericalError("Chebyshev filter interval collapsed");
    xr = x;
    x = chebyshev_filter(h, std::move(xr), options.degree, lo, hi, theta[0]);
    x = orthonormalize(x);
  }
  std::ostringstream msg;
  msg << "eigensolver did not reach residual " << threshold << " in " << options.max_iterations
      << " iterations";
  throw NumericalError(msg.str());
}

}  // namespace pauselab::quantum
