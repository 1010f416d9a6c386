#include "pauselab/quantum/hamiltonian.hpp"

#include <cmath>

#include "pauselab/error.hpp"

namespace pauselab::quantum {

std::string_view to_string(Sector sector) {
  switch (sector) {
    case Sector::full:
      return "full";
    case Sector::even:
      return "even";
    case Sector::odd:
      return "odd";
  }
  return "?";
}

SectorBasis::SectorBasis(const IsingInstance& instance, Sector sector)
    : sector_(sector), n_(instance.size()) {
  if (n_ < 1 || n_ > kMaxQubits) {
    throw InputError("quantum model supports 1 to " + std::to_string(kMaxQubits) + " qubits, got " +
                     std::to_string(n_));
  }
  if (sector != Sector::full && !instance.z2_symmetric()) {
    throw InputError("parity sectors need an instance without local fields");
  }
  const auto all = all_ising_energies(instance);
  dim_ = sector == Sector::full ? Eigen::Index{1} << n_ : Eigen::Index{1} << (n_ - 1);
  diag_.resize(dim_);
  for (Eigen::Index k = 0; k < dim_; ++k) diag_[k] = all[static_cast<std::size_t>(k)];
}

int SectorBasis::parity() const noexcept {
  return sector_ == Sector::even ? 1 : sector_ == Sector::odd ? -1 : 0;
}

Eigen::VectorXd SectorBasis::z_column(int qubit) const {
  Eigen::VectorXd z(dim_);
  for (Eigen::Index k = 0; k < dim_; ++k) z[k] = ((k >> qubit) & 1) ? -1.0 : 1.0;
  return z;
}

Eigen::VectorXd SectorBasis::embed(const Eigen::Ref<const Eigen::VectorXd>& v) const {
  if (v.size() != dim_) throw InputError("vector length does not match the sector dimension");
  if (sector_ == Sector::full) return v;
  const Eigen::Index full = Eigen::Index{1} << n_;
  const Eigen::Index mask = full - 1;
  const double sign = parity();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(full);
  for (Eigen::Index k = 0; k < dim_; ++k) {
    out[k] = v[k] * M_SQRT1_2;
    out[k ^ mask] = sign * v[k] * M_SQRT1_2;
  }
  return out;
}

TransverseIsingHamiltonian::TransverseIsingHamiltonian(const SectorBasis& basis, double a_ghz,
                                                       double b_ghz)
    : basis_(&basis), a_(a_ghz), b_(b_ghz) {}

void TransverseIsingHamiltonian::apply(const RowBlock& x, RowBlock& y) const {
  const Eigen::Index dim = basis_->dim();
  const int n = basis_->qubits();
  const auto& d = basis_->ising_diagonal();
  y.resize(x.rows(), x.cols());
  const bool reduced = basis_->sector() != Sector::full;
  // Flipping the top qubit of a reduced representative lands on the
  // complement of k ^ lower, picking up the sector parity.
  const int free_bits = reduced ? n - 1 : n;
  const Eigen::Index lower = (Eigen::Index{1} << free_bits) - 1;
  const double top_sign = reduced ? basis_->parity() : 0.0;
  for (Eigen::Index k = 0; k < dim; ++k) {
    auto row = y.row(k);
    row = (b_ * d[k]) * x.row(k);
    for (int i = 0; i < free_bits; ++i) row -= a_ * x.row(k ^ (Eigen::Index{1} << i));
    if (reduced) row -= (a_ * top_sign) * x.row(k ^ lower);
  }
}

Eigen::VectorXd TransverseIsingHamiltonian::apply(const Eigen::VectorXd& x) const {
  RowBlock xb = x;
  RowBlock yb;
  apply(xb, yb);
  return yb;
}

double TransverseIsingHamiltonian::lower_bound() const {
  const auto& d = basis_->ising_diagonal();
  const double diag = b_ >= 0.0 ? b_ * d.minCoeff() : b_ * d.maxCoeff();
  return diag - std::abs(a_) * basis_->qubits();
}

double TransverseIsingHamiltonian::upper_bound() const {
  const auto& d = basis_->ising_diagonal();
  const double diag = b_ >= 0.0 ? b_ * d.maxCoeff() : b_ * d.minCoeff();
  return diag + std::abs(a_) * basis_->qubits();
}

Eigen::MatrixXd TransverseIsingHamiltonian::dense() const {
  const Eigen::Index dim = basis_->dim();
  if (dim > 8192) throw InputError("dense Hamiltonian requested for too large a space");
  RowBlock eye = RowBlock::Identity(dim, dim);
  RowBlock h;
  apply(eye, h);
  return h;
}

}  // namespace pauselab::quantum
