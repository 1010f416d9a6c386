#include "pauselab/quantum/bath.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <unsupported/Eigen/MatrixFunctions>

#include "pauselab/error.hpp"

namespace pauselab::quantum {

void BathParams::validate() const {
  if (!(temperature.ghz() > 0.0)) throw InputError("bath temperature must be positive");
  if (!(coupling_sq > 0.0) || !std::isfinite(coupling_sq)) {
    throw InputError("bath coupling must be positive");
  }
  if (!(cutoff > 0.0) || !std::isfinite(cutoff)) throw InputError("bath cutoff must be positive");
}

double spectral_density(double omega, const BathParams& bath) {
  const double beta = bath.beta();
  const double x = beta * omega;
  // omega / (1 - exp(-beta omega)), written to stay accurate near 0.
  double thermal;
  if (std::abs(x) < 1e-8) {
    thermal = 1.0 / beta + 0.5 * omega;
  } else {
    thermal = omega / -std::expm1(-x);
  }
  return kTwoPi * bath.coupling_sq * thermal * std::exp(-std::abs(omega) / bath.cutoff);
}

DaviesGenerator::DaviesGenerator(const SpectrumSlice& slice, const BathParams& bath)
    : energies_(slice.energies) {
  bath.validate();
  const int m = slice.levels();

  // Cluster the nonnegative Bohr frequencies; negative ones use the mirror
  // bin so gamma(-omega) and gamma(omega) see exactly opposite arguments.
  struct Pair {
    double omega;
    int a, b;
  };
  std::vector<Pair> positive;
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      const double w = energies_[b] - energies_[a];
      if (w >= 0.0) positive.push_back({w, a, b});
    }
  }
  std::sort(positive.begin(), positive.end(),
            [](const Pair& x, const Pair& y) { return x.omega < y.omega; });
  std::vector<std::vector<Pair>> groups;
  for (const auto& p : positive) {
    if (groups.empty() || p.omega - groups.back().back().omega >= kBohrToleranceGHz) {
      groups.emplace_back();
    }
    groups.back().push_back(p);
  }
  for (const auto& group : groups) {
    const bool zero = group.front().omega < kBohrToleranceGHz;
    double mean = 0.0;
    for (const auto& p : group) mean += p.omega;
    mean = zero ? 0.0 : mean / static_cast<double>(group.size());
    Bin up{mean, spectral_density(kTwoPi * mean, bath), {}};
    Bin down{-mean, spectral_density(-kTwoPi * mean, bath), {}};
    for (const auto& p : group) {
      up.transitions.emplace_back(p.a, p.b);
      if (zero) {
        // Degenerate pairs appear in both orders already when w == 0 exactly;
        // add the reverse only when it was filtered out as negative.
        if (energies_[p.b] - energies_[p.a] > 0.0) up.transitions.emplace_back(p.b, p.a);
      } else {
        down.transitions.emplace_back(p.b, p.a);
      }
    }
    bins_.push_back(std::move(up));
    if (!zero) bins_.push_back(std::move(down));
  }

  const int n = static_cast<int>(slice.sigma_z.size());
  auto gram = [&](int a, int b, int c, int d) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += slice.sigma_z[i](a, b) * slice.sigma_z[i](c, d);
    return sum;
  };
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(m, m);
  for (const auto& bin : bins_) {
    for (const auto& [a, b] : bin.transitions) {
      for (const auto& [c, d] : bin.transitions) {
        const double coef = bin.rate * gram(a, b, c, d);
        if (coef == 0.0) continue;
        jumps_.push_back({a, c, b, d, coef});
        if (a == c) g(b, d) += coef;
      }
    }
  }
  for (int b = 0; b < m; ++b) {
    for (int d = 0; d < m; ++d) {
      if (g(b, d) != 0.0) anticommutator_.push_back({b, d, b, d, g(b, d)});
    }
  }
}

void DaviesGenerator::dissipate(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) const {
  const int m = levels();
  out.setZero(m, m);
  for (const auto& t : jumps_) out(t.a, t.c) += t.coef * rho(t.b, t.d);
  // -(G rho + rho G)/2 with G sparse and symmetric.
  for (const auto& t : anticommutator_) {
    out.row(t.a) -= 0.5 * t.coef * rho.row(t.c);
    out.col(t.c) -= 0.5 * t.coef * rho.col(t.a);
  }
}

Eigen::MatrixXcd DaviesGenerator::apply(const Eigen::MatrixXcd& rho) const {
  Eigen::MatrixXcd out;
  dissipate(rho, out);
  const int m = levels();
  const std::complex<double> minus_i(0.0, -1.0);
  for (int c = 0; c < m; ++c) {
    for (int a = 0; a < m; ++a) {
      out(a, c) += minus_i * (kTwoPi * (energies_[a] - energies_[c])) * rho(a, c);
    }
  }
  return out;
}

Eigen::MatrixXd DaviesGenerator::dissipator_matrix() const {
  const int m = levels();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m * m, m * m);
  auto idx = [m](int r, int c) { return r + m * c; };
  for (const auto& t : jumps_) d(idx(t.a, t.c), idx(t.b, t.d)) += t.coef;
  for (const auto& t : anticommutator_) {
    // (G rho)(r, c) picks G(r, k) rho(k, c); (rho G)(r, c) picks rho(r, k) G(k, c).
    for (int col = 0; col < m; ++col) d(idx(t.a, col), idx(t.c, col)) -= 0.5 * t.coef;
    for (int row = 0; row < m; ++row) d(idx(row, t.c), idx(row, t.a)) -= 0.5 * t.coef;
  }
  return d;
}

std::vector<std::vector<int>> DaviesGenerator::invariant_blocks() const {
  const int m = levels();
  std::vector<int> parent(m * m);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto join = [&](int x, int y) { parent[find(x)] = find(y); };
  auto idx = [m](int r, int c) { return r + m * c; };
  for (const auto& t : jumps_) join(idx(t.a, t.c), idx(t.b, t.d));
  for (const auto& t : anticommutator_) {
    for (int k = 0; k < m; ++k) {
      join(idx(t.a, k), idx(t.c, k));
      join(idx(k, t.c), idx(k, t.a));
    }
  }
  std::vector<std::vector<int>> groups(m * m);
  for (int k = 0; k < m * m; ++k) groups[find(k)].push_back(k);
  std::vector<std::vector<int>> out;
  for (auto& g : groups) {
    if (!g.empty()) out.push_back(std::move(g));
  }
  return out;
}

Eigen::MatrixXcd DaviesGenerator::dissipate_exactly(const Eigen::MatrixXcd& rho, double t_ns) const {
  const Eigen::MatrixXd d = dissipator_matrix();
  Eigen::MatrixXcd out = rho;
  for (const auto& block : invariant_blocks()) {
    const auto k = static_cast<Eigen::Index>(block.size());
    Eigen::MatrixXd sub(k, k);
    for (Eigen::Index r = 0; r < k; ++r) {
      for (Eigen::Index c = 0; c < k; ++c) sub(r, c) = d(block[r], block[c]) * t_ns;
    }
    const Eigen::MatrixXd e = sub.exp();
    Eigen::VectorXcd v(k);
    for (Eigen::Index r = 0; r < k; ++r) v[r] = rho.data()[block[r]];
    const Eigen::VectorXcd w = e.cast<std::complex<double>>() * v;
    for (Eigen::Index r = 0; r < k; ++r) out.data()[block[r]] = w[r];
  }
  return out;
}

void DaviesGenerator::rotate_phases(Eigen::MatrixXcd& rho, double t_ns) const {
  const int m = levels();
  for (int c = 0; c < m; ++c) {
    for (int a = 0; a < m; ++a) {
      if (a == c) continue;
      const double phase = -kTwoPi * (energies_[a] - energies_[c]) * t_ns;
      rho(a, c) *= std::polar(1.0, phase);
    }
  }
}

Eigen::VectorXd gibbs_populations(const SpectrumSlice& slice, const BathParams& bath) {
  bath.validate();
  const double t = bath.temperature.ghz();
  Eigen::VectorXd p = (-(slice.energies.array() - slice.energies[0]) / t).exp();
  return p / p.sum();
}

double instantaneous_ground_population(const SpectrumSlice& slice, const Eigen::VectorXd& populations) {
  if (populations.size() != slice.levels()) throw InputError("population vector has wrong length");
  if (slice.parity.empty() || slice.parity[0] == 0) return populations[0];
  double total = 0.0;
  bool even = false, odd = false;
  for (int a = 0; a < slice.levels(); ++a) {
    if (slice.parity[a] > 0 && !even) {
      total += populations[a];
      even = true;
    } else if (slice.parity[a] < 0 && !odd) {
      total += populations[a];
      odd = true;
    }
  }
  return total;
}

Rate relaxation_rate(const SpectrumSlice& slice, const BathParams& bath) {
  int lower = 0, upper = 1;
  if (!slice.parity.empty() && slice.parity[0] != 0) {
    lower = upper = -1;
    int evens = 0;
    for (int a = 0; a < slice.levels(); ++a) {
      if (slice.parity[a] < 0 && lower < 0) lower = a;
      if (slice.parity[a] > 0 && ++evens == 2) upper = a;
    }
    if (lower < 0 || upper < 0) throw InputError("slice lacks the levels for the relaxation rate");
  } else if (slice.levels() < 2) {
    throw InputError("slice lacks the levels for the relaxation rate");
  }
  double weight = 0.0;
  for (const auto& z : slice.sigma_z) weight += z(lower, upper) * z(lower, upper);
  const double omega = kTwoPi * (slice.energies[upper] - slice.energies[lower]);
  // 1/ns to 1/us.
  return Rate{spectral_density(omega, bath) * weight * 1e3, TimeUnit::microseconds};
}

}  // namespace pauselab::quantum
