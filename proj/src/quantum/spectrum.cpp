#include "pauselab/quantum/spectrum.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "pauselab/error.hpp"

namespace pauselab::quantum {
namespace {

// Within-sector levels closer than this are gauge-aligned as one block.
constexpr double kClusterToleranceGHz = 1e-6;

// Rotates `fresh` so it lies as close as possible to `previous`, column for
// column; inside near-degenerate clusters the best rotation is the polar
// factor of the overlap block.
void align_gauge(Eigen::MatrixXd& fresh, const Eigen::VectorXd& values,
                 const Eigen::MatrixXd& previous) {
  const Eigen::Index k = std::min(fresh.cols(), previous.cols());
  Eigen::Index start = 0;
  while (start < k) {
    Eigen::Index end = start + 1;
    while (end < k && values[end] - values[end - 1] < kClusterToleranceGHz) ++end;
    const Eigen::Index len = end - start;
    Eigen::MatrixXd o = previous.middleCols(start, len).transpose() * fresh.middleCols(start, len);
    if (len == 1) {
      if (o(0, 0) < 0.0) fresh.col(start) *= -1.0;
    } else {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(o, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const Eigen::MatrixXd q = svd.matrixV() * svd.matrixU().transpose();
      fresh.middleCols(start, len) = (fresh.middleCols(start, len) * q).eval();
    }
    start = end;
  }
}

}  // namespace

Eigen::MatrixXd SpectrumSlice::total_sigma_z() const {
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(levels(), levels());
  for (const auto& zi : sigma_z) z += zi;
  return z;
}

struct SliceSolver::Impl {
  const IsingInstance* instance;
  const AnnealSchedule* schedule;
  SliceOptions options;
  std::vector<SectorBasis> bases;
  std::vector<Eigen::MatrixXd> z_tables;  // per basis: dim x n of +-1
  bool has_previous = false;
  std::vector<Eigen::MatrixXd> previous_vectors;
  std::vector<std::pair<int, int>> previous_source;
};

SliceSolver::SliceSolver(const IsingInstance& instance, const AnnealSchedule& schedule,
                         SliceOptions options)
    : impl_(std::make_unique<Impl>()) {
  if (options.levels < 1) throw InputError("level count must be positive");
  impl_->instance = &instance;
  impl_->schedule = &schedule;
  impl_->options = options;
  if (instance.z2_symmetric()) {
    impl_->bases.emplace_back(instance, Sector::even);
    impl_->bases.emplace_back(instance, Sector::odd);
  } else {
    impl_->bases.emplace_back(instance, Sector::full);
  }
  for (const auto& basis : impl_->bases) {
    Eigen::MatrixXd z(basis.dim(), basis.qubits());
    for (int i = 0; i < basis.qubits(); ++i) z.col(i) = basis.z_column(i);
    impl_->z_tables.push_back(std::move(z));
  }
  const Eigen::Index total = std::accumulate(
      impl_->bases.begin(), impl_->bases.end(), Eigen::Index{0},
      [](Eigen::Index acc, const SectorBasis& b) { return acc + b.dim(); });
  if (options.levels > total) throw InputError("more levels requested than the space holds");
}

SliceSolver::~SliceSolver() = default;
SliceSolver::SliceSolver(SliceSolver&&) noexcept = default;
SliceSolver& SliceSolver::operator=(SliceSolver&&) noexcept = default;

bool SliceSolver::parity_resolved() const noexcept { return impl_->bases.size() == 2; }
const SliceOptions& SliceSolver::options() const noexcept { return impl_->options; }

SpectrumSlice SliceSolver::propose(double s) const {
  const Impl& im = *impl_;
  const auto sv = im.schedule->eval(s);
  SpectrumSlice slice;
  slice.s = s;
  slice.a_ghz = sv.a_ghz;
  slice.b_ghz = sv.b_ghz;

  struct Candidate {
    double energy;
    int basis;
    int column;
  };
  std::vector<Candidate> pool;
  for (std::size_t b = 0; b < im.bases.size(); ++b) {
    TransverseIsingHamiltonian h(im.bases[b], sv.a_ghz, sv.b_ghz);
    EigenOptions eo;
    eo.wanted = static_cast<int>(std::min<Eigen::Index>(im.options.levels, im.bases[b].dim()));
    eo.tolerance = im.options.tolerance;
    const Eigen::MatrixXd* warm = im.has_previous ? &im.previous_vectors[b] : nullptr;
    EigenResult res = lowest_eigenpairs(h, eo, warm);
    if (warm != nullptr) align_gauge(res.vectors, res.values, *warm);
    slice.max_residual = std::max(slice.max_residual, res.residuals.maxCoeff());
    for (int c = 0; c < eo.wanted; ++c) {
      pool.push_back({res.values[c], static_cast<int>(b), c});
    }
    slice.sector_vectors.push_back(std::move(res.vectors));
  }
  std::stable_sort(pool.begin(), pool.end(),
                   [](const Candidate& x, const Candidate& y) { return x.energy < y.energy; });
  const int m = im.options.levels;
  pool.resize(static_cast<std::size_t>(m));
  slice.energies.resize(m);
  for (int a = 0; a < m; ++a) {
    slice.energies[a] = pool[a].energy;
    slice.parity.push_back(im.bases[pool[a].basis].parity());
    slice.level_source.emplace_back(pool[a].basis, pool[a].column);
  }

  // Z_i blocks between bases; in the parity-resolved case Z_i flips parity,
  // so same-sector blocks vanish identically.
  const int n = im.instance->size();
  const bool resolved = im.bases.size() == 2;
  slice.sigma_z.assign(n, Eigen::MatrixXd::Zero(m, m));
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < m; ++a) {
      const auto [ba, ca] = slice.level_source[a];
      for (int b = a; b < m; ++b) {
        const auto [bb, cb] = slice.level_source[b];
        if (resolved && ba == bb) continue;
        const auto& u = slice.sector_vectors[ba];
        const auto& v = slice.sector_vectors[bb];
        // z of the representative is the same in both sectors.
        const double value =
            (u.col(ca).array() * im.z_tables[ba].col(i).array() * v.col(cb).array()).sum();
        slice.sigma_z[i](a, b) = value;
        slice.sigma_z[i](b, a) = value;
      }
    }
  }

  if (im.has_previous) {
    slice.overlap = Eigen::MatrixXd::Zero(m, m);
    for (int a = 0; a < m; ++a) {
      const auto [ba, ca] = im.previous_source[a];
      for (int b = 0; b < m; ++b) {
        const auto [bb, cb] = slice.level_source[b];
        if (ba != bb) continue;
        slice.overlap(a, b) = im.previous_vectors[ba].col(ca).dot(slice.sector_vectors[bb].col(cb));
      }
    }
  }

  if (im.options.keep_vectors) {
    const Eigen::Index full = Eigen::Index{1} << n;
    slice.vectors.resize(full, m);
    for (int a = 0; a < m; ++a) {
      const auto [ba, ca] = slice.level_source[a];
      slice.vectors.col(a) = im.bases[ba].embed(slice.sector_vectors[ba].col(ca));
    }
  }
  return slice;
}

void SliceSolver::accept(const SpectrumSlice& slice) {
  if (slice.sector_vectors.size() != impl_->bases.size()) {
    throw InputError("slice was not produced by this solver");
  }
  impl_->previous_vectors = slice.sector_vectors;
  impl_->previous_source = slice.level_source;
  impl_->has_previous = true;
}

SpectrumSlice SliceSolver::solve(double s) {
  SpectrumSlice slice = propose(s);
  accept(slice);
  return slice;
}

std::size_t SpectrumTrack::index_of(double s) const {
  auto it = std::lower_bound(slices.begin(), slices.end(), s,
                             [](const SpectrumSlice& sl, double v) { return sl.s < v; });
  if (it == slices.end() || it->s != s) throw InputError("s is not a grid point of the track");
  return static_cast<std::size_t>(it - slices.begin());
}

namespace {

// Best overlap of every previous level that stays inside the kept space.
double interval_overlap(const Eigen::MatrixXd& overlap, double threshold) {
  double worst = 1.0;
  for (Eigen::Index a = 0; a < overlap.rows(); ++a) {
    const double kept = overlap.row(a).squaredNorm();
    if (kept < threshold * threshold) continue;
    worst = std::min(worst, overlap.row(a).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace

double SpectrumTrack::worst_overlap() const {
  double worst = 1.0;
  for (std::size_t k = 1; k < slices.size(); ++k) {
    worst = std::min(worst, interval_overlap(slices[k].overlap, 0.99));
  }
  return worst;
}

SpectrumTrack build_track(const IsingInstance& instance, const AnnealSchedule& schedule,
                          const TrackOptions& options) {
  if (options.base_slices < 1) throw InputError("track needs at least one interval");
  std::vector<double> points;
  for (int k = 0; k <= options.base_slices; ++k) {
    points.push_back(static_cast<double>(k) / options.base_slices);
  }
  for (double p : options.required_points) {
    if (!(p >= 0.0 && p <= 1.0)) throw InputError("required track point outside [0, 1]");
    points.push_back(p);
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end(),
                           [](double x, double y) { return std::abs(x - y) < 1e-12; }),
               points.end());
  // A required point that merged into a grid point must still be exact.
  for (double p : options.required_points) {
    auto it = std::min_element(points.begin(), points.end(), [p](double x, double y) {
      return std::abs(x - p) < std::abs(y - p);
    });
    *it = p;
  }

  SliceOptions so;
  so.levels = options.levels;
  so.tolerance = options.tolerance;
  SliceSolver solver(instance, schedule, so);

  SpectrumTrack track;
  track.parity_resolved = solver.parity_resolved();
  auto push = [&](SpectrumSlice slice) {
    solver.accept(slice);
    slice.sector_vectors.clear();
    slice.sector_vectors.shrink_to_fit();
    track.slices.push_back(std::move(slice));
  };
  push(solver.propose(points.front()));

  std::function<void(double, int)> advance = [&](double target, int depth) {
    SpectrumSlice candidate = solver.propose(target);
    if (depth >= options.max_bisections ||
        interval_overlap(candidate.overlap, options.overlap_threshold) >= options.overlap_threshold) {
      push(std::move(candidate));
      return;
    }
    const double mid = 0.5 * (track.slices.back().s + target);
    advance(mid, depth + 1);
    advance(target, depth + 1);
  };
  for (std::size_t k = 1; k < points.size(); ++k) advance(points[k], 0);

  if (instance.size() <= kMaxEnumerationQubits) {
    const auto classical = brute_force_spectrum(instance, 1);
    // Parity-resolved levels pair up the configurations of a Z2 manifold.
    track.ground_multiplicity = static_cast<int>(classical.levels.front().configs.size());
  }
  track.ground_multiplicity = std::min(track.ground_multiplicity, options.levels);
  return track;
}

double sector_gap(const IsingInstance& instance, const AnnealSchedule& schedule, double s) {
  const Sector sector = instance.z2_symmetric() ? Sector::even : Sector::full;
  const SectorBasis basis(instance, sector);
  const auto sv = schedule.eval(s);
  TransverseIsingHamiltonian h(basis, sv.a_ghz, sv.b_ghz);
  EigenOptions eo;
  eo.wanted = 2;
  eo.tolerance = 1e-11;
  const auto res = lowest_eigenpairs(h, eo);
  return res.values[1] - res.values[0];
}

MinGap min_gap(const IsingInstance& instance, const AnnealSchedule& schedule, int grid,
               double s_tolerance) {
  if (grid < 3) throw InputError("min-gap grid needs at least three points");
  const Sector sector = instance.z2_symmetric() ? Sector::even : Sector::full;
  const SectorBasis basis(instance, sector);
  Eigen::MatrixXd warm;
  auto gap_at = [&](double s) {
    const auto sv = schedule.eval(s);
    TransverseIsingHamiltonian h(basis, sv.a_ghz, sv.b_ghz);
    EigenOptions eo;
    eo.wanted = 2;
    eo.tolerance = 1e-11;
    const auto res = lowest_eigenpairs(h, eo, warm.size() > 0 ? &warm : nullptr);
    warm = res.vectors;
    return res.values[1] - res.values[0];
  };

  std::vector<double> s(grid), g(grid);
  for (int k = 0; k < grid; ++k) {
    s[k] = static_cast<double>(k) / (grid - 1);
    g[k] = gap_at(s[k]);
  }
  const auto best = static_cast<int>(std::min_element(g.begin(), g.end()) - g.begin());
  const double flat = g[best] * (1.0 + 1e-9) + 1e-12;
  int lo = best, hi = best;
  while (lo > 0 && g[lo - 1] <= flat) --lo;
  while (hi < grid - 1 && g[hi + 1] <= flat) ++hi;

  MinGap out;
  out.sector = sector;
  if (hi > lo) {
    out.plateau = true;
    out.s = 0.5 * (s[lo] + s[hi]);
    out.gap_ghz = gap_at(out.s);
    return out;
  }
  const double left = s[std::max(best - 1, 0)];
  const double right = s[std::min(best + 1, grid - 1)];
  // Brent's minimizer is golden section with parabolic steps; bits sets the
  // relative precision of the abscissa.
  const int bits = static_cast<int>(std::ceil(-std::log2(s_tolerance))) + 1;
  std::uintmax_t iters = 200;
  const auto [sm, gm] = boost::math::tools::brent_find_minima(gap_at, left, right, bits, iters);
  out.s = sm;
  out.gap_ghz = gm;
  if (g[best] < gm) {
    out.s = s[best];
    out.gap_ghz = g[best];
  }
  return out;
}

ScalingResult matrix_element_scaling(const IsingInstance& instance, const std::vector<double>& lambdas,
                                     double tolerance) {
  if (!instance.z2_symmetric()) {
    throw InputError("matrix-element scaling needs a Z2-symmetric instance");
  }
  if (lambdas.size() < 2) throw InputError("scaling fit needs at least two lambda values");
  const SectorBasis even(instance, Sector::even);
  const SectorBasis odd(instance, Sector::odd);
  const int n = instance.size();
  Eigen::VectorXd z_total = Eigen::VectorXd::Zero(even.dim());
  for (int i = 0; i < n; ++i) z_total += even.z_column(i);

  auto parity_expectation = [&](const SectorBasis& basis, const Eigen::VectorXd& v) {
    const Eigen::VectorXd full = basis.embed(v);
    const Eigen::Index mask = full.size() - 1;
    double p = 0.0;
    for (Eigen::Index k = 0; k < full.size(); ++k) p += full[k] * full[k ^ mask];
    return p;
  };

  ScalingResult out;
  for (double lambda : lambdas) {
    if (!(lambda > 0.0)) throw InputError("lambda must be positive");
    EigenOptions eo;
    eo.tolerance = tolerance;
    eo.wanted = 2;
    const auto e = lowest_eigenpairs(TransverseIsingHamiltonian(even, lambda, 1.0), eo);
    eo.wanted = 1;
    const auto o = lowest_eigenpairs(TransverseIsingHamiltonian(odd, lambda, 1.0), eo);
    ScalingPoint p;
    p.lambda = lambda;
    p.element = std::abs((o.vectors.col(0).array() * z_total.array() * e.vectors.col(1).array()).sum());
    p.even_parity = parity_expectation(even, e.vectors.col(1));
    p.odd_parity = parity_expectation(odd, o.vectors.col(0));
    out.points.push_back(p);
  }
  Eigen::MatrixXd design(out.points.size(), 2);
  Eigen::VectorXd rhs(out.points.size());
  for (std::size_t k = 0; k < out.points.size(); ++k) {
    if (!(out.points[k].element > 0.0)) throw NumericalError("matrix element vanished");
    design(k, 0) = std::log(out.points[k].lambda);
    design(k, 1) = 1.0;
    rhs[k] = std::log(out.points[k].element);
  }
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(rhs);
  out.slope = coef[0];
  out.intercept = coef[1];
  return out;
}

}  // namespace pauselab::quantum
