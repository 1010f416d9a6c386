#include "pauselab/quantum/ame.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <unsupported/Eigen/MatrixFunctions>

#include "pauselab/error.hpp"

namespace pauselab::quantum {

TruncatedDensityMatrix TruncatedDensityMatrix::pure(double s, int levels, int level) {
  if (level < 0 || level >= levels) throw InputError("level index outside the kept space");
  TruncatedDensityMatrix out;
  out.s = s;
  out.rho = Eigen::MatrixXcd::Zero(levels, levels);
  out.rho(level, level) = 1.0;
  return out;
}

double TruncatedDensityMatrix::trace() const { return rho.trace().real(); }

double TruncatedDensityMatrix::hermiticity_error() const {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double TruncatedDensityMatrix::min_eigenvalue() const {
  const Eigen::MatrixXcd h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Eigen::VectorXd TruncatedDensityMatrix::populations() const { return rho.diagonal().real(); }

AmePropagator::AmePropagator(const SpectrumTrack& track, const BathParams& bath, AmeOptions options)
    : track_(&track), bath_(bath), options_(options) {
  bath.validate();
  if (track.slices.size() < 2) throw InputError("track needs at least two slices");
  generators_.reserve(track.slices.size());
  for (const auto& slice : track.slices) generators_.emplace_back(slice, bath);
  steps_.resize(track.slices.size());
  for (std::size_t k = 1; k < track.slices.size(); ++k) {
    steps_[k] = frame_step(track.slices[k - 1], track.slices[k]);
  }
}

TruncatedDensityMatrix AmePropagator::initial_state() const {
  const auto& first = track_->slices.front();
  return TruncatedDensityMatrix::pure(first.s, first.levels(), 0);
}

void AmePropagator::dissipate_for(TruncatedDensityMatrix& state, std::size_t index, double t_ns,
                                  double& step_hint) const {
  const auto& gen = generators_[index];
  Eigen::MatrixXcd k1, k2, k3, k4;
  auto rk4 = [&](const Eigen::MatrixXcd& y, double h) {
    gen.dissipate(y, k1);
    gen.dissipate(y + 0.5 * h * k1, k2);
    gen.dissipate(y + 0.5 * h * k2, k3);
    gen.dissipate(y + h * k3, k4);
    return Eigen::MatrixXcd(y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  };
  double remaining = t_ns;
  double h = step_hint > 0.0 ? step_hint : t_ns;
  while (remaining > 0.0) {
    h = std::min(h, remaining);
    const Eigen::MatrixXcd full = rk4(state.rho, h);
    const Eigen::MatrixXcd half = rk4(rk4(state.rho, 0.5 * h), 0.5 * h);
    const double err = (half - full).cwiseAbs().maxCoeff();
    if (err <= options_.step_tolerance || h <= 1e-12 * t_ns) {
      // Richardson extrapolation of the two fourth-order results.
      state.rho = half + (half - full) / 15.0;
      remaining -= h;
      const double grow = err > 0.0 ? 0.9 * std::pow(options_.step_tolerance / err, 0.2) : 4.0;
      h *= std::clamp(grow, 0.2, 4.0);
      step_hint = h;
    } else {
      h *= std::clamp(0.9 * std::pow(options_.step_tolerance / err, 0.2), 0.1, 0.5);
    }
  }
}

void AmePropagator::coherent_step(TruncatedDensityMatrix& state, std::size_t to,
                                  double dt_ns) const {
  const FrameStep& st = steps_[to];
  const auto k = static_cast<Eigen::Index>(st.from.size());
  const int m = track_->slices[to].levels();
  Eigen::MatrixXcd tracked(k, k);
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < k; ++c) tracked(r, c) = state.rho(st.from[r], st.from[c]);
  }
  if (k > 0) {
    // U = exp(-i (2 pi E dt - i X)); the exponent is Hermitian.
    Eigen::MatrixXcd h = std::complex<double>(0.0, -1.0) * st.rotation_log.cast<std::complex<double>>();
    for (Eigen::Index r = 0; r < k; ++r) h(r, r) += kTwoPi * st.mid_energy[r] * dt_ns;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    const Eigen::VectorXcd phases =
        (std::complex<double>(0.0, -1.0) * es.eigenvalues().cast<std::complex<double>>()).array().exp();
    const Eigen::MatrixXcd u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    tracked = (u * tracked * u.adjoint()).eval();
  }

  Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(m, m);
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < k; ++c) {
      next(st.to[r], st.to[c]) = st.sign[r] * st.sign[c] * tracked(r, c);
    }
  }
  state.rho = std::move(next);
  state.s = track_->slices[to].s;
  const double leak = 1.0 - state.trace();
  if (leak > options_.leakage_limit) {
    std::ostringstream msg;
    msg << "population leaving the kept levels reached " << leak << " at s = " << state.s
        << "; increase the level count";
    throw NumericalError(msg.str());
  }
}

void AmePropagator::ramp(TruncatedDensityMatrix& state, std::size_t from, std::size_t to,
                         double anneal_time_us, double t_offset_us,
                         std::vector<AmeFrame>* frames) const {
  if (!(anneal_time_us > 0.0)) throw InputError("anneal time must be positive");
  if (from > to || to >= track_->slices.size()) throw InputError("ramp indices out of range");
  const auto& slices = track_->slices;
  auto record = [&](std::size_t k) {
    if (frames == nullptr) return;
    frames->push_back({slices[k].s, t_offset_us + anneal_time_us * (slices[k].s - slices[from].s),
                       state.populations(), state.trace()});
  };
  if (frames != nullptr && (frames->empty() || frames->back().s != slices[from].s)) record(from);
  double hint = 0.0;
  for (std::size_t k = from; k < to; ++k) {
    const double dt_ns = 1e3 * anneal_time_us * (slices[k + 1].s - slices[k].s);
    dissipate_for(state, k, 0.5 * dt_ns, hint);
    coherent_step(state, k + 1, dt_ns);
    dissipate_for(state, k + 1, 0.5 * dt_ns, hint);
    record(k + 1);
  }
}

void AmePropagator::hold(TruncatedDensityMatrix& state, std::size_t index, double duration_us) const {
  if (!(duration_us >= 0.0)) throw InputError("pause duration must be nonnegative");
  if (duration_us == 0.0) return;
  const double t_ns = duration_us * 1e3;
  const auto& gen = generators_.at(index);
  state.rho = gen.dissipate_exactly(state.rho, t_ns);
  gen.rotate_phases(state.rho, t_ns);
}

double AmePropagator::ground_probability(const TruncatedDensityMatrix& state) const {
  double p = 0.0;
  for (int a = 0; a < track_->ground_multiplicity; ++a) p += state.rho(a, a).real();
  return p;
}

AmeResult AmePropagator::evolve(const AnnealPlan& plan) const {
  AmeResult out;
  auto state = initial_state();
  std::vector<AmeFrame>* frames = options_.record_trajectory ? &out.trajectory : nullptr;
  const std::size_t last = track_->slices.size() - 1;
  const double t_a = plan.anneal_time();
  if (plan.has_pause() && plan.pause_duration() > 0.0) {
    const std::size_t p = track_->index_of(*plan.pause_location());
    ramp(state, 0, p, t_a, 0.0, frames);
    hold(state, p, plan.pause_duration());
    const double resume = t_a * track_->slices[p].s + plan.pause_duration();
    if (frames != nullptr) {
      frames->push_back({state.s, resume, state.populations(), state.trace()});
    }
    ramp(state, p, last, t_a, resume, frames);
  } else {
    ramp(state, 0, last, t_a, 0.0, frames);
  }
  out.ground_probability = ground_probability(state);
  out.leakage = 1.0 - state.trace();
  out.final_state = std::move(state);
  return out;
}

std::vector<std::vector<double>> AmePropagator::pause_scan(
    double anneal_time_us, const std::vector<double>& pause_locations,
    const std::vector<double>& pause_durations_us) const {
  std::vector<std::size_t> index;
  for (double sp : pause_locations) index.push_back(track_->index_of(sp));
  std::vector<std::size_t> order(index.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return index[x] < index[y]; });

  const std::size_t last = track_->slices.size() - 1;
  std::vector<std::vector<double>> out(pause_locations.size(),
                                       std::vector<double>(pause_durations_us.size()));
  auto prefix = initial_state();
  std::size_t at = 0;
  for (std::size_t k : order) {
    ramp(prefix, at, index[k], anneal_time_us, 0.0, nullptr);
    at = index[k];
    for (std::size_t j = 0; j < pause_durations_us.size(); ++j) {
      auto state = prefix;
      hold(state, at, pause_durations_us[j]);
      ramp(state, at, last, anneal_time_us, 0.0, nullptr);
      out[k][j] = ground_probability(state);
    }
  }
  return out;
}

Eigen::MatrixXd transport_from_overlap(const Eigen::MatrixXd& overlap) {
  const Eigen::Index m = overlap.rows();
  if (overlap.cols() != m) throw InputError("overlap matrix must be square");
  std::vector<Eigen::Index> rows, cols;
  for (Eigen::Index k = 0; k < m; ++k) {
    if (overlap.row(k).squaredNorm() >= 0.5) rows.push_back(k);
    if (overlap.col(k).squaredNorm() >= 0.5) cols.push_back(k);
  }
  if (rows.size() != cols.size()) {
    throw NumericalError("kept levels changed inconsistently between slices; refine the grid");
  }
  const auto k = static_cast<Eigen::Index>(rows.size());
  if (k == 0) return Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd block(k, k);
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < k; ++c) block(r, c) = overlap(rows[r], cols[c]);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(block, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::MatrixXd polar = svd.matrixU() * svd.matrixV().transpose();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < k; ++c) out(rows[r], cols[c]) = polar(r, c);
  }
  return out;
}

FrameStep frame_step(const SpectrumSlice& previous, const SpectrumSlice& next) {
  const Eigen::MatrixXd t = transport_from_overlap(next.overlap);
  const Eigen::Index m = t.rows();
  if (previous.levels() != m) throw InputError("slices keep different level counts");
  std::vector<int> rows, cols;
  for (Eigen::Index k = 0; k < m; ++k) {
    if (t.row(k).squaredNorm() > 0.0) rows.push_back(static_cast<int>(k));
    if (t.col(k).squaredNorm() > 0.0) cols.push_back(static_cast<int>(k));
  }
  // Match each tracked level to its continuation, largest overlaps first.
  FrameStep st;
  const auto n = rows.size();
  std::vector<bool> row_done(n, false), col_done(n, false);
  std::vector<int> match(n, -1);
  struct Entry {
    double weight;
    std::size_t r, c;
  };
  std::vector<Entry> entries;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) entries.push_back({std::abs(t(rows[r], cols[c])), r, c});
  }
  std::sort(entries.begin(), entries.end(),
            [](const Entry& x, const Entry& y) { return x.weight > y.weight; });
  for (const auto& e : entries) {
    if (row_done[e.r] || col_done[e.c]) continue;
    row_done[e.r] = col_done[e.c] = true;
    match[e.r] = static_cast<int>(e.c);
  }
  const auto k = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd rotation(k, k);
  for (std::size_t r = 0; r < n; ++r) {
    st.from.push_back(rows[r]);
    st.to.push_back(cols[match[r]]);
    st.sign.push_back(t(rows[r], cols[match[r]]) < 0.0 ? -1.0 : 1.0);
  }
  st.mid_energy.resize(k);
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < k; ++c) rotation(r, c) = t(st.from[r], st.to[c]) * st.sign[c];
    st.mid_energy[r] = 0.5 * (previous.energies[st.from[r]] + next.energies[st.to[r]]);
  }
  if (k == 0) {
    st.rotation_log.resize(0, 0);
    return st;
  }
  // det = -1 would need a reflection; the sign fix makes the diagonal
  // positive, which rules that out for any rotation of moderate angle.
  Eigen::MatrixXd x = rotation.log();
  x = 0.5 * (x - x.transpose()).eval();
  if (!x.allFinite() || (x.exp() - rotation).cwiseAbs().maxCoeff() > 1e-8) {
    throw NumericalError("basis rotation between slices is too large; refine the grid");
  }
  st.rotation_log = std::move(x);
  return st;
}

AmeResult ame_evolve(const SpectrumTrack& track, const AnnealPlan& plan, const BathParams& bath,
                     const AmeOptions& options) {
  return AmePropagator(track, bath, options).evolve(plan);
}

std::string format_trajectory_csv(const std::vector<AmeFrame>& frames) {
  std::ostringstream out;
  out << std::setprecision(17);
  const Eigen::Index m = frames.empty() ? 0 : frames.front().populations.size();
  out << "s,t";
  for (Eigen::Index a = 0; a < m; ++a) out << ",P" << a;
  out << ",trace\n";
  for (const auto& f : frames) {
    out << f.s << ',' << f.t_us;
    for (Eigen::Index a = 0; a < m; ++a) out << ',' << f.populations[a];
    out << ',' << f.trace << '\n';
  }
  return out.str();
}

std::string format_spectrum_csv(const std::vector<SpectrumSlice>& slices, int levels) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << 's';
  for (int a = 0; a < levels; ++a) out << ",E" << a;
  out << '\n';
  for (const auto& sl : slices) {
    if (sl.levels() < levels) throw InputError("slice holds fewer levels than requested");
    out << sl.s;
    for (int a = 0; a < levels; ++a) out << ',' << sl.energies[a];
    out << '\n';
  }
  return out.str();
}

}  // namespace pauselab::quantum
