#include "pauselab/analysis/fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <unsupported/Eigen/NonLinearOptimization>

#include "pauselab/error.hpp"
#include "pauselab/rng.hpp"

namespace pauselab::analysis {

double DecayFit::predict(double t) const { return alpha - beta * std::exp(-gamma * t); }

double TwoScaleFit::predict(double t) const {
  return alpha - beta1 * std::exp(-gamma1 * t) - beta2 * std::exp(-gamma2 * t);
}

namespace {

struct Samples {
  Eigen::VectorXd t;
  Eigen::VectorXd p;
};

Samples validate(std::span<const DecayPoint> points, std::size_t min_points) {
  if (points.size() < min_points) {
    throw InputError("decay fit needs at least " + std::to_string(min_points) + " points, got " +
                     std::to_string(points.size()));
  }
  std::set<double> seen;
  Samples s{Eigen::VectorXd(points.size()), Eigen::VectorXd(points.size())};
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto& pt = points[k];
    if (!(pt.t_pause >= 0.0) || !std::isfinite(pt.t_pause)) {
      throw InputError("pause times must be finite and nonnegative");
    }
    if (!seen.insert(pt.t_pause).second) throw InputError("pause times must be distinct");
    if (!std::isfinite(pt.p0)) throw InputError("non-finite probability in fit input");
    s.t[k] = pt.t_pause;
    s.p[k] = pt.p0;
  }
  return s;
}

// Log-spaced rates bracketing everything the sampled pause times can resolve.
std::vector<double> rate_grid(const Eigen::VectorXd& t, int count) {
  double t_min = std::numeric_limits<double>::infinity();
  for (double v : t) {
    if (v > 0.0) t_min = std::min(t_min, v);
  }
  const double t_max = t.maxCoeff();
  if (!(t_max > 0.0)) throw InputError("decay fit needs at least one positive pause time");
  const double lo = std::log(1e-2 / t_max);
  const double hi = std::log(1e2 / t_min);
  std::vector<double> g(count);
  for (int k = 0; k < count; ++k) g[k] = std::exp(lo + (hi - lo) * k / (count - 1));
  return g;
}

// Columns [1, -exp(-g_1 t), -exp(-g_2 t), ...]; returns amplitudes and SSE.
std::pair<Eigen::VectorXd, double> solve_amplitudes(const Samples& s, std::span<const double> rates) {
  Eigen::MatrixXd design(s.t.size(), 1 + rates.size());
  design.col(0).setOnes();
  for (std::size_t r = 0; r < rates.size(); ++r) {
    design.col(1 + r) = -(-rates[r] * s.t.array()).exp().matrix();
  }
  Eigen::VectorXd coef = design.colPivHouseholderQr().solve(s.p);
  return {coef, (design * coef - s.p).squaredNorm()};
}

struct LmBase {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  const Samples* s;
  int n_inputs;
  int inputs() const { return n_inputs; }
  int values() const { return static_cast<int>(s->t.size()); }
};

// x = (alpha, beta_1, log gamma_1, beta_2, log gamma_2, ...)
struct ExpSumFunctor : LmBase {
  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
    f = Eigen::VectorXd::Constant(values(), x[0]) - s->p;
    for (int k = 1; k + 1 < n_inputs; k += 2) {
      f -= x[k] * (-std::exp(x[k + 1]) * s->t.array()).exp().matrix();
    }
    return 0;
  }
  int df(const Eigen::VectorXd& x, Eigen::MatrixXd& jac) const {
    jac.resize(values(), n_inputs);
    jac.col(0).setOnes();
    for (int k = 1; k + 1 < n_inputs; k += 2) {
      const double g = std::exp(x[k + 1]);
      const Eigen::ArrayXd e = (-g * s->t.array()).exp();
      jac.col(k) = -e.matrix();
      jac.col(k + 1) = (x[k] * g * s->t.array() * e).matrix();
    }
    return 0;
  }
};

// Only log gamma free: f = alpha - beta exp(-gamma t) - p.
struct RateOnlyFunctor : LmBase {
  double alpha = 0.0;
  double beta = 0.0;
  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
    const double g = std::exp(x[0]);
    f = (alpha - beta * (-g * s->t.array()).exp()).matrix() - s->p;
    return 0;
  }
  int df(const Eigen::VectorXd& x, Eigen::MatrixXd& jac) const {
    const double g = std::exp(x[0]);
    jac.resize(values(), 1);
    jac.col(0) = (beta * g * s->t.array() * (-g * s->t.array()).exp()).matrix();
    return 0;
  }
};

template <class Functor>
bool run_lm(Functor& functor, Eigen::VectorXd& x) {
  Eigen::LevenbergMarquardt<Functor> lm(functor);
  lm.parameters.ftol = 1e-15;
  lm.parameters.xtol = 1e-15;
  lm.parameters.maxfev = 4000;
  const auto status = lm.minimize(x);
  using S = Eigen::LevenbergMarquardtSpace::Status;
  return status == S::RelativeReductionTooSmall || status == S::RelativeErrorTooSmall ||
         status == S::RelativeErrorAndReductionTooSmall || status == S::CosinusTooSmall ||
         status == S::FtolTooSmall || status == S::XtolTooSmall || status == S::GtolTooSmall;
}

double rms(const Samples& s, const auto& fit) {
  double sse = 0.0;
  for (Eigen::Index k = 0; k < s.t.size(); ++k) {
    const double r = s.p[k] - fit.predict(s.t[k]);
    sse += r * r;
  }
  return std::sqrt(sse / static_cast<double>(s.t.size()));
}

void clamp_probabilities(double& alpha, double& intercept_gap, bool& at_bound) {
  // intercept_gap is beta (single) or beta1 + beta2 (two-scale).
  if (alpha > 1.0 || alpha < 0.0) {
    alpha = std::clamp(alpha, 0.0, 1.0);
    at_bound = true;
  }
  if (alpha - intercept_gap < 0.0 || alpha - intercept_gap > 1.0) {
    intercept_gap = std::clamp(intercept_gap, alpha - 1.0, alpha);
    at_bound = true;
  }
}

}  // namespace

DecayFit fit_single_decay(std::span<const DecayPoint> points) {
  const auto s = validate(points, 4);
  const auto grid = rate_grid(s.t, 160);
  double best_sse = std::numeric_limits<double>::infinity();
  Eigen::VectorXd x(3);
  for (double g : grid) {
    const double rates[] = {g};
    const auto [coef, sse] = solve_amplitudes(s, rates);
    if (sse < best_sse) {
      best_sse = sse;
      x << coef[0], coef[1], std::log(g);
    }
  }
  ExpSumFunctor functor;
  functor.s = &s;
  functor.n_inputs = 3;
  DecayFit fit;
  fit.converged = run_lm(functor, x);
  fit.alpha = x[0];
  fit.beta = x[1];
  fit.gamma = std::exp(x[2]);
  clamp_probabilities(fit.alpha, fit.beta, fit.at_bound);
  fit.residual_rms = rms(s, fit);
  return fit;
}

TwoScaleFit fit_two_scale_decay(std::span<const DecayPoint> points) {
  const auto s = validate(points, 6);
  const auto grid = rate_grid(s.t, 60);
  double best_sse = std::numeric_limits<double>::infinity();
  Eigen::VectorXd x(5);
  for (std::size_t a = 0; a < grid.size(); ++a) {
    for (std::size_t b = 0; b < a; ++b) {
      const double rates[] = {grid[a], grid[b]};
      const auto [coef, sse] = solve_amplitudes(s, rates);
      if (sse < best_sse) {
        best_sse = sse;
        x << coef[0], coef[1], std::log(grid[a]), coef[2], std::log(grid[b]);
      }
    }
  }
  ExpSumFunctor functor;
  functor.s = &s;
  functor.n_inputs = 5;
  TwoScaleFit fit;
  fit.converged = run_lm(functor, x);
  fit.alpha = x[0];
  fit.beta1 = x[1];
  fit.gamma1 = std::exp(x[2]);
  fit.beta2 = x[3];
  fit.gamma2 = std::exp(x[4]);
  if (fit.gamma1 < fit.gamma2) {
    std::swap(fit.gamma1, fit.gamma2);
    std::swap(fit.beta1, fit.beta2);
  }
  double total = fit.beta1 + fit.beta2;
  const double before = total;
  clamp_probabilities(fit.alpha, total, fit.at_bound);
  if (total != before) fit.beta2 = total - fit.beta1;
  fit.residual_rms = rms(s, fit);
  return fit;
}

namespace {

std::pair<double, double> plateau_anchors(std::span<const DecayPoint> points, int plateau_points) {
  std::vector<DecayPoint> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const DecayPoint& a, const DecayPoint& b) { return a.t_pause < b.t_pause; });
  const int k = std::clamp(plateau_points, 1, static_cast<int>(sorted.size()) - 1);
  double alpha = 0.0;
  for (int i = 0; i < k; ++i) alpha += sorted[sorted.size() - 1 - i].p0;
  alpha /= k;
  return {alpha, alpha - sorted.front().p0};
}

}  // namespace

DecayFit fit_fixed_alpha_decay(std::span<const DecayPoint> points, int plateau_points) {
  const auto s = validate(points, 4);
  const auto [alpha, beta] = plateau_anchors(points, plateau_points);
  RateOnlyFunctor functor;
  functor.s = &s;
  functor.n_inputs = 1;
  functor.alpha = alpha;
  functor.beta = beta;
  Eigen::VectorXd x(1);
  double best_sse = std::numeric_limits<double>::infinity();
  for (double g : rate_grid(s.t, 160)) {
    Eigen::VectorXd probe(1), f;
    probe[0] = std::log(g);
    functor(probe, f);
    if (f.squaredNorm() < best_sse) {
      best_sse = f.squaredNorm();
      x = probe;
    }
  }
  DecayFit fit;
  fit.converged = run_lm(functor, x);
  fit.alpha = alpha;
  fit.beta = beta;
  fit.gamma = std::exp(x[0]);
  clamp_probabilities(fit.alpha, fit.beta, fit.at_bound);
  fit.residual_rms = rms(s, fit);
  return fit;
}

DecayFit fixed_alpha_with_rate(std::span<const DecayPoint> points, double gamma,
                               int plateau_points) {
  const auto s = validate(points, 2);
  if (!(gamma > 0.0)) throw InputError("rate must be positive");
  const auto [alpha, beta] = plateau_anchors(points, plateau_points);
  DecayFit fit{alpha, beta, gamma};
  clamp_probabilities(fit.alpha, fit.beta, fit.at_bound);
  fit.residual_rms = rms(s, fit);
  return fit;
}

std::variant<DecayFit, TwoScaleFit> fit_decay(std::span<const DecayPoint> points, FitMode mode) {
  switch (mode) {
    case FitMode::single:
      return fit_single_decay(points);
    case FitMode::two_scale:
      return fit_two_scale_decay(points);
    case FitMode::fixed_alpha:
      return fit_fixed_alpha_decay(points);
  }
  throw InputError("unknown fit mode");
}

RunsTest runs_test(std::span<const double> residuals) {
  RunsTest out;
  int previous = 0;
  for (double r : residuals) {
    const int sign = r > 0.0 ? 1 : r < 0.0 ? -1 : 0;
    if (sign == 0) continue;
    if (sign > 0) ++out.positive; else ++out.negative;
    if (sign != previous) ++out.runs;
    previous = sign;
  }
  const double n1 = out.positive;
  const double n2 = out.negative;
  const double n = n1 + n2;
  if (n1 == 0 || n2 == 0 || n < 3) {
    out.z = 0.0;
    out.p_value = 1.0;
    return out;
  }
  const double mean = 2.0 * n1 * n2 / n + 1.0;
  const double var = 2.0 * n1 * n2 * (2.0 * n1 * n2 - n) / (n * n * (n - 1.0));
  out.z = (out.runs - mean) / std::sqrt(var);
  out.p_value = std::erfc(std::abs(out.z) / std::sqrt(2.0));
  return out;
}

DecayBootstrap bootstrap_single_decay(std::span<const DecayPoint> points, int resamples,
                                      std::uint64_t seed) {
  if (resamples < 2) throw InputError("bootstrap needs at least two resamples");
  for (const auto& p : points) {
    if (!(p.shots > 0.0)) throw InputError("bootstrap needs a positive shot count on every point");
  }
  DecayBootstrap out;
  out.estimate = fit_single_decay(points);
  out.resamples = resamples;
  std::array<std::vector<double>, 3> draws;
  std::vector<DecayPoint> resampled(points.begin(), points.end());
  for (int r = 0; r < resamples; ++r) {
    auto engine = make_engine(seed, {static_cast<std::uint64_t>(r)});
    for (std::size_t k = 0; k < resampled.size(); ++k) {
      const auto shots = static_cast<long long>(std::llround(points[k].shots));
      const double p = std::clamp(points[k].p0, 0.0, 1.0);
      std::binomial_distribution<long long> binom(shots, p);
      resampled[k].p0 = static_cast<double>(binom(engine)) / static_cast<double>(shots);
    }
    const auto fit = fit_single_decay(resampled);
    draws[0].push_back(fit.alpha);
    draws[1].push_back(fit.beta);
    draws[2].push_back(fit.gamma);
  }
  for (int k = 0; k < 3; ++k) {
    auto& d = draws[k];
    const double mean = std::accumulate(d.begin(), d.end(), 0.0) / d.size();
    double var = 0.0;
    for (double v : d) var += (v - mean) * (v - mean);
    out.stddev[k] = std::sqrt(var / (d.size() - 1));
    std::sort(d.begin(), d.end());
    out.low[k] = d[static_cast<std::size_t>(0.025 * (d.size() - 1))];
    out.high[k] = d[static_cast<std::size_t>(0.975 * (d.size() - 1))];
  }
  return out;
}

}  // namespace pauselab::analysis
