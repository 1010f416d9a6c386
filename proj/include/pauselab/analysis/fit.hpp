#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "pauselab/units.hpp"

namespace pauselab::analysis {

struct DecayPoint {
  double t_pause;
  double p0;
  double shots = 0.0;  // sample count behind p0; 0 when exact/unknown
};

/// P0(t) = alpha - beta exp(-gamma t).
struct DecayFit {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double residual_rms = 0.0;
  bool at_bound = false;  // a probability bound was active and clamped
  bool converged = true;

  double predict(double t) const;
  double p_anneal() const { return alpha - beta; }
};

/// P0(t) = alpha - beta1 exp(-gamma1 t) - beta2 exp(-gamma2 t), gamma1 > gamma2.
struct TwoScaleFit {
  double alpha = 0.0;
  double beta1 = 0.0;
  double gamma1 = 0.0;
  double beta2 = 0.0;
  double gamma2 = 0.0;
  double residual_rms = 0.0;
  bool at_bound = false;
  bool converged = true;

  double predict(double t) const;
};

enum class FitMode { single, two_scale, fixed_alpha };

/// Multi-start over log-spaced rates (linear solve for the amplitudes at
/// each start), then Levenberg-Marquardt on all parameters.
DecayFit fit_single_decay(std::span<const DecayPoint> points);
TwoScaleFit fit_two_scale_decay(std::span<const DecayPoint> points);

/// alpha pinned to the mean of the `plateau_points` longest pauses and
/// beta = alpha - P0 at the shortest pause; only gamma is fitted.
DecayFit fit_fixed_alpha_decay(std::span<const DecayPoint> points, int plateau_points = 3);

/// Same model as the fixed-alpha fit but with gamma supplied externally.
DecayFit fixed_alpha_with_rate(std::span<const DecayPoint> points, double gamma,
                               int plateau_points = 3);

std::variant<DecayFit, TwoScaleFit> fit_decay(std::span<const DecayPoint> points, FitMode mode);

template <class Fit>
std::vector<double> fit_residuals(const Fit& fit, std::span<const DecayPoint> points) {
  std::vector<double> r;
  r.reserve(points.size());
  for (const auto& p : points) r.push_back(p.p0 - fit.predict(p.t_pause));
  return r;
}

/// Wald-Wolfowitz runs test on residual signs (in the order given; callers
/// pass residuals sorted by pause time). Zero residuals are skipped.
struct RunsTest {
  int runs = 0;
  int positive = 0;
  int negative = 0;
  double z = 0.0;
  double p_value = 1.0;  // two-sided, normal approximation

  bool rejects_randomness(double level = 0.05) const { return p_value < level; }
};

RunsTest runs_test(std::span<const double> residuals);

struct DecayBootstrap {
  DecayFit estimate;
  std::array<double, 3> stddev{};  // alpha, beta, gamma
  std::array<double, 3> low{};     // 2.5th percentile
  std::array<double, 3> high{};    // 97.5th percentile
  int resamples = 0;
};

/// Parametric binomial bootstrap: each resample draws Binomial(shots, p0)
/// per point and refits. Every point needs shots > 0.
DecayBootstrap bootstrap_single_decay(std::span<const DecayPoint> points, int resamples,
                                      std::uint64_t seed);

}  // namespace pauselab::analysis
