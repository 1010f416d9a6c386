#pragma once

#include <span>
#include <string>
#include <vector>

namespace pauselab::analysis {

struct PauseSample {
  double s_pause;
  double t_pause;
  double p0;
};

enum class TargetMode {
  interpolate,    // straight line between the samples either side of P*
  median_window,  // median (and IQR) of pause times with |P0 - P*| <= window
};

struct TargetTime {
  double s_pause = 0.0;
  double t_pause = 0.0;
  double iqr_low = 0.0;   // median_window only; equals t_pause otherwise
  double iqr_high = 0.0;
  int samples = 0;
  bool monotone = true;   // P0 nondecreasing in t_p at this s_p
};

struct TargetOmission {
  double s_pause;
  std::string reason;
};

struct TargetResult {
  std::vector<TargetTime> points;
  std::vector<TargetOmission> omitted;
};

/// Pause time needed to reach `target` at each pause location. Samples are
/// grouped by exact s_p value.
TargetResult pause_time_to_target(std::span<const PauseSample> samples, double target,
                                  TargetMode mode = TargetMode::interpolate,
                                  double window = 0.01);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y = intercept + slope x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Fits ln t* = intercept + slope s_p over the supplied target times.
LineFit fit_log_target_times(std::span<const TargetTime> points);

}  // namespace pauselab::analysis
