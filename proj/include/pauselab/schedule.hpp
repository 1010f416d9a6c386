#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pauselab {

struct ScheduleValues {
  double a_ghz;  // transverse-field strength A(s)
  double b_ghz;  // problem-Hamiltonian strength B(s)
};

struct SchedulePoint {
  double s;
  double a_ghz;
  double b_ghz;
};

/// Tabulated annealing functions A(s), B(s) with shape-preserving
/// (monotone piecewise-cubic) interpolation between grid points.
class AnnealSchedule {
 public:
  enum class Provenance { loaded, synthetic };

  /// Requires s strictly increasing from 0 to 1, A nonincreasing,
  /// B nondecreasing, A and B nonnegative.
  AnnealSchedule(std::vector<SchedulePoint> points, Provenance provenance);

  ScheduleValues operator()(double s) const { return eval(s); }
  ScheduleValues eval(double s) const;

  const std::vector<SchedulePoint>& points() const noexcept { return points_; }
  Provenance provenance() const noexcept { return provenance_; }
  std::string_view provenance_name() const noexcept;

 private:
  std::vector<SchedulePoint> points_;
  Provenance provenance_;
  std::function<double(double)> a_;
  std::function<double(double)> b_;
};

/// Closed form A(s) = A0 exp(-a1 s - a2 s^2), B(s) = B0 + (B1 - B0) s^2 with
/// A0 chosen so that A and B cross at `crossing`.
struct SyntheticScheduleParams {
  double b0_ghz = 0.1;
  double b1_ghz = 12.0;
  double a1 = 1.0;
  double a2 = 14.5;
  double crossing = 0.36;
  int points = 1001;  // s = k / (points - 1)
};

AnnealSchedule synthetic_schedule(const SyntheticScheduleParams& params = {});

/// CSV with header `s,A_GHz,B_GHz`. Values are written in shortest
/// round-trip form, so write-then-read is bit-exact.
std::string format_schedule_csv(const AnnealSchedule& schedule);
AnnealSchedule parse_schedule_csv(std::string_view text);
AnnealSchedule load_schedule(const std::filesystem::path& path);
void save_schedule(const AnnealSchedule& schedule, const std::filesystem::path& path);

/// Piecewise-linear s(t): ramp to s_p over s_p * t_a, hold for t_p, ramp to 1
/// over (1 - s_p) * t_a. Times are in microseconds for physical anneals and in
/// sweeps for Monte Carlo.
class AnnealPlan {
 public:
  explicit AnnealPlan(double anneal_time);
  AnnealPlan(double anneal_time, double pause_location, double pause_duration);

  double anneal_time() const noexcept { return t_a_; }
  std::optional<double> pause_location() const noexcept { return s_p_; }
  double pause_duration() const noexcept { return t_p_; }
  bool has_pause() const noexcept { return s_p_.has_value(); }
  double total_time() const noexcept { return t_a_ + t_p_; }

  double s_of_t(double t) const;

 private:
  double t_a_;
  std::optional<double> s_p_;
  double t_p_ = 0.0;
};

}  // namespace pauselab
