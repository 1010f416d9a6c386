#pragma once

#include <numbers>
#include <string>
#include <string_view>

namespace pauselab {

// Frequencies in the schedule are in GHz with h = 1. Quantum dynamics run
// with hbar = 1, so an energy of f GHz is an angular frequency 2*pi*f rad/ns.
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// k_B / h in GHz per kelvin (exact SI constants).
inline constexpr double kBoltzmannOverPlanckGHzPerK = 1.380649e-23 / 6.62607015e-34 * 1e-9;

/// Bath/Monte Carlo temperature, stored as k_B T / h in GHz.
class Temperature {
 public:
  static Temperature from_ghz(double ghz);
  static Temperature from_millikelvin(double mk);
  /// Accepts "12mK", "12 mK", "0.25GHz" or a bare number (millikelvin).
  static Temperature parse(std::string_view text);

  double ghz() const noexcept { return ghz_; }
  double millikelvin() const noexcept { return ghz_ / kBoltzmannOverPlanckGHzPerK * 1e3; }
  /// Inverse energy in 1/GHz for Boltzmann factors exp(-beta * E[GHz]).
  double beta_per_ghz() const noexcept { return 1.0 / ghz_; }

  friend bool operator==(const Temperature&, const Temperature&) = default;

 private:
  explicit Temperature(double ghz) : ghz_(ghz) {}
  double ghz_ = 0.0;
};

/// Time axis of a schedule: physical microseconds (AME, hardware) or Monte
/// Carlo sweeps (SVMC).
enum class TimeUnit { microseconds, sweeps };

std::string_view to_string(TimeUnit unit);
TimeUnit parse_time_unit(std::string_view text);

/// A decay rate with its time unit; rates of different units never mix.
struct Rate {
  double value = 0.0;  // per TimeUnit
  TimeUnit unit = TimeUnit::microseconds;
};

}  // namespace pauselab
