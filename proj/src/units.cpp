#include "pauselab/units.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <string>

#include "pauselab/error.hpp"

namespace pauselab {

Temperature Temperature::from_ghz(double ghz) {
  if (!(ghz > 0.0) || !std::isfinite(ghz)) {
    throw InputError("temperature must be positive, got " + std::to_string(ghz) + " GHz");
  }
  return Temperature(ghz);
}

Temperature Temperature::from_millikelvin(double mk) {
  if (!(mk > 0.0) || !std::isfinite(mk)) {
    throw InputError("temperature must be positive, got " + std::to_string(mk) + " mK");
  }
  return Temperature(mk * 1e-3 * kBoltzmannOverPlanckGHzPerK);
}

Temperature Temperature::parse(std::string_view text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  }
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{}) throw InputError("cannot parse temperature '" + std::string(text) + "'");
  std::string suffix(ptr, static_cast<const char*>(s.data() + s.size()));
  for (auto& c : suffix) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (suffix.empty() || suffix == "mk") return from_millikelvin(value);
  if (suffix == "ghz") return from_ghz(value);
  if (suffix == "k") return from_millikelvin(value * 1e3);
  throw InputError("unknown temperature unit '" + suffix + "'");
}

std::string_view to_string(TimeUnit unit) {
  return unit == TimeUnit::microseconds ? "us" : "sweeps";
}

TimeUnit parse_time_unit(std::string_view text) {
  if (text == "us" || text == "microseconds") return TimeUnit::microseconds;
  if (text == "sweeps") return TimeUnit::sweeps;
  throw InputError("unknown time unit '" + std::string(text) + "'");
}

}  // namespace pauselab
