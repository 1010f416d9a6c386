#include "pauselab/schedule.hpp"

#include <algorithm>
// pchip.hpp calls isnan unqualified; boost::math::isnan must be visible first.
#include <boost/math/special_functions/fpclassify.hpp>
#include <boost/math/interpolators/pchip.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pauselab/error.hpp"

namespace pauselab {

namespace {

std::function<double(double)> make_interpolant(const std::vector<SchedulePoint>& pts,
                                               double SchedulePoint::*field) {
  std::vector<double> x, y;
  x.reserve(pts.size());
  y.reserve(pts.size());
  for (const auto& p : pts) {
    x.push_back(p.s);
    y.push_back(p.*field);
  }
  if (pts.size() >= 4) {
    return boost::math::interpolators::pchip<std::vector<double>>(std::move(x), std::move(y));
  }
  // Too few nodes for the cubic; piecewise linear is also shape preserving.
  return [x = std::move(x), y = std::move(y)](double s) {
    auto it = std::upper_bound(x.begin(), x.end(), s);
    std::size_t k = std::clamp<std::size_t>(it - x.begin(), 1, x.size() - 1) - 1;
    const double t = (s - x[k]) / (x[k + 1] - x[k]);
    return t == 0.0 ? y[k] : t == 1.0 ? y[k + 1] : y[k] + t * (y[k + 1] - y[k]);
  };
}

}  // namespace

AnnealSchedule::AnnealSchedule(std::vector<SchedulePoint> points, Provenance provenance)
    : points_(std::move(points)), provenance_(provenance) {
  if (points_.size() < 2) throw InputError("schedule needs at least two points");
  if (points_.front().s != 0.0 || points_.back().s != 1.0) {
    throw InputError("schedule must span s = 0 to s = 1");
  }
  for (std::size_t k = 0; k < points_.size(); ++k) {
    const auto& p = points_[k];
    if (!(p.a_ghz >= 0.0) || !(p.b_ghz >= 0.0) || !std::isfinite(p.a_ghz) ||
        !std::isfinite(p.b_ghz)) {
      throw InputError("schedule values must be finite and nonnegative (row " +
                       std::to_string(k) + ")");
    }
    if (k == 0) continue;
    const auto& q = points_[k - 1];
    if (!(p.s > q.s)) throw InputError("schedule s must be strictly increasing (row " + std::to_string(k) + ")");
    if (p.a_ghz > q.a_ghz) throw InputError("A(s) must be nonincreasing (row " + std::to_string(k) + ")");
    if (p.b_ghz < q.b_ghz) throw InputError("B(s) must be nondecreasing (row " + std::to_string(k) + ")");
  }
  a_ = make_interpolant(points_, &SchedulePoint::a_ghz);
  b_ = make_interpolant(points_, &SchedulePoint::b_ghz);
}

ScheduleValues AnnealSchedule::eval(double s) const {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw InputError("anneal parameter s = " + std::to_string(s) + " outside [0, 1]");
  }
  // Monotone cubics stay inside the data range up to rounding.
  return {std::max(0.0, a_(s)), std::max(0.0, b_(s))};
}

std::string_view AnnealSchedule::provenance_name() const noexcept {
  return provenance_ == Provenance::loaded ? "loaded" : "synthetic";
}

AnnealSchedule synthetic_schedule(const SyntheticScheduleParams& p) {
  if (p.points < 4) throw InputError("synthetic schedule needs at least 4 points");
  auto b_of = [&](double s) { return p.b0_ghz + (p.b1_ghz - p.b0_ghz) * s * s; };
  const double a0 = b_of(p.crossing) * std::exp(p.a1 * p.crossing + p.a2 * p.crossing * p.crossing);
  std::vector<SchedulePoint> pts;
  pts.reserve(p.points);
  for (int k = 0; k < p.points; ++k) {
    const double s = k == p.points - 1 ? 1.0 : static_cast<double>(k) / (p.points - 1);
    pts.push_back({s, a0 * std::exp(-p.a1 * s - p.a2 * s * s), b_of(s)});
  }
  return AnnealSchedule(std::move(pts), AnnealSchedule::Provenance::synthetic);
}

namespace {

void append_number(std::string& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

double parse_field(std::string_view token, std::size_t row) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw InputError("schedule row " + std::to_string(row) + ": bad number '" +
                     std::string(token) + "'");
  }
  return v;
}

}  // namespace

std::string format_schedule_csv(const AnnealSchedule& schedule) {
  std::string out = "s,A_GHz,B_GHz\n";
  for (const auto& p : schedule.points()) {
    append_number(out, p.s);
    out += ',';
    append_number(out, p.a_ghz);
    out += ',';
    append_number(out, p.b_ghz);
    out += '\n';
  }
  return out;
}

AnnealSchedule parse_schedule_csv(std::string_view text) {
  std::vector<SchedulePoint> pts;
  std::size_t row = 0;
  bool header_seen = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    auto line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != "s,A_GHz,B_GHz") {
        throw InputError("schedule CSV must start with header 's,A_GHz,B_GHz'");
      }
      header_seen = true;
      continue;
    }
    ++row;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos) {
      throw InputError("schedule row " + std::to_string(row) + " needs three columns");
    }
    pts.push_back({parse_field(line.substr(0, c1), row),
                   parse_field(line.substr(c1 + 1, c2 - c1 - 1), row),
                   parse_field(line.substr(c2 + 1), row)});
  }
  if (!header_seen) throw InputError("empty schedule file");
  return AnnealSchedule(std::move(pts), AnnealSchedule::Provenance::loaded);
}

AnnealSchedule load_schedule(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open schedule file: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_schedule_csv(buffer.str());
}

void save_schedule(const AnnealSchedule& schedule, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write schedule file: " + path.string());
  out << format_schedule_csv(schedule);
}

AnnealPlan::AnnealPlan(double anneal_time) : t_a_(anneal_time) {
  if (!(anneal_time > 0.0)) throw InputError("anneal time must be positive");
}

AnnealPlan::AnnealPlan(double anneal_time, double pause_location, double pause_duration)
    : AnnealPlan(anneal_time) {
  if (!(pause_location >= 0.0 && pause_location <= 1.0)) {
    throw InputError("pause location must lie in [0, 1]");
  }
  if (!(pause_duration >= 0.0)) throw InputError("pause duration must be nonnegative");
  if (pause_duration > 0.0) {
    s_p_ = pause_location;
    t_p_ = pause_duration;
  }
}

double AnnealPlan::s_of_t(double t) const {
  const double total = total_time();
  if (!(t >= 0.0 && t <= total)) {
    throw InputError("time " + std::to_string(t) + " outside [0, " + std::to_string(total) + "]");
  }
  if (!s_p_) return std::min(1.0, t / t_a_);
  const double t_in = *s_p_ * t_a_;
  if (t <= t_in) return t / t_a_;
  if (t <= t_in + t_p_) return *s_p_;
  if (t == total) return 1.0;
  return std::min(1.0, *s_p_ + (t - t_in - t_p_) / t_a_);
}

}  // namespace pauselab
