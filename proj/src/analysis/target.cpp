#include "pauselab/analysis/target.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "pauselab/error.hpp"

namespace pauselab::analysis {

namespace {

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * (v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - lo) * (v[hi] - v[lo]);
}

}  // namespace

TargetResult pause_time_to_target(std::span<const PauseSample> samples, double target,
                                  TargetMode mode, double window) {
  if (!(target > 0.0 && target < 1.0)) throw InputError("target probability must lie in (0, 1)");
  std::map<double, std::vector<PauseSample>> groups;
  for (const auto& s : samples) groups[s.s_pause].push_back(s);

  TargetResult out;
  for (auto& [s_p, group] : groups) {
    std::sort(group.begin(), group.end(),
              [](const PauseSample& a, const PauseSample& b) { return a.t_pause < b.t_pause; });
    bool monotone = true;
    for (std::size_t k = 1; k < group.size(); ++k) {
      if (group[k].p0 < group[k - 1].p0) monotone = false;
    }

    if (mode == TargetMode::median_window) {
      std::vector<double> times;
      for (const auto& g : group) {
        if (std::abs(g.p0 - target) <= window) times.push_back(g.t_pause);
      }
      if (times.empty()) {
        out.omitted.push_back({s_p, "no samples within the target window"});
        continue;
      }
      out.points.push_back({s_p, quantile(times, 0.5), quantile(times, 0.25),
                            quantile(times, 0.75), static_cast<int>(times.size()), monotone});
      continue;
    }

    const auto hit = std::find_if(group.begin(), group.end(),
                                  [&](const PauseSample& g) { return g.p0 >= target; });
    if (hit == group.end()) {
      out.omitted.push_back({s_p, "target not reached"});
      continue;
    }
    if (hit == group.begin()) {
      out.omitted.push_back({s_p, "target already met at the shortest pause"});
      continue;
    }
    const auto& a = *(hit - 1);
    const auto& b = *hit;
    const double frac = (target - a.p0) / (b.p0 - a.p0);
    const double t = a.t_pause + frac * (b.t_pause - a.t_pause);
    out.points.push_back({s_p, t, t, t, static_cast<int>(group.size()), monotone});
  }
  return out;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InputError("line fit needs two or more (x, y) pairs");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (sxx == 0.0) throw InputError("line fit needs distinct x values");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

LineFit fit_log_target_times(std::span<const TargetTime> points) {
  std::vector<double> x, y;
  for (const auto& p : points) {
    if (!(p.t_pause > 0.0)) throw InputError("log fit needs positive target times");
    x.push_back(p.s_pause);
    y.push_back(std::log(p.t_pause));
  }
  return fit_line(x, y);
}

}  // namespace pauselab::analysis
