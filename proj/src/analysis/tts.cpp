#include "pauselab/analysis/tts.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "pauselab/error.hpp"

namespace pauselab::analysis {

namespace {

const double kLogMiss = std::log(0.01);

void check_probabilities(double p_gibbs, double p_anneal) {
  if (!(p_anneal >= 0.0 && p_anneal <= p_gibbs && p_gibbs <= 1.0)) {
    throw InputError("need 0 <= P_a <= P_G <= 1 (got P_a=" + std::to_string(p_anneal) +
                     ", P_G=" + std::to_string(p_gibbs) + ")");
  }
}

// d TTS / d t_p = ln(0.01) g(t) / ln(1-P)^2 with
//   g(t) = ln(1 - P) + (t_a + t) P'(t) / (1 - P),
// so TTS decreases exactly where g > 0.
double descent_indicator(double pg, double pa, double gamma, double ta, double t) {
  const double decay = std::exp(-gamma * t);
  const double p = pg - (pg - pa) * decay;
  const double dp = gamma * (pg - pa) * decay;
  return std::log1p(-p) + (ta + t) * dp / (1.0 - p);
}

}  // namespace

double p0_model(double p_gibbs, double p_anneal, double gamma, double t_pause) {
  check_probabilities(p_gibbs, p_anneal);
  if (!(gamma >= 0.0)) throw InputError("decay rate must be nonnegative");
  if (std::isinf(t_pause)) return p_gibbs;
  return p_gibbs - (p_gibbs - p_anneal) * std::exp(-gamma * t_pause);
}

double tts(double p0, double t_anneal, double t_pause) {
  if (!(p0 > 0.0 && p0 < 1.0)) {
    throw std::domain_error("TTS needs 0 < P0 < 1, got " + std::to_string(p0));
  }
  return kLogMiss / std::log1p(-p0) * (t_anneal + t_pause);
}

double tts_slope(double p_gibbs, double p_anneal, double gamma, double t_anneal,
                 double t_pause) {
  const double p = p0_model(p_gibbs, p_anneal, gamma, t_pause);
  const double log_fail = std::log1p(-p);
  return kLogMiss * descent_indicator(p_gibbs, p_anneal, gamma, t_anneal, t_pause) /
         (log_fail * log_fail);
}

TtsCondition tts_condition(double p_gibbs, double p_anneal, double t_anneal, TimeUnit unit) {
  if (!(p_anneal > 0.0 && p_anneal < 1.0 && p_gibbs > 0.0 && p_gibbs < 1.0)) {
    throw InputError("tts_condition needs P_a and P_G strictly inside (0, 1)");
  }
  if (!(t_anneal > 0.0)) throw InputError("anneal time must be positive");
  if (p_gibbs <= p_anneal) {
    return {Rate{std::numeric_limits<double>::infinity(), unit}, false};
  }
  const double gamma_min =
      -(1.0 - p_anneal) * std::log1p(-p_anneal) / (t_anneal * (p_gibbs - p_anneal));
  return {Rate{gamma_min, unit}, true};
}

bool pause_reduces_tts(const Rate& gamma, const TtsCondition& condition) {
  if (gamma.unit != condition.gamma_min.unit) {
    throw InputError("rate in " + std::string(to_string(gamma.unit)) +
                     " compared against a condition in " +
                     std::string(to_string(condition.gamma_min.unit)));
  }
  return condition.satisfiable && gamma.value > condition.gamma_min.value;
}

OptimalPause optimal_pause(double p_gibbs, double p_anneal, double gamma, double t_anneal) {
  check_probabilities(p_gibbs, p_anneal);
  OptimalPause out;
  out.tts = tts(p_anneal, t_anneal, 0.0);
  if (!(gamma > 0.0) || p_gibbs <= p_anneal || p_gibbs >= 1.0) return out;
  auto g = [&](double t) { return descent_indicator(p_gibbs, p_anneal, gamma, t_anneal, t); };
  if (!(g(0.0) > 0.0)) return out;

  double hi = 20.0 / gamma;
  while (g(hi) > 0.0) {
    hi *= 2.0;
    if (hi > 1e6 / gamma) return out;  // no sign change: treat as monotone
  }
  boost::uintmax_t max_iter = 200;
  const auto [lo_t, hi_t] = boost::math::tools::toms748_solve(
      g, 0.0, hi, boost::math::tools::eps_tolerance<double>(52), max_iter);
  out.t_pause = 0.5 * (lo_t + hi_t);
  out.tts = tts(p0_model(p_gibbs, p_anneal, gamma, out.t_pause), t_anneal, out.t_pause);
  out.interior = true;
  return out;
}

TtsReport make_tts_report(double p_gibbs, double p_anneal, double t_anneal, const Rate& gamma,
                          int curve_points, double t_max) {
  TtsReport r;
  r.p_gibbs = p_gibbs;
  r.p_anneal = p_anneal;
  r.t_anneal = t_anneal;
  r.gamma = gamma;
  r.condition = tts_condition(p_gibbs, p_anneal, t_anneal, gamma.unit);
  r.reduces = pause_reduces_tts(gamma, r.condition);
  r.optimum = optimal_pause(p_gibbs, p_anneal, gamma.value, t_anneal);
  if (t_max <= 0.0) t_max = gamma.value > 0.0 ? 5.0 / gamma.value : 10.0 * t_anneal;
  for (int k = 0; k < curve_points; ++k) {
    const double t = t_max * k / std::max(1, curve_points - 1);
    const double p = p0_model(p_gibbs, p_anneal, gamma.value, t);
    r.curve.push_back({t, p, tts(p, t_anneal, t)});
  }
  return r;
}

}  // namespace pauselab::analysis
