#pragma once

#include <vector>

#include "pauselab/units.hpp"

namespace pauselab::analysis {

/// Single-timescale pause model: P0(t_p) = P_G - (P_G - P_a) exp(-gamma t_p).
double p0_model(double p_gibbs, double p_anneal, double gamma, double t_pause);

/// Expected time to observe the ground state with 99% confidence,
/// ln(0.01) / ln(1 - P0) * (t_a + t_p). Throws std::domain_error unless
/// 0 < P0 < 1.
double tts(double p0, double t_anneal, double t_pause);

/// d TTS / d t_p of tts(p0_model(...), t_a, t_p), in closed form.
double tts_slope(double p_gibbs, double p_anneal, double gamma, double t_anneal,
                 double t_pause);

struct TtsCondition {
  Rate gamma_min;          // decay rate a pause must exceed to reduce TTS
  bool satisfiable = true; // false when P_G <= P_a: no finite rate qualifies
};

/// gamma_min = -(1 - P_a) ln(1 - P_a) / (t_a (P_G - P_a)).
TtsCondition tts_condition(double p_gibbs, double p_anneal, double t_anneal, TimeUnit unit);

/// True iff `gamma` beats the condition. Throws InputError on mixed units.
bool pause_reduces_tts(const Rate& gamma, const TtsCondition& condition);

struct OptimalPause {
  double t_pause = 0.0;
  double tts = 0.0;
  bool interior = false;  // false: TTS is minimized by not pausing
};

/// Root of d TTS / d t_p on [0, 20/gamma] (extended if not yet bracketed).
OptimalPause optimal_pause(double p_gibbs, double p_anneal, double gamma, double t_anneal);

struct TtsCurvePoint {
  double t_pause;
  double p0;
  double tts;
};

struct TtsReport {
  double p_gibbs = 0.0;
  double p_anneal = 0.0;
  double t_anneal = 0.0;
  Rate gamma;
  TtsCondition condition;
  OptimalPause optimum;
  std::vector<TtsCurvePoint> curve;
  bool reduces = false;
};

/// Assembles the verdict and a TTS(t_p) curve on `curve_points` samples of
/// [0, t_max] (t_max defaults to 5 / gamma).
TtsReport make_tts_report(double p_gibbs, double p_anneal, double t_anneal, const Rate& gamma,
                          int curve_points = 200, double t_max = 0.0);

}  // namespace pauselab::analysis
