#pragma once

#include <vector>

namespace adascope {

enum class ScheduleKind { Linear, Cosine };

// Discrete-time noise schedule. Forward indices run t = 0..T with x_T pure
// noise; generation runs T -> 0. Immutable after construction.
//
// Invariants: alpha_bars[0] == 1 exactly, alpha_bars strictly decreasing in
// (0, 1], betas in (0, 1), alpha_bars[t] == alpha_bars[t-1] * alphas[t-1].
struct NoiseSchedule {
  ScheduleKind kind = ScheduleKind::Linear;
  int T = 0;
  std::vector<double> betas;       // size T; betas[t-1] is beta_t
  std::vector<double> alphas;      // size T; 1 - beta_t
  std::vector<double> alpha_bars;  // size T+1

  double beta(int t) const;       // t in 1..T
  double alpha(int t) const;      // t in 1..T
  double alpha_bar(int t) const;  // t in 0..T

  // Reverse-process variance beta_t * (1 - ab_{t-1}) / (1 - ab_t).
  // Exactly 0 at t=1: the final generation step is deterministic.
  double posterior_var(int t) const;
};

// Linear interpolation of beta from beta_min to beta_max over T steps.
// Requires T >= 2 and 0 < beta_min <= beta_max < 1.
NoiseSchedule make_linear_schedule(int T, double beta_min, double beta_max);

// alpha_bar_t = cos^2(((t/T + offset)/(1 + offset)) * pi/2), normalized so
// alpha_bar_0 == 1; betas derived as 1 - ab_t/ab_{t-1} and clamped to 0.999,
// then alpha_bars rebuilt from the clamped betas. Requires T >= 2, offset > 0.
NoiseSchedule make_cosine_schedule(int T, double offset = 0.008);

// Rebuilds a schedule from stored betas (checkpoint loading); the derived
// sequences are recomputed with the same cumulative product as construction,
// so round-trips are bit-exact. Throws ConfigError on invalid betas.
NoiseSchedule schedule_from_betas(ScheduleKind kind, const std::vector<double>& betas);

// Signal-to-noise ratio alpha_bar_t / (1 - alpha_bar_t); +inf sentinel at t=0.
double snr(const NoiseSchedule& s, int t);

// Linear, T=50, endpoints 1e-4 and 0.02 rescaled by 1000/T so total noise
// matches the T=1000 convention (alpha_bar_T stays near pure noise).
NoiseSchedule default_schedule();

}  // namespace adascope
