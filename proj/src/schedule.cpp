#include "adascope/schedule.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "adascope/errors.hpp"

namespace adascope {

namespace {

void check_t(int t, int lo, int hi, const char* what) {
  if (t < lo || t > hi)
    throw std::out_of_range(std::string(what) + ": t=" + std::to_string(t) + " outside [" +
                            std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

NoiseSchedule finish_from_betas(ScheduleKind kind, int T, std::vector<double> betas) {
  NoiseSchedule s;
  s.kind = kind;
  s.T = T;
  s.betas = std::move(betas);
  s.alphas.resize(T);
  s.alpha_bars.resize(T + 1);
  s.alpha_bars[0] = 1.0;
  for (int t = 1; t <= T; ++t) {
    s.alphas[t - 1] = 1.0 - s.betas[t - 1];
    s.alpha_bars[t] = s.alpha_bars[t - 1] * s.alphas[t - 1];
  }
  return s;
}

}  // namespace

NoiseSchedule schedule_from_betas(ScheduleKind kind, const std::vector<double>& betas) {
  if (betas.size() < 2) throw ConfigError("schedule_from_betas: need at least 2 betas");
  for (double b : betas) {
    if (!(b > 0.0 && b < 1.0)) throw ConfigError("schedule_from_betas: betas must lie in (0, 1)");
  }
  return finish_from_betas(kind, static_cast<int>(betas.size()), betas);
}

double NoiseSchedule::beta(int t) const {
  check_t(t, 1, T, "beta");
  return betas[t - 1];
}

double NoiseSchedule::alpha(int t) const {
  check_t(t, 1, T, "alpha");
  return alphas[t - 1];
}

double NoiseSchedule::alpha_bar(int t) const {
  check_t(t, 0, T, "alpha_bar");
  return alpha_bars[t];
}

double NoiseSchedule::posterior_var(int t) const {
  check_t(t, 1, T, "posterior_var");
  return betas[t - 1] * (1.0 - alpha_bars[t - 1]) / (1.0 - alpha_bars[t]);
}

NoiseSchedule make_linear_schedule(int T, double beta_min, double beta_max) {
  if (T < 2) throw ConfigError("make_linear_schedule: T must be >= 2, got " + std::to_string(T));
  if (!(beta_min > 0.0 && beta_min <= beta_max && beta_max < 1.0))
    throw ConfigError("make_linear_schedule: need 0 < beta_min <= beta_max < 1, got beta_min=" +
                      std::to_string(beta_min) + " beta_max=" + std::to_string(beta_max));
  std::vector<double> betas(T);
  for (int t = 0; t < T; ++t)
    betas[t] = beta_min + (beta_max - beta_min) * static_cast<double>(t) / (T - 1);
  return finish_from_betas(ScheduleKind::Linear, T, std::move(betas));
}

NoiseSchedule make_cosine_schedule(int T, double offset) {
  if (T < 2) throw ConfigError("make_cosine_schedule: T must be >= 2, got " + std::to_string(T));
  if (!(offset > 0.0))
    throw ConfigError("make_cosine_schedule: offset must be > 0, got " + std::to_string(offset));
  auto raw = [&](int t) {
    const double c =
        std::cos((static_cast<double>(t) / T + offset) / (1.0 + offset) * std::numbers::pi / 2.0);
    return c * c;
  };
  const double norm = raw(0);
  std::vector<double> betas(T);
  double prev = 1.0;
  for (int t = 1; t <= T; ++t) {
    const double ab = raw(t) / norm;
    betas[t - 1] = std::min(1.0 - ab / prev, 0.999);
    prev = ab;
  }
  return finish_from_betas(ScheduleKind::Cosine, T, std::move(betas));
}

double snr(const NoiseSchedule& s, int t) {
  check_t(t, 0, s.T, "snr");
  if (t == 0) return std::numeric_limits<double>::infinity();
  const double ab = s.alpha_bars[t];
  return ab / (1.0 - ab);
}

NoiseSchedule default_schedule() {
  const int T = 50;
  const double scale = 1000.0 / T;
  return make_linear_schedule(T, 1e-4 * scale, 0.02 * scale);
}

}  // namespace adascope
