#pragma once

#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "adascope/data.hpp"
#include "adascope/diffusion.hpp"
#include "adascope/model.hpp"
#include "adascope/rewards.hpp"
#include "adascope/schedule.hpp"

namespace adascope {

enum class GainKind { Structural, Preference };

// Per-step gain series over MDP steps k = 1..T-1: entry k-1 holds the change
// of a probe score between consecutive partially-denoised estimates,
// averaged over a probe batch. smoothed is the EMA copy the detectors scan.
struct GainSeries {
  GainKind kind = GainKind::Structural;
  std::vector<double> values;
  std::vector<double> smoothed;
};

struct DetectParams {
  double rho = 0.05;     // relative threshold: epsilon = rho * max |D|
  int window = 3;        // persistence window w
  double ema = 0.3;      // EMA weight of the newest observation
  int m_min = 5;         // minimum scope width in MDP steps
  int probe_batch = 16;  // rollouts per scope probe
  int refresh_every = 5; // rounds between scope recomputations

  bool operator==(const DetectParams&) const = default;
};

struct DetectDiagnostics {
  double epsilon = 0.0;            // absolute threshold used by the scan
  std::vector<double> first_diffs; // D_j = smoothed[j+1] - smoothed[j]
  int scan_from = 0;               // first index the scan considered
  bool fallback = false;           // no qualifying window existed
  bool trivial = false;            // all-zero input series
};

// Selected fine-tuning interval [t_start, t_end] in MDP steps. Always
// satisfies 0 <= t_start <= t_end <= T-1; width >= m_min unless a detector
// fell back or the probe series was trivial.
struct ScopeDecision {
  int t_start = 0;
  int t_end = 0;
  int z = 0;
  bool per_prompt = true;
  DetectDiagnostics start_diag;
  DetectDiagnostics end_diag;
};

// EMA with smoothed[0] = values[0] and
// smoothed[i] = ema * values[i] + (1 - ema) * smoothed[i-1].
std::vector<double> ema_smooth(const std::vector<double>& values, double ema);

// Structure-formation gains: per step k = 1..T-1, the batch mean of
// f(x0_hat at step k) - f(x0_hat at step k-1) (less noisy minus more noisy).
// Throws ConfigError on an empty batch, std::invalid_argument on mixed T,
// NumericError on non-finite scores.
GainSeries structural_gain_series(const std::vector<Trajectory>& trajs, const AlignmentFn& f,
                                  double ema = 0.3);

// Same construction with the reward g in place of f.
GainSeries preference_gain_series(const std::vector<Trajectory>& trajs, const RewardFn& g,
                                  double ema = 0.3);

// Scans first differences D of the smoothed series for the first window of
// params.window consecutive entries with |D_j| <= rho * max|D|. The scan
// begins at the peak-rate index argmax|D|: a quiet stretch before any change
// has happened is not the sought plateau, which by construction can only
// follow the fastest change. Returns the found index, or 0 with the fallback
// flag when no window qualifies. An all-zero series returns 0 with the
// trivial flag. Requires series length >= window+1.
std::pair<int, DetectDiagnostics> detect_start(const GainSeries& gs, const DetectParams& params);

// Same scan restricted to k >= max(argmax|D|, t_start + m_min). Returns the
// first qualifying index, else T-1 (the last MDP step) with the fallback
// flag. An all-zero series returns the earliest admissible step with the
// trivial flag, keeping t_start <= t_end intact.
std::pair<int, DetectDiagnostics> detect_end(const GainSeries& gp, int t_start,
                                             const DetectParams& params);

// Full probe record: both gain series plus the decision made from them.
struct ProbeResult {
  GainSeries structural;
  GainSeries preference;
  ScopeDecision decision;
};

// Rolls out params.probe_batch trajectories for prompt z with the frozen
// model, builds both gain series and runs both detectors. Deterministic in
// (seed, z): rollout i draws from derive_seed(derive_seed(seed, "probe", z),
// "rollout", i).
ProbeResult probe_scope(const DenoiserModel& model, const ToyDataModel& data,
                        const NoiseSchedule& s, int z, const AlignmentFn& f, const RewardFn& g,
                        const DetectParams& params, std::uint64_t seed);

// probe_scope reduced to its decision.
ScopeDecision select_scope(const DenoiserModel& model, const ToyDataModel& data,
                           const NoiseSchedule& s, int z, const AlignmentFn& f, const RewardFn& g,
                           const DetectParams& params, std::uint64_t seed);

// Per-prompt decision store with a staleness counter. A prompt is stale when
// it has no entry or its entry is refresh_every or more ticks old; tick()
// advances one training round.
class ScopeCache {
 public:
  explicit ScopeCache(int refresh_every);
  bool stale(int z) const;
  const ScopeDecision& get(int z) const;  // throws std::out_of_range if absent
  void put(int z, ScopeDecision decision);
  void tick();

 private:
  struct Entry {
    ScopeDecision decision;
    int age = 0;
  };
  int refresh_every_;
  std::unordered_map<int, Entry> entries_;
};

}  // namespace adascope
