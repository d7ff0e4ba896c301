#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "adascope/data.hpp"
#include "adascope/mdp.hpp"
#include "adascope/model.hpp"
#include "adascope/rewards.hpp"
#include "adascope/schedule.hpp"
#include "adascope/scope.hpp"

namespace adascope {

enum class ScopeMode { Adaptive, Full, Fixed };

struct FinetuneConfig {
  ScopeMode scope_mode = ScopeMode::Adaptive;
  int fixed_start = 5;       // Fixed mode interval, inclusive MDP steps
  int fixed_end = 32;
  int traj_per_prompt = 8;   // M rollouts per prompt per round
  int inner_epochs = 2;      // gradient steps per rollout batch
  double clip = 0.2;         // importance-ratio clip c
  double adv_eps = 1e-8;     // advantage-normalization guard
  double lr = 1e-3;
  int rounds = 30;
  DetectParams detect;       // scope probe settings (Adaptive mode)

  bool operator==(const FinetuneConfig&) const = default;

  // Throws ConfigError listing every violation. Fixed intervals must have
  // fixed_start < fixed_end (single-step intervals are reserved for
  // internal consistency checks, not user configs).
  void validate(int T) const;
};

struct RoundMetrics {
  int round = 0;
  double mean_reward = 0.0;
  double std_reward = 0.0;
  long long grad_steps_cum = 0;  // cumulative per-trajectory steps touched
  double scope_start = 0.0;      // mean over prompts
  double scope_end = 0.0;
  double diversity = 0.0;        // mean per-prompt pairwise distance
  double wallclock_s = 0.0;      // cumulative, the only nondeterministic field
};

struct TrainingMetrics {
  std::vector<RoundMetrics> rounds;
  // per round, per prompt id: the interval used for that prompt
  std::vector<std::vector<std::pair<int, int>>> scopes;
};

// Per-trajectory advantages standardized within each prompt group:
// A_i = (r_i - mean_group) / (std_group + eps), population std.
// Throws ConfigError when any group has fewer than 2 members.
std::vector<double> compute_advantages(const std::vector<double>& rewards,
                                       const std::vector<int>& prompt_of, double eps = 1e-8);

// Per-step advantages: standardizes r_{i,k} across same-prompt trajectories
// independently at each step k. Backfilled rewards reduce to the
// per-trajectory advantage repeated over k; sparse rewards yield exact zeros
// before the final step. All trajectories must carry assigned rewards.
std::vector<std::vector<double>> advantages_from_rewards(const std::vector<MdpTrajectory>& batch,
                                                         double eps = 1e-8);

// Inclusive per-prompt training intervals in MDP steps.
struct ScopeSet {
  std::vector<std::pair<int, int>> intervals;  // indexed by prompt id

  const std::pair<int, int>& for_prompt(int z) const {
    return intervals.at(static_cast<std::size_t>(z));
  }
  static ScopeSet uniform(int num_prompts, int a, int b);
};

// Clipped importance-weighted surrogate over in-scope steps:
//   loss = -(1/N) sum_i sum_{k in scope_i} min(rho A, clip(rho, 1-c, 1+c) A)
// with rho = exp(l_new - l_old); l_new re-evaluates the stored action under
// the current model with the behavior variances. Deterministic final steps
// (variance 0) keep rho = 1 and contribute no gradient. Steps whose
// advantage is exactly 0 are skipped; they contribute nothing to the loss or
// gradient either way, which makes scope masking and scope restriction
// bit-identical. When grad is non-null it receives the accumulated
// d(loss)/d(params). Throws TrainingError on a non-finite loss.
double surrogate_loss(const DenoiserModel& model, const std::vector<MdpTrajectory>& batch,
                      const std::vector<std::vector<double>>& advantages, const ScopeSet& scopes,
                      const NoiseSchedule& s, double clip, std::vector<double>* grad);

struct StepStats {
  double loss = 0.0;
  long long steps_touched = 0;  // sum over trajectories of in-scope step counts
};

// One optimizer step on the surrogate.
StepStats policy_gradient_step(DenoiserModel& model, Adam& opt,
                               const std::vector<MdpTrajectory>& batch,
                               const std::vector<std::vector<double>>& advantages,
                               const ScopeSet& scopes, const NoiseSchedule& s,
                               const FinetuneConfig& cfg);

// Full training loop: per round, refresh per-prompt scopes when Adaptive
// (every cfg.detect.refresh_every rounds), roll out M trajectories per
// prompt, assign backfilled rewards, standardize per step, and take
// cfg.inner_epochs clipped gradient steps on the batch. Deterministic per
// (config, seed) except for wall-clock. The model is updated in place.
TrainingMetrics finetune(DenoiserModel& model, const ToyDataModel& data, const NoiseSchedule& s,
                         const RewardFn& reward, const AlignmentFn& align,
                         const FinetuneConfig& cfg, std::uint64_t seed);

}  // namespace adascope
