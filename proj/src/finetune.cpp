#include "adascope/finetune.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <string>

#include "adascope/diffusion.hpp"
#include "adascope/errors.hpp"
#include "adascope/rng.hpp"

namespace adascope {

void FinetuneConfig::validate(int T) const {
  std::string problems;
  auto add = [&problems](const std::string& msg) {
    if (!problems.empty()) problems += "; ";
    problems += msg;
  };
  if (traj_per_prompt < 2) add("traj_per_prompt must be >= 2 (advantages need variance)");
  if (inner_epochs < 1) add("inner_epochs must be >= 1");
  if (clip <= 0.0) add("clip must be positive");
  if (adv_eps <= 0.0) add("adv_eps must be positive");
  if (lr <= 0.0) add("lr must be positive");
  if (rounds < 0) add("rounds must be nonnegative");
  if (scope_mode == ScopeMode::Fixed) {
    if (fixed_start < 0 || fixed_end > T - 1) add("fixed interval out of [0, T-1]");
    if (fixed_start >= fixed_end) add("fixed interval needs fixed_start < fixed_end");
  }
  if (scope_mode == ScopeMode::Adaptive) {
    if (detect.probe_batch < 1) add("detect.probe_batch must be >= 1");
    if (detect.refresh_every < 1) add("detect.refresh_every must be >= 1");
    if (detect.m_min < 0) add("detect.m_min must be nonnegative");
    if (detect.window < 1) add("detect.window must be >= 1");
    if (detect.rho < 0.0) add("detect.rho must be nonnegative");
    if (detect.ema <= 0.0 || detect.ema > 1.0) add("detect.ema must be in (0, 1]");
  }
  if (!problems.empty()) throw ConfigError("finetune config: " + problems);
}

std::vector<double> compute_advantages(const std::vector<double>& rewards,
                                       const std::vector<int>& prompt_of, double eps) {
  if (rewards.size() != prompt_of.size()) {
    throw std::invalid_argument("compute_advantages: length mismatch");
  }
  std::map<int, std::pair<double, long long>> acc;  // prompt -> (sum, count)
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    auto& [sum, count] = acc[prompt_of[i]];
    sum += rewards[i];
    ++count;
  }
  std::map<int, std::pair<double, double>> stats;  // prompt -> (mean, std)
  for (const auto& [z, sc] : acc) {
    if (sc.second < 2) throw ConfigError("compute_advantages: singleton prompt group");
    stats[z].first = sc.first / static_cast<double>(sc.second);
  }
  std::map<int, double> sq;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    const double d = rewards[i] - stats[prompt_of[i]].first;
    sq[prompt_of[i]] += d * d;
  }
  for (auto& [z, ms] : stats) ms.second = std::sqrt(sq[z] / static_cast<double>(acc[z].second));
  std::vector<double> out(rewards.size());
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    const auto& [mean, sd] = stats[prompt_of[i]];
    out[i] = (rewards[i] - mean) / (sd + eps);
  }
  return out;
}

std::vector<std::vector<double>> advantages_from_rewards(const std::vector<MdpTrajectory>& batch,
                                                         double eps) {
  if (batch.empty()) throw ConfigError("advantages_from_rewards: empty batch");
  const int T = batch[0].T;
  std::vector<int> prompt_of;
  prompt_of.reserve(batch.size());
  for (const auto& m : batch) {
    if (m.scheme == RewardScheme::Unassigned || m.rewards.size() != static_cast<std::size_t>(T)) {
      throw std::invalid_argument("advantages_from_rewards: rewards not assigned");
    }
    if (m.T != T) throw std::invalid_argument("advantages_from_rewards: mixed T");
    prompt_of.push_back(m.z);
  }
  std::vector<std::vector<double>> out(batch.size(), std::vector<double>(static_cast<std::size_t>(T)));
  std::vector<double> step_rewards(batch.size());
  for (int k = 0; k < T; ++k) {
    for (std::size_t i = 0; i < batch.size(); ++i) {
      step_rewards[i] = batch[i].rewards[static_cast<std::size_t>(k)];
    }
    const auto adv = compute_advantages(step_rewards, prompt_of, eps);
    for (std::size_t i = 0; i < batch.size(); ++i) out[i][static_cast<std::size_t>(k)] = adv[i];
  }
  return out;
}

ScopeSet ScopeSet::uniform(int num_prompts, int a, int b) {
  if (num_prompts < 1 || a < 0 || a > b) throw ConfigError("ScopeSet: invalid interval");
  ScopeSet set;
  set.intervals.assign(static_cast<std::size_t>(num_prompts), {a, b});
  return set;
}

double surrogate_loss(const DenoiserModel& model, const std::vector<MdpTrajectory>& batch,
                      const std::vector<std::vector<double>>& advantages, const ScopeSet& scopes,
                      const NoiseSchedule& s, double clip, std::vector<double>* grad) {
  if (batch.size() != advantages.size()) {
    throw std::invalid_argument("surrogate_loss: batch/advantage size mismatch");
  }
  if (clip <= 0.0) throw ConfigError("surrogate_loss: clip must be positive");
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& m = batch[i];
    const auto& adv = advantages[i];
    if (adv.size() != static_cast<std::size_t>(m.T)) {
      throw std::invalid_argument("surrogate_loss: advantage length mismatch");
    }
    const auto [a_k, b_k] = scopes.for_prompt(m.z);
    if (a_k < 0 || a_k > b_k || b_k > m.T - 1) {
      throw std::invalid_argument("surrogate_loss: scope out of range");
    }
    for (int k = a_k; k <= b_k; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      const double advantage = adv[ku];
      // zero advantage contributes exactly nothing; skipping keeps masked and
      // restricted training bit-identical and avoids dead network passes
      if (advantage == 0.0) continue;
      const int t = m.diffusion_t(k);  // t = T - k
      const double var = m.variances[ku];
      const auto& action = m.action(k);
      double ratio = 1.0;
      DenoiserModel::Cache cache;
      Eigen::VectorXd mean_new;
      if (var > 0.0) {
        cache = model.forward(m.state_x(k), t, m.z);
        const double ab = s.alpha_bar(t);
        const double coef = s.beta(t) / std::sqrt(1.0 - ab);
        mean_new = (m.state_x(k) - coef * cache.out) / std::sqrt(s.alpha(t));
        const double l_new = gaussian_log_prob(action, mean_new, var);
        ratio = std::exp(l_new - m.log_probs[ku]);
      }
      // var == 0: the behavior convention pins both log-probs to 0, so the
      // ratio stays 1 and the term is constant in the parameters
      const double unclipped = ratio * advantage;
      const double clipped = std::clamp(ratio, 1.0 - clip, 1.0 + clip) * advantage;
      loss += -inv_n * std::min(unclipped, clipped);
      if (grad != nullptr && var > 0.0 && unclipped <= clipped) {
        // d loss / d mean_new = -(1/N) rho A (action - mean)/var; the mean is
        // linear in the prediction with slope -beta/(sqrt(1-ab) sqrt(alpha))
        const double ab = s.alpha_bar(t);
        const double coef = s.beta(t) / (std::sqrt(1.0 - ab) * std::sqrt(s.alpha(t)));
        const Eigen::VectorXd d_out =
            inv_n * ratio * advantage * coef * (action - mean_new) / var;
        model.backward(cache, d_out, *grad);
      }
    }
  }
  if (!std::isfinite(loss)) throw TrainingError("surrogate_loss: non-finite loss");
  return loss;
}

StepStats policy_gradient_step(DenoiserModel& model, Adam& opt,
                               const std::vector<MdpTrajectory>& batch,
                               const std::vector<std::vector<double>>& advantages,
                               const ScopeSet& scopes, const NoiseSchedule& s,
                               const FinetuneConfig& cfg) {
  StepStats stats;
  std::vector<double> grad(static_cast<std::size_t>(model.param_count()), 0.0);
  stats.loss = surrogate_loss(model, batch, advantages, scopes, s, cfg.clip, &grad);
  for (const auto& m : batch) {
    const auto [a, b] = scopes.for_prompt(m.z);
    stats.steps_touched += b - a + 1;
  }
  opt.step(model.params(), grad);
  return stats;
}

TrainingMetrics finetune(DenoiserModel& model, const ToyDataModel& data, const NoiseSchedule& s,
                         const RewardFn& reward, const AlignmentFn& align,
                         const FinetuneConfig& cfg, std::uint64_t seed) {
  cfg.validate(s.T);
  const int K = data.num_prompts();
  const int M = cfg.traj_per_prompt;
  TrainingMetrics metrics;
  Adam opt(cfg.lr);
  ScopeCache cache(cfg.detect.refresh_every);
  long long grad_steps_cum = 0;
  const auto started = std::chrono::steady_clock::now();

  for (int round = 0; round < cfg.rounds; ++round) {
    // resolve per-prompt scopes for this round
    ScopeSet scopes;
    scopes.intervals.resize(static_cast<std::size_t>(K));
    if (cfg.scope_mode == ScopeMode::Full) {
      scopes = ScopeSet::uniform(K, 0, s.T - 1);
    } else if (cfg.scope_mode == ScopeMode::Fixed) {
      scopes = ScopeSet::uniform(K, cfg.fixed_start, cfg.fixed_end);
    } else {
      const std::uint64_t scope_seed =
          derive_seed(seed, "scope-round", static_cast<std::uint64_t>(round));
      for (int z = 0; z < K; ++z) {
        if (cache.stale(z)) {
          cache.put(z, select_scope(model, data, s, z, align, reward, cfg.detect, scope_seed));
        }
        const auto& d = cache.get(z);
        scopes.intervals[static_cast<std::size_t>(z)] = {d.t_start, d.t_end};
      }
    }

    // frozen-policy rollouts, M per prompt
    const std::uint64_t round_seed =
        derive_seed(seed, "round", static_cast<std::uint64_t>(round));
    EpsPredictor pred = [&model](const Eigen::VectorXd& x, int t, int z) {
      return model.predict(x, t, z);
    };
    std::vector<MdpTrajectory> batch;
    batch.reserve(static_cast<std::size_t>(K * M));
    std::vector<double> finals;
    finals.reserve(batch.capacity());
    std::vector<std::vector<Eigen::VectorXd>> per_prompt_x0(static_cast<std::size_t>(K));
    for (int z = 0; z < K; ++z) {
      for (int i = 0; i < M; ++i) {
        Rng rng(derive_seed(round_seed, "rollout", static_cast<std::uint64_t>(z * M + i)));
        auto tr = sample_trajectory(pred, s, data.dim, z, rng);
        const double r = reward(tr.x0(), z);
        if (!std::isfinite(r)) throw TrainingError("finetune: non-finite reward");
        finals.push_back(r);
        per_prompt_x0[static_cast<std::size_t>(z)].push_back(tr.x0());
        batch.push_back(assign_backfilled_reward(to_mdp(tr), r));
      }
    }
    const auto advantages = advantages_from_rewards(batch, cfg.adv_eps);

    for (int epoch = 0; epoch < cfg.inner_epochs; ++epoch) {
      const auto stats = policy_gradient_step(model, opt, batch, advantages, scopes, s, cfg);
      grad_steps_cum += stats.steps_touched;
      if (!std::isfinite(stats.loss)) {
        throw TrainingError("finetune: non-finite loss in round " + std::to_string(round));
      }
    }

    RoundMetrics row;
    row.round = round;
    double mean = 0.0;
    for (double r : finals) mean += r;
    mean /= static_cast<double>(finals.size());
    double var = 0.0;
    for (double r : finals) var += (r - mean) * (r - mean);
    row.mean_reward = mean;
    row.std_reward = std::sqrt(var / static_cast<double>(finals.size()));
    row.grad_steps_cum = grad_steps_cum;
    double sa = 0.0, sb = 0.0, div = 0.0;
    for (int z = 0; z < K; ++z) {
      sa += scopes.intervals[static_cast<std::size_t>(z)].first;
      sb += scopes.intervals[static_cast<std::size_t>(z)].second;
      div += diversity_metric(per_prompt_x0[static_cast<std::size_t>(z)]);
    }
    row.scope_start = sa / K;
    row.scope_end = sb / K;
    row.diversity = div / K;
    row.wallclock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    metrics.rounds.push_back(row);
    metrics.scopes.push_back(scopes.intervals);
    cache.tick();
  }
  return metrics;
}

}  // namespace adascope
