#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "adascope/data.hpp"
#include "adascope/model.hpp"
#include "adascope/rng.hpp"
#include "adascope/schedule.hpp"

namespace adascope {

struct ForwardSample {
  Eigen::VectorXd x_t;
  Eigen::VectorXd eps;
};

// Closed-form q(x_t | x_0) draw; t = 0 returns (x0, zero noise).
ForwardSample forward_sample(const NoiseSchedule& s, const Eigen::VectorXd& x0, int t, Rng& rng);

// (x_t - sqrt(1-ab_t) eps) / sqrt(ab_t). Requires 1 <= t <= T; throws
// NumericError when ab_t < 1e-12 (cannot occur with default schedules).
Eigen::VectorXd pseudo_x0(const NoiseSchedule& s, const Eigen::VectorXd& x_t,
                          const Eigen::VectorXd& eps, int t);

// Sum over components of log N(a_i; mean_i, var). var == 0 marks the
// deterministic final transition; its log-probability is 0 by convention
// (unit point mass at the mean), which keeps stored values recomputable.
double gaussian_log_prob(const Eigen::VectorXd& a, const Eigen::VectorXd& mean, double var);

// Noise-predictor signature shared by the learned model and analytic baselines.
using EpsPredictor = std::function<Eigen::VectorXd(const Eigen::VectorXd& x, int t, int z)>;

// Full generation record. Transition t -> t-1 is stored at index t-1 of the
// per-step vectors; its MDP step is k = T - t.
struct Trajectory {
  int z = 0;
  int T = 0;
  std::vector<Eigen::VectorXd> states;   // size T+1, states[t] = x_t
  std::vector<Eigen::VectorXd> means;    // size T, reverse-transition means
  std::vector<double> variances;         // size T, fixed posterior variances; [0] == 0
  std::vector<double> log_probs;         // size T, density of the sampled next state
  std::vector<Eigen::VectorXd> x0_hats;  // size T, pseudo-x0 of x_t before stepping
  double final_reward = std::numeric_limits<double>::quiet_NaN();

  const Eigen::VectorXd& x0() const { return states[0]; }
};

// Ancestral reverse sampling from x_T ~ N(0, I). The final step t=1 -> 0 takes
// the deterministic mean (posterior variance is exactly zero there).
// Throws NumericError with the step index if any state turns non-finite.
Trajectory sample_trajectory(const EpsPredictor& eps, const NoiseSchedule& s, int x_dim, int z,
                             Rng& rng);

struct PretrainConfig {
  int steps = 3000;
  int batch = 64;
  double lr = 1e-3;
  double success_threshold = 1.0;  // on the tail-averaged loss
  int tail_window = 50;

  bool operator==(const PretrainConfig&) const = default;
};

struct PretrainResult {
  std::vector<double> loss_curve;  // one entry per optimizer step
  double smoothed_final = std::numeric_limits<double>::quiet_NaN();
  bool success = false;
};

// Standard noise-matching pretraining: minimize ||eps - eps_hat(x_t, t, z)||^2
// over t ~ U{1..T}, z ~ p(z), x0 ~ p(x0|z). Deterministic per seed; zero steps
// leave the model untouched and return an empty curve.
PretrainResult pretrain(DenoiserModel& model, const ToyDataModel& data, const NoiseSchedule& s,
                        const PretrainConfig& cfg, std::uint64_t seed);

}  // namespace adascope
