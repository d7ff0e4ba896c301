#include "adascope/diffusion.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "adascope/errors.hpp"

namespace adascope {

ForwardSample forward_sample(const NoiseSchedule& s, const Eigen::VectorXd& x0, int t, Rng& rng) {
  if (t < 0 || t > s.T)
    throw std::out_of_range("forward_sample: t outside [0, T], got " + std::to_string(t));
  const auto d = x0.size();
  if (t == 0) return {x0, Eigen::VectorXd::Zero(d)};
  const double ab = s.alpha_bar(t);
  Eigen::VectorXd eps(d);
  for (Eigen::Index i = 0; i < d; ++i) eps[i] = rng.normal();
  return {std::sqrt(ab) * x0 + std::sqrt(1.0 - ab) * eps, eps};
}

Eigen::VectorXd pseudo_x0(const NoiseSchedule& s, const Eigen::VectorXd& x_t,
                          const Eigen::VectorXd& eps, int t) {
  if (t < 1 || t > s.T)
    throw std::out_of_range("pseudo_x0: t outside [1, T], got " + std::to_string(t));
  const double ab = s.alpha_bar(t);
  if (ab < 1e-12)
    throw NumericError("pseudo_x0: alpha_bar below 1e-12 at t=" + std::to_string(t));
  return (x_t - std::sqrt(1.0 - ab) * eps) / std::sqrt(ab);
}

double gaussian_log_prob(const Eigen::VectorXd& a, const Eigen::VectorXd& mean, double var) {
  if (a.size() != mean.size()) throw std::invalid_argument("gaussian_log_prob: size mismatch");
  if (var < 0.0) throw std::invalid_argument("gaussian_log_prob: negative variance");
  if (var == 0.0) return 0.0;
  const double log_norm = -0.5 * std::log(2.0 * std::numbers::pi * var);
  double lp = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double d = a[i] - mean[i];
    lp += log_norm - d * d / (2.0 * var);
  }
  return lp;
}

Trajectory sample_trajectory(const EpsPredictor& eps, const NoiseSchedule& s, int x_dim, int z,
                             Rng& rng) {
  if (x_dim < 1) throw ConfigError("sample_trajectory: x_dim must be >= 1");
  Trajectory tr;
  tr.z = z;
  tr.T = s.T;
  tr.states.resize(s.T + 1);
  tr.means.resize(s.T);
  tr.variances.resize(s.T);
  tr.log_probs.resize(s.T);
  tr.x0_hats.resize(s.T);

  Eigen::VectorXd x(x_dim);
  for (int i = 0; i < x_dim; ++i) x[i] = rng.normal();
  tr.states[s.T] = x;

  for (int t = s.T; t >= 1; --t) {
    const Eigen::VectorXd e = eps(x, t, z);
    if (!e.allFinite())
      throw NumericError("sample_trajectory: non-finite prediction at t=" + std::to_string(t));
    const double beta = s.beta(t);
    const double ab = s.alpha_bar(t);
    const Eigen::VectorXd mean = (x - beta / std::sqrt(1.0 - ab) * e) / std::sqrt(s.alpha(t));
    const double var = s.posterior_var(t);
    Eigen::VectorXd next = mean;
    if (var > 0.0) {
      const double sd = std::sqrt(var);
      for (int i = 0; i < x_dim; ++i) next[i] += sd * rng.normal();
    }
    if (!next.allFinite())
      throw NumericError("sample_trajectory: non-finite state at t=" + std::to_string(t - 1));
    tr.means[t - 1] = mean;
    tr.variances[t - 1] = var;
    tr.log_probs[t - 1] = gaussian_log_prob(next, mean, var);
    tr.x0_hats[t - 1] = pseudo_x0(s, x, e, t);
    tr.states[t - 1] = next;
    x = next;
  }
  return tr;
}

PretrainResult pretrain(DenoiserModel& model, const ToyDataModel& data, const NoiseSchedule& s,
                        const PretrainConfig& cfg, std::uint64_t seed) {
  if (cfg.steps < 0) throw ConfigError("pretrain: steps must be >= 0");
  if (cfg.batch < 1) throw ConfigError("pretrain: batch must be >= 1");
  if (!(cfg.lr > 0.0)) throw ConfigError("pretrain: lr must be > 0");
  if (data.dim != model.dims().x_dim || data.num_prompts() != model.dims().num_prompts)
    throw ConfigError("pretrain: model and data shapes disagree");

  PretrainResult res;
  if (cfg.steps == 0) return res;

  Rng rng(derive_seed(seed, "pretrain"));
  Adam opt(cfg.lr);
  std::vector<double> grad(model.param_count(), 0.0);
  res.loss_curve.reserve(cfg.steps);

  for (int step = 0; step < cfg.steps; ++step) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double loss = 0.0;
    for (int b = 0; b < cfg.batch; ++b) {
      const int z = data.sample_prompt(rng);
      const Eigen::VectorXd x0 = data.sample(z, rng);
      const int t = rng.uniform_int(1, s.T);
      const auto fs = forward_sample(s, x0, t, rng);
      const auto cache = model.forward(fs.x_t, t, z);
      const Eigen::VectorXd resid = cache.out - fs.eps;
      loss += resid.squaredNorm() / cfg.batch;
      model.backward(cache, 2.0 / cfg.batch * resid, grad);
    }
    if (!std::isfinite(loss))
      throw TrainingError("pretrain: non-finite loss at step " + std::to_string(step));
    opt.step(model.params(), grad);
    res.loss_curve.push_back(loss);
  }

  const int tail = std::min<int>(cfg.tail_window, static_cast<int>(res.loss_curve.size()));
  double acc = 0.0;
  for (int i = 0; i < tail; ++i) acc += res.loss_curve[res.loss_curve.size() - 1 - i];
  res.smoothed_final = acc / tail;
  res.success = res.smoothed_final < cfg.success_threshold;
  return res;
}

}  // namespace adascope
