#include "adascope/rewards.hpp"

#include <cmath>
#include <memory>
#include <utility>

#include "adascope/errors.hpp"

namespace adascope {

double target_proximity_reward(const Eigen::VectorXd& x0, const Eigen::VectorXd& target,
                               double sigma_r) {
  if (sigma_r <= 0.0) throw ConfigError("target_proximity_reward: sigma_r must be positive");
  if (x0.size() != target.size()) {
    throw std::invalid_argument("target_proximity_reward: dimension mismatch");
  }
  return std::exp(-(x0 - target).squaredNorm() / (2.0 * sigma_r * sigma_r));
}

Eigen::VectorXd proximity_target(const ToyDataModel& data, int z, double offset) {
  const Eigen::VectorXd mu = data.mean(z);
  Eigen::VectorXd dir = Eigen::VectorXd::Zero(mu.size());
  const double n = mu.norm();
  if (n > 1e-12) {
    dir = mu / n;
  } else {
    dir[0] = 1.0;
  }
  return mu + offset * dir;
}

double norm_reward(const Eigen::VectorXd& x0, int sign) {
  if (sign != 1 && sign != -1) throw ConfigError("norm_reward: sign must be +1 or -1");
  return sign * x0.norm();
}

double alignment_score(const Eigen::VectorXd& x, const Eigen::VectorXd& anchor, double sigma_f) {
  if (sigma_f <= 0.0) throw ConfigError("alignment_score: sigma_f must be positive");
  if (x.size() != anchor.size()) throw std::invalid_argument("alignment_score: dimension mismatch");
  return std::exp(-(x - anchor).squaredNorm() / (2.0 * sigma_f * sigma_f));
}

double diversity_metric(const std::vector<Eigen::VectorXd>& samples) {
  if (samples.size() < 2) throw ConfigError("diversity_metric: need at least 2 samples");
  double sum = 0.0;
  long long pairs = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      sum += (samples[i] - samples[j]).norm();
      ++pairs;
    }
  }
  return sum / static_cast<double>(pairs);
}

double CompositeReward::Welford::standardize(double value) {
  ++count;
  const double delta = value - mean;
  mean += delta / static_cast<double>(count);
  m2 += delta * (value - mean);
  const double sd = std::sqrt(m2 / static_cast<double>(count));
  return (value - mean) / (sd + 1e-8);
}

CompositeReward::CompositeReward(std::vector<RewardFn> components, std::vector<double> weights)
    : components_(std::move(components)), weights_(std::move(weights)) {
  if (components_.empty()) throw ConfigError("composite reward: empty component list");
  if (components_.size() != weights_.size()) {
    throw ConfigError("composite reward: weights and components differ in length");
  }
  double total = 0.0;
  for (double w : weights_) {
    if (w < 0.0) throw ConfigError("composite reward: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("composite reward: weights must sum to 1");
  state_.resize(components_.size());
}

double CompositeReward::operator()(const Eigen::VectorXd& x0, int z) {
  double out = 0.0;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    out += weights_[i] * state_[i].standardize(components_[i](x0, z));
  }
  return out;
}

RewardFn make_reward(const std::string& name, const ToyDataModel& data,
                     const RewardParams& params) {
  if (name == "proximity") {
    std::vector<Eigen::VectorXd> targets;
    for (int z = 0; z < data.num_prompts(); ++z) {
      targets.push_back(proximity_target(data, z, params.target_offset));
    }
    const double sr = params.sigma_r;
    return [targets, sr](const Eigen::VectorXd& x0, int z) {
      return target_proximity_reward(x0, targets.at(static_cast<std::size_t>(z)), sr);
    };
  }
  if (name == "compress") {
    return [](const Eigen::VectorXd& x0, int) { return norm_reward(x0, -1); };
  }
  if (name == "incompress") {
    return [](const Eigen::VectorXd& x0, int) { return norm_reward(x0, +1); };
  }
  if (name == "composite") {
    std::vector<RewardFn> comps{make_reward("proximity", data, params),
                                make_reward("compress", data, params)};
    auto state = std::make_shared<CompositeReward>(std::move(comps),
                                                   std::vector<double>{0.5, 0.5});
    return [state](const Eigen::VectorXd& x0, int z) { return (*state)(x0, z); };
  }
  throw ConfigError("unknown reward name: " + name);
}

AlignmentFn make_alignment(const ToyDataModel& data, double sigma_f) {
  if (sigma_f <= 0.0) throw ConfigError("make_alignment: sigma_f must be positive");
  std::vector<Eigen::VectorXd> anchors;
  for (int z = 0; z < data.num_prompts(); ++z) anchors.push_back(data.mean(z));
  return [anchors, sigma_f](const Eigen::VectorXd& x, int z) {
    return alignment_score(x, anchors.at(static_cast<std::size_t>(z)), sigma_f);
  };
}

}  // namespace adascope
