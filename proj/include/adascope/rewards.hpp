#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "adascope/data.hpp"

namespace adascope {

// Terminal-sample objective r(x0, z).
using RewardFn = std::function<double(const Eigen::VectorXd&, int)>;
// Bounded structure score f(x, z) in [0,1], maximal at the prompt anchor.
using AlignmentFn = std::function<double(const Eigen::VectorXd&, int)>;

// exp(-|x0 - target|^2 / (2 sigma_r^2)), in (0,1]. sigma_r must be positive.
double target_proximity_reward(const Eigen::VectorXd& x0, const Eigen::VectorXd& target,
                               double sigma_r);

// Reward target for a prompt: the pretraining mode pushed outward by `offset`
// along its radial direction (first axis when the mode sits at the origin).
// The shift makes the pretrained sampler deliberately suboptimal.
Eigen::VectorXd proximity_target(const ToyDataModel& data, int z, double offset);

// sign * |x0|_2 with sign in {-1 (compressibility analog), +1 (incompressibility)}.
double norm_reward(const Eigen::VectorXd& x0, int sign);

// exp(-|x - anchor|^2 / (2 sigma_f^2)), in (0,1]. sigma_f must be positive.
double alignment_score(const Eigen::VectorXd& x, const Eigen::VectorXd& anchor, double sigma_f);

// Mean pairwise Euclidean distance; needs at least 2 samples.
double diversity_metric(const std::vector<Eigen::VectorXd>& samples);

// Weighted sum of running-standardized components. Each evaluation first
// folds the raw component value into that component's running mean/variance,
// then emits (value - mean) / (std + 1e-8) with the population std. State
// advances in evaluation order, so sequences are deterministic.
class CompositeReward {
 public:
  CompositeReward(std::vector<RewardFn> components, std::vector<double> weights);
  double operator()(const Eigen::VectorXd& x0, int z);

 private:
  struct Welford {
    long long count = 0;
    double mean = 0.0;
    double m2 = 0.0;
    double standardize(double value);  // update, then standardize
  };
  std::vector<RewardFn> components_;
  std::vector<double> weights_;
  std::vector<Welford> state_;
};

struct RewardParams {
  double sigma_r = 0.6;
  double target_offset = 0.8;

  bool operator==(const RewardParams&) const = default;
};

// Catalog used by the CLI: proximity | compress | incompress | composite.
// composite = equal-weight proximity + compressibility, running-normalized.
// Unknown names throw ConfigError. Composite closures share mutable
// normalization state across copies.
RewardFn make_reward(const std::string& name, const ToyDataModel& data,
                     const RewardParams& params = {});

// Mode-anchored structure score with width sigma_f.
AlignmentFn make_alignment(const ToyDataModel& data, double sigma_f = 0.5);

}  // namespace adascope
