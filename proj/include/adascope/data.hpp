#pragma once

#include <Eigen/Dense>
#include <vector>

#include "adascope/rng.hpp"

namespace adascope {

// Prompt-conditioned data: p(x0 | z) = N(mu_z, sigma^2 I), uniform p(z).
struct ToyDataModel {
  int dim = 2;
  double sigma = 0.3;
  std::vector<Eigen::VectorXd> means;  // one per prompt

  int num_prompts() const { return static_cast<int>(means.size()); }
  const Eigen::VectorXd& mean(int z) const;

  int sample_prompt(Rng& rng) const;
  Eigen::VectorXd sample(int z, Rng& rng) const;

  // Modes evenly spaced on a circle of the given radius in the first two
  // coordinates. Requires dim >= 2, num_prompts >= 1, sigma > 0.
  static ToyDataModel circle(int dim, int num_prompts, double radius, double sigma);

  // dim=2, K=4, radius 2, sigma 0.3.
  static ToyDataModel default_task();
};

}  // namespace adascope
