#include "adascope/data.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "adascope/errors.hpp"

namespace adascope {

const Eigen::VectorXd& ToyDataModel::mean(int z) const {
  if (z < 0 || z >= num_prompts())
    throw std::out_of_range("ToyDataModel: prompt " + std::to_string(z) + " outside [0, " +
                            std::to_string(num_prompts()) + ")");
  return means[z];
}

int ToyDataModel::sample_prompt(Rng& rng) const { return rng.uniform_int(0, num_prompts() - 1); }

Eigen::VectorXd ToyDataModel::sample(int z, Rng& rng) const {
  Eigen::VectorXd x = mean(z);
  for (int i = 0; i < dim; ++i) x[i] += sigma * rng.normal();
  return x;
}

ToyDataModel ToyDataModel::circle(int dim, int num_prompts, double radius, double sigma) {
  if (dim < 2) throw ConfigError("ToyDataModel: circle layout needs dim >= 2");
  if (num_prompts < 1) throw ConfigError("ToyDataModel: need at least one prompt");
  if (!(sigma > 0.0)) throw ConfigError("ToyDataModel: sigma must be > 0");
  ToyDataModel d;
  d.dim = dim;
  d.sigma = sigma;
  d.means.resize(num_prompts);
  for (int z = 0; z < num_prompts; ++z) {
    const double a = 2.0 * std::numbers::pi * z / num_prompts;
    Eigen::VectorXd m = Eigen::VectorXd::Zero(dim);
    m[0] = radius * std::cos(a);
    m[1] = radius * std::sin(a);
    d.means[z] = m;
  }
  return d;
}

ToyDataModel ToyDataModel::default_task() { return circle(2, 4, 2.0, 0.3); }

}  // namespace adascope
