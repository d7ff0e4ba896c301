#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "adascope/schedule.hpp"

namespace adascope {

// Zero-mean Gaussian data covariance for the closed-form correlation layer.
// Construction validates: symmetric to 1e-12, eigenvalues >= -1e-10, diagonal > 0.
struct DataCovariance {
  Eigen::MatrixXd sigma;

  explicit DataCovariance(Eigen::MatrixXd m);
  int dim() const { return static_cast<int>(sigma.rows()); }

  // Factor of sigma + jitter*I with jitter = 1e-10 * trace/dim, so sampling
  // stays defined for PSD-but-singular inputs.
  Eigen::MatrixXd cholesky_with_jitter() const;
};

// Correlation between component i of x_t and component j of x_{t+tau};
// t+tau is the noisier endpoint.
struct CorrQuery {
  int t = 0;
  int tau = 0;  // >= 0
  int i = 0;
  int j = 0;
};

// Closed form:
//   [ sqrt(ab_{t+tau} ab_t) Sigma_ij + sqrt(ab_{t+tau}/ab_t) (1-ab_t) delta_ij ]
//   / sqrt( (ab_t Sigma_ii + 1-ab_t) (ab_{t+tau} Sigma_jj + 1-ab_{t+tau}) )
// Throws std::out_of_range when t+tau > s.T, NumericError on a vanishing denominator.
double corr_analytic(const NoiseSchedule& s, const DataCovariance& cov, const CorrQuery& q);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;  // (1 - rho_hat^2) / sqrt(n)
  std::int64_t samples = 0;
};

// Pearson estimate over n joint draws built as x_t = sqrt(ab_t) x_0 + sqrt(1-ab_t) e,
// x_{t+tau} = sqrt(ab_{t+tau}/ab_t) x_t + sqrt(1 - ab_{t+tau}/ab_t) e'.
// Deterministic per seed. Requires n >= 1000.
McEstimate corr_monte_carlo(const NoiseSchedule& s, const DataCovariance& cov, const CorrQuery& q,
                            std::int64_t n, std::uint64_t seed);

// u_t = 1 - corr(x_t^i, x_{t+tau}^i) for t = T-tau down to 0, i.e. ordered
// along the generation direction (noisy -> clean). tau = 0 yields all zeros.
std::vector<double> uncertainty_series(const NoiseSchedule& s, const DataCovariance& cov, int tau,
                                       int i);

// Exact noise prediction for x0 ~ N(0, Sigma):
//   eps*(x, t) = sqrt(1-ab_t) (ab_t Sigma + (1-ab_t) I)^{-1} x,  1 <= t <= T.
Eigen::VectorXd optimal_epsilon_gaussian(const NoiseSchedule& s, const DataCovariance& cov,
                                         const Eigen::VectorXd& x, int t);

// Same for data mean mu != 0: the time-t marginal is N(sqrt(ab_t) mu, ab_t Sigma + (1-ab_t) I),
// so the score acts on x - sqrt(ab_t) mu.
Eigen::VectorXd optimal_epsilon_gaussian(const NoiseSchedule& s, const DataCovariance& cov,
                                         const Eigen::VectorXd& mean, const Eigen::VectorXd& x,
                                         int t);

}  // namespace adascope
