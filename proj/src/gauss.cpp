#include "adascope/gauss.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "adascope/errors.hpp"
#include "adascope/rng.hpp"

namespace adascope {

namespace {

void check_query(const NoiseSchedule& s, int dim, const CorrQuery& q) {
  if (q.tau < 0) throw std::out_of_range("corr: tau must be >= 0, got " + std::to_string(q.tau));
  if (q.t < 0 || q.t + q.tau > s.T)
    throw std::out_of_range("corr: need 0 <= t and t+tau <= T, got t=" + std::to_string(q.t) +
                            " tau=" + std::to_string(q.tau) + " T=" + std::to_string(s.T));
  if (q.i < 0 || q.i >= dim || q.j < 0 || q.j >= dim)
    throw std::out_of_range("corr: component index outside [0, dim)");
}

}  // namespace

DataCovariance::DataCovariance(Eigen::MatrixXd m) : sigma(std::move(m)) {
  if (sigma.rows() != sigma.cols() || sigma.rows() == 0)
    throw NumericError("DataCovariance: sigma must be square and non-empty");
  const double asym = (sigma - sigma.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12)
    throw NumericError("DataCovariance: sigma not symmetric, max |S - S^T| = " +
                       std::to_string(asym));
  for (int i = 0; i < sigma.rows(); ++i)
    if (!(sigma(i, i) > 0.0))
      throw NumericError("DataCovariance: diagonal entry " + std::to_string(i) +
                         " not strictly positive");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw NumericError("DataCovariance: sigma not PSD, min eigenvalue = " +
                       std::to_string(es.eigenvalues().minCoeff()));
}

Eigen::MatrixXd DataCovariance::cholesky_with_jitter() const {
  const double jitter = 1e-10 * sigma.trace() / dim();
  Eigen::MatrixXd m = sigma + jitter * Eigen::MatrixXd::Identity(dim(), dim());
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw NumericError("DataCovariance: Cholesky failed even with jitter");
  return llt.matrixL();
}

double corr_analytic(const NoiseSchedule& s, const DataCovariance& cov, const CorrQuery& q) {
  check_query(s, cov.dim(), q);
  // Same timestep, same component: a variable correlates with itself exactly.
  if (q.tau == 0 && q.i == q.j) return 1.0;
  const double ab_lo = s.alpha_bar(q.t);
  const double ab_hi = s.alpha_bar(q.t + q.tau);
  double num = std::sqrt(ab_hi * ab_lo) * cov.sigma(q.i, q.j);
  if (q.i == q.j) num += std::sqrt(ab_hi / ab_lo) * (1.0 - ab_lo);
  const double var_i = ab_lo * cov.sigma(q.i, q.i) + (1.0 - ab_lo);
  const double var_j = ab_hi * cov.sigma(q.j, q.j) + (1.0 - ab_hi);
  if (!(var_i > 0.0) || !(var_j > 0.0))
    throw NumericError("corr_analytic: vanishing marginal variance");
  return num / std::sqrt(var_i * var_j);
}

McEstimate corr_monte_carlo(const NoiseSchedule& s, const DataCovariance& cov, const CorrQuery& q,
                            std::int64_t n, std::uint64_t seed) {
  check_query(s, cov.dim(), q);
  if (n < 1000) throw ConfigError("corr_monte_carlo: n must be >= 1000, got " + std::to_string(n));
  if (q.tau == 0 && q.i == q.j) return {1.0, 0.0, n};

  const int d = cov.dim();
  const double ab_lo = s.alpha_bar(q.t);
  const double ab_hi = s.alpha_bar(q.t + q.tau);
  const double c_sig = std::sqrt(ab_lo), c_noise = std::sqrt(1.0 - ab_lo);
  const double ratio = ab_hi / ab_lo;
  const double c_fwd = std::sqrt(ratio), c_fwd_noise = std::sqrt(1.0 - ratio);
  const Eigen::MatrixXd L = cov.cholesky_with_jitter();

  Rng rng(seed);
  Eigen::VectorXd xi(d), x0(d), xt(d), xtt(d);
  // Welford-style joint moments of (a, b) = (x_t[i], x_{t+tau}[j]).
  double ma = 0, mb = 0, m2a = 0, m2b = 0, cab = 0;
  for (std::int64_t k = 0; k < n; ++k) {
    for (int r = 0; r < d; ++r) xi[r] = rng.normal();
    x0 = L * xi;
    for (int r = 0; r < d; ++r) xt[r] = c_sig * x0[r] + c_noise * rng.normal();
    for (int r = 0; r < d; ++r) xtt[r] = c_fwd * xt[r] + c_fwd_noise * rng.normal();
    const double a = xt[q.i], b = xtt[q.j];
    const double cnt = static_cast<double>(k + 1);
    const double da = a - ma;
    ma += da / cnt;
    const double db = b - mb;
    mb += db / cnt;
    m2a += da * (a - ma);
    m2b += db * (b - mb);
    cab += da * (b - mb);
  }
  const double r = cab / std::sqrt(m2a * m2b);
  return {r, (1.0 - r * r) / std::sqrt(static_cast<double>(n)), n};
}

std::vector<double> uncertainty_series(const NoiseSchedule& s, const DataCovariance& cov, int tau,
                                       int i) {
  if (tau < 0 || tau > s.T)
    throw std::out_of_range("uncertainty_series: tau outside [0, T], got " + std::to_string(tau));
  std::vector<double> u;
  u.reserve(s.T - tau + 1);
  for (int t = s.T - tau; t >= 0; --t)
    u.push_back(1.0 - corr_analytic(s, cov, {.t = t, .tau = tau, .i = i, .j = i}));
  return u;
}

Eigen::VectorXd optimal_epsilon_gaussian(const NoiseSchedule& s, const DataCovariance& cov,
                                         const Eigen::VectorXd& x, int t) {
  return optimal_epsilon_gaussian(s, cov, Eigen::VectorXd::Zero(cov.dim()), x, t);
}

Eigen::VectorXd optimal_epsilon_gaussian(const NoiseSchedule& s, const DataCovariance& cov,
                                         const Eigen::VectorXd& mean, const Eigen::VectorXd& x,
                                         int t) {
  if (t < 1 || t > s.T)
    throw std::out_of_range("optimal_epsilon_gaussian: t outside [1, T], got " +
                            std::to_string(t));
  if (x.size() != cov.dim() || mean.size() != cov.dim())
    throw std::invalid_argument("optimal_epsilon_gaussian: dimension mismatch");
  const double ab = s.alpha_bar(t);
  const Eigen::MatrixXd m =
      ab * cov.sigma + (1.0 - ab) * Eigen::MatrixXd::Identity(cov.dim(), cov.dim());
  Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
  if (ldlt.info() != Eigen::Success)
    throw NumericError("optimal_epsilon_gaussian: singular marginal covariance");
  const Eigen::VectorXd centered = x - std::sqrt(ab) * mean;
  return std::sqrt(1.0 - ab) * ldlt.solve(centered);
}

}  // namespace adascope
